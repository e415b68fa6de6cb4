#include "npiv/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "npiv/errors.hpp"

namespace npiv {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_unit(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1]");
  }
}

}  // namespace

void fill_basis(double t, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  const double c1 = std::cos(2.0 * kPi * t);
  const double s1 = std::sin(2.0 * kPi * t);
  double c = c1;
  double s = s1;
  // Angle addition; re-seeded from libm every 32 steps to bound drift.
  for (std::size_t k = 1; 2 * k - 1 < out.size(); ++k) {
    if (k % 32 == 0) {
      c = std::cos(2.0 * kPi * static_cast<double>(k) * t);
      s = std::sin(2.0 * kPi * static_cast<double>(k) * t);
    }
    out[2 * k - 1] = kSqrt2 * c;
    if (2 * k < out.size()) out[2 * k] = kSqrt2 * s;
    const double cn = c * c1 - s * s1;
    s = s * c1 + c * s1;
    c = cn;
  }
}

BasisVector eval_basis(double t, int m) {
  check_unit(t, "t");
  if (m < 1) throw DomainError("basis dimension m must be >= 1");
  BasisVector v{t, std::vector<double>(static_cast<std::size_t>(m))};
  v.values[0] = 1.0;
  for (int j = 2; j <= m; ++j) {
    const double x = 2.0 * kPi * static_cast<double>(j / 2) * t;
    v.values[j - 1] = kSqrt2 * (j % 2 == 0 ? std::cos(x) : std::sin(x));
  }
  return v;
}

double Representer::max_sq_upto(int m) const {
  double best = 0.0;
  const int upto = std::min(m, size());
  for (int j = 0; j < upto; ++j) best = std::max(best, coeffs[j] * coeffs[j]);
  return best;
}

Representer representer_coeffs(const RepresenterKind& kind, int jmax) {
  if (jmax < 1) throw DomainError("Jmax must be >= 1");
  const auto n = static_cast<std::size_t>(jmax);
  return std::visit(
      overloaded{
          [&](const PointEval& p) {
            check_unit(p.t0, "t0");
            Representer r{kind, std::vector<double>(n), 0.0};
            fill_basis(p.t0, r.coeffs);
            return r;
          },
          [&](const Average& a) {
            if (!(a.b > 0.0 && a.b < 1.0)) throw DomainError("average endpoint b must lie in (0,1)");
            Representer r{kind, std::vector<double>(n), 1.0};
            r.coeffs[0] = a.b;
            // integral_0^b of sqrt(2) cos / sin (2 pi j t)
            for (std::size_t k = 1; 2 * k - 1 < n; ++k) {
              const double jk = static_cast<double>(k);
              const double arg = 2.0 * kPi * jk * a.b;
              r.coeffs[2 * k - 1] = std::sin(arg) / (kSqrt2 * kPi * jk);
              if (2 * k < n) r.coeffs[2 * k] = (1.0 - std::cos(arg)) / (kSqrt2 * kPi * jk);
            }
            return r;
          },
          [&](const WeightedAvgDeriv&) {
            // h(t) = 4(1 - 2t), derivative of H(t) = 1 - (2t - 1)^2
            Representer r{kind, std::vector<double>(n, 0.0), 1.0};
            for (std::size_t k = 1; 2 * k < n; ++k) {
              r.coeffs[2 * k] = 4.0 * kSqrt2 / (kPi * static_cast<double>(k));
            }
            return r;
          },
          [&](const Custom& c) {
            if (c.coeffs.empty()) throw DomainError("custom representer needs at least one coefficient");
            for (double v : c.coeffs) {
              if (!std::isfinite(v)) throw DomainError("custom representer coefficients must be finite");
            }
            Representer r{kind, c.coeffs, c.decay_s};
            if (r.coeffs.size() < n) r.coeffs.resize(n, 0.0);
            return r;
          },
      },
      kind);
}

double functional_of(std::span<const double> phi, const Representer& h) {
  if (phi.size() != h.coeffs.size()) {
    throw DimensionError("functional_of: coefficient lengths differ (" + std::to_string(phi.size()) +
                         " vs " + std::to_string(h.coeffs.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < phi.size(); ++j) acc += h.coeffs[j] * phi[j];
  return acc;
}

std::string kind_name(const RepresenterKind& kind) {
  return std::visit(overloaded{
                        [](const PointEval&) { return std::string("point"); },
                        [](const Average&) { return std::string("average"); },
                        [](const WeightedAvgDeriv&) { return std::string("wad"); },
                        [](const Custom&) { return std::string("custom"); },
                    },
                    kind);
}

}  // namespace npiv
