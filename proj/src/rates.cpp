#include "npiv/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "npiv/errors.hpp"

namespace npiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryTol = 1e-12;

void check_weights(std::span<const double> beta, std::span<const double> upsilon, int jmax) {
  if (jmax < 1) throw ConfigError("jmax must be >= 1");
  if (beta.size() < static_cast<std::size_t>(jmax) || upsilon.size() < static_cast<std::size_t>(jmax)) {
    throw ConfigError("weight sequences shorter than jmax");
  }
  if (beta[0] != 1.0 || upsilon[0] != 1.0) throw ConfigError("beta_1 and upsilon_1 must equal 1");
  for (int j = 1; j < jmax; ++j) {
    if (!(beta[j] >= beta[j - 1])) throw ConfigError("beta must be nondecreasing");
    if (!(upsilon[j] <= upsilon[j - 1]) || upsilon[j] < 0.0) {
      throw ConfigError("upsilon must be nonnegative and nonincreasing");
    }
  }
}

double spread(double q, double inv_x) {
  const double lo = std::min(q, inv_x);
  if (!(lo > 0.0)) return kInf;
  return std::max(q, inv_x) / lo;
}

}  // namespace

OracleDimension m_star(std::span<const double> beta, std::span<const double> upsilon, double x,
                       int jmax) {
  if (!(x >= 1.0)) throw ConfigError("m_star: x must be >= 1");
  check_weights(beta, upsilon, jmax);
  const double inv_x = 1.0 / x;
  OracleDimension best;
  double best_val = kInf;
  for (int m = 1; m <= jmax; ++m) {
    const double q = upsilon[m - 1] / beta[m - 1];
    const double v = spread(q, inv_x);
    if (v < best_val) {
      best_val = v;
      best.m_star = m;
    }
  }
  best.a_star = std::max(upsilon[best.m_star - 1] / beta[best.m_star - 1], inv_x);
  return best;
}

double rate_fixed(const Representer& h, std::span<const double> beta, std::span<const double> upsilon,
                  double x, int jmax) {
  if (h.size() < jmax) throw DimensionError("rate_fixed: representer shorter than jmax");
  const auto [ms, as] = m_star(beta, upsilon, x, jmax);
  double head = 0.0;
  for (int j = 1; j <= ms; ++j) head += h.coeffs[j - 1] * h.coeffs[j - 1] / upsilon[j - 1];
  double tail = 0.0;
  for (int j = ms + 1; j <= jmax; ++j) tail += h.coeffs[j - 1] * h.coeffs[j - 1] / beta[j - 1];
  return std::max(as * head, tail);
}

double rate_class(std::span<const double> omega, std::span<const double> beta,
                  std::span<const double> upsilon, double x) {
  const int jmax = static_cast<int>(std::min({omega.size(), beta.size(), upsilon.size()}));
  for (int j = 0; j < jmax; ++j) {
    if (!(omega[j] * beta[j] > 0.0)) throw ConfigError("rate_class: omega_j beta_j must be positive");
  }
  const auto [ms, as] = m_star(beta, upsilon, x, jmax);
  double worst = 0.0;
  for (int j = 1; j <= ms; ++j) worst = std::max(worst, 1.0 / (omega[j - 1] * upsilon[j - 1]));
  return as * worst;
}

KappaReport kappa_check(std::span<const double> beta, std::span<const double> upsilon,
                        std::span<const double> n_grid) {
  if (n_grid.empty()) throw ConfigError("kappa_check: empty grid");
  const int jmax = static_cast<int>(std::min(beta.size(), upsilon.size()));
  KappaReport rep;
  rep.kappa = kInf;
  for (double n : n_grid) {
    const auto [ms, as] = m_star(beta, upsilon, n, jmax);
    const double q = upsilon[ms - 1] / beta[ms - 1];
    rep.kappa = std::min(rep.kappa, std::min(q, 1.0 / n) / as);
  }
  rep.warning = rep.kappa < 1e-3;
  return rep;
}

double effective_sample_size(double n, bool adaptive) {
  return adaptive ? n / (1.0 + std::log(n)) : n;
}

std::string branch_name(RateBranch b) {
  switch (b) {
    case RateBranch::Polynomial: return "polynomial";
    case RateBranch::Boundary: return "boundary";
    case RateBranch::Parametric: return "parametric";
    case RateBranch::Logarithmic: return "logarithmic";
  }
  return "?";
}

double RateOrder::evaluate(double n) const {
  const double L = adaptive ? 1.0 + std::log(n) : std::log(n);
  double v = std::pow(n, poly_exponent);
  if (log_exponent != 0.0) v *= std::pow(L, log_exponent);
  if (loglog_exponent != 0.0) v *= std::pow(std::log(std::log(n)), loglog_exponent);
  return v;
}

std::string RateOrder::describe() const {
  std::ostringstream os;
  os << "n^" << poly_exponent;
  if (log_exponent != 0.0) os << " * (" << (adaptive ? "1+log n" : "log n") << ")^" << log_exponent;
  if (loglog_exponent != 0.0) os << " * (log log n)^" << loglog_exponent;
  os << " [" << regime_name(regime) << ", " << branch_name(branch) << (adaptive ? ", adaptive" : ", minimax") << "]";
  return os.str();
}

RateOrder regime_exponent(Regime regime, double p, double a, double s, bool adaptive) {
  if (!(a > 0.0)) throw DomainError("regime_exponent: a must be > 0");
  if (regime == Regime::EP) {
    if (!(p > 0.0)) throw DomainError("regime_exponent: ep requires p > 0");
  } else {
    if (!(p > 1.5)) throw DomainError("regime_exponent: pp/pe require p > 3/2");
    if (!(s > 0.5 - p)) throw DomainError("regime_exponent: pp/pe require s > 1/2 - p");
  }
  if (adaptive && regime == Regime::PP && !(3.0 < 2.0 * p + 2.0 * std::min(s, 0.0))) {
    throw DomainError("regime_exponent: adaptive pp requires 3 < 2p + 2 min(s, 0)");
  }

  RateOrder r;
  r.regime = regime;
  r.adaptive = adaptive;
  const double gap = s - a;
  const bool boundary = std::abs(gap - 0.5) <= kBoundaryTol;
  const bool below = !boundary && gap < 0.5;

  switch (regime) {
    case Regime::PP: {
      const double e = (2.0 * p + 2.0 * s - 1.0) / (2.0 * p + 2.0 * a);
      if (below) {
        r.branch = RateBranch::Polynomial;
        r.poly_exponent = -e;
        r.log_exponent = adaptive ? e : 0.0;
      } else if (boundary) {
        r.branch = RateBranch::Boundary;
        r.poly_exponent = -1.0;
        r.log_exponent = adaptive ? 2.0 : 1.0;
      } else {
        r.branch = RateBranch::Parametric;
        r.poly_exponent = -1.0;
        r.log_exponent = adaptive ? 1.0 : 0.0;
      }
      break;
    }
    case Regime::PE: {
      r.branch = RateBranch::Logarithmic;
      r.poly_exponent = 0.0;
      r.log_exponent = -(2.0 * p + 2.0 * s - 1.0) / (2.0 * a);
      break;
    }
    case Regime::EP: {
      r.poly_exponent = -1.0;
      if (below) {
        r.branch = RateBranch::Polynomial;
        r.log_exponent = adaptive ? (2.0 * a + 2.0 * p - 2.0 * s + 1.0) / (2.0 * p)
                                  : (2.0 * a - 2.0 * s + 1.0) / (2.0 * p);
      } else if (boundary) {
        r.branch = RateBranch::Boundary;
        r.log_exponent = adaptive ? 1.0 : 0.0;
        r.loglog_exponent = 1.0;
      } else {
        r.branch = RateBranch::Parametric;
        r.log_exponent = adaptive ? 1.0 : 0.0;
      }
      break;
    }
  }
  return r;
}

}  // namespace npiv
