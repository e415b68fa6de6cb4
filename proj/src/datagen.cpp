#include "npiv/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "npiv/errors.hpp"

namespace npiv {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::PP: return "pp";
    case Regime::PE: return "pe";
    case Regime::EP: return "ep";
  }
  return "?";
}

Regime parse_regime(const std::string& s) {
  if (s == "pp" || s == "PP") return Regime::PP;
  if (s == "pe" || s == "PE") return Regime::PE;
  if (s == "ep" || s == "EP") return Regime::EP;
  throw ConfigError("unknown regime '" + s + "' (expected pp, pe or ep)");
}

std::vector<double> operator_decay(Regime regime, double a, int length) {
  std::vector<double> v(static_cast<std::size_t>(std::max(length, 0)));
  for (int j = 1; j <= length; ++j) {
    const double jd = j;
    if (j == 1) {
      v[0] = 1.0;
    } else if (regime == Regime::PE) {
      v[j - 1] = std::exp(-std::pow(jd, 2.0 * a));
    } else {
      v[j - 1] = std::pow(jd, -2.0 * a);
    }
  }
  return v;
}

std::vector<double> smoothness_weights(Regime regime, double p, int length) {
  std::vector<double> v(static_cast<std::size_t>(std::max(length, 0)));
  for (int j = 1; j <= length; ++j) {
    const double jd = j;
    if (j == 1) {
      v[0] = 1.0;
    } else if (regime == Regime::EP) {
      v[j - 1] = std::exp(std::pow(jd, 2.0 * p));
    } else {
      v[j - 1] = std::pow(jd, 2.0 * p);
    }
  }
  return v;
}

void OperatorSpec::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("operator decay exponent a must be > 0");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("operator scale c must lie in (0,1]");
  if (jmax < 1) throw ConfigError("operator jmax must be >= 1");
  if (!(d >= 1.0) || !(D >= d)) throw ConfigError("link constants must satisfy 1 <= d <= D");
}

std::vector<double> OperatorSpec::singular_values() const {
  auto v = operator_decay(regime, a, jmax);
  for (std::size_t j = 1; j < v.size(); ++j) v[j] = c * std::sqrt(v[j]);
  return v;
}

std::vector<double> OperatorSpec::upsilon(int length) const {
  std::vector<double> u(static_cast<std::size_t>(std::max(length, 0)), 0.0);
  const auto s = singular_values();
  for (std::size_t j = 0; j < u.size() && j < s.size(); ++j) u[j] = s[j] * s[j];
  return u;
}

double OperatorSpec::positivity_mass() const {
  const auto s = singular_values();
  return 2.0 * std::accumulate(s.begin() + 1, s.end(), 0.0);
}

double OperatorSpec::max_scale(Regime regime, double a, int jmax) {
  const auto v = operator_decay(regime, a, jmax);
  double tail = 0.0;
  for (std::size_t j = 1; j < v.size(); ++j) tail += std::sqrt(v[j]);
  if (tail == 0.0) return 1.0;
  return std::min(1.0, 0.45 / tail);
}

void StructuralFunction::validate() const {
  if (coeffs.empty()) throw ConfigError("structural function needs coefficients");
  if (beta.size() != coeffs.size()) throw ConfigError("beta and phi coefficient lengths differ");
  if (!(rho > 0.0)) throw ConfigError("radius rho must be > 0");
  if (beta[0] != 1.0) throw ConfigError("beta_1 must equal 1");
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (!std::isfinite(coeffs[j])) throw ConfigError("phi coefficients must be finite");
    if (!(beta[j] > 0.0)) throw ConfigError("beta must be strictly positive");
    if (j > 0 && beta[j] < beta[j - 1]) throw ConfigError("beta must be nondecreasing");
  }
  // j^3 / beta_j -> 0, checked as eventual decrease over the upper half of
  // the truncation range.
  const std::size_t jm = coeffs.size();
  if (jm >= 4) {
    auto ratio = [&](std::size_t j) {
      const double jd = static_cast<double>(j);
      return jd * jd * jd / beta[j - 1];
    };
    const std::size_t mid = (jm + 1) / 2;
    for (std::size_t j = mid + 1; j <= jm; ++j) {
      if (ratio(j) > ratio(j - 1)) throw ConfigError("beta too slowly increasing: j^3/beta_j not decaying");
    }
    if (!(ratio(jm) < ratio(mid) || ratio(jm) == 0.0)) {
      throw ConfigError("beta too slowly increasing: j^3/beta_j not decaying");
    }
  }
  if (weighted_norm_sq() > rho * (1.0 + 1e-12)) {
    throw ConfigError("phi lies outside the ellipsoid: sum beta_j phi_j^2 > rho");
  }
}

double StructuralFunction::weighted_norm_sq() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] != 0.0) acc += beta[j] * coeffs[j] * coeffs[j];
  }
  return acc;
}

double StructuralFunction::value(double t) const {
  std::vector<double> e(coeffs.size());
  fill_basis(t, e);
  double acc = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) acc += coeffs[j] * e[j];
  return acc;
}

StructuralFunction power_law_function(double exponent, std::vector<double> beta, double rho,
                                      double fill) {
  if (beta.empty()) throw ConfigError("beta must be non-empty");
  if (!(fill > 0.0 && fill <= 1.0)) throw ConfigError("fill must lie in (0,1]");
  StructuralFunction f{std::vector<double>(beta.size()), std::move(beta), rho};
  for (std::size_t j = 0; j < f.coeffs.size(); ++j) {
    f.coeffs[j] = std::pow(static_cast<double>(j + 1), -exponent);
  }
  const double norm = f.weighted_norm_sq();
  if (!std::isfinite(norm) || norm <= 0.0) {
    throw ConfigError("power-law phi has infinite weighted norm for these weights");
  }
  const double scale = std::sqrt(fill * rho / norm);
  for (double& v : f.coeffs) v *= scale;
  f.validate();
  return f;
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t r) {
  auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(base_seed) ^ n) ^ r);
}

double Sample::mean_square_y() const {
  if (y.empty()) return 0.0;
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return acc / static_cast<double>(y.size());
}

namespace {

double density_with(std::span<const double> s, std::span<double> ez, std::span<double> ew,
                    double z, double w) {
  fill_basis(z, ez);
  fill_basis(w, ew);
  double f = 1.0;
  for (std::size_t j = 1; j < s.size(); ++j) f += s[j] * ez[j] * ew[j];
  return f;
}

}  // namespace

double joint_density(const OperatorSpec& spec, double z, double w) {
  if (!(z >= 0.0 && z <= 1.0 && w >= 0.0 && w <= 1.0)) {
    throw DomainError("joint_density: (z, w) must lie in the unit square");
  }
  const auto s = spec.singular_values();
  std::vector<double> ez(s.size()), ew(s.size());
  return density_with(s, ez, ew, z, w);
}

ZW sample_zw(const OperatorSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (!spec.positivity_ok()) {
    throw ConfigError("positivity budget violated: 2*sum_{j>=2} s_j = " +
                      std::to_string(spec.positivity_mass()) + " > 0.9");
  }
  const auto s = spec.singular_values();
  const double env = spec.envelope();
  std::vector<double> ez(s.size()), ew(s.size());
  ZW out;
  out.z.reserve(n);
  out.w.reserve(n);
  while (out.z.size() < n) {
    const double z = rng.uniform();
    const double w = rng.uniform();
    const double u = rng.uniform();
    if (u * env <= density_with(s, ez, ew, z, w)) {
      out.z.push_back(z);
      out.w.push_back(w);
    }
  }
  return out;
}

double apply_operator(const OperatorSpec& spec, std::span<const double> phi, double w) {
  const auto s = spec.singular_values();
  const std::size_t m = std::min(s.size(), phi.size());
  std::vector<double> e(m);
  fill_basis(w, e);
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) acc += s[j] * phi[j] * e[j];
  return acc;
}

Sample generate(const OperatorSpec& spec, const StructuralFunction& phi, double sigma_v,
                std::size_t n, std::uint64_t seed) {
  if (!(sigma_v > 0.0)) throw ConfigError("sigma_v must be > 0");
  if (n < 1) throw ConfigError("sample size must be >= 1");
  Rng rng(seed);
  ZW zw = sample_zw(spec, n, rng);

  const auto s = spec.singular_values();
  const std::size_t m = std::min(s.size(), phi.coeffs.size());
  std::vector<double> tphi(m);
  for (std::size_t j = 0; j < m; ++j) tphi[j] = s[j] * phi.coeffs[j];

  Sample out;
  out.n = n;
  out.seed = seed;
  out.sigma_v = sigma_v;
  out.envelope = spec.envelope();
  out.y.resize(n);
  std::vector<double> e(m);
  for (std::size_t i = 0; i < n; ++i) {
    fill_basis(zw.w[i], e);
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += tphi[j] * e[j];
    out.y[i] = mean + sigma_v * rng.normal();
  }
  out.z = std::move(zw.z);
  out.w = std::move(zw.w);
  return out;
}

}  // namespace npiv
