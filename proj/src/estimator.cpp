#include "npiv/estimator.hpp"

#include <cmath>
#include <limits>

#include "npiv/errors.hpp"

namespace npiv {

namespace {

void check_m(const GalerkinSystem& system, const Representer& h, int m) {
  if (m < 1 || m > system.M) throw DimensionError("dimension m out of range of the Galerkin system");
  if (m > h.size()) throw DimensionError("dimension m exceeds the number of representer coefficients");
}

Eigen::Map<const Eigen::VectorXd> head_of(const Representer& h, int m) {
  return Eigen::Map<const Eigen::VectorXd>(h.coeffs.data(), m);
}

}  // namespace

Eigen::VectorXd solve_block(const GalerkinSystem& system, int m) {
  if (m < 1 || m > system.M) throw DimensionError("dimension m out of range of the Galerkin system");
  if (!std::isfinite(inv_spectral_norm(system, m))) {
    return Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  }
  return system.block(m).partialPivLu().solve(system.gvec(m));
}

double representer_norm_sq(const GalerkinSystem& system, const Representer& h, int m) {
  check_m(system, h, m);
  if (!std::isfinite(inv_spectral_norm(system, m))) return std::numeric_limits<double>::infinity();
  // Row vector h^t T^{-1} is the solution x of T^t x = h.
  const Eigen::VectorXd x = system.block(m).transpose().partialPivLu().solve(head_of(h, m));
  return x.squaredNorm();
}

PluginEstimate plugin_estimate(const GalerkinSystem& system, const Representer& h, int m) {
  check_m(system, h, m);
  const double inv_norm = inv_spectral_norm(system, m);
  if (!std::isfinite(inv_norm) || inv_norm > std::sqrt(static_cast<double>(system.n))) {
    return {0.0, true};
  }
  const Eigen::VectorXd coef = system.block(m).partialPivLu().solve(system.gvec(m));
  const double value = head_of(h, m).dot(coef);
  if (!std::isfinite(value)) return {0.0, true};
  return {value, false};
}

EstimateTrace estimate_trace(const GalerkinSystem& system, const Representer& h) {
  if (h.size() < system.M) throw DimensionError("estimate_trace: representer shorter than M");
  EstimateTrace tr;
  tr.n = system.n;
  for (int m = 1; m <= system.M; ++m) {
    const auto est = plugin_estimate(system, h, m);
    tr.lhat.push_back(est.lhat);
    tr.invnorm.push_back(inv_spectral_norm(system, m));
    tr.thresholded.push_back(est.thresholded);
  }
  return tr;
}

}  // namespace npiv
