#pragma once

#include <Eigen/Dense>
#include <vector>

#include "npiv/basis.hpp"
#include "npiv/galerkin.hpp"

namespace npiv {

struct PluginEstimate {
  double lhat = 0.0;
  bool thresholded = false;
};

// [h]_m^t [T^]_m^{-1} [g^]_m when [T^]_m is nonsingular and its inverse has
// spectral norm <= sqrt(n); (0, true) otherwise. Uses an LU solve, never an
// explicit inverse.
PluginEstimate plugin_estimate(const GalerkinSystem& system, const Representer& h, int m);

struct EstimateTrace {
  std::size_t n = 0;
  std::vector<double> lhat;        // index m-1
  std::vector<double> invnorm;     // may hold +inf
  std::vector<bool> thresholded;
};

EstimateTrace estimate_trace(const GalerkinSystem& system, const Representer& h);

// Internal helpers shared with the selection procedures.
// [T^]_m^{-1}[g^]_m; all entries +inf when the block is singular.
Eigen::VectorXd solve_block(const GalerkinSystem& system, int m);
// ||[h]_m^t [T^]_m^{-1}||^2 (Euclidean), via a transposed solve.
double representer_norm_sq(const GalerkinSystem& system, const Representer& h, int m);

}  // namespace npiv
