#pragma once

// Nested empirical Galerkin matrices [T^]_m and vectors [g^]_m, m <= M, with
// the trigonometric basis on both the regressor and the instrument side.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>

#include "npiv/datagen.hpp"

namespace npiv {

enum class GalerkinSource { FromSample, Injected };

struct GalerkinSystem {
  int M = 0;
  Eigen::MatrixXd that;  // [T^]_M; that(l, j) = (1/n) sum_i e_l(W_i) e_j(Z_i)
  Eigen::VectorXd ghat;  // [g^]_M; ghat(l) = (1/n) sum_i Y_i e_l(W_i)
  std::size_t n = 0;
  GalerkinSource source = GalerkinSource::FromSample;
  // (1/n) sum Y_i^2; always set by assemble, optional for injected systems.
  std::optional<double> mean_sq_y;

  auto block(int m) const { return that.topLeftCorner(m, m); }
  auto gvec(int m) const { return ghat.head(m); }
};

// Single pass over the data. DimensionError if M < 1.
GalerkinSystem assemble(const Sample& sample, int M);

// Test seam: wraps given matrices. DimensionError on shape mismatch or
// non-finite entries.
GalerkinSystem inject(const Eigen::MatrixXd& that, const Eigen::VectorXd& ghat, std::size_t n,
                      std::optional<double> mean_sq_y = std::nullopt);

// Relative singularity threshold on sigma_min / sigma_max.
inline constexpr double kSingularTol = 1e-12;

// Spectral norm of [T^]_m^{-1}, i.e. 1/sigma_min of the leading m x m block,
// or +infinity when the block is singular to working precision.
double inv_spectral_norm(const GalerkinSystem& system, int m);

// CSV dump: "that" rows followed by a blank line and "ghat" as one column.
void dump_galerkin_csv(const GalerkinSystem& system, const std::string& path);

}  // namespace npiv
