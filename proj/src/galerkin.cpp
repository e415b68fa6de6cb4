#include "npiv/galerkin.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "npiv/errors.hpp"

namespace npiv {

GalerkinSystem assemble(const Sample& sample, int M) {
  if (M < 1) throw DimensionError("assemble: M must be >= 1");
  const std::size_t n = sample.y.size();
  if (n == 0 || sample.z.size() != n || sample.w.size() != n) {
    throw DimensionError("assemble: sample vectors must be non-empty and of equal length");
  }
  GalerkinSystem sys;
  sys.M = M;
  sys.n = n;
  sys.source = GalerkinSource::FromSample;
  sys.that = Eigen::MatrixXd::Zero(M, M);
  sys.ghat = Eigen::VectorXd::Zero(M);

  Eigen::VectorXd ez(M), ew(M);
  double ysq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fill_basis(sample.z[i], std::span<double>(ez.data(), static_cast<std::size_t>(M)));
    fill_basis(sample.w[i], std::span<double>(ew.data(), static_cast<std::size_t>(M)));
    sys.that.noalias() += ew * ez.transpose();
    sys.ghat.noalias() += sample.y[i] * ew;
    ysq += sample.y[i] * sample.y[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  sys.that *= inv_n;
  sys.ghat *= inv_n;
  sys.mean_sq_y = ysq * inv_n;
  return sys;
}

GalerkinSystem inject(const Eigen::MatrixXd& that, const Eigen::VectorXd& ghat, std::size_t n,
                      std::optional<double> mean_sq_y) {
  if (that.rows() != that.cols() || that.rows() < 1) throw DimensionError("inject: matrix must be square and non-empty");
  if (ghat.size() != that.rows()) throw DimensionError("inject: vector length must match matrix size");
  if (n < 1) throw DimensionError("inject: nominal sample size must be >= 1");
  if (!that.allFinite() || !ghat.allFinite()) throw DimensionError("inject: entries must be finite");
  GalerkinSystem sys;
  sys.M = static_cast<int>(that.rows());
  sys.that = that;
  sys.ghat = ghat;
  sys.n = n;
  sys.source = GalerkinSource::Injected;
  sys.mean_sq_y = mean_sq_y;
  return sys;
}

double inv_spectral_norm(const GalerkinSystem& system, int m) {
  if (m < 1 || m > system.M) throw DimensionError("inv_spectral_norm: m out of range");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.block(m));
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || smin <= kSingularTol * smax) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

void dump_galerkin_csv(const GalerkinSystem& system, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out.precision(17);
  for (int l = 0; l < system.M; ++l) {
    for (int j = 0; j < system.M; ++j) out << (j ? "," : "") << system.that(l, j);
    out << '\n';
  }
  out << '\n';
  for (int l = 0; l < system.M; ++l) out << system.ghat(l) << '\n';
}

}  // namespace npiv
