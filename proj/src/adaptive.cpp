#include "npiv/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npiv/errors.hpp"
#include "npiv/estimator.hpp"

namespace npiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest k with k^4 <= n.
int fourth_root_floor(std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.25)));
  while (k > 0 && k * k * k * k > n) --k;
  while ((k + 1) * (k + 1) * (k + 1) * (k + 1) <= n) ++k;
  return static_cast<int>(k);
}

// m^3 * inv_sq * maxsq > threshold, with an infinite (singular) inverse
// always exceeding.
bool exceeds(int m, double inv_sq, double maxsq, double threshold) {
  if (!std::isfinite(inv_sq)) return true;
  const double md = m;
  return md * md * md * inv_sq * maxsq > threshold;
}

double log_factor(std::size_t n) { return (1.0 + std::log(static_cast<double>(n))) / static_cast<double>(n); }

}  // namespace

double a_n(double n) {
  if (!(n >= 1.0)) throw DomainError("a_n: n must be >= 1");
  const double ln = std::log(n);
  return std::pow(n, 1.0 - 1.0 / std::log(2.0 + ln)) / (1.0 + ln);
}

int M_upper_h(const Representer& h, std::size_t n, Normalization norm) {
  if (n < 1) throw ConfigError("M_upper_h: n must be >= 1");
  if (h.coeffs.empty()) throw ConfigError("M_upper_h: empty representer");
  double ref = h.coeffs[0];
  if (norm == Normalization::FirstNonzero) {
    auto it = std::find_if(h.coeffs.begin(), h.coeffs.end(), [](double v) { return v != 0.0; });
    ref = it == h.coeffs.end() ? 0.0 : *it;
  }
  if (ref == 0.0) {
    throw ConfigError("M_upper_h: reference coefficient [h]_1 is zero; reorder the basis or use FirstNonzero");
  }
  const int cap = std::min(fourth_root_floor(n), h.size());
  const double bound = static_cast<double>(n) * ref * ref;
  int best = 1;
  for (int m = 1; m <= cap; ++m) {
    if (h.max_sq_upto(m) <= bound) best = m;
    else break;
  }
  return best;
}

int M_hat(const GalerkinSystem& system, const Representer& h, int Mh) {
  if (Mh < 1) throw DimensionError("M_hat: Mh must be >= 1");
  if (system.M < Mh) throw DimensionError("M_hat: Galerkin system smaller than Mh");
  const double an = a_n(static_cast<double>(system.n));
  for (int m = 2; m <= Mh; ++m) {
    const double inv = inv_spectral_norm(system, m);
    if (exceeds(m, inv * inv, h.max_sq_upto(m), an)) return m - 1;
  }
  return Mh;
}

double varsigma_hat_sq(const GalerkinSystem& system, int m) {
  if (!system.mean_sq_y) throw ConfigError("varsigma_hat_sq: Galerkin system lacks the second moment of Y");
  double best = 0.0;
  for (int k = 1; k <= m; ++k) best = std::max(best, solve_block(system, k).squaredNorm());
  return 74.0 * (*system.mean_sq_y + best);
}

double pen_hat(const GalerkinSystem& system, const Representer& h, int m) {
  double delta = 0.0;
  for (int k = 1; k <= m; ++k) delta = std::max(delta, representer_norm_sq(system, h, k));
  return 204.0 * varsigma_hat_sq(system, m) * log_factor(system.n) * delta;
}

int contrast_argmin(std::vector<SelectionRow>& rows) {
  const std::size_t M = rows.size();
  if (M == 0) throw DimensionError("contrast_argmin: empty collection");
  int best = 1;
  double best_val = kInf;
  for (std::size_t m = 0; m < M; ++m) {
    double psi = -kInf;
    for (std::size_t mp = m; mp < M; ++mp) {
      const double diff = rows[mp].lhat - rows[m].lhat;
      psi = std::max(psi, diff * diff - rows[mp].pen);
    }
    rows[m].psi = psi;
    rows[m].criterion = psi + rows[m].pen;
    if (rows[m].criterion < best_val) {
      best_val = rows[m].criterion;
      best = static_cast<int>(m) + 1;
    }
  }
  return best;
}

double SelectionTrace::reduction_slack() const {
  double worst = -kInf;
  for (std::size_t m = 0; m < rows.size(); ++m) {
    for (std::size_t mp = m; mp < rows.size(); ++mp) {
      const double diff = rows[mp].lhat - rows[m].lhat;
      worst = std::max(worst, diff * diff - (rows[m].psi + rows[mp].pen));
    }
  }
  return worst;
}

SelectionTrace select(const GalerkinSystem& system, const Representer& h, Normalization norm) {
  if (!system.mean_sq_y) throw ConfigError("select: Galerkin system lacks the second moment of Y");
  SelectionTrace tr;
  tr.n = system.n;
  tr.Mh = M_upper_h(h, system.n, norm);
  tr.Mhat = M_hat(system, h, tr.Mh);

  const double factor = 204.0 * log_factor(system.n);
  double max_coef = 0.0;
  double delta = 0.0;
  for (int m = 1; m <= tr.Mhat; ++m) {
    max_coef = std::max(max_coef, solve_block(system, m).squaredNorm());
    delta = std::max(delta, representer_norm_sq(system, h, m));
    SelectionRow row;
    row.m = m;
    const auto est = plugin_estimate(system, h, m);
    row.lhat = est.lhat;
    row.thresholded = est.thresholded;
    row.delta = delta;
    row.varsigma_sq = 74.0 * (*system.mean_sq_y + max_coef);
    row.pen = factor * row.varsigma_sq * delta;
    tr.rows.push_back(row);
  }
  tr.mhat = contrast_argmin(tr.rows);
  tr.lhat = tr.rows[tr.mhat - 1].lhat;
  return tr;
}

DeterministicPenalty deterministic_penalty(const OperatorSpec& spec, const StructuralFunction& phi,
                                           double sigma_v, const Representer& h, std::size_t n,
                                           Normalization norm) {
  spec.validate();
  if (!(sigma_v >= 0.0)) throw ConfigError("sigma_v must be >= 0");
  DeterministicPenalty out;
  out.n = n;
  out.Mh = M_upper_h(h, n, norm);

  const auto s = spec.singular_values();
  double ey2 = sigma_v * sigma_v;
  for (std::size_t j = 0; j < s.size() && j < phi.coeffs.size(); ++j) {
    ey2 += s[j] * s[j] * phi.coeffs[j] * phi.coeffs[j];
  }
  if (!(ey2 > 0.0)) throw ConfigError("E[Y^2] = 0 (phi = 0 and sigma_v = 0): penalties degenerate");

  const auto ups = spec.upsilon(out.Mh);
  const double an = a_n(static_cast<double>(n));
  const double fourD = 4.0 * spec.D;
  auto first_exceed = [&](double lhs_scale, double threshold) {
    for (int m = 2; m <= out.Mh; ++m) {
      const double inv_sq = ups[m - 1] > 0.0 ? 1.0 / ups[m - 1] : kInf;
      if (exceeds(m, lhs_scale * inv_sq, h.max_sq_upto(m), threshold)) return m - 1;
    }
    return out.Mh;
  };
  out.Mn = first_exceed(1.0, an);
  out.Mminus = first_exceed(fourD, an);
  out.Mplus = first_exceed(1.0, fourD * an);

  const double factor = 24.0 * log_factor(n);
  double sum_h = 0.0;     // sum_{j<=m} [h]_j^2 / upsilon_j
  double phi_norm = 0.0;  // ||[phi]_m||^2
  bool singular = false;
  double delta = 0.0, max_phi = 0.0;
  for (int m = 1; m <= out.Mh; ++m) {
    const double hj = m <= h.size() ? h.coeffs[m - 1] : 0.0;
    const double pj = static_cast<std::size_t>(m) <= phi.coeffs.size() ? phi.coeffs[m - 1] : 0.0;
    if (ups[m - 1] <= 0.0) singular = true;
    if (!singular) {
      sum_h += hj * hj / ups[m - 1];
      phi_norm += pj * pj;
      delta = std::max(delta, sum_h);
      max_phi = std::max(max_phi, phi_norm);
    }
    const double d = singular ? kInf : delta;
    const double vs = singular ? kInf : 74.0 * (ey2 + max_phi);
    out.delta.push_back(d);
    out.varsigma_sq.push_back(vs);
    out.pen.push_back(factor * vs * d);
  }
  return out;
}

SelectionTrace select_partial(const GalerkinSystem& system, const DeterministicPenalty& pen,
                              const Representer& h) {
  if (pen.Mn < 1 || static_cast<std::size_t>(pen.Mn) > pen.pen.size()) {
    throw DimensionError("select_partial: inconsistent deterministic penalty");
  }
  if (system.M < pen.Mn) throw DimensionError("select_partial: Galerkin system smaller than M_n");
  SelectionTrace tr;
  tr.n = system.n;
  tr.Mh = pen.Mh;
  tr.Mhat = pen.Mn;
  for (int m = 1; m <= pen.Mn; ++m) {
    SelectionRow row;
    row.m = m;
    const auto est = plugin_estimate(system, h, m);
    row.lhat = est.lhat;
    row.thresholded = est.thresholded;
    row.delta = pen.delta[m - 1];
    row.varsigma_sq = pen.varsigma_sq[m - 1];
    row.pen = pen.pen[m - 1];
    tr.rows.push_back(row);
  }
  tr.mhat = contrast_argmin(tr.rows);
  tr.lhat = tr.rows[tr.mhat - 1].lhat;
  return tr;
}

}  // namespace npiv
