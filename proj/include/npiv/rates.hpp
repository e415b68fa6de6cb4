#pragma once

// Oracle dimension, minimax rates for a fixed representer and for a
// representer class, the kappa diagnostic, and closed-form rate orders for the
// polynomial/exponential regimes.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npiv/basis.hpp"
#include "npiv/datagen.hpp"

namespace npiv {

struct OracleDimension {
  int m_star = 1;
  double a_star = 1.0;
};

// Smallest minimizer over 1 <= m <= jmax of
//   max(upsilon_m/beta_m, 1/x) / min(upsilon_m/beta_m, 1/x).
// ConfigError unless beta is nondecreasing, upsilon nonincreasing and
// beta_1 = upsilon_1 = 1.
OracleDimension m_star(std::span<const double> beta, std::span<const double> upsilon, double x,
                       int jmax);

// max{ a* sum_{j<=m*} [h]_j^2/upsilon_j , sum_{m*<j<=jmax} [h]_j^2/beta_j }.
double rate_fixed(const Representer& h, std::span<const double> beta, std::span<const double> upsilon,
                  double x, int jmax);

// a* max_{j<=m*} 1/(omega_j upsilon_j).
double rate_class(std::span<const double> omega, std::span<const double> beta,
                  std::span<const double> upsilon, double x);

struct KappaReport {
  double kappa = 1.0;
  bool warning = false;  // kappa < 1e-3
};

// inf over the grid of (a*_n)^{-1} min(upsilon_{m*}/beta_{m*}, 1/n).
KappaReport kappa_check(std::span<const double> beta, std::span<const double> upsilon,
                        std::span<const double> n_grid);

enum class RateBranch { Polynomial, Boundary, Parametric, Logarithmic };
std::string branch_name(RateBranch b);

// Rate order n^{poly} * L^{log} * (log log n)^{loglog}, where L = log n for
// the minimax statement and 1 + log n for the adaptive one.
struct RateOrder {
  Regime regime = Regime::PP;
  bool adaptive = false;
  double poly_exponent = 0.0;
  double log_exponent = 0.0;
  double loglog_exponent = 0.0;
  RateBranch branch = RateBranch::Polynomial;

  double evaluate(double n) const;
  std::string describe() const;
};

// DomainError outside the admissible parameter ranges (pp/pe: p > 3/2,
// s > 1/2 - p; ep: p > 0; all a > 0; adaptive pp: 3 < 2p + 2 min(s, 0)).
RateOrder regime_exponent(Regime regime, double p, double a, double s, bool adaptive);

struct RateReport {
  double x = 0.0;
  int m_star = 1;
  double a_star = 1.0;
  double kappa = 1.0;
  double R_fixed = 0.0;
  std::optional<double> R_class;
  std::optional<RateOrder> order;
};

// Effective sample size: n (minimax) or n / (1 + log n) (adaptive).
double effective_sample_size(double n, bool adaptive);

}  // namespace npiv
