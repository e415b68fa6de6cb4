#pragma once

// Data-driven choice of the dimension m: a model-collection bound, penalties
// built from running maxima, and a Lepski-type contrast. A deterministic
// (known-operator) variant uses the true operator and moments.

#include <cstddef>
#include <vector>

#include "npiv/basis.hpp"
#include "npiv/datagen.hpp"
#include "npiv/galerkin.hpp"

namespace npiv {

// a_n = n^{1 - 1/log(2 + log n)} / (1 + log n), natural logarithms.
double a_n(double n);

// Which coefficient normalizes the bound max_j [h]_j^2 <= n [h]_ref^2.
// First is the defining choice and requires [h]_1 != 0. FirstNonzero applies
// the "reorder so that [h]_1 != 0" convention for representers such as the
// weighted average derivative, whose first coefficient vanishes.
enum class Normalization { First, FirstNonzero };

// max{1 <= m <= floor(n^{1/4}) : max_{j<=m} [h]_j^2 <= n [h]_ref^2}.
// ConfigError if the reference coefficient is zero.
int M_upper_h(const Representer& h, std::size_t n, Normalization norm = Normalization::First);

// min{2 <= m <= Mh : m^3 ||[T^]_m^{-1}||^2 max_{j<=m}[h]_j^2 > a_n} - 1, or Mh.
// Singular blocks count as exceeding.
int M_hat(const GalerkinSystem& system, const Representer& h, int Mh);

// 74 (mean_sq_y + max_{m'<=m} ||[T^]_{m'}^{-1}[g^]_{m'}||^2).
double varsigma_hat_sq(const GalerkinSystem& system, int m);

// 204 varsigma^_m^2 (1 + log n) / n * max_{m'<=m} ||[h]_{m'}^t [T^]_{m'}^{-1}||^2.
double pen_hat(const GalerkinSystem& system, const Representer& h, int m);

struct SelectionRow {
  int m = 0;
  double lhat = 0.0;
  bool thresholded = false;
  double delta = 0.0;         // running max of ||h^t T^{-1}||^2
  double varsigma_sq = 0.0;
  double pen = 0.0;
  double psi = 0.0;
  double criterion = 0.0;     // psi + pen
};

struct SelectionTrace {
  std::size_t n = 0;
  int Mh = 0;
  int Mhat = 0;   // collection bound actually used (M_n in the partial variant)
  std::vector<SelectionRow> rows;  // m = 1..Mhat
  int mhat = 1;
  double lhat = 0.0;

  // Largest violation of |l_{m'} - l_m|^2 <= psi_m + pen_{m'} over m <= m'
  // (<= 0 when the reduction inequality holds).
  double reduction_slack() const;
};

// Fully data-driven selection. The system must carry mean_sq_y and cover
// dimensions up to M_upper_h.
SelectionTrace select(const GalerkinSystem& system, const Representer& h,
                      Normalization norm = Normalization::First);

struct DeterministicPenalty {
  std::size_t n = 0;
  int Mh = 0;
  int Mn = 0;
  int Mminus = 0;
  int Mplus = 0;
  // index m-1, m = 1..Mh; +inf where [T]_m is singular
  std::vector<double> delta;
  std::vector<double> varsigma_sq;
  std::vector<double> pen;
};

// Known-operator quantities for a diagonal operator: [T]_m^{-1}[g]_m = [phi]_m,
// E[Y^2] = sum s_j^2 phi_j^2 + sigma_v^2, ||[T]_m^{-1}||^2 = 1/upsilon_m.
DeterministicPenalty deterministic_penalty(const OperatorSpec& spec, const StructuralFunction& phi,
                                           double sigma_v, const Representer& h, std::size_t n,
                                           Normalization norm = Normalization::First);

// Partial adaptation: same contrast with pen_m and M_n from the deterministic
// penalty.
SelectionTrace select_partial(const GalerkinSystem& system, const DeterministicPenalty& pen,
                              const Representer& h);

// Contrast and argmin over m = 1..lhat.size() given estimates and penalties.
// Fills psi, criterion and returns the smallest minimizer (1-based).
int contrast_argmin(std::vector<SelectionRow>& rows);

}  // namespace npiv
