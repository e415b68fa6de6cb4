#pragma once

// Trigonometric basis on [0,1] and Fourier coefficients of representers of
// linear functionals.
//
// Indices are 1-based in every external report; storage is 0-based, so
// values[0] holds e_1.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace npiv {

// Global truncation level for "infinite" coefficient sequences.
inline constexpr int kDefaultJmax = 512;

struct BasisVector {
  double t = 0.0;
  std::vector<double> values;  // e_1(t) .. e_m(t)
};

// e_1 = 1, e_{2j}(t) = sqrt(2) cos(2 pi j t), e_{2j+1}(t) = sqrt(2) sin(2 pi j t).
// Direct libm evaluation, so |e_j(t)| <= sqrt(2) holds exactly.
BasisVector eval_basis(double t, int m);

// Writes e_1(t)..e_{out.size()}(t) into out by angle addition, without
// allocating. No domain check; callers in hot loops validate once.
void fill_basis(double t, std::span<double> out) noexcept;

struct PointEval {
  double t0 = 0.0;
};
struct Average {
  double b = 0.5;
};
struct WeightedAvgDeriv {};
struct Custom {
  std::vector<double> coeffs;
  std::optional<double> decay_s;
};

using RepresenterKind = std::variant<PointEval, Average, WeightedAvgDeriv, Custom>;

struct Representer {
  RepresenterKind kind;
  std::vector<double> coeffs;    // [h]_1 .. [h]_Jmax
  std::optional<double> decay_s; // s in [h]_j^2 ~ j^{-2s}

  int size() const { return static_cast<int>(coeffs.size()); }
  double max_sq_upto(int m) const;  // max_{j<=m} [h]_j^2
};

// Builds the coefficient vector of length jmax for the given kind. Custom
// coefficients pass through unchanged (zero padded up to jmax if shorter).
Representer representer_coeffs(const RepresenterKind& kind, int jmax = kDefaultJmax);

// sum_{j<=Jmax} [h]_j [phi]_j. Throws DimensionError on length mismatch.
double functional_of(std::span<const double> phi, const Representer& h);

std::string kind_name(const RepresenterKind& kind);

}  // namespace npiv
