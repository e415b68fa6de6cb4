#pragma once

// Synthetic samples from Y = phi(Z) + U with E[U | W] = 0, where (Z, W) has a
// series density making the conditional expectation operator diagonal in the
// trigonometric basis.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "npiv/basis.hpp"

namespace npiv {

enum class Regime { PP, PE, EP };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);

// Decay of the operator class: 1 at j = 1, then j^{-2a} (PP, EP) or
// exp(-j^{2a}) (PE). Length `length`, 0-based storage.
std::vector<double> operator_decay(Regime regime, double a, int length);

// Smoothness weights beta: j^{2p} (PP, PE) or exp(j^{2p}) (EP); beta_1 = 1.
std::vector<double> smoothness_weights(Regime regime, double p, int length);

struct OperatorSpec {
  Regime regime = Regime::PP;
  double a = 1.0;   // degree of ill-posedness
  double c = 0.2;   // scale of s_j for j >= 2, in (0, 1]
  int jmax = 8;     // s_j = 0 beyond jmax
  double d = 1.0;   // link constants, 1 <= d <= D
  double D = 1.0;

  void validate() const;  // ConfigError on bad parameters (budget not checked)

  // s_1 = 1, s_j = c * sqrt(decay_j); length jmax.
  std::vector<double> singular_values() const;
  // upsilon_j = s_j^2 for j <= jmax, 0 beyond; length `length`.
  std::vector<double> upsilon(int length) const;

  double positivity_mass() const;  // 2 * sum_{j>=2} s_j
  bool positivity_ok() const { return positivity_mass() <= 0.9 + 1e-12; }
  double envelope() const { return 1.0 + positivity_mass(); }

  // Largest c keeping the positivity budget for this regime, a and jmax.
  static double max_scale(Regime regime, double a, int jmax);
};

struct StructuralFunction {
  std::vector<double> coeffs;  // [phi]_1 .. [phi]_Jmax
  std::vector<double> beta;    // nondecreasing, beta_1 = 1
  double rho = 1.0;

  void validate() const;  // ConfigError on any violated invariant
  double weighted_norm_sq() const;  // sum beta_j [phi]_j^2
  double value(double t) const;     // truncated series at t
};

// phi_j = scale * j^{-exponent}, scale chosen so that sum beta_j phi_j^2 = fill * rho.
StructuralFunction power_law_function(double exponent, std::vector<double> beta, double rho,
                                      double fill = 1.0);

inline double functional_of(const StructuralFunction& phi, const Representer& h) {
  return functional_of(std::span<const double>(phi.coeffs), h);
}

// Deterministic stream seed for replication r at sample size n.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t r);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Sample {
  std::size_t n = 0;
  std::vector<double> y, z, w;
  std::uint64_t seed = 0;
  double sigma_v = 1.0;
  double envelope = 1.0;  // rejection envelope used while drawing (Z, W)

  double mean_square_y() const;
};

// f(z, w) = 1 + sum_{j=2}^{jmax} s_j e_j(z) e_j(w).
double joint_density(const OperatorSpec& spec, double z, double w);

struct ZW {
  std::vector<double> z, w;
};

// Rejection sampling from joint_density with uniform proposal.
ZW sample_zw(const OperatorSpec& spec, std::size_t n, Rng& rng);

// Y_i = [T phi](W_i) + V_i with V ~ N(0, sigma_v^2); U = Y - phi(Z) has
// E[U | W] = 0 exactly.
Sample generate(const OperatorSpec& spec, const StructuralFunction& phi, double sigma_v,
                std::size_t n, std::uint64_t seed);

// [T phi](w) = sum_j s_j [phi]_j e_j(w).
double apply_operator(const OperatorSpec& spec, std::span<const double> phi, double w);

}  // namespace npiv
