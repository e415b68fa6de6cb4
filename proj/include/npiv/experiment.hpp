#pragma once

// Monte Carlo experiments: replicate generate -> assemble -> estimate over a
// grid of sample sizes and fit the log-log slope of the mean squared error.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "npiv/adaptive.hpp"
#include "npiv/basis.hpp"
#include "npiv/datagen.hpp"
#include "npiv/rates.hpp"

namespace npiv {

enum class Mode { OracleM, PartialAdaptive, FullyAdaptive };
std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

// Coefficient rule for phi. Weights are beta_j = j^{2p} (pp, pe) or
// exp(j^{2p}) (ep), following the operator regime.
struct PhiDescriptor {
  std::string rule = "power";   // "power" or "custom"
  double exponent = 2.6;        // power rule: phi_j ~ j^{-exponent}
  double p = 2.0;
  double rho = 1.0;
  double fill = 1.0;            // power rule: sum beta phi^2 = fill * rho
  int jmax = kDefaultJmax;
  std::vector<double> coeffs;   // custom rule, zero padded to jmax
};

StructuralFunction build_phi(const PhiDescriptor& d, Regime regime);

struct ExperimentConfig {
  OperatorSpec spec;
  PhiDescriptor phi;
  RepresenterKind h = PointEval{0.3};
  double sigma_v = 0.5;
  std::vector<std::size_t> n_grid;
  int replications = 100;
  std::uint64_t seed = 1;
  Mode mode = Mode::OracleM;
  int threads = 0;  // 0: hardware concurrency
  Normalization normalization = Normalization::First;

  void validate() const;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

// OLS of log(mse) on log(n). DomainError with fewer than 3 points or any
// mse <= 0.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points);

struct ReplicationResult {
  double lhat = 0.0;
  int m = 1;
  bool thresholded = false;
  bool failed = false;
  double reduction_slack = -1.0;  // adaptive modes only
};

struct NPointSummary {
  std::size_t n = 0;
  double mse = 0.0;
  double mean_m = 0.0;
  double threshold_freq = 0.0;
  int failures = 0;
  int reduction_violations = 0;
  int oracle_m = 0;    // m* at this n (OracleM) or collection bound (partial)
};

struct MonteCarloReport {
  Mode mode = Mode::OracleM;
  double truth = 0.0;
  std::vector<NPointSummary> points;
  std::optional<SlopeFit> fit;
  std::optional<RateOrder> reference;
  int failures = 0;
  int reduction_violations = 0;
  int replications = 0;
  // Per (n, r) results, row-major by n index; kept for diagnostics.
  std::vector<std::vector<ReplicationResult>> replicates;
};

// Tolerance for the reduction inequality check.
inline constexpr double kReductionTol = 1e-9;

// m*_n for the OracleM mode, from beta and the class decay of the operator
// (j^{-2a} or exp(-j^{2a})); the scale c enters the link constants only.
int oracle_dimension(const ExperimentConfig& cfg, const StructuralFunction& phi, std::size_t n);

MonteCarloReport run_experiment(const ExperimentConfig& cfg);

// One replication at size n, exposed for tests.
ReplicationResult run_replication(const ExperimentConfig& cfg, const StructuralFunction& phi,
                                  const Representer& h, std::size_t n, std::uint64_t r);

}  // namespace npiv
