#include <doctest.h>

#include <cmath>
#include <random>

#include "npiv/errors.hpp"
#include "npiv/experiment.hpp"

using namespace npiv;

namespace {

ExperimentConfig small_config(Mode mode) {
  ExperimentConfig cfg;
  cfg.spec.regime = Regime::PP;
  cfg.spec.a = 1.0;
  cfg.spec.jmax = 8;
  cfg.spec.c = OperatorSpec::max_scale(Regime::PP, 1.0, 8);
  cfg.n_grid = {200, 400, 800};
  cfg.replications = 12;
  cfg.seed = 3;
  cfg.mode = mode;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("slope fit on an exact power law") {
  const auto f = slope_fit({{10, 1}, {100, 0.1}, {1000, 0.01}});
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f.stderr_ == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(slope_fit({{10, 1}, {100, 0.1}}), DomainError);
  CHECK_THROWS_AS(slope_fit({{10, 1}, {100, 0.0}, {1000, 0.01}}), DomainError);
  CHECK_THROWS_AS(slope_fit({{10, 1}, {10, 0.5}, {10, 0.2}}), DomainError);
}

TEST_CASE("slope fit covers the truth on noisy data") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> N(0.0, 0.1);
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::pair<double, double>> pts;
    for (double n = 100; n <= 1e5; n *= 2) pts.emplace_back(n, 3.0 * std::pow(n, -0.7) * std::exp(N(g)));
    const auto f = slope_fit(pts);
    if (std::abs(f.slope + 0.7) <= 2.0 * f.stderr_) ++covered;
  }
  // Nominal coverage of a 2 sigma t-interval with 8 degrees of freedom is about 0.92.
  CHECK(covered >= 0.85 * trials);
}

TEST_CASE("mode names round trip") {
  for (Mode m : {Mode::OracleM, Mode::PartialAdaptive, Mode::FullyAdaptive}) CHECK(parse_mode(mode_name(m)) == m);
  CHECK_THROWS_AS(parse_mode("lepski"), ConfigError);
}

TEST_CASE("config validation") {
  auto cfg = small_config(Mode::OracleM);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.sigma_v = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.n_grid = {400, 200};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.n_grid.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.spec.c = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.threads = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("phi construction") {
  PhiDescriptor d;
  const auto f = build_phi(d, Regime::PP);
  CHECK(f.coeffs.size() == static_cast<std::size_t>(d.jmax));
  CHECK(f.weighted_norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  d.rule = "custom";
  d.coeffs = {0.5, 0.1};
  const auto c = build_phi(d, Regime::PP);
  CHECK(c.coeffs.size() == static_cast<std::size_t>(d.jmax));
  CHECK(c.coeffs[1] == 0.1);
  CHECK(c.coeffs[2] == 0.0);
  d.rule = "spline";
  CHECK_THROWS_AS(build_phi(d, Regime::PP), ConfigError);
}

TEST_CASE("oracle dimension grows with n") {
  auto cfg = small_config(Mode::OracleM);
  const auto phi = build_phi(cfg.phi, cfg.spec.regime);
  int prev = 0;
  for (std::size_t n : {250, 1000, 4000, 16000, 64000}) {
    const int m = oracle_dimension(cfg, phi, n);
    CHECK(m >= prev);
    prev = m;
  }
  // beta_j = j^4, upsilon_j = j^{-2}: m* = 3 at n = 250.
  CHECK(oracle_dimension(cfg, phi, 250) == 3);
}

TEST_CASE("zero structural function: truth zero and error shrinks with n") {
  auto cfg = small_config(Mode::OracleM);
  cfg.phi.rule = "custom";
  cfg.phi.coeffs = {};
  cfg.n_grid = {200, 2000, 20000};
  cfg.replications = 40;
  const auto rep = run_experiment(cfg);
  CHECK(rep.truth == 0.0);
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.points[2].mse < rep.points[0].mse);
  CHECK(rep.failures == 0);
}

TEST_CASE("results do not depend on the thread count") {
  for (Mode mode : {Mode::OracleM, Mode::PartialAdaptive, Mode::FullyAdaptive}) {
    auto cfg = small_config(mode);
    const auto one = run_experiment(cfg);
    cfg.threads = 3;
    const auto three = run_experiment(cfg);
    REQUIRE(one.points.size() == three.points.size());
    for (std::size_t i = 0; i < one.points.size(); ++i) {
      CHECK(one.points[i].mse == three.points[i].mse);
      CHECK(one.points[i].mean_m == three.points[i].mean_m);
      CHECK(one.points[i].threshold_freq == three.points[i].threshold_freq);
      for (std::size_t r = 0; r < one.replicates[i].size(); ++r)
        CHECK(one.replicates[i][r].lhat == three.replicates[i][r].lhat);
    }
  }
}

TEST_CASE("replications are reproducible and seed dependent") {
  auto cfg = small_config(Mode::FullyAdaptive);
  const auto phi = build_phi(cfg.phi, cfg.spec.regime);
  const auto h = representer_coeffs(cfg.h, cfg.phi.jmax);
  const auto a = run_replication(cfg, phi, h, 500, 4);
  const auto b = run_replication(cfg, phi, h, 500, 4);
  const auto c = run_replication(cfg, phi, h, 500, 5);
  CHECK(a.lhat == b.lhat);
  CHECK(a.m == b.m);
  CHECK(a.lhat != c.lhat);
  CHECK_FALSE(a.failed);
  CHECK(a.reduction_slack <= kReductionTol);
}

TEST_CASE("report aggregates") {
  auto cfg = small_config(Mode::PartialAdaptive);
  const auto rep = run_experiment(cfg);
  CHECK(rep.replications == cfg.replications);
  REQUIRE(rep.points.size() == cfg.n_grid.size());
  REQUIRE(rep.fit.has_value());
  CHECK(rep.reference.has_value());
  CHECK(rep.reduction_violations == 0);
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    CHECK(p.n == cfg.n_grid[i]);
    double mse = 0.0, mm = 0.0;
    for (const auto& r : rep.replicates[i]) {
      mse += (r.lhat - rep.truth) * (r.lhat - rep.truth);
      mm += r.m;
    }
    CHECK(p.mse == doctest::Approx(mse / cfg.replications).epsilon(1e-12));
    CHECK(p.mean_m == doctest::Approx(mm / cfg.replications));
    CHECK(p.threshold_freq >= 0.0);
    CHECK(p.threshold_freq <= 1.0);
  }
}
