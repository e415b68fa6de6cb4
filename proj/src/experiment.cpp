#include "npiv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "npiv/errors.hpp"
#include "npiv/estimator.hpp"
#include "npiv/galerkin.hpp"

namespace npiv {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::OracleM: return "oracle";
    case Mode::PartialAdaptive: return "partial";
    case Mode::FullyAdaptive: return "full";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "oracle" || s == "OracleM") return Mode::OracleM;
  if (s == "partial" || s == "PartialAdaptive") return Mode::PartialAdaptive;
  if (s == "full" || s == "FullyAdaptive") return Mode::FullyAdaptive;
  throw ConfigError("unknown mode '" + s + "' (expected oracle, partial or full)");
}

StructuralFunction build_phi(const PhiDescriptor& d, Regime regime) {
  if (d.jmax < 1) throw ConfigError("phi jmax must be >= 1");
  auto beta = smoothness_weights(regime, d.p, d.jmax);
  if (d.rule == "power") return power_law_function(d.exponent, std::move(beta), d.rho, d.fill);
  if (d.rule == "custom") {
    if (d.coeffs.size() > static_cast<std::size_t>(d.jmax)) throw ConfigError("more phi coefficients than jmax");
    StructuralFunction f{d.coeffs, std::move(beta), d.rho};
    f.coeffs.resize(static_cast<std::size_t>(d.jmax), 0.0);
    f.validate();
    return f;
  }
  throw ConfigError("unknown phi rule '" + d.rule + "'");
}

void ExperimentConfig::validate() const {
  spec.validate();
  if (!spec.positivity_ok()) throw ConfigError("positivity budget violated by the operator spec");
  if (!(sigma_v > 0.0)) throw ConfigError("sigma_v must be > 0");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (n_grid.empty()) throw ConfigError("n_grid must be non-empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ConfigError("sample sizes must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("slope_fit: need at least 3 points");
  const double k = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [n, mse] : points) {
    if (!(n > 0.0) || !(mse > 0.0)) throw DomainError("slope_fit: n and mse must be positive");
    mx += std::log(n);
    my += std::log(mse);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, mse] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(mse) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("slope_fit: all sample sizes equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [n, mse] : points) {
    const double r = std::log(mse) - intercept - fit.slope * std::log(n);
    ssr += r * r;
  }
  fit.stderr_ = std::sqrt(ssr / (k - 2.0) / sxx);
  return fit;
}

int oracle_dimension(const ExperimentConfig& cfg, const StructuralFunction& phi, std::size_t n) {
  const int jmax = static_cast<int>(phi.coeffs.size());
  const auto ups = operator_decay(cfg.spec.regime, cfg.spec.a, jmax);
  return m_star(phi.beta, ups, static_cast<double>(n), jmax).m_star;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, const StructuralFunction& phi,
                                  const Representer& h, std::size_t n, std::uint64_t r) {
  ReplicationResult res;
  try {
    const auto sample = generate(cfg.spec, phi, cfg.sigma_v, n, derive_stream_seed(cfg.seed, n, r));
    switch (cfg.mode) {
      case Mode::OracleM: {
        const auto ms = oracle_dimension(cfg, phi, n);
        const auto sys = assemble(sample, ms);
        const auto est = plugin_estimate(sys, h, ms);
        res.lhat = est.lhat;
        res.thresholded = est.thresholded;
        res.m = ms;
        break;
      }
      case Mode::PartialAdaptive: {
        const auto pen = deterministic_penalty(cfg.spec, phi, cfg.sigma_v, h, n, cfg.normalization);
        const auto sys = assemble(sample, pen.Mn);
        const auto tr = select_partial(sys, pen, h);
        res.lhat = tr.lhat;
        res.m = tr.mhat;
        res.thresholded = tr.rows[tr.mhat - 1].thresholded;
        res.reduction_slack = tr.reduction_slack();
        break;
      }
      case Mode::FullyAdaptive: {
        const int Mh = M_upper_h(h, n, cfg.normalization);
        const auto sys = assemble(sample, Mh);
        const auto tr = select(sys, h, cfg.normalization);
        res.lhat = tr.lhat;
        res.m = tr.mhat;
        res.thresholded = tr.rows[tr.mhat - 1].thresholded;
        res.reduction_slack = tr.reduction_slack();
        break;
      }
    }
    if (!std::isfinite(res.lhat)) {
      res.failed = true;
      res.lhat = 0.0;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    res.failed = true;
    res.lhat = 0.0;
  }
  return res;
}

MonteCarloReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto phi = build_phi(cfg.phi, cfg.spec.regime);
  const auto h = representer_coeffs(cfg.h, cfg.phi.jmax);

  MonteCarloReport rep;
  rep.mode = cfg.mode;
  rep.truth = functional_of(phi, h);
  rep.replications = cfg.replications;

  // Surface configuration errors before spawning workers.
  if (cfg.mode == Mode::FullyAdaptive) (void)M_upper_h(h, cfg.n_grid.front(), cfg.normalization);
  if (cfg.mode == Mode::PartialAdaptive) {
    (void)deterministic_penalty(cfg.spec, phi, cfg.sigma_v, h, cfg.n_grid.front(), cfg.normalization);
  }

  const std::size_t R = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = cfg.n_grid.size() * R;
  rep.replicates.assign(cfg.n_grid.size(), std::vector<ReplicationResult>(R));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t t = next++; t < total && !failed; t = next++) {
      const std::size_t ni = t / R, r = t % R;
      try {
        rep.replicates[ni][r] = run_replication(cfg, phi, h, cfg.n_grid[ni], r);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  unsigned nthreads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  nthreads = std::clamp<unsigned>(nthreads, 1u, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  std::vector<std::pair<double, double>> pts;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    NPointSummary s;
    s.n = cfg.n_grid[ni];
    for (const auto& res : rep.replicates[ni]) {
      const double err = res.lhat - rep.truth;
      s.mse += err * err;
      s.mean_m += res.m;
      s.threshold_freq += res.thresholded ? 1.0 : 0.0;
      s.failures += res.failed ? 1 : 0;
      if (cfg.mode != Mode::OracleM && res.reduction_slack > kReductionTol) ++s.reduction_violations;
    }
    s.mse /= static_cast<double>(R);
    s.mean_m /= static_cast<double>(R);
    s.threshold_freq /= static_cast<double>(R);
    if (cfg.mode == Mode::OracleM) {
      s.oracle_m = oracle_dimension(cfg, phi, s.n);
    } else if (cfg.mode == Mode::PartialAdaptive) {
      s.oracle_m = deterministic_penalty(cfg.spec, phi, cfg.sigma_v, h, s.n, cfg.normalization).Mn;
    } else {
      s.oracle_m = M_upper_h(h, s.n, cfg.normalization);
    }
    rep.failures += s.failures;
    rep.reduction_violations += s.reduction_violations;
    pts.emplace_back(static_cast<double>(s.n), s.mse);
    rep.points.push_back(s);
  }
  if (pts.size() >= 3 && std::all_of(pts.begin(), pts.end(), [](const auto& p) { return p.second > 0.0; })) {
    rep.fit = slope_fit(pts);
  }
  if (h.decay_s) {
    try {
      rep.reference = regime_exponent(cfg.spec.regime, cfg.phi.p, cfg.spec.a, *h.decay_s,
                                      cfg.mode != Mode::OracleM);
    } catch (const DomainError&) {
      rep.reference.reset();
    }
  }
  return rep;
}

}  // namespace npiv
