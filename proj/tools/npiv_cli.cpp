// Command-line front end: simulate, estimate, select, rates, mc.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "npiv/adaptive.hpp"
#include "npiv/errors.hpp"
#include "npiv/estimator.hpp"
#include "npiv/experiment.hpp"
#include "npiv/galerkin.hpp"
#include "npiv/io.hpp"
#include "npiv/rates.hpp"

namespace {

using namespace npiv;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << '\n';
  else write_json(j, out);
}

Normalization parse_norm(const std::string& s) {
  if (s == "first") return Normalization::First;
  if (s == "first_nonzero") return Normalization::FirstNonzero;
  throw ConfigError("normalization must be 'first' or 'first_nonzero'");
}

struct SimulateOpts {
  std::string config, regime = "pp", out;
  double a = 1.0, c = -1.0, p = 2.0, exponent = 2.6, sigma_v = 0.5;
  int op_jmax = 8;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateOpts& o) {
  OperatorSpec spec;
  PhiDescriptor phi;
  double sigma_v = o.sigma_v;
  if (!o.config.empty()) {
    const auto cfg = load_config(o.config);
    spec = cfg.spec;
    phi = cfg.phi;
    sigma_v = cfg.sigma_v;
  } else {
    spec.regime = parse_regime(o.regime);
    spec.a = o.a;
    spec.jmax = o.op_jmax;
    spec.c = o.c > 0.0 ? o.c : OperatorSpec::max_scale(spec.regime, spec.a, spec.jmax);
    phi.p = o.p;
    phi.exponent = o.exponent;
  }
  spec.validate();
  const auto f = build_phi(phi, spec.regime);
  const auto sample = generate(spec, f, sigma_v, o.n, o.seed);
  if (o.out.empty()) throw ConfigError("simulate requires --out");
  write_sample(sample, spec, o.out);
  std::cout << "wrote " << sample.n << " rows to " << o.out << '\n';
  return kExitOk;
}

int run_estimate(const std::string& sample_path, const std::string& rep, int M, const std::string& dump,
                 const std::string& out) {
  const auto sample = read_sample(sample_path);
  const auto h = representer_coeffs(parse_representer(rep));
  if (M < 1) throw ConfigError("--M must be >= 1");
  const auto sys = assemble(sample, M);
  if (!dump.empty()) dump_galerkin_csv(sys, dump);
  emit(trace_to_json(estimate_trace(sys, h)), out);
  return kExitOk;
}

int run_select(const std::string& sample_path, const std::string& rep, const std::string& norm,
               const std::string& out) {
  const auto sample = read_sample(sample_path);
  const auto h = representer_coeffs(parse_representer(rep));
  const auto nz = parse_norm(norm);
  const int Mh = M_upper_h(h, sample.n, nz);
  const auto sys = assemble(sample, Mh);
  emit(trace_to_json(select(sys, h, nz)), out);
  return kExitOk;
}

struct RatesOpts {
  std::string regime = "pp", representer = "point:0.3", out;
  double p = 2.0, a = 1.0, n = 1e6;
  std::optional<double> s;
  bool adaptive = false;
  int jmax = kDefaultJmax;
};

int run_rates(const RatesOpts& o) {
  const auto regime = parse_regime(o.regime);
  const auto h = representer_coeffs(parse_representer(o.representer), o.jmax);
  const auto beta = smoothness_weights(regime, o.p, o.jmax);
  const auto ups = operator_decay(regime, o.a, o.jmax);
  RateReport rep;
  rep.x = effective_sample_size(o.n, o.adaptive);
  if (!(rep.x >= 1.0)) throw ConfigError("effective sample size must be >= 1");
  const auto ms = m_star(beta, ups, rep.x, o.jmax);
  rep.m_star = ms.m_star;
  rep.a_star = ms.a_star;
  const double xs[] = {rep.x};
  rep.kappa = kappa_check(beta, ups, xs).kappa;
  rep.R_fixed = rate_fixed(h, beta, ups, rep.x, o.jmax);
  const auto s = o.s ? o.s : h.decay_s;
  if (s) {
    std::vector<double> omega(static_cast<std::size_t>(o.jmax));
    for (int j = 1; j <= o.jmax; ++j) omega[j - 1] = std::pow(static_cast<double>(j), 2.0 * *s);
    rep.R_class = rate_class(omega, beta, ups, rep.x);
    try {
      rep.order = regime_exponent(regime, o.p, o.a, *s, o.adaptive);
    } catch (const DomainError& e) {
      std::cerr << "note: " << e.what() << '\n';
    }
  }
  emit(rate_report_to_json(rep), o.out);
  return kExitOk;
}

struct McOpts {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, replications;
  bool check = false;
  double tolerance = 0.2;
};

int run_mc(const McOpts& o) {
  auto cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.replications) cfg.replications = *o.replications;
  const auto rep = run_experiment(cfg);
  const auto j = report_to_json(rep);
  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::filesystem::create_directories(o.out);
    write_json(j, (std::filesystem::path(o.out) / "report.json").string());
    write_report_csv(rep, (std::filesystem::path(o.out) / "mse.csv").string());
  }
  if (!o.check) return kExitOk;

  bool ok = true;
  if (rep.failures > 0) {
    std::cerr << "check: " << rep.failures << " failed replications\n";
    ok = false;
  }
  if (rep.reduction_violations > 0) {
    std::cerr << "check: " << rep.reduction_violations << " reduction-inequality violations\n";
    ok = false;
  }
  if (!rep.fit) {
    std::cerr << "check: no slope fit (need >= 3 grid points with positive mse)\n";
    ok = false;
  } else if (rep.reference && rep.reference->branch != RateBranch::Logarithmic) {
    const double diff = std::abs(rep.fit->slope - rep.reference->poly_exponent);
    if (diff > o.tolerance) {
      std::cerr << "check: slope " << rep.fit->slope << " differs from " << rep.reference->poly_exponent
                << " by " << diff << " > " << o.tolerance << '\n';
      ok = false;
    }
  }
  std::cerr << (ok ? "check: pass\n" : "check: FAIL\n");
  return ok ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npiv: series estimation of linear functionals in nonparametric IV models"};
  app.require_subcommand(1);

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "draw a sample and write y,z,w CSV");
  sim->add_option("--config", so.config, "take operator, phi and sigma_v from a config file");
  sim->add_option("--regime", so.regime, "pp, pe or ep");
  sim->add_option("--a", so.a, "degree of ill-posedness");
  sim->add_option("--c", so.c, "operator scale (default: largest admissible)");
  sim->add_option("--op-jmax", so.op_jmax, "number of nonzero operator coefficients");
  sim->add_option("--p", so.p, "smoothness of phi");
  sim->add_option("--exponent", so.exponent, "phi_j ~ j^{-exponent}");
  sim->add_option("--sigma-v", so.sigma_v, "noise standard deviation");
  sim->add_option("--n", so.n, "sample size");
  sim->add_option("--seed", so.seed, "seed");
  sim->add_option("--out", so.out, "output CSV path")->required();

  std::string e_sample, e_rep = "point:0.3", e_dump, e_out;
  int e_M = 8;
  auto* est = app.add_subcommand("estimate", "plug-in estimates for m = 1..M");
  est->add_option("--sample", e_sample, "sample CSV")->required();
  est->add_option("--representer", e_rep, "point:T, average:B, wad, custom:c1,c2,...");
  est->add_option("--M", e_M, "largest dimension");
  est->add_option("--dump-galerkin", e_dump, "write the Galerkin matrix and vector as CSV");
  est->add_option("--out", e_out, "output JSON (default stdout)");

  std::string s_sample, s_rep = "point:0.3", s_norm = "first", s_out;
  auto* sel = app.add_subcommand("select", "data-driven choice of m");
  sel->add_option("--sample", s_sample, "sample CSV")->required();
  sel->add_option("--representer", s_rep, "point:T, average:B, wad, custom:c1,c2,...");
  sel->add_option("--normalization", s_norm, "first or first_nonzero");
  sel->add_option("--out", s_out, "output JSON (default stdout)");

  RatesOpts ro;
  auto* rat = app.add_subcommand("rates", "oracle dimension and rates");
  rat->add_option("--regime", ro.regime, "pp, pe or ep");
  rat->add_option("--p", ro.p, "smoothness");
  rat->add_option("--a", ro.a, "degree of ill-posedness");
  rat->add_option("--s", ro.s, "representer decay (default: from the representer)");
  rat->add_option("--n", ro.n, "sample size");
  rat->add_flag("--adaptive", ro.adaptive, "use n / (1 + log n)");
  rat->add_option("--representer", ro.representer, "point:T, average:B, wad, custom:c1,c2,...");
  rat->add_option("--jmax", ro.jmax, "series truncation");
  rat->add_option("--out", ro.out, "output JSON (default stdout)");

  McOpts mo;
  auto* mc = app.add_subcommand("mc", "Monte Carlo experiment");
  mc->add_option("--config", mo.config, "config JSON")->required();
  mc->add_option("--seed", mo.seed, "override the base seed");
  mc->add_option("--threads", mo.threads, "worker threads (0: all cores)");
  mc->add_option("--replications", mo.replications, "override R");
  mc->add_option("--out", mo.out, "output directory (report.json, mse.csv)");
  mc->add_flag("--check", mo.check, "exit 3 on failures, reduction violations or slope off reference");
  mc->add_option("--tolerance", mo.tolerance, "slope tolerance for --check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sim) return run_simulate(so);
    if (*est) return run_estimate(e_sample, e_rep, e_M, e_dump, e_out);
    if (*sel) return run_select(s_sample, s_rep, s_norm, s_out);
    if (*rat) return run_rates(ro);
    if (*mc) return run_mc(mo);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
