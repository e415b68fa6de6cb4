#include "npiv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "npiv/errors.hpp"

namespace npiv {

namespace {

// Non-finite values are written as strings so the output stays valid JSON.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("trailing characters in " + what + " '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "coefficient"));
  if (out.empty()) throw ConfigError("empty coefficient list");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

RepresenterKind parse_representer(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "point") {
    if (rest.empty()) throw ConfigError("point representer needs t0, e.g. point:0.3");
    return PointEval{parse_double(rest, "t0")};
  }
  if (head == "average") {
    if (rest.empty()) throw ConfigError("average representer needs b, e.g. average:0.5");
    return Average{parse_double(rest, "b")};
  }
  if (head == "wad") {
    if (!rest.empty()) throw ConfigError("wad representer takes no argument");
    return WeightedAvgDeriv{};
  }
  if (head == "custom") {
    Custom c;
    auto list = rest;
    if (const auto semi = rest.find(';'); semi != std::string::npos) {
      list = rest.substr(0, semi);
      const auto opt = rest.substr(semi + 1);
      if (opt.rfind("s=", 0) != 0) throw ConfigError("custom representer option must be s=<decay>");
      c.decay_s = parse_double(opt.substr(2), "decay_s");
    }
    c.coeffs = parse_list(list);
    return c;
  }
  throw ConfigError("unknown representer '" + text + "' (expected point, average, wad or custom)");
}

json representer_to_json(const RepresenterKind& kind) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PointEval>) return {{"kind", "point"}, {"t0", k.t0}};
        else if constexpr (std::is_same_v<K, Average>) return {{"kind", "average"}, {"b", k.b}};
        else if constexpr (std::is_same_v<K, WeightedAvgDeriv>) return {{"kind", "wad"}};
        else {
          json j = {{"kind", "custom"}, {"coeffs", k.coeffs}};
          if (k.decay_s) j["decay_s"] = *k.decay_s;
          return j;
        }
      },
      kind);
}

RepresenterKind representer_from_json(const json& j) {
  if (j.is_string()) return parse_representer(j.get<std::string>());
  check_keys(j, {"kind", "t0", "b", "coeffs", "decay_s"}, "representer");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point") return PointEval{j.at("t0").get<double>()};
  if (kind == "average") return Average{j.at("b").get<double>()};
  if (kind == "wad") return WeightedAvgDeriv{};
  if (kind == "custom") {
    Custom c;
    c.coeffs = j.at("coeffs").get<std::vector<double>>();
    if (j.contains("decay_s")) c.decay_s = j.at("decay_s").get<double>();
    return c;
  }
  throw ConfigError("unknown representer kind '" + kind + "'");
}

OperatorSpec spec_from_json(const json& j) {
  check_keys(j, {"regime", "a", "c", "jmax", "d", "D"}, "operator");
  OperatorSpec s;
  if (j.contains("regime")) s.regime = parse_regime(j.at("regime").get<std::string>());
  read_opt(j, "a", s.a);
  read_opt(j, "jmax", s.jmax);
  read_opt(j, "d", s.d);
  read_opt(j, "D", s.D);
  if (j.contains("c") && j.at("c").is_string()) {
    if (j.at("c").get<std::string>() != "max") throw ConfigError("operator c must be a number or \"max\"");
    s.c = OperatorSpec::max_scale(s.regime, s.a, s.jmax);
  } else {
    read_opt(j, "c", s.c);
  }
  s.validate();
  return s;
}

json spec_to_json(const OperatorSpec& s) {
  return {{"regime", regime_name(s.regime)}, {"a", s.a}, {"c", s.c}, {"jmax", s.jmax}, {"d", s.d}, {"D", s.D}};
}

PhiDescriptor phi_from_json(const json& j) {
  check_keys(j, {"rule", "exponent", "p", "rho", "fill", "jmax", "coeffs"}, "phi");
  PhiDescriptor d;
  read_opt(j, "rule", d.rule);
  read_opt(j, "exponent", d.exponent);
  read_opt(j, "p", d.p);
  read_opt(j, "rho", d.rho);
  read_opt(j, "fill", d.fill);
  read_opt(j, "jmax", d.jmax);
  read_opt(j, "coeffs", d.coeffs);
  return d;
}

json phi_to_json(const PhiDescriptor& d) {
  json j = {{"rule", d.rule}, {"p", d.p}, {"rho", d.rho}, {"jmax", d.jmax}};
  if (d.rule == "power") {
    j["exponent"] = d.exponent;
    j["fill"] = d.fill;
  } else {
    j["coeffs"] = d.coeffs;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    check_keys(j,
               {"operator", "phi", "representer", "sigma_v", "n_grid", "replications", "seed", "mode", "threads",
                "normalization"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("operator")) cfg.spec = spec_from_json(j.at("operator"));
    if (j.contains("phi")) cfg.phi = phi_from_json(j.at("phi"));
    if (j.contains("representer")) cfg.h = representer_from_json(j.at("representer"));
    read_opt(j, "sigma_v", cfg.sigma_v);
    read_opt(j, "n_grid", cfg.n_grid);
    read_opt(j, "replications", cfg.replications);
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "threads", cfg.threads);
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("normalization")) {
      const auto s = j.at("normalization").get<std::string>();
      if (s == "first") cfg.normalization = Normalization::First;
      else if (s == "first_nonzero") cfg.normalization = Normalization::FirstNonzero;
      else throw ConfigError("normalization must be 'first' or 'first_nonzero'");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  return {{"operator", spec_to_json(cfg.spec)},
          {"phi", phi_to_json(cfg.phi)},
          {"representer", representer_to_json(cfg.h)},
          {"sigma_v", cfg.sigma_v},
          {"n_grid", cfg.n_grid},
          {"replications", cfg.replications},
          {"seed", cfg.seed},
          {"mode", mode_name(cfg.mode)},
          {"threads", cfg.threads},
          {"normalization", cfg.normalization == Normalization::First ? "first" : "first_nonzero"}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json rate_order_to_json(const RateOrder& r) {
  return {{"regime", regime_name(r.regime)},
          {"adaptive", r.adaptive},
          {"branch", branch_name(r.branch)},
          {"poly_exponent", r.poly_exponent},
          {"log_exponent", r.log_exponent},
          {"loglog_exponent", r.loglog_exponent},
          {"describe", r.describe()}};
}

json report_to_json(const MonteCarloReport& rep) {
  json pts = json::array();
  for (const auto& p : rep.points) {
    pts.push_back({{"n", p.n},
                   {"mse", num(p.mse)},
                   {"mean_m", p.mean_m},
                   {"threshold_freq", p.threshold_freq},
                   {"failures", p.failures},
                   {"reduction_violations", p.reduction_violations},
                   {"oracle_m", p.oracle_m}});
  }
  json j = {{"mode", mode_name(rep.mode)},
            {"truth", rep.truth},
            {"replications", rep.replications},
            {"failures", rep.failures},
            {"reduction_violations", rep.reduction_violations},
            {"points", pts}};
  j["fit"] = rep.fit ? json{{"slope", rep.fit->slope}, {"stderr", rep.fit->stderr_}} : json(nullptr);
  j["reference"] = rep.reference ? rate_order_to_json(*rep.reference) : json(nullptr);
  return j;
}

void write_report_csv(const MonteCarloReport& rep, const std::string& path) {
  auto os = open_out(path);
  os << "n,mse,mean_m,threshold_freq\n";
  char buf[128];
  for (const auto& p : rep.points) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", p.n, p.mse, p.mean_m, p.threshold_freq);
    os << buf;
  }
}

void write_sample(const Sample& s, const OperatorSpec& spec, const std::string& path) {
  {
    auto os = open_out(path);
    os << "y,z,w\n";
    char buf[96];
    for (std::size_t i = 0; i < s.n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.y[i], s.z[i], s.w[i]);
      os << buf;
    }
  }
  const json side = {{"spec", spec_to_json(spec)},
                     {"seed", s.seed},
                     {"sigma_v", s.sigma_v},
                     {"n", s.n},
                     {"envelope", s.envelope}};
  write_json(side, path + ".json");
}

Sample read_sample(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open sample '" + path + "'");
  std::string line;
  if (!std::getline(is, line) || line.rfind("y,z,w", 0) != 0) {
    throw ConfigError("sample '" + path + "' lacks the y,z,w header");
  }
  Sample s;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    double y, z, w;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &y, &z, &w) != 3) {
      throw ConfigError("sample '" + path + "': bad row at line " + std::to_string(lineno));
    }
    s.y.push_back(y);
    s.z.push_back(z);
    s.w.push_back(w);
  }
  s.n = s.y.size();
  if (s.n == 0) throw ConfigError("sample '" + path + "' is empty");
  if (std::ifstream side(path + ".json"); side) {
    try {
      json j;
      side >> j;
      read_opt(j, "seed", s.seed);
      read_opt(j, "sigma_v", s.sigma_v);
      read_opt(j, "envelope", s.envelope);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad sample sidecar: ") + e.what());
    }
  }
  return s;
}

json trace_to_json(const EstimateTrace& tr) {
  json per = json::array();
  for (std::size_t k = 0; k < tr.lhat.size(); ++k) {
    per.push_back({{"m", k + 1}, {"lhat", tr.lhat[k]}, {"invnorm", num(tr.invnorm[k])}, {"thresholded", bool(tr.thresholded[k])}});
  }
  return {{"n", tr.n}, {"per_m", per}};
}

json trace_to_json(const SelectionTrace& tr) {
  json per = json::array();
  for (const auto& r : tr.rows) {
    per.push_back({{"m", r.m},
                   {"lhat", r.lhat},
                   {"pen_hat", num(r.pen)},
                   {"psi_hat", num(r.psi)},
                   {"criterion", num(r.criterion)},
                   {"thresholded", r.thresholded}});
  }
  return {{"n", tr.n}, {"Mh", tr.Mh}, {"Mhat", tr.Mhat}, {"mhat", tr.mhat}, {"lhat", tr.lhat}, {"per_m", per}};
}

json rate_report_to_json(const RateReport& rep) {
  json j = {{"x", rep.x}, {"m_star", rep.m_star}, {"a_star", rep.a_star}, {"kappa", rep.kappa}, {"R_fixed", num(rep.R_fixed)}};
  j["R_class"] = rep.R_class ? num(*rep.R_class) : json(nullptr);
  j["order"] = rep.order ? rate_order_to_json(*rep.order) : json(nullptr);
  return j;
}

void write_json(const json& j, const std::string& path) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace npiv
