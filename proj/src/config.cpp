#include "ucb/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "ucb/report.hpp"

namespace ucb {

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ValidateWeight: return "validate-weight";
    case ExperimentKind::CarlemanSweep: return "carleman-sweep";
    case ExperimentKind::StabilityRun: return "stability-run";
    case ExperimentKind::StokesCheck: return "stokes-check";
    case ExperimentKind::InterpNorms: return "interp-norms";
    case ExperimentKind::Suite: return "suite";
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::ValidateWeight, ExperimentKind::CarlemanSweep,
        ExperimentKind::StabilityRun, ExperimentKind::StokesCheck, ExperimentKind::InterpNorms,
        ExperimentKind::Suite}) {
    if (kind_name(k) == name) return k;
  }
  throw InvalidConfig("unknown experiment kind: " + name);
}

namespace {

struct RawEntry {
  std::string value;
  int line;
};

std::map<std::string, RawEntry> tokenize(const std::string& text) {
  std::map<std::string, RawEntry> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
    if (key.empty())
      throw InvalidConfig("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key))
      throw InvalidConfig("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                          "'");
    kv[key] = {val, lineno};
  }
  return kv;
}

Real parse_real(const std::string& key, const RawEntry& e) {
  try {
    size_t used = 0;
    const Real v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config line " + std::to_string(e.line) + ": key '" + key +
                        "' expects a number, got '" + e.value + "'");
  }
}

long long parse_int(const std::string& key, const RawEntry& e) {
  try {
    size_t used = 0;
    const long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("config line " + std::to_string(e.line) + ": key '" + key +
                        "' expects an integer, got '" + e.value + "'");
  }
}

bool parse_bool(const std::string& key, const RawEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw InvalidConfig("config line " + std::to_string(e.line) + ": key '" + key +
                      "' expects true/false");
}

std::vector<Real> parse_list(const std::string& key, const RawEntry& e) {
  std::vector<Real> out;
  std::istringstream in(e.value);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    RawEntry sub{tok, e.line};
    out.push_back(parse_real(key, sub));
  }
  if (out.empty())
    throw InvalidConfig("config line " + std::to_string(e.line) + ": key '" + key +
                        "' expects a nonempty comma-separated list");
  return out;
}

const std::set<std::string>& allowed_keys(ExperimentKind kind) {
  static const std::set<std::string> common = {"experiment", "out",     "seed",
                                               "workers",    "grid.r0", "grid.r1",
                                               "grid.nr",    "grid.ntheta"};
  static const std::map<ExperimentKind, std::set<std::string>> extra = {
      {ExperimentKind::ValidateWeight, {"weight"}},
      {ExperimentKind::CarlemanSweep,
       {"metric", "coeffs", "weight", "gamma_list", "s_list", "family.count",
        "family.max_radial_degree", "family.max_angular_frequency", "family.adversaries",
        "family.complex"}},
      {ExperimentKind::StabilityRun, {"target", "delta_list", "eps_rule", "eta"}},
      {ExperimentKind::StokesCheck, {"solution", "weight", "gamma", "s_list"}},
      {ExperimentKind::InterpNorms,
       {"eta_list", "family.count", "family.max_radial_degree",
        "family.max_angular_frequency"}},
  };
  static std::map<ExperimentKind, std::set<std::string>> full = [] {
    std::map<ExperimentKind, std::set<std::string>> m;
    for (const auto& [k, ex] : extra) {
      std::set<std::string> s = common;
      s.insert(ex.begin(), ex.end());
      m[k] = std::move(s);
    }
    // the suite accepts every key and forwards them to the sub-experiments
    std::set<std::string> all = common;
    for (const auto& [k, ex] : extra) all.insert(ex.begin(), ex.end());
    m[ExperimentKind::Suite] = std::move(all);
    return m;
  }();
  return full.at(kind);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind) {
  const auto kv = tokenize(text);
  const auto& allowed = allowed_keys(kind);
  for (const auto& [key, entry] : kv) {
    if (!allowed.count(key))
      throw InvalidConfig("config line " + std::to_string(entry.line) + ": unknown key '" + key +
                          "' for experiment '" + kind_name(kind) + "'");
  }

  ExperimentConfig cfg;
  cfg.kind = kind;
  if (kind == ExperimentKind::InterpNorms) {
    // eigensolve cost is cubic in the node count; default to the smaller grid
    cfg.Nr = 33;
    cfg.Ntheta = 64;
  }

  auto get = [&](const char* key) -> const RawEntry* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* e = get("experiment")) {
    if (kind != ExperimentKind::Suite && e->value != kind_name(kind))
      throw InvalidConfig("config line " + std::to_string(e->line) + ": experiment '" + e->value +
                          "' does not match the requested '" + kind_name(kind) + "'");
  }
  if (const auto* e = get("out")) cfg.out_dir = e->value;
  if (const auto* e = get("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int("seed", *e));
  if (const auto* e = get("workers")) {
    cfg.workers = static_cast<int>(parse_int("workers", *e));
    if (cfg.workers < 1)
      throw InvalidConfig("config line " + std::to_string(e->line) + ": workers must be >= 1");
  } else {
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  }
  if (const auto* e = get("grid.r0")) cfg.r0 = parse_real("grid.r0", *e);
  if (const auto* e = get("grid.r1")) cfg.R1 = parse_real("grid.r1", *e);
  if (const auto* e = get("grid.nr")) cfg.Nr = static_cast<int>(parse_int("grid.nr", *e));
  if (const auto* e = get("grid.ntheta"))
    cfg.Ntheta = static_cast<int>(parse_int("grid.ntheta", *e));
  if (const auto* e = get("metric")) cfg.metric = e->value;
  if (const auto* e = get("coeffs")) cfg.coeffs = e->value;
  if (const auto* e = get("weight")) cfg.weight = e->value;
  if (const auto* e = get("target")) cfg.target = e->value;
  if (const auto* e = get("solution")) cfg.solution = e->value;
  if (const auto* e = get("gamma_list")) cfg.gamma_list = parse_list("gamma_list", *e);
  if (const auto* e = get("s_list")) cfg.s_list = parse_list("s_list", *e);
  if (const auto* e = get("delta_list")) cfg.delta_list = parse_list("delta_list", *e);
  if (const auto* e = get("eta_list")) cfg.eta_list = parse_list("eta_list", *e);
  if (const auto* e = get("gamma")) cfg.gamma = parse_real("gamma", *e);
  if (const auto* e = get("eta")) cfg.eta = parse_real("eta", *e);
  if (const auto* e = get("eps_rule")) cfg.eps_rule = e->value;
  if (const auto* e = get("family.count"))
    cfg.family_count = static_cast<int>(parse_int("family.count", *e));
  if (const auto* e = get("family.max_radial_degree"))
    cfg.family_max_radial_degree = static_cast<int>(parse_int("family.max_radial_degree", *e));
  if (const auto* e = get("family.max_angular_frequency"))
    cfg.family_max_angular_frequency =
        static_cast<int>(parse_int("family.max_angular_frequency", *e));
  if (const auto* e = get("family.adversaries"))
    cfg.family_adversaries = parse_bool("family.adversaries", *e);
  if (const auto* e = get("family.complex"))
    cfg.family_complex = parse_bool("family.complex", *e);

  // contract checks that must surface as configuration errors
  if (!(cfg.r0 > 0.0 && cfg.R1 > cfg.r0))
    throw InvalidConfig("grid: need 0 < grid.r0 < grid.r1");
  if (cfg.Nr < 8 || cfg.Ntheta < 8 || cfg.Ntheta % 2 != 0)
    throw InvalidConfig("grid: need grid.nr >= 8 and even grid.ntheta >= 8");
  if (!(cfg.eta >= 0.0 && cfg.eta < 2.0))
    throw InvalidConfig("eta = " + fmt_real(cfg.eta) + " violates the 0 <= eta < 2 contract");
  for (Real e : cfg.eta_list)
    if (!(e >= 0.0 && e < 2.0))
      throw InvalidConfig("eta_list entry " + fmt_real(e) +
                          " violates the 0 <= eta < 2 contract");
  for (Real d : cfg.delta_list)
    if (!(d > 0.0 && d < 1.0)) throw InvalidConfig("delta_list entries must lie in (0, 1)");
  for (Real g : cfg.gamma_list)
    if (!(g >= 1.0)) throw InvalidConfig("gamma_list entries must be >= 1");
  for (Real s : cfg.s_list)
    if (!(s >= 1.0)) throw InvalidConfig("s_list entries must be >= 1");
  if (!(cfg.gamma >= 1.0)) throw InvalidConfig("gamma must be >= 1");
  if (cfg.family_count < 1) throw InvalidConfig("family.count must be >= 1");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, ExperimentKind kind) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidConfig("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), kind);
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto list_str = [](const std::vector<Real>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fmt_real(v[i]);
    }
    return s;
  };
  out.emplace_back("experiment", kind_name(cfg.kind));
  out.emplace_back("grid.r0", fmt_real(cfg.r0));
  out.emplace_back("grid.r1", fmt_real(cfg.R1));
  out.emplace_back("grid.nr", fmt_int(cfg.Nr));
  out.emplace_back("grid.ntheta", fmt_int(cfg.Ntheta));
  out.emplace_back("metric", cfg.metric);
  out.emplace_back("coeffs", cfg.coeffs);
  out.emplace_back("weight", cfg.weight);
  out.emplace_back("target", cfg.target);
  out.emplace_back("solution", cfg.solution);
  out.emplace_back("gamma_list", list_str(cfg.gamma_list));
  out.emplace_back("s_list", list_str(cfg.s_list));
  out.emplace_back("delta_list", list_str(cfg.delta_list));
  out.emplace_back("eta_list", list_str(cfg.eta_list));
  out.emplace_back("gamma", fmt_real(cfg.gamma));
  out.emplace_back("eta", fmt_real(cfg.eta));
  out.emplace_back("eps_rule", cfg.eps_rule);
  out.emplace_back("seed", fmt_int(static_cast<long long>(cfg.seed)));
  out.emplace_back("workers", fmt_int(cfg.workers));
  out.emplace_back("family.count", fmt_int(cfg.family_count));
  out.emplace_back("family.max_radial_degree", fmt_int(cfg.family_max_radial_degree));
  out.emplace_back("family.max_angular_frequency", fmt_int(cfg.family_max_angular_frequency));
  out.emplace_back("family.adversaries", cfg.family_adversaries ? "true" : "false");
  out.emplace_back("family.complex", cfg.family_complex ? "true" : "false");
  out.emplace_back("out", cfg.out_dir);
  return out;
}

}  // namespace ucb
