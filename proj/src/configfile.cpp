#include "jini/configfile.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "jini/errors.hpp"

namespace jini {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *trim(end).c_str() != '\0')
    throw ConfigError("config: " + where + ": cannot parse number '" + s + "'");
  return v;
}

long long parse_ll(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *trim(end).c_str() != '\0')
    throw ConfigError("config: " + where + ": cannot parse integer '" + s +
                      "'");
  return v;
}

// Keys accepted per section; method sections share one list.
const std::set<std::string> kModelKeys = {"kind", "fpr", "fnr", "theta0"};
const std::set<std::string> kDesignKeys = {"kind", "n", "p", "scale", "rho"};
const std::set<std::string> kRunKeys = {
    "replications", "seed",     "threads", "ci_level",
    "check_fixed_point", "keep_raw", "redesign"};
const std::set<std::string> kContaminationKeys = {"fraction", "scale"};
const std::set<std::string> kSweepKeys = {"fnr"};
const std::set<std::string> kMethodKeys = {
    "kind",       "estimator",     "c",        "target",
    "start",      "estimator_tol", "estimator_max_iter",
    "H",          "moment",        "seed_policy",
    "damping",    "ib_tol",        "ib_max_iter",
    "variance",   "B",             "bootstrap_tol"};

const std::set<std::string>* schema_for(const std::string& section) {
  if (section == "model") return &kModelKeys;
  if (section == "design") return &kDesignKeys;
  if (section == "run") return &kRunKeys;
  if (section == "contamination") return &kContaminationKeys;
  if (section == "sweep") return &kSweepKeys;
  if (section.rfind("method.", 0) == 0) return &kMethodKeys;
  return nullptr;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
  ConfigFile cf;
  cf.origin_ = origin;
  std::string line;
  int lineno = 0;
  Section* current = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: " + at + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ConfigError("config: " + at + ": empty section name");
      if (cf.find(name) != nullptr)
        throw ConfigError("config: " + at + ": duplicate section [" + name +
                          "]");
      cf.sections_.push_back({name, {}});
      current = &cf.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + at + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: " + at + ": empty key");
    if (current == nullptr)
      throw ConfigError("config: " + at + ": key '" + key +
                        "' appears before any [section]");
    for (const auto& kv : current->entries)
      if (kv.first == key)
        throw ConfigError("config: " + at + ": duplicate key '" + key +
                          "' in [" + current->name + "]");
    current->entries.emplace_back(key, value);
  }
  return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse(in, path);
}

const ConfigFile::Section* ConfigFile::find(const std::string& section) const {
  for (const Section& s : sections_)
    if (s.name == section) return &s;
  return nullptr;
}

ConfigFile::Section* ConfigFile::find(const std::string& section) {
  for (Section& s : sections_)
    if (s.name == section) return &s;
  return nullptr;
}

bool ConfigFile::has_section(const std::string& section) const {
  return find(section) != nullptr;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (s == nullptr) return false;
  for (const auto& kv : s->entries)
    if (kv.first == key) return true;
  return false;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  const Section* s = find(section);
  if (s != nullptr)
    for (const auto& kv : s->entries)
      if (kv.first == key) return kv.second;
  throw ConfigError("config: missing key '" + key + "' in section [" + section +
                    "]");
}

std::string ConfigFile::get_string_or(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  return parse_double(get_string(section, key), section + "." + key);
}

double ConfigFile::get_double_or(const std::string& section,
                                 const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section,
                        const std::string& key) const {
  const long long v = parse_ll(get_string(section, key), section + "." + key);
  if (v < INT_MIN || v > INT_MAX)
    throw ConfigError("config: " + section + "." + key + ": out of range");
  return static_cast<int>(v);
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64_or(const std::string& section,
                                     const std::string& key,
                                     std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string s = get_string(section, key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *trim(end).c_str() != '\0')
    throw ConfigError("config: " + section + "." + key +
                      ": cannot parse integer '" + s + "'");
  return v;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string s = get_string(section, key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: " + section + "." + key + ": expected a boolean, "
                    "got '" + s + "'");
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
  std::string s = get_string(section, key);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, section + "." + key));
  if (out.empty())
    throw ConfigError("config: " + section + "." + key +
                      ": expected a list of numbers");
  return out;
}

std::vector<std::string> ConfigFile::sections_with_prefix(
    const std::string& prefix) const {
  std::vector<std::string> out;
  for (const Section& s : sections_)
    if (s.name.rfind(prefix, 0) == 0) out.push_back(s.name);
  return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  Section* s = find(section);
  if (s == nullptr) {
    sections_.push_back({section, {}});
    s = &sections_.back();
  }
  for (auto& kv : s->entries) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  s->entries.emplace_back(key, value);
}

void ConfigFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty())
    throw ConfigError("override '" + assignment + "': empty key or value");

  // shorthands
  if (key == "seed") return set("run", "seed", value);
  if (key == "R") return set("run", "replications", value);
  if (key == "n") return set("design", "n", value);
  if (key == "p") return set("design", "p", value);
  if (key == "H" || key == "B") {
    bool any = false;
    for (const std::string& name : sections_with_prefix("method.")) {
      const std::string kind = get_string_or(name, "kind", "direct");
      const bool applies = key == "H"
                               ? kind != "direct"
                               : get_string_or(name, "variance", "none") ==
                                     "bootstrap";
      if (applies) {
        set(name, key, value);
        any = true;
      }
    }
    if (!any)
      throw ConfigError("override '" + key + "': no method section uses " +
                        (key == "H" ? std::string("a simulated moment")
                                    : std::string("bootstrap variance")));
    return;
  }

  const auto dot = key.rfind('.');
  if (dot == std::string::npos)
    throw ConfigError("override key '" + key +
                      "' is not a shorthand (seed, R, H, B, n, p) or a dotted "
                      "section.key");
  const std::string section = key.substr(0, dot);
  const std::string leaf = key.substr(dot + 1);
  const std::set<std::string>* schema = schema_for(section);
  if (schema == nullptr)
    throw ConfigError("override '" + key + "': unknown section [" + section +
                      "]");
  if (schema->count(leaf) == 0)
    throw ConfigError("override '" + key + "': unknown key '" + leaf +
                      "' for section [" + section + "]");
  set(section, leaf, value);
}

void ConfigFile::validate_schema() const {
  for (const Section& s : sections_) {
    const std::set<std::string>* schema = schema_for(s.name);
    if (schema == nullptr)
      throw ConfigError("config: unknown section [" + s.name + "]");
    if (s.name.rfind("method.", 0) == 0 &&
        s.name.size() == std::string("method.").size())
      throw ConfigError("config: method section needs a label: [method.NAME]");
    for (const auto& kv : s.entries)
      if (schema->count(kv.first) == 0)
        throw ConfigError("config: unknown key '" + kv.first +
                          "' in section [" + s.name + "]");
  }
}

// --- typed translation -------------------------------------------------------

ModelKind model_from_config(const ConfigFile& cf) {
  const std::string kind = cf.get_string("model", "kind");
  if (kind == "logistic") return Logistic{};
  if (kind == "misclassified_logistic") {
    MisclassifiedLogistic m;
    m.fpr = cf.get_double_or("model", "fpr", 0.0);
    m.fnr = cf.get_double_or("model", "fnr", 0.0);
    return m;
  }
  if (kind == "beta_rounded") return BetaRounded{};
  if (kind == "pareto") return Pareto{};
  if (kind == "gaussian_toy") return GaussianMeanToy{};
  if (kind == "uniform_toy") return UniformScaleToy{};
  throw ConfigError("config: model.kind '" + kind +
                    "' is not one of logistic, misclassified_logistic, "
                    "beta_rounded, pareto, gaussian_toy, uniform_toy");
}

Eigen::VectorXd theta0_from_config(const ConfigFile& cf) {
  const std::vector<double> v = cf.get_doubles("model", "theta0");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
}

namespace {

EstimatorKind estimator_from_token(const ConfigFile& cf,
                                   const std::string& section,
                                   const std::string& token,
                                   const ModelKind& model_kind) {
  if (token == "logistic_mle") return LogisticMle{};
  if (token == "naive_mle") return NaiveMleForMisclassified{};
  if (token == "misclassified_mle") return MisclassifiedMle{};
  if (token == "beta_naive_mle") return BetaNaiveMle{};
  if (token == "beta_rounded_mle") return BetaRoundedMle{};
  if (token == "pareto_mle") return ParetoMle{};
  if (token == "toy_mle") return ToyMle{};
  if (token == "nwmle") {
    NwmleTukey nw;
    nw.c = cf.get_double_or(section, "c", 2.8);
    const std::string target = cf.get_string_or(
        section, "target",
        std::holds_alternative<Pareto>(model_kind) ? "pareto" : "logistic");
    if (target == "logistic")
      nw.target = NwmleTarget::Logistic;
    else if (target == "pareto")
      nw.target = NwmleTarget::Pareto;
    else
      throw ConfigError("config: " + section +
                        ".target must be logistic or pareto");
    return nw;
  }
  throw ConfigError("config: " + section + ".estimator '" + token +
                    "' is not one of logistic_mle, naive_mle, "
                    "misclassified_mle, beta_naive_mle, beta_rounded_mle, "
                    "pareto_mle, nwmle, toy_mle");
}

}  // namespace

MethodSpec method_from_config(const ConfigFile& cf, const std::string& section,
                              const ModelKind& model_kind) {
  MethodSpec m;
  m.label = section.substr(std::string("method.").size());
  const std::string kind = cf.get_string_or(section, "kind", "direct");
  if (kind == "direct")
    m.kind = MethodKind::Direct;
  else if (kind == "jini")
    m.kind = MethodKind::Jini;
  else if (kind == "bbc")
    m.kind = MethodKind::Bbc;
  else
    throw ConfigError("config: " + section +
                      ".kind must be direct, jini, or bbc");

  m.estimator.kind = estimator_from_token(
      cf, section, cf.get_string(section, "estimator"), model_kind);
  m.estimator.tol = cf.get_double_or(section, "estimator_tol", 1e-8);
  m.estimator.max_iter = cf.get_int_or(section, "estimator_max_iter", 100);
  if (cf.has(section, "start")) {
    const std::vector<double> v = cf.get_doubles(section, "start");
    m.estimator.start = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }

  m.H = cf.get_int_or(section, "H", 200);
  const std::string moment = cf.get_string_or(section, "moment", "simulated");
  if (moment == "simulated")
    m.moment = MomentKind::Simulated;
  else if (moment == "analytic")
    m.moment = MomentKind::Analytic;
  else
    throw ConfigError("config: " + section +
                      ".moment must be simulated or analytic");
  const std::string policy = cf.get_string_or(section, "seed_policy", "common");
  if (policy == "common")
    m.seed_policy = SeedPolicy::Common;
  else if (policy == "fresh")
    m.seed_policy = SeedPolicy::Fresh;
  else
    throw ConfigError("config: " + section +
                      ".seed_policy must be common or fresh");
  m.damping = cf.get_double_or(section, "damping", 1.0);
  m.ib_tol = cf.get_double_or(section, "ib_tol", 1e-6);
  m.ib_max_iter = cf.get_int_or(section, "ib_max_iter", 200);

  const std::string variance = cf.get_string_or(section, "variance", "none");
  if (variance == "none")
    m.variance = VarianceRule::None;
  else if (variance == "bootstrap")
    m.variance = VarianceRule::Bootstrap;
  else if (variance == "plugin")
    m.variance = VarianceRule::Plugin;
  else
    throw ConfigError("config: " + section +
                      ".variance must be none, bootstrap, or plugin");
  m.B = cf.get_int_or(section, "B", 100);
  m.bootstrap_tol = cf.get_double_or(section, "bootstrap_tol", 0.0);
  return m;
}

ExperimentConfig experiment_from_config(const ConfigFile& cf) {
  cf.validate_schema();
  ExperimentConfig cfg;
  cfg.model_kind = model_from_config(cf);
  cfg.theta0 = theta0_from_config(cf);

  const std::string dk = cf.get_string_or("design", "kind", "iid_normal");
  if (dk == "iid_normal")
    cfg.design.kind = DesignKind::IidNormal;
  else if (dk == "toeplitz")
    cfg.design.kind = DesignKind::Toeplitz;
  else
    throw ConfigError("config: design.kind must be iid_normal or toeplitz");
  cfg.design.n = cf.get_int("design", "n");
  const bool toy = std::holds_alternative<GaussianMeanToy>(cfg.model_kind) ||
                   std::holds_alternative<UniformScaleToy>(cfg.model_kind);
  cfg.design.p = toy ? cf.get_int_or("design", "p", 1)
                     : cf.get_int("design", "p");
  cfg.design.scale = cf.get_double_or("design", "scale", 2.0);
  cfg.design.rho = cf.get_double_or("design", "rho", 0.8);

  cfg.replications = cf.get_int("run", "replications");
  cfg.base_seed = cf.get_u64_or("run", "seed", 1);
  cfg.threads = cf.get_int_or("run", "threads", 0);
  cfg.ci_level = cf.get_double_or("run", "ci_level", 0.95);
  cfg.check_fixed_point = cf.get_bool_or("run", "check_fixed_point", false);
  cfg.keep_raw = cf.get_bool_or("run", "keep_raw", false);
  cfg.redesign_each_replication = cf.get_bool_or("run", "redesign", false);

  if (cf.has_section("contamination")) {
    cfg.contamination.fraction = cf.get_double("contamination", "fraction");
    cfg.contamination.scale =
        cf.get_double_or("contamination", "scale", 50.0);
  }

  for (const std::string& name : cf.sections_with_prefix("method."))
    cfg.methods.push_back(method_from_config(cf, name, cfg.model_kind));
  if (cfg.methods.empty())
    throw ConfigError("config: no [method.<label>] sections found");
  return cfg;
}

std::vector<double> fnr_sweep_from_config(const ConfigFile& cf) {
  if (!cf.has("sweep", "fnr")) return {};
  return cf.get_doubles("sweep", "fnr");
}

}  // namespace jini
