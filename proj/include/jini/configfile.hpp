#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jini/harness.hpp"

namespace jini {

// Line-oriented config format:
//   - `[section]` headers; `key = value` entries; `#` starts a comment
//   - values are numbers, tokens, or whitespace-separated number lists
//   - method sections are named `[method.<label>]`
// Unknown sections or keys are rejected so typos fail loudly.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& origin);
  static ConfigFile parse_file(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  // Getters throw ConfigError naming the missing key.
  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key,
                 int fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;

  // Sections named `<prefix><rest>`, in file order.
  std::vector<std::string> sections_with_prefix(
      const std::string& prefix) const;

  // Inserts or replaces; creates the section if needed.
  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // Applies one `key=value` override.  Shorthands: seed -> run.seed,
  // R -> run.replications, n -> design.n, p -> design.p, H and B fan out to
  // every method section they apply to.  Dotted `section.key` forms address
  // any schema key.  Unknown keys throw ConfigError.
  void apply_override(const std::string& assignment);

  // Rejects sections/keys outside the experiment schema.
  void validate_schema() const;

 private:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  const Section* find(const std::string& section) const;
  Section* find(const std::string& section);
  std::vector<Section> sections_;
  std::string origin_;
};

// --- config -> typed structures ----------------------------------------------

// [model] section: kind plus family constants (fpr/fnr).
ModelKind model_from_config(const ConfigFile& cf);

// theta0 list from [model]; throws if absent.
Eigen::VectorXd theta0_from_config(const ConfigFile& cf);

// [method.<label>] section.
MethodSpec method_from_config(const ConfigFile& cf, const std::string& section,
                              const ModelKind& model_kind);

// Whole-file translation; validates the schema first.
ExperimentConfig experiment_from_config(const ConfigFile& cf);

// [sweep] fnr list; empty when absent.
std::vector<double> fnr_sweep_from_config(const ConfigFile& cf);

}  // namespace jini
