#include "jini/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "jini/configfile.hpp"
#include "jini/errors.hpp"
#include "jini/harness.hpp"
#include "jini/parallel.hpp"

namespace jini {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "report.csv" + "_fnr0.05" -> "report_fnr0.05.csv"
std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ConfigFile load_config(const std::string& path,
                       const std::vector<std::string>& overrides) {
  ConfigFile cf = ConfigFile::parse_file(path);
  for (const std::string& o : overrides) cf.apply_override(o);
  cf.validate_schema();
  return cf;
}

void run_one_experiment(const ExperimentConfig& cfg, const std::string& output) {
  std::cerr << "experiment: model=" << model_kind_name(cfg.model_kind)
            << " n=" << cfg.design.n << " replications=" << cfg.replications
            << " methods=" << cfg.methods.size()
            << " threads=" << resolve_threads(cfg.threads) << '\n';
  const McReport report = run_experiment(cfg);
  int failures = 0;
  for (const MethodDiagnostics& d : report.diagnostics) failures += d.failures;
  if (output.empty()) {
    write_report_csv(report, std::cout);
  } else {
    write_report(report, output);
    std::cerr << "report written: " << output << " ("
              << format_value(report.wall_seconds) << " s, " << failures
              << " failed fits)\n";
    if (cfg.keep_raw && !report.raw.empty()) {
      const std::string raw_path = with_suffix(output, "_raw");
      write_raw_estimates(report, raw_path);
      std::cerr << "raw estimates written: " << raw_path << '\n';
    }
  }
}

int cmd_experiment(const std::string& config_path,
                   const std::vector<std::string>& overrides,
                   const std::string& output) {
  const ConfigFile cf = load_config(config_path, overrides);
  const std::vector<double> sweep = fnr_sweep_from_config(cf);
  if (sweep.empty()) {
    run_one_experiment(experiment_from_config(cf), output);
    return kExitOk;
  }
  if (output.empty())
    throw ConfigError("experiment: a [sweep] config needs --output");
  if (!std::holds_alternative<MisclassifiedLogistic>(model_from_config(cf)))
    throw ConfigError(
        "experiment: [sweep] fnr requires model.kind = misclassified_logistic");
  for (const double fnr : sweep) {
    ConfigFile per = cf;
    per.set("model", "fnr", format_value(fnr));
    std::cerr << "sweep fnr=" << format_value(fnr) << '\n';
    run_one_experiment(experiment_from_config(per),
                       with_suffix(output, "_fnr" + format_value(fnr)));
  }
  return kExitOk;
}

int cmd_simulate(const std::string& config_path,
                 const std::vector<std::string>& overrides,
                 const std::string& output) {
  const ConfigFile cf = load_config(config_path, overrides);
  ExperimentConfig cfg;
  cfg.model_kind = model_from_config(cf);
  cfg.theta0 = theta0_from_config(cf);
  const bool toy = std::holds_alternative<GaussianMeanToy>(cfg.model_kind) ||
                   std::holds_alternative<UniformScaleToy>(cfg.model_kind);
  cfg.design.n = cf.get_int("design", "n");
  if (!toy) {
    cfg.design.p = cf.get_int("design", "p");
    const std::string dk = cf.get_string_or("design", "kind", "iid_normal");
    if (dk == "toeplitz")
      cfg.design.kind = DesignKind::Toeplitz;
    else if (dk != "iid_normal")
      throw ConfigError("config: design.kind must be iid_normal or toeplitz");
    cfg.design.scale = cf.get_double_or("design", "scale", 2.0);
    cfg.design.rho = cf.get_double_or("design", "rho", 0.8);
  }
  cfg.base_seed = cf.get_u64_or("run", "seed", 1);
  if (cf.has_section("contamination")) {
    cfg.contamination.fraction = cf.get_double("contamination", "fraction");
    cfg.contamination.scale = cf.get_double_or("contamination", "scale", 50.0);
  }
  const Dataset data = replication_dataset(cfg, 0);
  if (output.empty()) {
    write_dataset_csv(std::cout, data);
  } else {
    std::ofstream out(output);
    if (!out) throw IoError("simulate: cannot open '" + output + "'");
    write_dataset_csv(out, data);
    out.flush();
    if (!out) throw IoError("simulate: failed writing '" + output + "'");
    std::cerr << "dataset written: " << output << " (n=" << data.n() << ")\n";
  }
  return kExitOk;
}

int cmd_fit(const std::string& config_path,
            const std::vector<std::string>& overrides,
            const std::string& data_path, const std::string& output) {
  const ConfigFile cf = load_config(config_path, overrides);
  const ModelKind kind = model_from_config(cf);
  if (std::holds_alternative<GaussianMeanToy>(kind) ||
      std::holds_alternative<UniformScaleToy>(kind))
    throw ConfigError("fit: requires a regression model, not a toy model");

  ResponseKind response = ResponseKind::Real;
  if (std::holds_alternative<Logistic>(kind) ||
      std::holds_alternative<MisclassifiedLogistic>(kind))
    response = ResponseKind::Binary;
  else if (std::holds_alternative<BetaRounded>(kind))
    response = ResponseKind::Grid;
  else if (std::holds_alternative<Pareto>(kind))
    response = ResponseKind::Positive;

  const Dataset data = dataset_from_csv_file(data_path, response);
  const ModelSpec model = make_model(kind, data.design);

  std::vector<MethodSpec> methods;
  for (const std::string& name : cf.sections_with_prefix("method."))
    methods.push_back(method_from_config(cf, name, kind));
  if (methods.empty())
    throw ConfigError("fit: no [method.<label>] sections found");
  const double level = cf.get_double_or("run", "ci_level", 0.95);
  const RngStream root(cf.get_u64_or("run", "seed", 1));

  std::cerr << "fit: model=" << model_kind_name(kind) << " n=" << data.n()
            << " p=" << model.p() << " methods=" << methods.size() << '\n';

  const std::vector<std::string> coords = coordinate_names(model);
  std::ostringstream body;
  body << "method,coord,estimate,std_err,ci_lower,ci_upper,covers_zero\n";
  int failed = 0;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const MethodSpec& m = methods[mi];
    const MethodOutcome out =
        apply_method(model, m, data, level, root.child(0),
                     root.child(1).child(static_cast<std::uint64_t>(mi)));
    if (!out.estimate) {
      ++failed;
      std::cerr << "fit: method '" << m.label << "' failed: " << out.note
                << '\n';
      for (const std::string& c : coords)
        body << m.label << ',' << c << ",nan,nan,nan,nan,nan\n";
      continue;
    }
    if (!out.note.empty())
      std::cerr << "fit: method '" << m.label << "': " << out.note << '\n';
    for (std::size_t j = 0; j < coords.size(); ++j) {
      body << m.label << ',' << coords[j] << ','
           << format_g17((*out.estimate)(j));
      if (out.ci) {
        const CiResult& ci = *out.ci;
        const bool covers = ci.lower(j) <= 0.0 && 0.0 <= ci.upper(j);
        body << ',' << format_g17(ci.se(j)) << ',' << format_g17(ci.lower(j))
             << ',' << format_g17(ci.upper(j)) << ',' << (covers ? 1 : 0);
      } else {
        body << ",nan,nan,nan,nan";
      }
      body << '\n';
    }
  }

  std::cout << body.str();
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw IoError("fit: cannot open '" + output + "'");
    out << body.str();
    out.flush();
    if (!out) throw IoError("fit: failed writing '" + output + "'");
    std::cerr << "estimates written: " << output << '\n';
  }
  return failed > 0 ? kExitNumerical : kExitOk;
}

int cmd_report(const std::string& input) {
  const McReport report = read_report(input);
  write_report_csv(report, std::cout);
  std::cerr << "report: " << input << " rows=" << report.rows.size() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Simulation-based bias correction for parametric regressions: "
      "indirect-inference estimation, bootstrap inference, and Monte Carlo "
      "experiments"};
  app.require_subcommand(1);

  std::string config_path, output, data_path, input;
  std::vector<std::string> overrides;

  CLI::App* exp = app.add_subcommand(
      "experiment", "Run a Monte Carlo experiment and write a report");
  exp->add_option("-c,--config", config_path, "config file")->required();
  exp->add_option("-o,--output", output,
                  "report CSV path (stdout when omitted; required for sweeps)");
  exp->add_option("-O,--override", overrides,
                  "key=value config override (repeatable)");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Write one simulated dataset CSV for the configured model");
  sim->add_option("-c,--config", config_path, "config file")->required();
  sim->add_option("-o,--output", output, "dataset CSV path (stdout if omitted)");
  sim->add_option("-O,--override", overrides,
                  "key=value config override (repeatable)");

  CLI::App* fit = app.add_subcommand(
      "fit", "Estimate the configured methods on a dataset CSV");
  fit->add_option("-c,--config", config_path, "config file")->required();
  fit->add_option("-d,--data", data_path, "dataset CSV")->required();
  fit->add_option("-o,--output", output, "estimates CSV path (also printed)");
  fit->add_option("-O,--override", overrides,
                  "key=value config override (repeatable)");

  CLI::App* rep = app.add_subcommand(
      "report", "Validate a report CSV and echo it to standard output");
  rep->add_option("-i,--input", input, "report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (exp->parsed()) return cmd_experiment(config_path, overrides, output);
    if (sim->parsed()) return cmd_simulate(config_path, overrides, output);
    if (fit->parsed())
      return cmd_fit(config_path, overrides, data_path, output);
    if (rep->parsed()) return cmd_report(input);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace jini
