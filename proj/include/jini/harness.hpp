#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jini/estimators.hpp"
#include "jini/inference.hpp"
#include "jini/model.hpp"
#include "jini/rng.hpp"
#include "jini/solver.hpp"

namespace jini {

// --- design generation -------------------------------------------------------

enum class DesignKind { IidNormal, Toeplitz };

struct DesignSpec {
  DesignKind kind = DesignKind::IidNormal;
  int n = 200;
  int p = 5;           // columns including the intercept
  double scale = 2.0;  // entry variance is scale * n^{-1/2}
  double rho = 0.8;    // adjacent-column correlation (Toeplitz kind)
};

// Fixed covariate matrix: first column all ones, remaining p-1 columns
// centered normal with variance scale*n^{-1/2}, either independent or with
// row covariance proportional to the Toeplitz matrix rho^{|i-j|}.
// Deterministic given the stream; a rank-deficient draw is regenerated once
// from a fresh substream before RankDeficient is thrown.
Eigen::MatrixXd generate_design(const DesignSpec& spec, RngStream stream);

// --- experiment configuration -------------------------------------------------

enum class MethodKind { Direct, Jini, Bbc };
enum class VarianceRule { None, Bootstrap, Plugin };

struct MethodSpec {
  std::string label;  // report "method" column; must be unique per config
  MethodKind kind = MethodKind::Direct;
  EstimatorSpec estimator;  // the direct or initial estimator
  // knobs for Jini/Bbc methods
  int H = 200;
  MomentKind moment = MomentKind::Simulated;
  SeedPolicy seed_policy = SeedPolicy::Common;
  double damping = 1.0;
  double ib_tol = 1e-6;
  int ib_max_iter = 200;
  // confidence intervals
  VarianceRule variance = VarianceRule::None;
  int B = 100;
  // Tolerance for the iterative-bootstrap solves inside bootstrap refits;
  // 0 means "same as ib_tol".  Relaxing it trades a little SE precision for
  // a large share of the bootstrap cost.
  double bootstrap_tol = 0.0;
};

// Responses redrawn from the model with an alternative scale (Pareto only).
struct Contamination {
  double fraction = 0.0;  // share of responses replaced, in [0, 0.5]
  double scale = 50.0;    // replacement scale parameter
};

struct ExperimentConfig {
  ModelKind model_kind;
  Eigen::VectorXd theta0;
  DesignSpec design;  // design.n is the sample size for toy models too
  std::vector<MethodSpec> methods;
  int replications = 500;
  double ci_level = 0.95;
  std::uint64_t base_seed = 1;
  int threads = 1;  // parallelism across replications
  Contamination contamination;
  bool redesign_each_replication = false;  // fresh covariates per replication
  bool check_fixed_point = false;  // re-verify the moment equation per solve
  bool keep_raw = false;           // retain per-replication estimates
};

// Model (and fixed design, for regression families) implied by the config.
ModelSpec build_model(const ExperimentConfig& cfg);

// Stable names used in report metadata and config files.
std::string model_kind_name(const ModelKind& kind);
std::string design_kind_name(DesignKind kind);
std::string method_kind_name(MethodKind kind);
std::string variance_rule_name(VarianceRule rule);
std::string moment_kind_name(MomentKind kind);
std::string seed_policy_name(SeedPolicy policy);

// Report coordinate labels: b0..b{p-1} plus "phi"/"gamma"; "theta" for toys.
std::vector<std::string> coordinate_names(const ModelSpec& model);

// --- per-replication results ---------------------------------------------------

struct MethodOutcome {
  std::optional<Eigen::VectorXd> estimate;
  std::optional<CiResult> ci;
  std::string note;  // failure reason, empty on success
  // max over this replication's converged solves of (re-evaluated moment
  // residual - that solve's tol); -inf when no solve ran with the check on
  double fixed_point_excess = -std::numeric_limits<double>::infinity();
  long long converged_solves = 0;
  int ib_iterations = 0;
};

struct ReplicationResult {
  std::vector<MethodOutcome> methods;  // config order
};

// One Monte Carlo draw: simulate (and optionally contaminate) a dataset at
// theta0, run every configured method, attach CIs per the variance rule.
// Fully determined by (cfg.base_seed, r); per-method failures are recorded,
// never thrown.
ReplicationResult run_replication(const ExperimentConfig& cfg, int r);

// The exact dataset replication r of run_experiment would see, including
// contamination.  Lets `simulate` output match experiment replications.
Dataset replication_dataset(const ExperimentConfig& cfg, int r);

// Applies one method to a fixed dataset (the `fit` workflow): initial fit,
// optional indirect solve or bootstrap correction, CI per the variance rule.
// Failures are recorded in the outcome, not thrown.
MethodOutcome apply_method(const ModelSpec& model, const MethodSpec& method,
                           const Dataset& data, double ci_level,
                           RngStream moment_parent, RngStream boot_parent,
                           bool check_fixed_point = false);

// --- aggregated report ----------------------------------------------------------

struct ReportRow {
  std::string method;
  std::string coord;
  double true_value = 0.0;
  double mean_est = std::numeric_limits<double>::quiet_NaN();
  double abs_bias = std::numeric_limits<double>::quiet_NaN();
  double std_err = std::numeric_limits<double>::quiet_NaN();
  double coverage = std::numeric_limits<double>::quiet_NaN();
  double avg_ci_len = std::numeric_limits<double>::quiet_NaN();
  int failures = 0;
};

struct MethodDiagnostics {
  std::string label;
  int failures = 0;     // replications with no usable estimate
  int ci_failures = 0;  // estimate obtained but CI construction failed
  long long converged_solves = 0;
  // max over all converged solves of (re-evaluated residual - tol); -inf
  // when the fixed-point check was off or no solves ran
  double max_fixed_point_excess = -std::numeric_limits<double>::infinity();
};

struct RawEstimate {
  int replication = 0;
  std::string method;
  Eigen::VectorXd estimate;
};

struct McReport {
  std::vector<ReportRow> rows;  // methods x coordinates, config order
  std::vector<MethodDiagnostics> diagnostics;
  ExperimentConfig config;
  double wall_seconds = 0.0;  // written to metadata only, not the CSV
  std::vector<RawEstimate> raw;  // filled when config.keep_raw
};

// Runs all replications (parallel_for over r, slot-collected so the result
// is identical across thread counts) and aggregates.
McReport run_experiment(const ExperimentConfig& cfg);

// CSV with the fixed header
//   method,coord,true_value,mean_est,abs_bias,std_err,coverage,avg_ci_len,failures
// (coverage with 6 fixed decimals, other reals with %.17g, NaN as "nan")
// plus a <path>.meta.json companion carrying the config echo, seed, wall
// time, and per-method diagnostics.  Round-trips through read_report.
void write_report(const McReport& report, const std::string& path);
void write_report_csv(const McReport& report, std::ostream& out);

// Reads the CSV rows back (metadata is not restored).
McReport read_report(const std::string& path);

// Debug dump: one row per (replication, method) with all coordinates.
void write_raw_estimates(const McReport& report, const std::string& path);

}  // namespace jini
