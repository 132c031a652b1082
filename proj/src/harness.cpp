#include "jini/harness.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"

#include "jini/errors.hpp"
#include "jini/parallel.hpp"

namespace jini {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Stream-tree labels.  Children of the root stream:
constexpr std::uint64_t kTagRepl = 0;    // per-replication subtree
constexpr std::uint64_t kTagDesign = 1;  // covariate generation
// Children of root.child(kTagRepl).child(r):
constexpr std::uint64_t kTagData = 0;
constexpr std::uint64_t kTagContamination = 1;
constexpr std::uint64_t kTagMoment = 2;     // shared across methods
constexpr std::uint64_t kTagBootstrap = 3;  // .child(method index)
constexpr std::uint64_t kTagRedesign = 4;

bool is_toy_kind(const ModelKind& kind) {
  return std::holds_alternative<GaussianMeanToy>(kind) ||
         std::holds_alternative<UniformScaleToy>(kind);
}

std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_f6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.replications < 1)
    throw ConfigError("run_experiment: replications must be >= 1");
  if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0))
    throw ConfigError("run_experiment: ci_level must lie in (0, 1)");
  if (cfg.methods.empty())
    throw ConfigError("run_experiment: at least one method is required");
  std::set<std::string> labels;
  for (const MethodSpec& m : cfg.methods) {
    if (m.label.empty() || m.label.find_first_of(",\n\r") != std::string::npos)
      throw ConfigError("run_experiment: method labels must be non-empty and "
                        "free of commas/newlines");
    if (!labels.insert(m.label).second)
      throw ConfigError("run_experiment: duplicate method label '" + m.label +
                        "'");
    if (m.kind != MethodKind::Direct) {
      if (m.moment == MomentKind::Simulated && m.H < 1)
        throw ConfigError("method '" + m.label + "': H must be >= 1");
      if (!(m.ib_tol > 0.0))
        throw ConfigError("method '" + m.label + "': ib_tol must be positive");
      if (!(m.damping > 0.0 && m.damping <= 1.0))
        throw ConfigError("method '" + m.label +
                          "': damping must lie in (0, 1]");
      if (m.ib_max_iter < 1)
        throw ConfigError("method '" + m.label + "': ib_max_iter must be >= 1");
      if (m.bootstrap_tol < 0.0)
        throw ConfigError("method '" + m.label +
                          "': bootstrap_tol must be >= 0");
    }
    if (m.variance == VarianceRule::Bootstrap && m.B < 2)
      throw ConfigError("method '" + m.label +
                        "': bootstrap variance needs B >= 2");
    if (m.variance == VarianceRule::Plugin &&
        !std::holds_alternative<Logistic>(cfg.model_kind))
      throw ConfigError("method '" + m.label +
                        "': plugin variance requires the logistic model");
  }
  const Contamination& c = cfg.contamination;
  if (c.fraction < 0.0 || c.fraction > 0.5)
    throw ConfigError("run_experiment: contamination fraction must lie in "
                      "[0, 0.5]");
  if (c.fraction > 0.0) {
    if (!std::holds_alternative<Pareto>(cfg.model_kind))
      throw ConfigError("run_experiment: contamination is only defined for "
                        "the Pareto model");
    if (!(c.scale > 0.0))
      throw ConfigError("run_experiment: contamination scale must be positive");
  }
}

// Replaces a deterministic count of responses by draws from the same tail
// model with an alternative scale.  Indices are chosen by partial shuffle,
// then redrawn in sorted order so the result does not depend on the order
// in which the shuffle visited them.
void contaminate(Dataset& data, const ModelSpec& model,
                 const Eigen::VectorXd& theta, const Contamination& cont,
                 RngStream stream) {
  const int n = data.n();
  const int k = static_cast<int>(std::lround(cont.fraction * n));
  if (k <= 0) return;
  if (!std::holds_alternative<Pareto>(model.kind))
    throw ConfigError("contaminate: only Pareto responses can be contaminated");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j =
        i + std::min(n - 1 - i, static_cast<int>(stream.uniform() * (n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  const Eigen::VectorXd beta = theta.head(model.p());
  for (int i : idx) {
    const double alpha = std::exp(model.design->row(i).dot(beta));
    data.y(i) = cont.scale * std::exp(-std::log(stream.uniform_pos()) / alpha);
  }
}

// Re-runs the full method on a synthetic dataset; nullopt marks a failed
// replicate.  fp_excess accumulates the fixed-point diagnostics of the
// inner solves (bootstrap_se is called single-threaded here, so plain
// pointer writes are safe).
MethodFn make_bootstrap_fn(bool check_fixed_point, const ModelSpec& model,
                           const MethodSpec& m, double* fp_excess,
                           long long* solves) {
  const double tol = m.bootstrap_tol > 0.0 ? m.bootstrap_tol : m.ib_tol;
  return [check_fixed_point, &model, &m, fp_excess, solves,
          tol](const Dataset& d, RngStream s) -> std::optional<Eigen::VectorXd> {
    FitResult init = fit_initial(m.estimator, model, d);
    if (!init.converged) return std::nullopt;
    if (m.kind == MethodKind::Direct) return init.estimate;
    JiniConfig jc;
    jc.H = m.H;
    jc.max_iter = m.ib_max_iter;
    jc.tol = tol;
    jc.damping = m.damping;
    jc.seed_policy = m.seed_policy;
    jc.stream = s;
    jc.threads = 1;
    jc.check_fixed_point = check_fixed_point;
    if (m.kind == MethodKind::Bbc)
      return bbc_estimate(init.estimate, model, m.estimator, jc, m.moment)
          .estimate;
    JiniResult jr = ib_solve(init.estimate, model, m.estimator, jc, m.moment);
    if (!jr.converged) return std::nullopt;
    ++*solves;
    if (check_fixed_point)
      *fp_excess = std::max(*fp_excess, jr.fixed_point_residual - tol);
    return jr.estimate;
  };
}

ReplicationResult run_replication_impl(const ExperimentConfig& cfg,
                                       const ModelSpec& base_model, int r) {
  ReplicationResult out;
  out.methods.resize(cfg.methods.size());
  const RngStream rep =
      RngStream(cfg.base_seed).child(kTagRepl).child(static_cast<std::uint64_t>(r));
  try {
    const ModelSpec* model = &base_model;
    ModelSpec fresh;
    if (cfg.redesign_each_replication && !base_model.is_toy()) {
      auto x = std::make_shared<Eigen::MatrixXd>(
          generate_design(cfg.design, rep.child(kTagRedesign)));
      fresh = make_model(cfg.model_kind, std::move(x));
      model = &fresh;
    }
    Dataset data = simulate(*model, cfg.theta0, rep.child(kTagData));
    if (cfg.contamination.fraction > 0.0)
      contaminate(data, *model, cfg.theta0, cfg.contamination,
                  rep.child(kTagContamination));
    const RngStream moment_parent = rep.child(kTagMoment);
    const RngStream boot_root = rep.child(kTagBootstrap);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
      out.methods[mi] =
          apply_method(*model, cfg.methods[mi], data, cfg.ci_level,
                       moment_parent,
                       boot_root.child(static_cast<std::uint64_t>(mi)),
                       cfg.check_fixed_point);
  } catch (const NumericalError& e) {
    // data generation failed: every method of this replication is lost
    for (MethodOutcome& mo : out.methods)
      if (!mo.estimate && mo.note.empty()) mo.note = e.what();
  }
  return out;
}

nlohmann::ordered_json estimator_json(const EstimatorSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = estimator_name(spec.kind);
  if (const auto* nw = std::get_if<NwmleTukey>(&spec.kind)) {
    j["c"] = nw->c;
    j["target"] =
        nw->target == NwmleTarget::Logistic ? "logistic" : "pareto";
  }
  j["tol"] = spec.tol;
  j["max_iter"] = spec.max_iter;
  return j;
}

nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = model_kind_name(cfg.model_kind);
  if (const auto* mc = std::get_if<MisclassifiedLogistic>(&cfg.model_kind)) {
    j["fpr"] = mc->fpr;
    j["fnr"] = mc->fnr;
  }
  j["theta0"] = std::vector<double>(cfg.theta0.data(),
                                    cfg.theta0.data() + cfg.theta0.size());
  nlohmann::ordered_json d;
  d["kind"] = design_kind_name(cfg.design.kind);
  d["n"] = cfg.design.n;
  d["p"] = cfg.design.p;
  d["scale"] = cfg.design.scale;
  d["rho"] = cfg.design.rho;
  j["design"] = d;
  j["replications"] = cfg.replications;
  j["ci_level"] = cfg.ci_level;
  j["base_seed"] = cfg.base_seed;
  j["threads"] = cfg.threads;
  if (cfg.contamination.fraction > 0.0) {
    j["contamination"] = {{"fraction", cfg.contamination.fraction},
                          {"scale", cfg.contamination.scale}};
  }
  j["redesign_each_replication"] = cfg.redesign_each_replication;
  j["check_fixed_point"] = cfg.check_fixed_point;
  nlohmann::ordered_json ms = nlohmann::ordered_json::array();
  for (const MethodSpec& m : cfg.methods) {
    nlohmann::ordered_json mj;
    mj["label"] = m.label;
    mj["kind"] = method_kind_name(m.kind);
    mj["estimator"] = estimator_json(m.estimator);
    if (m.kind != MethodKind::Direct) {
      mj["H"] = m.H;
      mj["moment"] = moment_kind_name(m.moment);
      mj["seed_policy"] = seed_policy_name(m.seed_policy);
      mj["damping"] = m.damping;
      mj["ib_tol"] = m.ib_tol;
      mj["ib_max_iter"] = m.ib_max_iter;
    }
    mj["variance"] = variance_rule_name(m.variance);
    if (m.variance == VarianceRule::Bootstrap) {
      mj["B"] = m.B;
      if (m.bootstrap_tol > 0.0) mj["bootstrap_tol"] = m.bootstrap_tol;
    }
    ms.push_back(mj);
  }
  j["methods"] = ms;
  return j;
}

}  // namespace

std::string model_kind_name(const ModelKind& kind) {
  return std::visit(
      overloaded{
          [](const Logistic&) { return std::string("logistic"); },
          [](const MisclassifiedLogistic&) {
            return std::string("misclassified_logistic");
          },
          [](const BetaRounded&) { return std::string("beta_rounded"); },
          [](const Pareto&) { return std::string("pareto"); },
          [](const GaussianMeanToy&) { return std::string("gaussian_toy"); },
          [](const UniformScaleToy&) { return std::string("uniform_toy"); }},
      kind);
}

std::string design_kind_name(DesignKind kind) {
  return kind == DesignKind::IidNormal ? "iid_normal" : "toeplitz";
}

std::string method_kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::Direct: return "direct";
    case MethodKind::Jini: return "jini";
    case MethodKind::Bbc: return "bbc";
  }
  return "direct";
}

std::string variance_rule_name(VarianceRule rule) {
  switch (rule) {
    case VarianceRule::None: return "none";
    case VarianceRule::Bootstrap: return "bootstrap";
    case VarianceRule::Plugin: return "plugin";
  }
  return "none";
}

std::string moment_kind_name(MomentKind kind) {
  return kind == MomentKind::Simulated ? "simulated" : "analytic";
}

std::string seed_policy_name(SeedPolicy policy) {
  return policy == SeedPolicy::Common ? "common" : "fresh";
}

Eigen::MatrixXd generate_design(const DesignSpec& spec, RngStream stream) {
  if (spec.p < 1 || spec.n <= spec.p)
    throw ConfigError("generate_design: need n > p >= 1");
  if (!(spec.scale > 0.0))
    throw ConfigError("generate_design: scale must be positive");
  if (!(spec.rho > -1.0 && spec.rho < 1.0))
    throw ConfigError("generate_design: rho must lie in (-1, 1)");

  const int q = spec.p - 1;
  const double sd = std::sqrt(spec.scale) * std::pow(double(spec.n), -0.25);

  Eigen::MatrixXd chol;
  if (spec.kind == DesignKind::Toeplitz && q > 0) {
    Eigen::MatrixXd corr(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        corr(i, j) = std::pow(spec.rho, std::abs(i - j));
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success)
      throw NumericalError(
          "generate_design: Toeplitz correlation is not positive definite");
    chol = llt.matrixL();
  }

  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    RngStream draw = stream.child(attempt);
    Eigen::MatrixXd x(spec.n, spec.p);
    x.col(0).setOnes();
    if (q > 0) {
      Eigen::MatrixXd z(spec.n, q);
      for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < q; ++j) z(i, j) = draw.normal();
      if (spec.kind == DesignKind::Toeplitz) z = z * chol.transpose();
      x.rightCols(q) = sd * z;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() == spec.p) return x;
  }
  throw RankDeficient(
      "generate_design: covariates rank deficient after one regeneration");
}

ModelSpec build_model(const ExperimentConfig& cfg) {
  if (is_toy_kind(cfg.model_kind))
    return make_toy_model(cfg.model_kind, cfg.design.n);
  auto x = std::make_shared<Eigen::MatrixXd>(
      generate_design(cfg.design, RngStream(cfg.base_seed).child(kTagDesign)));
  return make_model(cfg.model_kind, std::move(x));
}

std::vector<std::string> coordinate_names(const ModelSpec& model) {
  if (model.is_toy()) return {"theta"};
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(model.dim()));
  for (int j = 0; j < model.p(); ++j) names.push_back("b" + std::to_string(j));
  if (std::holds_alternative<BetaRounded>(model.kind)) names.push_back("phi");
  if (std::holds_alternative<Pareto>(model.kind)) names.push_back("gamma");
  return names;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, int r) {
  validate_config(cfg);
  if (r < 0 || r >= cfg.replications)
    throw ConfigError("run_replication: index out of range");
  const ModelSpec model = build_model(cfg);
  if (cfg.theta0.size() != model.dim())
    throw ConfigError("run_replication: theta0 has wrong dimension");
  return run_replication_impl(cfg, model, r);
}

Dataset replication_dataset(const ExperimentConfig& cfg, int r) {
  if (r < 0) throw ConfigError("replication_dataset: index must be >= 0");
  ModelSpec model = build_model(cfg);
  if (cfg.theta0.size() != model.dim())
    throw ConfigError("replication_dataset: theta0 has wrong dimension");
  const RngStream rep =
      RngStream(cfg.base_seed).child(kTagRepl).child(static_cast<std::uint64_t>(r));
  if (cfg.redesign_each_replication && !model.is_toy()) {
    auto x = std::make_shared<Eigen::MatrixXd>(
        generate_design(cfg.design, rep.child(kTagRedesign)));
    model = make_model(cfg.model_kind, std::move(x));
  }
  Dataset data = simulate(model, cfg.theta0, rep.child(kTagData));
  if (cfg.contamination.fraction > 0.0)
    contaminate(data, model, cfg.theta0, cfg.contamination,
                rep.child(kTagContamination));
  return data;
}

MethodOutcome apply_method(const ModelSpec& model, const MethodSpec& m,
                           const Dataset& data, double ci_level,
                           RngStream moment_parent, RngStream boot_parent,
                           bool check_fixed_point) {
  MethodOutcome out;
  Eigen::VectorXd est;
  try {
    FitResult init = fit_initial(m.estimator, model, data);
    if (!init.converged) {
      out.note = "initial fit: " + fit_status_name(init.status);
      return out;
    }
    if (m.kind == MethodKind::Direct) {
      est = init.estimate;
    } else {
      JiniConfig jc;
      jc.H = m.H;
      jc.max_iter = m.ib_max_iter;
      jc.tol = m.ib_tol;
      jc.damping = m.damping;
      jc.seed_policy = m.seed_policy;
      jc.stream = moment_parent;
      jc.threads = 1;
      jc.check_fixed_point = check_fixed_point;
      if (m.kind == MethodKind::Jini) {
        JiniResult jr =
            ib_solve(init.estimate, model, m.estimator, jc, m.moment);
        out.ib_iterations = jr.iterations;
        if (!jr.converged) {
          out.note = "indirect solve: no convergence in " +
                     std::to_string(jr.iterations) + " evaluations";
          return out;
        }
        ++out.converged_solves;
        if (check_fixed_point)
          out.fixed_point_excess = std::max(
              out.fixed_point_excess, jr.fixed_point_residual - jc.tol);
        est = jr.estimate;
      } else {
        est = bbc_estimate(init.estimate, model, m.estimator, jc, m.moment)
                  .estimate;
      }
    }
  } catch (const NumericalError& e) {
    out.note = e.what();
    return out;
  }
  if (!est.allFinite()) {
    out.note = "non-finite estimate";
    return out;
  }
  out.estimate = est;

  if (m.variance == VarianceRule::None) return out;
  try {
    Eigen::VectorXd se;
    int b_used = 0;
    if (m.variance == VarianceRule::Plugin) {
      se = plugin_cov_logistic_mle(*model.design, est).diagonal().cwiseSqrt();
      if (!se.allFinite() || !(se.array() > 0.0).all())
        throw DegenerateVariance("plugin variance not positive definite");
    } else {
      MethodFn fn = make_bootstrap_fn(check_fixed_point, model, m,
                                      &out.fixed_point_excess,
                                      &out.converged_solves);
      se = bootstrap_se(model, est, fn, m.B, boot_parent, 1).se;
      b_used = m.B;
    }
    CiResult ci = wald_ci(est, se, ci_level);
    ci.B = b_used;
    out.ci = ci;
  } catch (const NumericalError& e) {
    out.note = std::string("ci: ") + e.what();
  }
  return out;
}

McReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const ModelSpec model = build_model(cfg);
  if (cfg.theta0.size() != model.dim())
    throw ConfigError("run_experiment: theta0 has wrong dimension");
  if (!model.param_box.contains(cfg.theta0))
    throw ConfigError("run_experiment: theta0 outside the parameter box");

  const int r_total = cfg.replications;
  const int m_total = static_cast<int>(cfg.methods.size());
  std::vector<ReplicationResult> slots(r_total);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(r_total, cfg.threads,
               [&](int r) { slots[r] = run_replication_impl(cfg, model, r); });
  const auto t1 = std::chrono::steady_clock::now();

  McReport report;
  report.config = cfg;
  report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  const std::vector<std::string> coords = coordinate_names(model);
  const int dim = static_cast<int>(coords.size());
  for (int mi = 0; mi < m_total; ++mi) {
    const MethodSpec& m = cfg.methods[mi];
    MethodDiagnostics diag;
    diag.label = m.label;
    std::vector<const MethodOutcome*> ok;
    ok.reserve(static_cast<std::size_t>(r_total));
    for (int r = 0; r < r_total; ++r) {
      const MethodOutcome& mo = slots[r].methods[mi];
      diag.converged_solves += mo.converged_solves;
      diag.max_fixed_point_excess =
          std::max(diag.max_fixed_point_excess, mo.fixed_point_excess);
      if (mo.estimate) {
        ok.push_back(&mo);
        if (m.variance != VarianceRule::None && !mo.ci) ++diag.ci_failures;
      } else {
        ++diag.failures;
      }
    }
    const int used = static_cast<int>(ok.size());

    std::vector<double> vals(used), sq(used), lens;
    for (int j = 0; j < dim; ++j) {
      ReportRow row;
      row.method = m.label;
      row.coord = coords[j];
      row.true_value = cfg.theta0(j);
      row.failures = r_total - used;
      if (used > 0) {
        for (int i = 0; i < used; ++i) vals[i] = (*ok[i]->estimate)(j);
        row.mean_est = pairwise_sum(vals) / used;
        row.abs_bias = std::abs(row.mean_est - row.true_value);
        if (used > 1) {
          for (int i = 0; i < used; ++i) {
            const double d = vals[i] - row.mean_est;
            sq[i] = d * d;
          }
          row.std_err = std::sqrt(pairwise_sum(sq.data(), used) / (used - 1));
        }
        int ci_used = 0, covered = 0;
        lens.clear();
        for (int i = 0; i < used; ++i) {
          if (!ok[i]->ci) continue;
          ++ci_used;
          const CiResult& ci = *ok[i]->ci;
          if (ci.lower(j) <= row.true_value && row.true_value <= ci.upper(j))
            ++covered;
          lens.push_back(ci.upper(j) - ci.lower(j));
        }
        if (ci_used > 0) {
          row.coverage = double(covered) / double(ci_used);
          row.avg_ci_len = pairwise_sum(lens) / ci_used;
        }
      }
      report.rows.push_back(std::move(row));
    }
    report.diagnostics.push_back(std::move(diag));
  }

  if (cfg.keep_raw) {
    for (int r = 0; r < r_total; ++r)
      for (int mi = 0; mi < m_total; ++mi)
        if (slots[r].methods[mi].estimate)
          report.raw.push_back(
              {r, cfg.methods[mi].label, *slots[r].methods[mi].estimate});
  }
  return report;
}

void write_report_csv(const McReport& report, std::ostream& out) {
  out << "method,coord,true_value,mean_est,abs_bias,std_err,coverage,"
         "avg_ci_len,failures\n";
  for (const ReportRow& r : report.rows)
    out << r.method << ',' << r.coord << ',' << format_g17(r.true_value) << ','
        << format_g17(r.mean_est) << ',' << format_g17(r.abs_bias) << ','
        << format_g17(r.std_err) << ',' << format_f6(r.coverage) << ','
        << format_g17(r.avg_ci_len) << ',' << r.failures << '\n';
}

void write_report(const McReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_report: cannot open '" + path + "'");
  write_report_csv(report, out);
  out.flush();
  if (!out) throw IoError("write_report: failed writing '" + path + "'");

  nlohmann::ordered_json meta;
  meta["config"] = config_json(report.config);
  meta["wall_seconds"] = report.wall_seconds;
  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const MethodDiagnostics& d : report.diagnostics) {
    nlohmann::ordered_json dj;
    dj["label"] = d.label;
    dj["failures"] = d.failures;
    dj["ci_failures"] = d.ci_failures;
    dj["converged_solves"] = d.converged_solves;
    if (std::isfinite(d.max_fixed_point_excess))
      dj["max_fixed_point_excess"] = d.max_fixed_point_excess;
    else
      dj["max_fixed_point_excess"] = nullptr;
    diags.push_back(dj);
  }
  meta["diagnostics"] = diags;
  const std::string meta_path = path + ".meta.json";
  std::ofstream mout(meta_path);
  if (!mout) throw IoError("write_report: cannot open '" + meta_path + "'");
  mout << meta.dump(2) << '\n';
  mout.flush();
  if (!mout) throw IoError("write_report: failed writing '" + meta_path + "'");
}

McReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_report: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw IoError("read_report: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line !=
      "method,coord,true_value,mean_est,abs_bias,std_err,coverage,"
      "avg_ci_len,failures")
    throw IoError("read_report: unrecognized header in '" + path + "'");

  McReport report;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        f.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    }
    if (f.size() != 9)
      throw IoError("read_report: line " + std::to_string(lineno) + " of '" +
                    path + "' has " + std::to_string(f.size()) +
                    " fields, expected 9");
    auto num = [&](const std::string& s) -> double {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0')
        throw IoError("read_report: bad number '" + s + "' on line " +
                      std::to_string(lineno) + " of '" + path + "'");
      return v;
    };
    ReportRow row;
    row.method = f[0];
    row.coord = f[1];
    row.true_value = num(f[2]);
    row.mean_est = num(f[3]);
    row.abs_bias = num(f[4]);
    row.std_err = num(f[5]);
    row.coverage = num(f[6]);
    row.avg_ci_len = num(f[7]);
    row.failures = static_cast<int>(num(f[8]));
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_raw_estimates(const McReport& report, const std::string& path) {
  if (report.raw.empty())
    throw ConfigError(
        "write_raw_estimates: report holds no raw estimates (set keep_raw)");
  const ModelSpec model = build_model(report.config);
  const std::vector<std::string> coords = coordinate_names(model);
  std::ofstream out(path);
  if (!out) throw IoError("write_raw_estimates: cannot open '" + path + "'");
  out << "replication,method";
  for (const std::string& c : coords) out << ',' << c;
  out << '\n';
  for (const RawEstimate& r : report.raw) {
    out << r.replication << ',' << r.method;
    for (int j = 0; j < r.estimate.size(); ++j)
      out << ',' << format_g17(r.estimate(j));
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write_raw_estimates: failed writing '" + path + "'");
}

}  // namespace jini
