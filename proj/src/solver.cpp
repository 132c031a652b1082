#include "jini/solver.hpp"

#include <cmath>
#include <utility>

#include "jini/errors.hpp"
#include "jini/parallel.hpp"

namespace jini {

namespace {

void check_config(const JiniConfig& cfg) {
  if (cfg.H < 1) throw ConfigError("jini: H must be >= 1");
  if (!(cfg.tol > 0.0)) throw ConfigError("jini: tol must be positive");
  if (!(cfg.damping > 0.0) || cfg.damping > 1.0) {
    throw ConfigError("jini: damping must lie in (0, 1]");
  }
  if (cfg.max_iter < 1) throw ConfigError("jini: max_iter must be >= 1");
}

void check_theta_arg(const ModelSpec& model, const Eigen::VectorXd& theta,
                     const char* who) {
  if (theta.size() != model.dim()) {
    throw std::invalid_argument(std::string(who) + ": theta has dimension " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(model.dim()));
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument(std::string(who) +
                                ": theta contains non-finite entries");
  }
}

}  // namespace

MomentResult simulated_moment(const ModelSpec& model,
                              const EstimatorSpec& estimator,
                              const Eigen::VectorXd& theta, int H,
                              RngStream parent, int threads) {
  if (H < 1) throw ConfigError("simulated_moment: H must be >= 1");
  check_theta_arg(model, theta, "simulated_moment");

  EstimatorSpec inner = estimator;
  inner.start = theta;  // warm start at the candidate keeps fits deterministic

  std::vector<Eigen::VectorXd> slot(H);
  std::vector<unsigned char> good(H, 0);
  parallel_for(H, threads, [&](int h) {
    const Dataset d =
        simulate(model, theta, parent.child(static_cast<uint64_t>(h)));
    try {
      FitResult fr = fit_initial(inner, model, d);
      if (fr.converged) {
        slot[h] = std::move(fr.estimate);
        good[h] = 1;
      }
    } catch (const NumericalError&) {
      // degenerate simulated sample: dropped from the average
    }
  });

  std::vector<Eigen::VectorXd> kept;
  kept.reserve(H);
  for (int h = 0; h < H; ++h) {
    if (good[h]) kept.push_back(std::move(slot[h]));
  }
  const int used = static_cast<int>(kept.size());
  const int failures = H - used;
  if (failures * 5 > H) {
    throw TooManyFailures("simulated_moment: " + std::to_string(failures) +
                              " of " + std::to_string(H) +
                              " inner fits failed",
                          failures, H);
  }

  MomentResult out;
  out.value = pairwise_sum(kept) / static_cast<double>(used);
  out.failures = failures;
  out.total = H;
  return out;
}

Eigen::VectorXd analytic_moment(const ModelSpec& model,
                                const Eigen::VectorXd& theta) {
  check_theta_arg(model, theta, "analytic_moment");
  if (std::holds_alternative<GaussianMeanToy>(model.kind)) {
    return theta;  // the sample mean is exactly unbiased
  }
  if (std::holds_alternative<UniformScaleToy>(model.kind)) {
    const double n = static_cast<double>(model.n());
    return theta * (n / (n + 1.0));  // expectation of the sample maximum
  }
  throw IncompatibleSpec(
      "analytic_moment: closed forms exist only for the toy models");
}

JiniResult ib_solve(const Eigen::VectorXd& pi_obs, const ModelSpec& model,
                    const EstimatorSpec& estimator, const JiniConfig& cfg,
                    MomentKind moment) {
  check_config(cfg);
  check_theta_arg(model, pi_obs, "ib_solve");
  const Box& box = model.param_box;

  JiniResult res;
  int evals = 0;  // monotone counter so fresh streams never repeat
  auto eval_parent = [&](int k) {
    return cfg.seed_policy == SeedPolicy::Common
               ? cfg.stream
               : cfg.stream.child(static_cast<uint64_t>(k));
  };
  auto eval = [&](const Eigen::VectorXd& th) -> MomentResult {
    const int k = evals++;
    if (moment == MomentKind::Analytic) {
      return MomentResult{analytic_moment(model, th), 0, 0};
    }
    MomentResult m = simulated_moment(model, estimator, th, cfg.H,
                                      eval_parent(k), cfg.threads);
    res.inner_failures += m.failures;
    res.inner_fits += m.total;
    return m;
  };

  double damping = cfg.damping;
  Eigen::VectorXd start0 = cfg.start ? project(*cfg.start, box)
                                     : project(pi_obs, box);

  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::VectorXd th = start0;
    Eigen::VectorXd delta;
    double rnorm = std::numeric_limits<double>::quiet_NaN();
    double r0 = 0.0;
    bool diverged = false;
    res.trajectory.clear();

    for (int k = 0;; ++k) {
      if (cfg.keep_trajectory) res.trajectory.push_back(th);
      const MomentResult m = eval(th);
      delta = pi_obs - m.value;
      rnorm = delta.lpNorm<Eigen::Infinity>();
      ++res.iterations;
      if (rnorm <= cfg.tol) {
        res.converged = true;
        break;
      }
      if (k == 0) {
        r0 = rnorm;
      } else if (rnorm > 10.0 * r0) {
        diverged = true;
        break;
      }
      if (k + 1 >= cfg.max_iter) break;  // budget spent at this iterate
      th = project(th + damping * delta, box);
    }

    if (diverged) {
      if (attempt == 0) {
        damping *= 0.5;
        res.notes = "divergence: restarted at damping " +
                    std::to_string(damping);
        continue;
      }
      throw Divergence("ib_solve: residual grew 10x above its initial value "
                       "even after halving the damping",
                       th);
    }

    res.estimate = std::move(th);
    res.moment_residual = std::move(delta);
    res.final_step_norm = rnorm;
    if (!res.converged) {
      res.notes += std::string(res.notes.empty() ? "" : "; ") +
                   "no convergence in " + std::to_string(cfg.max_iter) +
                   " evaluations";
    }
    break;
  }

  if (cfg.check_fixed_point) {
    // Re-evaluate the moment at the estimate with the streams of the last
    // evaluation; under the common policy this replays them exactly.
    Eigen::VectorXd value;
    if (moment == MomentKind::Analytic) {
      value = analytic_moment(model, res.estimate);
    } else {
      value = simulated_moment(model, estimator, res.estimate, cfg.H,
                               eval_parent(evals - 1), cfg.threads)
                  .value;
    }
    res.fixed_point_residual = (pi_obs - value).lpNorm<Eigen::Infinity>();
  }
  return res;
}

BbcResult bbc_estimate(const Eigen::VectorXd& pi_obs, const ModelSpec& model,
                       const EstimatorSpec& estimator, const JiniConfig& cfg,
                       MomentKind moment) {
  check_config(cfg);
  check_theta_arg(model, pi_obs, "bbc_estimate");
  const Eigen::VectorXd at = project(pi_obs, model.param_box);

  BbcResult out;
  if (moment == MomentKind::Analytic) {
    out.estimate = 2.0 * pi_obs - analytic_moment(model, at);
  } else {
    const MomentResult m = simulated_moment(model, estimator, at, cfg.H,
                                            cfg.stream, cfg.threads);
    out.estimate = 2.0 * pi_obs - m.value;
    out.failures = m.failures;
    out.total = m.total;
  }
  return out;
}

}  // namespace jini
