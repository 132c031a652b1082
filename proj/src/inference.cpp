#include "jini/inference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jini/errors.hpp"
#include "jini/parallel.hpp"
#include "jini/special.hpp"

namespace jini {

BootstrapResult bootstrap_se(const ModelSpec& model,
                             const Eigen::VectorXd& theta_hat,
                             const MethodFn& method, int B, RngStream parent,
                             int threads) {
  if (B < 2) throw ConfigError("bootstrap_se: need B >= 2 replicates");
  if (theta_hat.size() != model.dim()) {
    throw std::invalid_argument("bootstrap_se: theta_hat has dimension " +
                                std::to_string(theta_hat.size()) +
                                ", expected " + std::to_string(model.dim()));
  }
  const Eigen::VectorXd at = project(theta_hat, model.param_box);

  std::vector<Eigen::VectorXd> slot(B);
  std::vector<unsigned char> good(B, 0);
  parallel_for(B, threads, [&](int b) {
    RngStream rep = parent.child(static_cast<uint64_t>(b));
    const Dataset d = simulate(model, at, rep.child(0));
    try {
      std::optional<Eigen::VectorXd> est = method(d, rep.child(1));
      if (est && est->allFinite()) {
        slot[b] = std::move(*est);
        good[b] = 1;
      }
    } catch (const NumericalError&) {
      // failed refit: dropped from the variance estimate
    }
  });

  std::vector<Eigen::VectorXd> kept;
  kept.reserve(B);
  for (int b = 0; b < B; ++b) {
    if (good[b]) kept.push_back(std::move(slot[b]));
  }
  const int used = static_cast<int>(kept.size());
  const int failures = B - used;
  if (failures * 5 > B || used < 2) {
    throw TooManyFailures("bootstrap_se: " + std::to_string(failures) +
                              " of " + std::to_string(B) +
                              " bootstrap refits failed",
                          failures, B);
  }

  const int dim = model.dim();
  const Eigen::VectorXd mean = pairwise_sum(kept) / static_cast<double>(used);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const Eigen::VectorXd& est : kept) {
    const Eigen::VectorXd c = est - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(used - 1);

  BootstrapResult out;
  out.cov = std::move(cov);
  out.se = out.cov.diagonal().cwiseSqrt();
  out.failures = failures;
  out.total = B;
  if ((out.se.array() <= 0.0).any()) {
    throw DegenerateVariance(
        "bootstrap_se: a coordinate has zero variance across refits");
  }
  return out;
}

CiResult wald_ci(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& se,
                 double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ConfigError("wald_ci: level must lie in (0, 1)");
  }
  if (theta_hat.size() != se.size()) {
    throw std::invalid_argument("wald_ci: theta_hat and se sizes differ");
  }
  if (!((se.array() > 0.0).all()) || !se.allFinite()) {
    throw std::invalid_argument("wald_ci: standard errors must be positive");
  }
  const double z = norm_quantile(0.5 * (1.0 + level));
  CiResult ci;
  ci.lower = theta_hat - z * se;
  ci.upper = theta_hat + z * se;
  ci.se = se;
  ci.level = level;
  return ci;
}

Eigen::MatrixXd plugin_cov_logistic_mle(const Eigen::MatrixXd& design,
                                        const Eigen::VectorXd& beta_hat) {
  if (design.cols() != beta_hat.size()) {
    throw std::invalid_argument(
        "plugin_cov_logistic_mle: design/estimate dimension mismatch");
  }
  const Eigen::ArrayXd mu =
      (1.0 + (-(design * beta_hat).array()).exp()).inverse();
  const Eigen::VectorXd w = mu * (1.0 - mu);
  const int p = static_cast<int>(design.cols());
  Eigen::MatrixXd info(p, p);
  info.noalias() = design.transpose() * w.asDiagonal() * design;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  const Eigen::VectorXd D = ldlt.vectorD().cwiseAbs();
  const double dmax = D.maxCoeff();
  const double dmin = D.minCoeff();
  if (!(dmin > 0.0) || !std::isfinite(dmax) || dmax / dmin > 1e14) {
    throw SingularInformation(
        "plugin_cov_logistic_mle: information matrix numerically singular");
  }
  return ldlt.solve(Eigen::MatrixXd::Identity(p, p));
}

}  // namespace jini
