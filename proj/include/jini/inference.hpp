#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

#include "jini/model.hpp"
#include "jini/rng.hpp"

namespace jini {

// A complete estimation method as a black box: given a dataset and a stream
// family for any internal simulation (e.g. the H moment samples of a JINI
// solve), produce an estimate or nullopt when the method fails to converge.
// NumericalError thrown from the body is treated the same as nullopt.
using MethodFn =
    std::function<std::optional<Eigen::VectorXd>(const Dataset&, RngStream)>;

struct BootstrapResult {
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;
  int failures = 0;
  int total = 0;
};

// Parametric bootstrap: simulates B datasets from the model at theta_hat
// (data streams parent.child(b).child(0), method streams
// parent.child(b).child(1)), re-runs the full method on each, and returns
// coordinate-wise standard deviations and the sample covariance over the
// converged replicates (divisor used-1).  Failed replicates are dropped up
// to the 20% threshold (TooManyFailures beyond); a coordinate with zero
// sample variance raises DegenerateVariance.
BootstrapResult bootstrap_se(const ModelSpec& model,
                             const Eigen::VectorXd& theta_hat,
                             const MethodFn& method, int B, RngStream parent,
                             int threads = 1);

struct CiResult {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd se;
  double level = 0.95;
  int B = 0;  // bootstrap replicates behind the SEs, when applicable
};

// Asymptotic-normal interval theta_hat +/- z_{(1+level)/2} * se.
CiResult wald_ci(const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& se,
                 double level);

// Plug-in covariance of the logistic MLE: (X' W X)^{-1} with
// W = diag(mu(1-mu)) at beta_hat.  SingularInformation when the weighted
// information is numerically singular.
Eigen::MatrixXd plugin_cov_logistic_mle(const Eigen::MatrixXd& design,
                                        const Eigen::VectorXd& beta_hat);

}  // namespace jini
