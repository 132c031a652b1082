#pragma once

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jini/estimators.hpp"
#include "jini/model.hpp"
#include "jini/rng.hpp"

namespace jini {

// Whether the H simulation streams are reused across iterations (making the
// iteration map deterministic, so the returned point is an exact fixed point
// of it) or re-derived fresh each iteration.
enum class SeedPolicy { Common, Fresh };

enum class MomentKind { Simulated, Analytic };

struct JiniConfig {
  int H = 200;           // simulated samples per moment evaluation
  int max_iter = 200;    // moment evaluations allowed
  double tol = 1e-6;     // sup-norm tolerance on the undamped step
  double damping = 1.0;  // step multiplier in (0, 1]
  SeedPolicy seed_policy = SeedPolicy::Common;
  RngStream stream{0};   // root of the stream family for inner samples
  int threads = 1;       // workers for the H inner fits
  bool keep_trajectory = false;
  // Re-evaluate the moment at the returned estimate (same streams) and
  // record the residual sup-norm; a direct check of the defining equation.
  bool check_fixed_point = false;
  // Initial iterate override; default is pi_obs projected into the box.
  std::optional<Eigen::VectorXd> start;
};

// Average of the initial estimator over H datasets simulated at theta.
struct MomentResult {
  Eigen::VectorXd value;
  int failures = 0;  // non-converged or numerically failed inner fits
  int total = 0;
};

// Simulates H datasets of size model.n() from the model at theta (streams
// parent.child(0..H-1)), fits the initial estimator to each (warm-started
// at theta), and averages the converged estimates in slot order with
// pairwise summation.  Throws TooManyFailures when more than 20% of the
// fits fail.
MomentResult simulated_moment(const ModelSpec& model,
                              const EstimatorSpec& estimator,
                              const Eigen::VectorXd& theta, int H,
                              RngStream parent, int threads = 1);

// Closed-form expectation of the toy MLEs: theta for the Gaussian location
// toy, theta * n/(n+1) for the uniform scale toy.  IncompatibleSpec for
// regression models.
Eigen::VectorXd analytic_moment(const ModelSpec& model,
                                const Eigen::VectorXd& theta);

struct JiniResult {
  Eigen::VectorXd estimate;  // inside the model's param_box
  int iterations = 0;        // moment evaluations performed
  double final_step_norm = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd moment_residual;  // pi_obs - moment(estimate)
  bool converged = false;
  std::vector<Eigen::VectorXd> trajectory;  // iterates, when requested
  long long inner_failures = 0;  // dropped fits across all evaluations
  long long inner_fits = 0;
  // Residual sup-norm of the re-evaluation at the estimate; NaN unless
  // cfg.check_fixed_point was set.
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
  std::string notes;
};

// Iterative-bootstrap solve of  pi_obs = moment(theta):
//   theta <- Proj_box[ theta + damping * (pi_obs - moment(theta)) ]
// stopping when the undamped step's sup-norm is <= tol (the returned
// estimate is the iterate at which that residual was measured, so estimate
// and moment_residual are consistent).  If the residual grows to 10x its
// initial value the solve restarts once at half damping, then throws
// Divergence.  Budget exhaustion returns the last evaluated iterate with
// converged=false.
JiniResult ib_solve(const Eigen::VectorXd& pi_obs, const ModelSpec& model,
                    const EstimatorSpec& estimator, const JiniConfig& cfg,
                    MomentKind moment = MomentKind::Simulated);

struct BbcResult {
  Eigen::VectorXd estimate;
  int failures = 0;
  int total = 0;
};

// One-step bootstrap bias correction: 2*pi_obs - moment(pi_obs), with the
// moment simulated at pi_obs projected into the box (or closed-form for the
// toys).  The estimate itself is not projected; the correction is linear.
BbcResult bbc_estimate(const Eigen::VectorXd& pi_obs, const ModelSpec& model,
                       const EstimatorSpec& estimator, const JiniConfig& cfg,
                       MomentKind moment = MomentKind::Simulated);

}  // namespace jini
