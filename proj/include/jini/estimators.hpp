#pragma once

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "jini/model.hpp"

namespace jini {

// --- estimator descriptors -------------------------------------------------
//
// Each tag names one fitting routine.  LogisticMle and
// NaiveMleForMisclassified run the identical computation (a plain logistic
// MLE); the second tag exists so configurations can say explicitly that the
// misclassification mechanism is being ignored on purpose.

struct LogisticMle {};
struct NaiveMleForMisclassified {};
struct MisclassifiedMle {};   // exact MLE using the model's fpr/fnr
struct BetaNaiveMle {};       // treats rounded responses as exact beta draws
struct BetaRoundedMle {};     // exact grid-cell interval likelihood
struct ParetoMle {};
struct ToyMle {};

enum class NwmleTarget { Logistic, Pareto };

// Tukey-biweight-weighted MLE: solves sum_i w_c(d_i) s_i(theta) = 0 with
// d_i the Euclidean norm of observation i's score contribution.
struct NwmleTukey {
  double c = 2.8;
  NwmleTarget target = NwmleTarget::Logistic;
};

using EstimatorKind =
    std::variant<LogisticMle, NaiveMleForMisclassified, MisclassifiedMle,
                 BetaNaiveMle, BetaRoundedMle, NwmleTukey, ParetoMle, ToyMle>;

struct EstimatorSpec {
  EstimatorKind kind;
  double tol = 1e-8;     // sup-norm tolerance on the estimating equation
  int max_iter = 100;
  std::optional<Eigen::VectorXd> start;  // natural-scale parameter vector
};

// Short lowercase tag for logs and config files ("logistic_mle", ...).
std::string estimator_name(const EstimatorKind& kind);

// --- fit results ------------------------------------------------------------

enum class FitStatus {
  Ok,
  NoConvergence,       // iteration budget exhausted or stalled
  Separation,          // binary fit ran to the coefficient box boundary
  SingularJacobian,    // (weighted) information matrix numerically singular
  AllWeightsZero,      // every robustness weight vanished
  NonFiniteLikelihood  // objective non-finite at the starting point
};

std::string fit_status_name(FitStatus status);

struct FitResult {
  Eigen::VectorXd estimate;  // always inside the model's param_box
  bool converged = false;
  FitStatus status = FitStatus::NoConvergence;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::string notes;  // human-readable diagnostic tags
};

// --- fitters ----------------------------------------------------------------
//
// All fitters return converged=false (with a status) for failures discovered
// during iteration; malformed inputs (wrong response kind, empty data,
// incompatible estimator/model pairs) throw.  Returned estimates are always
// projected into the model's parameter box.

// Plain logistic MLE: solves sum_i (y_i - expit(x_i'beta)) x_i = 0 by
// iteratively reweighted least squares with step halving.
FitResult fit_logistic_mle(const ModelSpec& model, const Dataset& data,
                           const EstimatorSpec& spec);

// Exact MLE under the misclassification model, by Fisher scoring on the
// observed-data likelihood.  Rates are taken from the model.
FitResult fit_misclassified_mle(const ModelSpec& model, const Dataset& data,
                                const EstimatorSpec& spec);

// Endpoint-avoiding shrink applied to grid responses before a naive beta
// fit: y -> (y (n-1) + 0.5) / n.
inline double beta_naive_shrink(double y, int n) {
  return (y * (n - 1) + 0.5) / n;
}

// Beta regression MLE on responses pushed off the grid by
// beta_naive_shrink, ignoring the rounding mechanism.  Optimized in
// (beta, log phi) with analytic gradient and Hessian; throws
// DegenerateResponse when every response is identical.
FitResult fit_beta_naive_mle(const ModelSpec& model, const Dataset& data,
                             const EstimatorSpec& spec);

// Exact MLE for the rounded beta model: maximizes the product of grid-cell
// probabilities in (beta, log phi).  Gradients come from
// log_likelihood(BetaRounded); the Jacobian is finite-differenced.
FitResult fit_beta_rounded_mle(const ModelSpec& model, const Dataset& data,
                               const EstimatorSpec& spec);

// Pareto regression MLE: scale fixed at gamma-hat = min(y), then Newton on
// the concave profile likelihood for beta.  Estimate is (beta, gamma-hat).
FitResult fit_pareto_mle(const ModelSpec& model, const Dataset& data,
                         const EstimatorSpec& spec);

// Tukey-weighted MLE.  Alternates between freezing the weights at the
// current iterate and Newton-solving the frozen weighted score; convergence
// is declared on the weight-inclusive equation residual, so the fixed point
// solves the composite equation exactly.  For the Pareto target the scale
// stays fixed at min(y) and weights are computed from the beta-score alone.
FitResult fit_nwmle(const ModelSpec& model, const Dataset& data, double c,
                    const EstimatorSpec& spec);

// Closed-form toy fits: sample mean (Gaussian location) or sample maximum
// (uniform scale).  Throws EmptyData on an empty sample.
FitResult fit_toy(const ModelSpec& model, const Dataset& data);

// Dispatcher: validates estimator/model compatibility (IncompatibleSpec
// otherwise) and routes to the fitters above.
FitResult fit_initial(const EstimatorSpec& spec, const ModelSpec& model,
                      const Dataset& data);

}  // namespace jini
