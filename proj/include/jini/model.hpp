#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "jini/newton.hpp"
#include "jini/rng.hpp"

namespace jini {

enum class ResponseKind { Binary, Grid, Positive, Real };

// --- model families -------------------------------------------------------
//
// Regression models carry a fixed n x p covariate matrix (first column is
// normally an intercept, but nothing here requires that).  The two toy
// models are design-free location/scale families used for closed-form
// benchmarks.

struct Logistic {};  // P(Y=1|x) = expit(x'beta)

// Binary response observed with false-positive rate fpr and false-negative
// rate fnr: P(Z=1|x) = fpr + (1 - fpr - fnr) * expit(x'beta).
struct MisclassifiedLogistic {
  double fpr = 0.0;
  double fnr = 0.0;
};

// Beta regression (mean expit(x'beta), precision phi) observed after
// rounding to the 0.1 grid; theta = (beta, phi).
struct BetaRounded {};

// Pareto regression: tail index alpha_i = exp(x_i'beta), common scale
// gamma > 0, support [gamma, inf); theta = (beta, gamma).
struct Pareto {};

struct GaussianMeanToy {
  double sigma = 1.0;
};  // Y ~ N(theta, sigma^2)

struct UniformScaleToy {};  // Y ~ U(0, theta)

using ModelKind = std::variant<Logistic, MisclassifiedLogistic, BetaRounded,
                               Pareto, GaussianMeanToy, UniformScaleToy>;

// Rounding grid for BetaRounded: cells are [j/10 - 0.05, j/10 + 0.05)
// intersected with [0, 1], j = 0..10.
constexpr double kGridStep = 0.1;
constexpr double kGridHalfWidth = 0.05;
constexpr int kGridCells = 11;

// Default box half-width for regression coefficients; iterates pinned at
// this bound are treated as separated/unbounded fits.
constexpr double kCoefBound = 50.0;

struct ModelSpec {
  ModelKind kind;
  std::shared_ptr<const Eigen::MatrixXd> design;  // null for toy models
  Box param_box;
  int n_toy = 0;  // sample size for design-free (toy) models

  bool is_toy() const { return design == nullptr; }
  int n() const;
  int p() const;    // number of covariates (0 for toys)
  int dim() const;  // parameter dimension
  ResponseKind response() const;
};

// Builds a regression model.  The design must have full column rank and
// more rows than columns.
ModelSpec make_model(ModelKind kind,
                     std::shared_ptr<const Eigen::MatrixXd> design);

// Builds a toy (design-free) model with sample size n.
ModelSpec make_toy_model(ModelKind kind, int n);

struct Dataset {
  Eigen::VectorXd y;
  std::shared_ptr<const Eigen::MatrixXd> design;  // shared with the model
  ResponseKind kind = ResponseKind::Real;

  int n() const { return static_cast<int>(y.size()); }
};

// --- operations -----------------------------------------------------------

// Nearest grid point j/10 for y in [0, 1].
double round_to_grid(double y);

// Cell [lo, hi] of the rounding grid that maps to grid value y.
void grid_cell_bounds(double y, double* lo, double* hi);

// Model mean E(Y|x) at theta, one entry per observation.  Pareto means
// require every tail index above 1 (HeavyTail otherwise); for BetaRounded
// this is the latent (pre-rounding) mean.
Eigen::VectorXd mean_response(const ModelSpec& model,
                              const Eigen::VectorXd& theta);

// Draws one dataset from the model at theta (one stream pass, row order).
Dataset simulate(const ModelSpec& model, const Eigen::VectorXd& theta,
                 RngStream stream);

struct LogLik {
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Exact observed-data log-likelihood and analytic gradient at theta.  For
// BetaRounded the likelihood is the product of grid-cell probabilities and
// the gradient flows through the incomplete beta function; a cell whose
// probability underflows to zero raises NonFiniteLikelihood.
LogLik log_likelihood(const ModelSpec& model, const Dataset& data,
                      const Eigen::VectorXd& theta);

// --- CSV ingestion --------------------------------------------------------
//
// Format: header row with exactly one column named "y"; every other column
// is a numeric covariate, taken in file order as the design matrix.
// Malformed input raises ConfigError naming the offending 1-based line.

Dataset dataset_from_csv(std::istream& in, ResponseKind kind);
Dataset dataset_from_csv_file(const std::string& path, ResponseKind kind);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace jini
