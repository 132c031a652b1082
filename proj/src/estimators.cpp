#include "jini/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "jini/errors.hpp"
#include "jini/newton.hpp"
#include "jini/special.hpp"

namespace jini {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// IRLS weights below this are taken as a fully saturated (separated) fit.
// The bar must sit well above tol/n: a separated intercept-only fit walks
// its score below any gradient tolerance (it decays like e^-beta) while the
// iterate is still far from the coefficient box, so a max weight of 1e-6
// (every |eta| beyond ~14) is the sharper signal that no finite optimum
// exists.
constexpr double kWeightFloor = 1e-6;
// Distance from the coefficient box at which an iterate counts as "at the
// boundary" for separation detection.
constexpr double kBoundSlack = 1e-6;
// Condition-number cap for the (weighted) information matrix.
constexpr double kMaxCondition = 1e14;

void check_data(const ModelSpec& model, const Dataset& data, const char* who) {
  if (data.n() == 0) {
    throw EmptyData(std::string(who) + ": empty sample");
  }
  if (data.n() != model.n()) {
    throw IncompatibleSpec(std::string(who) + ": data has " +
                           std::to_string(data.n()) + " rows, model expects " +
                           std::to_string(model.n()));
  }
  if (data.kind != model.response()) {
    throw IncompatibleSpec(std::string(who) +
                           ": response kind does not match the model");
  }
}

// Starting vector on the natural scale: spec.start when given (validated),
// otherwise zeros with the phi slot set to 10 for beta models.
Eigen::VectorXd natural_start(const EstimatorSpec& spec, const ModelSpec& model,
                              const char* who) {
  const int dim = model.dim();
  if (spec.start) {
    if (spec.start->size() != dim) {
      throw std::invalid_argument(std::string(who) + ": start has dimension " +
                                  std::to_string(spec.start->size()) +
                                  ", expected " + std::to_string(dim));
    }
    if (!spec.start->allFinite()) {
      throw std::invalid_argument(std::string(who) +
                                  ": start contains non-finite entries");
    }
    return project(*spec.start, model.param_box);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  if (std::holds_alternative<BetaRounded>(model.kind)) {
    x(dim - 1) = 10.0;  // default precision
  } else if (std::holds_alternative<Pareto>(model.kind)) {
    x(dim - 1) = 1.0;  // placeholder; the scale is re-estimated as min(y)
  }
  return project(x, model.param_box);
}

FitResult from_newton(const NewtonResult& nr) {
  FitResult res;
  res.estimate = nr.x;
  res.converged = nr.converged;
  res.iterations = nr.iterations;
  res.residual_norm = nr.residual_norm;
  switch (nr.status) {
    case NewtonStatus::Converged:
      res.status = FitStatus::Ok;
      break;
    case NewtonStatus::SingularJacobian:
      res.status = FitStatus::SingularJacobian;
      break;
    case NewtonStatus::NoConvergence:
    default:
      res.status = FitStatus::NoConvergence;
      break;
  }
  if (!res.converged) res.notes = fit_status_name(res.status);
  return res;
}

bool near_box_boundary(const Eigen::VectorXd& x, const Box& box) {
  return ((x.array() <= box.lower.array() + kBoundSlack) ||
          (x.array() >= box.upper.array() - kBoundSlack))
      .any();
}

// --- binary-response IRLS core ----------------------------------------------
//
// Fisher scoring for P(Y=1|x) = fpr + (1-fpr-fnr) expit(x'beta); fpr=fnr=0
// is the plain logistic MLE.  The score and the Fisher weights come out of
// a single pass per trial point, and the accepted trial's pass is reused as
// the next iteration's state.

FitResult irls_binary(const ModelSpec& model, const Dataset& data,
                      const EstimatorSpec& spec, double fpr, double fnr) {
  const Eigen::MatrixXd& X = *model.design;
  const Eigen::VectorXd& y = data.y;
  const int n = model.n();
  const int p = model.p();
  const Box& box = model.param_box;
  const double t = 1.0 - fpr - fnr;
  const bool plain = (fpr == 0.0 && fnr == 0.0);

  Eigen::VectorXd eta(n);
  Eigen::ArrayXd mu(n), m(n), ps(n), denom(n);
  // score X'u and Fisher weights w at beta, one vectorized pass
  auto eval = [&](const Eigen::VectorXd& beta, Eigen::VectorXd& u,
                  Eigen::VectorXd& w) -> Eigen::VectorXd {
    eta.noalias() = X * beta;
    mu = (1.0 + (-eta.array()).exp()).inverse();
    m = mu * (1.0 - mu);
    if (plain) {
      u = y.array() - mu;
      w = m;
    } else {
      ps = fpr + t * mu;
      denom = ps * (1.0 - ps);
      // saturated probabilities (denom underflow) contribute nothing
      u = (denom > 0.0).select((y.array() - ps) * t * m / denom, 0.0);
      w = (denom > 0.0).select(t * t * m * m / denom, 0.0);
    }
    return X.transpose() * u;
  };

  FitResult res;
  Eigen::VectorXd beta = project(natural_start(spec, model, "irls"), box);
  Eigen::VectorXd u(n), w(n), ut(n), wt(n);
  Eigen::VectorXd s = eval(beta, u, w);
  double rnorm = s.lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < spec.max_iter; ++iter) {
    if (!std::isfinite(rnorm)) break;
    // A pinned or weight-dead iterate can have a deceptively small score
    // (saturated probabilities), so separation is checked before convergence.
    if (near_box_boundary(beta, box) || w.maxCoeff() < kWeightFloor) {
      res.status = FitStatus::Separation;
      res.notes = "separation: fit ran to the coefficient bound";
      break;
    }
    if (rnorm <= spec.tol) {
      res.converged = true;
      res.status = FitStatus::Ok;
      break;
    }

    Eigen::MatrixXd A(p, p);
    A.noalias() = X.transpose() * w.asDiagonal() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const Eigen::VectorXd D = ldlt.vectorD().cwiseAbs();
    const double dmax = D.maxCoeff();
    const double dmin = D.minCoeff();
    if (!(dmin > 0.0) || !std::isfinite(dmax) || dmax / dmin > kMaxCondition) {
      res.status = FitStatus::SingularJacobian;
      res.notes = "weighted information matrix numerically singular";
      break;
    }
    const Eigen::VectorXd dx = ldlt.solve(s);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h) {
      Eigen::VectorXd bt = project(beta + step * dx, box);
      Eigen::VectorXd st = eval(bt, ut, wt);
      const double rt = st.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rt) && rt < rnorm) {
        beta = std::move(bt);
        s = std::move(st);
        u.swap(ut);
        w.swap(wt);
        rnorm = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) break;  // no residual decrease along the step
  }

  if (!res.converged && res.status == FitStatus::NoConvergence) {
    if (near_box_boundary(beta, box) || w.maxCoeff() < kWeightFloor) {
      res.status = FitStatus::Separation;
      res.notes = "separation: fit ran to the coefficient bound";
    } else if (std::isfinite(rnorm) && rnorm <= spec.tol) {
      res.converged = true;
      res.status = FitStatus::Ok;
    } else {
      res.notes = "no convergence after " + std::to_string(res.iterations) +
                  " steps";
    }
  }
  res.estimate = std::move(beta);
  res.residual_norm = rnorm;
  return res;
}

// --- beta regression score/Hessian in (beta, zeta = log phi) ----------------
//
// ystar/ly/l1y are the precomputed logit(y), log y, log(1-y) of responses
// strictly inside (0,1).  When hess is non-null the analytic Hessian of the
// log-likelihood is filled in as well.

Eigen::VectorXd beta_reg_score(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& ystar,
                               const Eigen::VectorXd& ly,
                               const Eigen::VectorXd& l1y,
                               const Eigen::VectorXd& x,
                               Eigen::MatrixXd* hess) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const double phi = std::exp(x(p));
  const Eigen::VectorXd eta = X * x.head(p);

  const double psi_phi = digamma(phi);
  const double tri_phi = hess ? trigamma(phi) : 0.0;

  Eigen::VectorXd geta(n), hbb_w, hbz_w;
  if (hess) {
    hbb_w.resize(n);
    hbz_w.resize(n);
  }
  double gz_sum = 0.0;
  double hzz_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double mu = expit(eta(i));
    mu = std::min(1.0 - 1e-12, std::max(1e-12, mu));
    const double m = mu * (1.0 - mu);
    const double a = mu * phi;
    const double b = (1.0 - mu) * phi;
    const double psa = digamma(a);
    const double psb = digamma(b);
    const double resid = ystar(i) - (psa - psb);
    geta(i) = phi * resid * m;
    gz_sum += psi_phi - mu * psa - (1.0 - mu) * psb + mu * ly(i) +
              (1.0 - mu) * l1y(i);
    if (hess) {
      const double ta = trigamma(a);
      const double tb = trigamma(b);
      hbb_w(i) = phi * (resid * (1.0 - 2.0 * mu) * m - phi * (ta + tb) * m * m);
      hbz_w(i) = phi * m * (resid - phi * (mu * ta - (1.0 - mu) * tb));
      hzz_sum += tri_phi - mu * mu * ta - (1.0 - mu) * (1.0 - mu) * tb;
    }
  }

  Eigen::VectorXd g(p + 1);
  g.head(p) = X.transpose() * geta;
  g(p) = phi * gz_sum;
  if (hess) {
    hess->resize(p + 1, p + 1);
    hess->topLeftCorner(p, p).noalias() =
        X.transpose() * hbb_w.asDiagonal() * X;
    const Eigen::VectorXd hbz = X.transpose() * hbz_w;
    hess->topRightCorner(p, 1) = hbz;
    hess->bottomLeftCorner(1, p) = hbz.transpose();
    (*hess)(p, p) = g(p) + phi * phi * hzz_sum;
  }
  return g;
}

// Box for (beta, log phi): the phi slot is log-transformed and shrunk a hair
// so exp/log round-trips land strictly inside the natural box.
Box log_phi_box(const Box& natural, int p) {
  Box b = natural;
  b.lower(p) = std::log(natural.lower(p)) + 1e-9;
  b.upper(p) = std::log(natural.upper(p)) - 1e-9;
  return b;
}

// (beta, phi) -> (beta, log phi), clamped into the transformed box.
Eigen::VectorXd to_log_phi(const Eigen::VectorXd& theta, const Box& zbox) {
  Eigen::VectorXd x = theta;
  const int p = static_cast<int>(theta.size()) - 1;
  x(p) = std::log(std::max(theta(p), 1e-300));
  return project(x, zbox);
}

// --- Pareto score helpers ----------------------------------------------------
//
// With the scale fixed at gamma-hat, observation i contributes
// (1 - alpha_i l_i) x_i to the score, alpha_i = exp(x_i'beta) and
// l_i = log(y_i / gamma-hat) >= 0; the log-likelihood is concave in beta.

struct ParetoData {
  Eigen::VectorXd l;  // log(y / gamma_hat)
  double gamma_hat = 0.0;
};

ParetoData pareto_profile(const Dataset& data) {
  ParetoData pd;
  pd.gamma_hat = data.y.minCoeff();
  pd.l = (data.y.array() / pd.gamma_hat).log();
  return pd;
}

Box beta_sub_box(const Box& box, int p) {
  Box b;
  b.lower = box.lower.head(p);
  b.upper = box.upper.head(p);
  return b;
}

}  // namespace

std::string estimator_name(const EstimatorKind& kind) {
  return std::visit(
      overloaded{[](const LogisticMle&) { return std::string("logistic_mle"); },
                 [](const NaiveMleForMisclassified&) {
                   return std::string("naive_mle");
                 },
                 [](const MisclassifiedMle&) {
                   return std::string("misclassified_mle");
                 },
                 [](const BetaNaiveMle&) { return std::string("beta_naive_mle"); },
                 [](const BetaRoundedMle&) {
                   return std::string("beta_rounded_mle");
                 },
                 [](const NwmleTukey&) { return std::string("nwmle"); },
                 [](const ParetoMle&) { return std::string("pareto_mle"); },
                 [](const ToyMle&) { return std::string("toy_mle"); }},
      kind);
}

std::string fit_status_name(FitStatus status) {
  switch (status) {
    case FitStatus::Ok:
      return "ok";
    case FitStatus::NoConvergence:
      return "no_convergence";
    case FitStatus::Separation:
      return "separation";
    case FitStatus::SingularJacobian:
      return "singular_jacobian";
    case FitStatus::AllWeightsZero:
      return "all_weights_zero";
    case FitStatus::NonFiniteLikelihood:
      return "non_finite_likelihood";
  }
  return "unknown";
}

FitResult fit_logistic_mle(const ModelSpec& model, const Dataset& data,
                           const EstimatorSpec& spec) {
  if (model.response() != ResponseKind::Binary) {
    throw IncompatibleSpec("fit_logistic_mle: model must have a binary response");
  }
  check_data(model, data, "fit_logistic_mle");
  return irls_binary(model, data, spec, 0.0, 0.0);
}

FitResult fit_misclassified_mle(const ModelSpec& model, const Dataset& data,
                                const EstimatorSpec& spec) {
  const auto* m = std::get_if<MisclassifiedLogistic>(&model.kind);
  if (m == nullptr) {
    throw IncompatibleSpec(
        "fit_misclassified_mle: model must be MisclassifiedLogistic");
  }
  check_data(model, data, "fit_misclassified_mle");
  return irls_binary(model, data, spec, m->fpr, m->fnr);
}

FitResult fit_beta_naive_mle(const ModelSpec& model, const Dataset& data,
                             const EstimatorSpec& spec) {
  if (!std::holds_alternative<BetaRounded>(model.kind)) {
    throw IncompatibleSpec("fit_beta_naive_mle: model must be BetaRounded");
  }
  check_data(model, data, "fit_beta_naive_mle");
  if ((data.y.array() == data.y(0)).all()) {
    throw DegenerateResponse(
        "fit_beta_naive_mle: every response is identical");
  }
  const Eigen::MatrixXd& X = *model.design;
  const int n = model.n();
  const int p = model.p();

  const Eigen::VectorXd ys = data.y.unaryExpr(
      [n](double y) { return beta_naive_shrink(y, n); });
  const Eigen::VectorXd ly = ys.array().log();
  const Eigen::VectorXd l1y = (1.0 - ys.array()).log();
  const Eigen::VectorXd ystar = ly - l1y;

  const Box zbox = log_phi_box(model.param_box, p);
  const Eigen::VectorXd x0 =
      to_log_phi(natural_start(spec, model, "fit_beta_naive_mle"), zbox);

  auto g = [&](const Eigen::VectorXd& x) {
    return beta_reg_score(X, ystar, ly, l1y, x, nullptr);
  };
  auto jac = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd H;
    beta_reg_score(X, ystar, ly, l1y, x, &H);
    return H;
  };
  FitResult res =
      from_newton(newton_solve(g, jac, x0, zbox, spec.tol, spec.max_iter));
  res.estimate(p) = std::exp(res.estimate(p));
  res.estimate = project(res.estimate, model.param_box);
  return res;
}

FitResult fit_beta_rounded_mle(const ModelSpec& model, const Dataset& data,
                               const EstimatorSpec& spec) {
  if (!std::holds_alternative<BetaRounded>(model.kind)) {
    throw IncompatibleSpec("fit_beta_rounded_mle: model must be BetaRounded");
  }
  check_data(model, data, "fit_beta_rounded_mle");
  const int p = model.p();
  const int dim = p + 1;
  const Box zbox = log_phi_box(model.param_box, p);

  // interval-likelihood score in (beta, log phi); non-finite cells map to a
  // NaN score so the step-halving loop rejects the trial point
  auto g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd theta(dim);
    theta.head(p) = x.head(p);
    theta(p) = std::exp(x(p));
    try {
      const LogLik ll = log_likelihood(model, data, theta);
      Eigen::VectorXd gz(dim);
      gz.head(p) = ll.grad.head(p);
      gz(p) = theta(p) * ll.grad(p);
      return gz;
    } catch (const NumericalError&) {
      return Eigen::VectorXd::Constant(
          dim, std::numeric_limits<double>::quiet_NaN());
    }
  };
  auto jac = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd J(dim, dim);
    for (int j = 0; j < dim; ++j) {
      const double h = 6e-6 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp(j) += h;
      xm(j) -= h;
      xp = project(xp, zbox);  // one-sided at the box edge
      xm = project(xm, zbox);
      J.col(j) = (g(xp) - g(xm)) / (xp(j) - xm(j));
    }
    return J;
  };

  // warm start from the naive fit unless the caller pinned one
  Eigen::VectorXd start0 = natural_start(spec, model, "fit_beta_rounded_mle");
  if (!spec.start) {
    EstimatorSpec naive_spec;
    naive_spec.kind = BetaNaiveMle{};
    naive_spec.tol = std::max(spec.tol, 1e-6);
    try {
      const FitResult naive = fit_beta_naive_mle(model, data, naive_spec);
      if (naive.converged) start0 = naive.estimate;
    } catch (const NumericalError&) {
      // constant responses etc.: the interval likelihood is still fine
    }
  }

  FitResult res = from_newton(newton_solve(g, jac, to_log_phi(start0, zbox),
                                           zbox, spec.tol, spec.max_iter));
  if (!res.converged && res.iterations == 0 &&
      !std::isfinite(res.residual_norm)) {
    res.status = FitStatus::NonFiniteLikelihood;
    res.notes = "interval likelihood non-finite at the starting point";
  }
  res.estimate(p) = std::exp(res.estimate(p));
  res.estimate = project(res.estimate, model.param_box);
  return res;
}

FitResult fit_pareto_mle(const ModelSpec& model, const Dataset& data,
                         const EstimatorSpec& spec) {
  if (!std::holds_alternative<Pareto>(model.kind)) {
    throw IncompatibleSpec("fit_pareto_mle: model must be Pareto");
  }
  check_data(model, data, "fit_pareto_mle");
  const Eigen::MatrixXd& X = *model.design;
  const int p = model.p();
  const ParetoData pd = pareto_profile(data);
  const Box bbox = beta_sub_box(model.param_box, p);

  auto g = [&](const Eigen::VectorXd& beta) -> Eigen::VectorXd {
    const Eigen::ArrayXd alpha = (X * beta).array().exp();
    return X.transpose() * (1.0 - alpha * pd.l.array()).matrix();
  };
  auto jac = [&](const Eigen::VectorXd& beta) -> Eigen::MatrixXd {
    const Eigen::VectorXd w = ((X * beta).array().exp() * pd.l.array());
    return -(X.transpose() * w.asDiagonal() * X);
  };

  const Eigen::VectorXd theta0 = natural_start(spec, model, "fit_pareto_mle");
  FitResult res = from_newton(
      newton_solve(g, jac, theta0.head(p), bbox, spec.tol, spec.max_iter));

  Eigen::VectorXd full(p + 1);
  full.head(p) = res.estimate;
  full(p) = pd.gamma_hat;
  res.estimate = project(full, model.param_box);
  return res;
}

FitResult fit_nwmle(const ModelSpec& model, const Dataset& data, double c,
                    const EstimatorSpec& spec) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("fit_nwmle: tuning constant c must be positive");
  }
  const bool logistic_target = model.response() == ResponseKind::Binary;
  const bool pareto_target = std::holds_alternative<Pareto>(model.kind);
  if (!logistic_target && !pareto_target) {
    throw IncompatibleSpec(
        "fit_nwmle: model must have a binary response or be Pareto");
  }
  check_data(model, data, "fit_nwmle");

  const Eigen::MatrixXd& X = *model.design;
  const Eigen::VectorXd& y = data.y;
  const int n = model.n();
  const int p = model.p();
  const Eigen::VectorXd row_norms = X.rowwise().norm();
  const Box bbox = beta_sub_box(model.param_box, p);

  ParetoData pd;
  if (pareto_target) pd = pareto_profile(data);

  // per-observation score residual r_i (score_i = r_i x_i) and curvature
  // q_i (d score_i / d eta_i = -q_i x_i)
  Eigen::VectorXd eta(n);
  auto eval = [&](const Eigen::VectorXd& beta, Eigen::VectorXd& r,
                  Eigen::VectorXd& q) {
    eta.noalias() = X * beta;
    if (logistic_target) {
      const Eigen::ArrayXd mu = (1.0 + (-eta.array()).exp()).inverse();
      r = y.array() - mu;
      q = mu * (1.0 - mu);
    } else {
      q = eta.array().exp() * pd.l.array();
      r = 1.0 - q.array();
    }
  };

  FitResult res;
  Eigen::VectorXd theta0 = natural_start(spec, model, "fit_nwmle");
  Eigen::VectorXd beta = project(theta0.head(p).eval(), bbox);
  Eigen::VectorXd r(n), q(n), w(n);
  double comp = std::numeric_limits<double>::quiet_NaN();
  int outer = 0;

  for (; outer < spec.max_iter; ++outer) {
    eval(beta, r, q);
    for (int i = 0; i < n; ++i) {
      w(i) = tukey_weight(std::abs(r(i)) * row_norms(i), c);
    }
    const Eigen::VectorXd s =
        X.transpose() * (w.array() * r.array()).matrix();
    comp = s.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(comp)) {
      res.notes = "composite residual non-finite";
      break;
    }
    if (w.maxCoeff() <= 0.0) {
      res.status = FitStatus::AllWeightsZero;
      res.notes = "every robustness weight vanished";
      break;
    }
    if (comp <= spec.tol) {
      res.converged = true;
      res.status = FitStatus::Ok;
      break;
    }

    // Newton-solve the score equation with the weights frozen
    Eigen::VectorXd rs(n), qs(n);
    auto g = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
      eval(b, rs, qs);
      return X.transpose() * (w.array() * rs.array()).matrix();
    };
    auto jac = [&](const Eigen::VectorXd& b) -> Eigen::MatrixXd {
      eval(b, rs, qs);
      const Eigen::VectorXd wq = w.array() * qs.array();
      return -(X.transpose() * wq.asDiagonal() * X);
    };
    const NewtonResult nr = newton_solve(g, jac, beta, bbox,
                                         std::max(spec.tol, 0.1 * comp), 25);
    res.iterations += nr.iterations;
    if (nr.status == NewtonStatus::SingularJacobian) {
      res.status = FitStatus::SingularJacobian;
      res.notes = "frozen-weight information matrix numerically singular";
      beta = nr.x;
      break;
    }
    const double moved = (nr.x - beta).lpNorm<Eigen::Infinity>();
    beta = nr.x;
    if (moved == 0.0) {
      res.notes = "weight alternation stalled";
      break;
    }
  }

  if (!res.converged && res.status == FitStatus::NoConvergence &&
      res.notes.empty()) {
    res.notes = "no convergence after " + std::to_string(outer) +
                " weight updates";
  }
  if (!res.notes.empty() && res.converged == false) {
    res.notes += " (outer_rounds=" + std::to_string(outer) + ")";
  }

  if (pareto_target) {
    Eigen::VectorXd full(p + 1);
    full.head(p) = beta;
    full(p) = pd.gamma_hat;
    res.estimate = project(full, model.param_box);
  } else {
    res.estimate = project(beta, model.param_box);
  }
  res.residual_norm = comp;
  return res;
}

FitResult fit_toy(const ModelSpec& model, const Dataset& data) {
  if (!model.is_toy()) {
    throw IncompatibleSpec("fit_toy: model must be a toy (design-free) model");
  }
  if (data.n() == 0) {
    throw EmptyData("fit_toy: empty sample");
  }
  Eigen::VectorXd est(1);
  if (std::holds_alternative<GaussianMeanToy>(model.kind)) {
    est(0) = data.y.mean();
  } else {
    est(0) = data.y.maxCoeff();
  }
  FitResult res;
  res.estimate = project(est, model.param_box);
  res.converged = true;
  res.status = FitStatus::Ok;
  res.iterations = 0;
  res.residual_norm = 0.0;
  return res;
}

FitResult fit_initial(const EstimatorSpec& spec, const ModelSpec& model,
                      const Dataset& data) {
  return std::visit(
      overloaded{
          [&](const LogisticMle&) { return fit_logistic_mle(model, data, spec); },
          [&](const NaiveMleForMisclassified&) {
            if (!std::holds_alternative<MisclassifiedLogistic>(model.kind)) {
              throw IncompatibleSpec(
                  "fit_initial: naive_mle applies to the misclassified "
                  "logistic model");
            }
            return fit_logistic_mle(model, data, spec);
          },
          [&](const MisclassifiedMle&) {
            return fit_misclassified_mle(model, data, spec);
          },
          [&](const BetaNaiveMle&) {
            return fit_beta_naive_mle(model, data, spec);
          },
          [&](const BetaRoundedMle&) {
            return fit_beta_rounded_mle(model, data, spec);
          },
          [&](const NwmleTukey& nt) {
            if (nt.target == NwmleTarget::Logistic &&
                model.response() != ResponseKind::Binary) {
              throw IncompatibleSpec(
                  "fit_initial: nwmle(logistic) needs a binary-response model");
            }
            if (nt.target == NwmleTarget::Pareto &&
                !std::holds_alternative<Pareto>(model.kind)) {
              throw IncompatibleSpec(
                  "fit_initial: nwmle(pareto) needs the Pareto model");
            }
            return fit_nwmle(model, data, nt.c, spec);
          },
          [&](const ParetoMle&) { return fit_pareto_mle(model, data, spec); },
          [&](const ToyMle&) {
            if (!model.is_toy()) {
              throw IncompatibleSpec("fit_initial: toy_mle needs a toy model");
            }
            return fit_toy(model, data);
          }},
      spec.kind);
}

}  // namespace jini
