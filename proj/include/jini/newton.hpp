#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jini {

// Closed box constraints for parameter vectors.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box bounded(int dim, double lo, double hi) {
    Box b;
    b.lower = Eigen::VectorXd::Constant(dim, lo);
    b.upper = Eigen::VectorXd::Constant(dim, hi);
    return b;
  }

  static Box unbounded(int dim, double mag = 1e12) {
    return bounded(dim, -mag, mag);
  }

  int dim() const { return static_cast<int>(lower.size()); }

  bool contains(const Eigen::VectorXd& x, double slack = 0.0) const {
    return (x.array() >= lower.array() - slack).all() &&
           (x.array() <= upper.array() + slack).all();
  }
};

inline Eigen::VectorXd project(const Eigen::VectorXd& x, const Box& box) {
  if (x.size() != box.lower.size()) {
    throw std::invalid_argument("project: dimension mismatch with box");
  }
  return x.cwiseMax(box.lower).cwiseMin(box.upper);
}

enum class NewtonStatus { Converged, NoConvergence, SingularJacobian };

struct NewtonResult {
  Eigen::VectorXd x;          // last iterate (solution when converged)
  bool converged = false;
  NewtonStatus status = NewtonStatus::NoConvergence;
  int iterations = 0;         // Newton steps taken
  double residual_norm = 0.0; // sup-norm of g at x
  int halvings = 0;           // total step halvings (damping record)
};

// Damped Newton for the root-finding problem g(x) = 0 with Jacobian jac(x),
// iterates projected into `box`.  Steps are halved (up to 30 times) until
// the residual sup-norm decreases; a Jacobian with pivot-ratio condition
// estimate above 1e12 stops the solve with SingularJacobian.  The last
// iterate is always returned in the result.
template <class GradFn, class JacFn>
NewtonResult newton_solve(GradFn&& g, JacFn&& jac, const Eigen::VectorXd& x0,
                          const Box& box, double tol = 1e-8,
                          int max_iter = 100) {
  NewtonResult res;
  Eigen::VectorXd x = project(x0, box);
  Eigen::VectorXd gx = g(x);
  double rnorm = gx.template lpNorm<Eigen::Infinity>();

  for (int iter = 0; iter < max_iter; ++iter) {
    if (!std::isfinite(rnorm)) break;
    if (rnorm <= tol) {
      res.converged = true;
      res.status = NewtonStatus::Converged;
      break;
    }
    const Eigen::MatrixXd J = jac(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal();
    const double pmax = pivots.cwiseAbs().maxCoeff();
    const double pmin = pivots.cwiseAbs().minCoeff();
    if (!(pmin > 0.0) || !std::isfinite(pmax) || pmax / pmin > 1e12) {
      res.status = NewtonStatus::SingularJacobian;
      res.x = x;
      res.residual_norm = rnorm;
      return res;
    }
    const Eigen::VectorXd dx = lu.solve(-gx);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h) {
      const Eigen::VectorXd xt = project(x + step * dx, box);
      const Eigen::VectorXd gt = g(xt);
      const double rt = gt.template lpNorm<Eigen::Infinity>();
      if (std::isfinite(rt) && rt < rnorm) {
        x = xt;
        gx = gt;
        rnorm = rt;
        accepted = true;
        res.halvings += h;
        break;
      }
      step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) break;  // stuck: no residual decrease along the step
  }

  if (!res.converged && rnorm <= tol && std::isfinite(rnorm)) {
    res.converged = true;
    res.status = NewtonStatus::Converged;
  }
  res.x = x;
  res.residual_norm = rnorm;
  return res;
}

}  // namespace jini
