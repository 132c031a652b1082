#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "jini/newton.hpp"
#include "jini/special.hpp"
#include "oracles.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec1(double x) {
  VectorXd v(1);
  v << x;
  return v;
}

MatrixXd mat1(double x) {
  MatrixXd m(1, 1);
  m << x;
  return m;
}

}  // namespace

TEST_CASE("box projection clamps coordinates and checks dimensions") {
  jini::Box box = jini::Box::bounded(3, -1.0, 2.0);
  VectorXd x(3);
  x << -5.0, 0.5, 9.0;
  const VectorXd p = jini::project(x, box);
  CHECK(p(0) == -1.0);
  CHECK(p(1) == 0.5);
  CHECK(p(2) == 2.0);
  CHECK(box.contains(p));
  CHECK_FALSE(box.contains(x));
  CHECK(box.contains(x, 10.0));

  VectorXd wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS(jini::project(wrong, box), std::invalid_argument);
}

TEST_CASE("linear gradient solves in one step") {
  auto g = [](const VectorXd& x) { return vec1(x(0) - 3.0); };
  auto jac = [](const VectorXd&) { return mat1(1.0); };
  const auto res = jini::newton_solve(g, jac, vec1(0.0),
                                      jini::Box::unbounded(1), 1e-10, 50);
  CHECK(res.converged);
  CHECK(res.status == jini::NewtonStatus::Converged);
  CHECK(res.iterations == 1);
  CHECK(res.x(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(res.residual_norm <= 1e-10);
}

TEST_CASE("inverse logit recovered from expit gradient") {
  auto g = [](const VectorXd& x) { return vec1(jini::expit(x(0)) - 0.75); };
  auto jac = [](const VectorXd& x) {
    const double p = jini::expit(x(0));
    return mat1(p * (1.0 - p));
  };
  const double tol = 1e-10;
  const auto res =
      jini::newton_solve(g, jac, vec1(0.0), jini::Box::unbounded(1), tol, 100);
  CHECK(res.converged);
  CHECK(std::abs(res.x(0) - std::log(3.0)) <= 1e-8);
}

TEST_CASE("overshooting gradient forces damping and still converges") {
  // arctan from x0 = 3: the undamped Newton step overshoots so badly the
  // iteration diverges; the first accepted step needs two halvings.
  auto g = [](const VectorXd& x) { return vec1(std::atan(x(0))); };
  auto jac = [](const VectorXd& x) {
    return mat1(1.0 / (1.0 + x(0) * x(0)));
  };
  const auto res = jini::newton_solve(g, jac, vec1(3.0),
                                      jini::Box::unbounded(1), 1e-10, 100);
  CHECK(res.converged);
  CHECK(res.halvings >= 2);

  const double root =
      oracle::bisect([](double x) { return std::atan(x); }, -1.0, 1.0);
  CHECK(std::abs(res.x(0) - root) <= 1e-8);
}

TEST_CASE("monotone 1-D gradients agree with the bisection oracle") {
  struct Case {
    std::function<double(double)> f;
    std::function<double(double)> df;
    double lo, hi, x0;
  };
  const Case cases[] = {
      {[](double x) { return std::exp(0.3 * x) - 2.0; },
       [](double x) { return 0.3 * std::exp(0.3 * x); }, -10.0, 10.0, 0.0},
      {[](double x) { return x * x * x + x - 7.0; },
       [](double x) { return 3.0 * x * x + 1.0; }, -5.0, 5.0, 0.0},
      {[](double x) { return std::tanh(x) + 0.4; },
       [](double x) { const double t = std::tanh(x); return 1.0 - t * t; },
       -5.0, 5.0, 2.0},
      {[](double x) { return jini::expit(2.0 * x) - 0.1; },
       [](double x) {
         const double p = jini::expit(2.0 * x);
         return 2.0 * p * (1.0 - p);
       },
       -20.0, 20.0, 0.0},
  };
  const double tol = 1e-9;
  for (const auto& c : cases) {
    auto g = [&](const VectorXd& x) { return vec1(c.f(x(0))); };
    auto jac = [&](const VectorXd& x) { return mat1(c.df(x(0))); };
    const auto res = jini::newton_solve(
        g, jac, vec1(c.x0), jini::Box::bounded(1, c.lo, c.hi), tol, 200);
    REQUIRE(res.converged);
    const double root = oracle::bisect(c.f, c.lo, c.hi);
    CHECK(std::abs(res.x(0) - root) <= 10.0 * tol);
  }
}

TEST_CASE("two-dimensional system converges to the joint root") {
  auto g = [](const VectorXd& x) {
    VectorXd v(2);
    v << x(0) * x(0) * x(0) + x(1) - 4.0, x(1) - 1.0;
    return v;
  };
  auto jac = [](const VectorXd& x) {
    MatrixXd J(2, 2);
    J << 3.0 * x(0) * x(0), 1.0, 0.0, 1.0;
    return J;
  };
  VectorXd x0(2);
  x0 << 2.0, 0.0;
  const auto res =
      jini::newton_solve(g, jac, x0, jini::Box::unbounded(2), 1e-12, 100);
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(std::cbrt(3.0)).epsilon(1e-10));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("singular jacobian is reported with the last iterate") {
  auto g = [](const VectorXd& x) { return vec1(x(0) * x(0) + 1.0); };
  auto jac = [](const VectorXd&) { return mat1(0.0); };
  const auto res = jini::newton_solve(g, jac, vec1(0.5),
                                      jini::Box::unbounded(1), 1e-8, 50);
  CHECK_FALSE(res.converged);
  CHECK(res.status == jini::NewtonStatus::SingularJacobian);
  CHECK(res.x(0) == 0.5);
  CHECK(res.residual_norm == doctest::Approx(1.25));

  // near-singular (condition above 1e12) trips the same guard in 2D
  auto g2 = [](const VectorXd& x) {
    VectorXd v(2);
    v << x(0) - 1.0, x(1) - 1.0;
    return v;
  };
  auto jac2 = [](const VectorXd&) {
    MatrixXd J(2, 2);
    J << 1.0, 0.0, 0.0, 1e-14;
    return J;
  };
  VectorXd x0(2);
  x0 << 0.0, 0.0;
  const auto res2 =
      jini::newton_solve(g2, jac2, x0, jini::Box::unbounded(2), 1e-8, 50);
  CHECK(res2.status == jini::NewtonStatus::SingularJacobian);
}

TEST_CASE("no convergence after max_iter keeps the last iterate") {
  auto g = [](const VectorXd& x) { return vec1(std::atan(x(0))); };
  auto jac = [](const VectorXd& x) {
    return mat1(1.0 / (1.0 + x(0) * x(0)));
  };
  const auto res = jini::newton_solve(g, jac, vec1(3.0),
                                      jini::Box::unbounded(1), 1e-14, 1);
  CHECK_FALSE(res.converged);
  CHECK(res.status == jini::NewtonStatus::NoConvergence);
  CHECK(res.iterations == 1);
  CHECK(std::isfinite(res.x(0)));
  CHECK(std::isfinite(res.residual_norm));
}

TEST_CASE("iterates never leave the box even when the root is outside") {
  jini::Box box = jini::Box::bounded(1, -1.0, 1.0);
  bool saw_outside = false;
  auto g = [&](const VectorXd& x) {
    if (!box.contains(x, 1e-12)) saw_outside = true;
    return vec1(x(0) - 5.0);
  };
  auto jac = [](const VectorXd&) { return mat1(1.0); };
  const auto res = jini::newton_solve(g, jac, vec1(0.0), box, 1e-8, 50);
  CHECK_FALSE(saw_outside);
  CHECK_FALSE(res.converged);
  CHECK(res.x(0) == 1.0);  // pinned at the nearest boundary
  CHECK(box.contains(res.x));
}
