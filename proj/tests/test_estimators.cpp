#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "jini/errors.hpp"
#include "jini/estimators.hpp"
#include "jini/model.hpp"
#include "jini/rng.hpp"
#include "jini/special.hpp"
#include "oracles.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::shared_ptr<const MatrixXd> intercept_design(int n) {
  auto d = std::make_shared<MatrixXd>(n, 1);
  d->setOnes();
  return d;
}

std::shared_ptr<const MatrixXd> random_design(int n, int p,
                                              jini::RngStream stream) {
  auto d = std::make_shared<MatrixXd>(n, p);
  d->col(0).setOnes();
  for (int j = 1; j < p; ++j)
    for (int i = 0; i < n; ++i) (*d)(i, j) = stream.normal();
  return d;
}

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

jini::Dataset binary_data(const jini::ModelSpec& model,
                          std::initializer_list<double> ys) {
  jini::Dataset d;
  d.design = model.design;
  d.kind = jini::ResponseKind::Binary;
  d.y = vec(ys);
  return d;
}

jini::EstimatorSpec spec_of(jini::EstimatorKind kind) {
  jini::EstimatorSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("estimator and status names are stable tokens") {
  CHECK(jini::estimator_name(jini::LogisticMle{}) == "logistic_mle");
  CHECK(jini::estimator_name(jini::NaiveMleForMisclassified{}) == "naive_mle");
  CHECK(jini::estimator_name(jini::MisclassifiedMle{}) == "misclassified_mle");
  CHECK(jini::estimator_name(jini::BetaNaiveMle{}) == "beta_naive_mle");
  CHECK(jini::estimator_name(jini::BetaRoundedMle{}) == "beta_rounded_mle");
  CHECK(jini::estimator_name(jini::NwmleTukey{}) == "nwmle");
  CHECK(jini::estimator_name(jini::ParetoMle{}) == "pareto_mle");
  CHECK(jini::estimator_name(jini::ToyMle{}) == "toy_mle");
  CHECK(jini::fit_status_name(jini::FitStatus::Ok) == "ok");
  CHECK(jini::fit_status_name(jini::FitStatus::Separation) == "separation");
}

TEST_CASE("intercept-only logistic MLE is the logit of the sample mean") {
  const auto model = jini::make_model(jini::Logistic{}, intercept_design(4));
  const auto spec = spec_of(jini::LogisticMle{});

  const auto half = jini::fit_logistic_mle(
      model, binary_data(model, {0, 1, 0, 1}), spec);
  REQUIRE(half.converged);
  CHECK(std::abs(half.estimate(0)) <= 1e-8);
  CHECK(half.residual_norm <= spec.tol);

  const auto threeq = jini::fit_logistic_mle(
      model, binary_data(model, {1, 1, 1, 0}), spec);
  REQUIRE(threeq.converged);
  CHECK(threeq.estimate(0) == doctest::Approx(std::log(3.0)).epsilon(1e-7));
}

TEST_CASE("perfectly separated data is flagged, not returned as converged") {
  // y = 1 exactly when x > 0: the likelihood has no interior maximum
  auto d = std::make_shared<MatrixXd>(8, 2);
  d->col(0).setOnes();
  (*d).col(1) << -2.1, -1.4, -0.9, -0.3, 0.4, 0.8, 1.7, 2.2;
  const auto model = jini::make_model(jini::Logistic{}, d);
  const auto res = jini::fit_logistic_mle(
      model, binary_data(model, {0, 0, 0, 0, 1, 1, 1, 1}),
      spec_of(jini::LogisticMle{}));
  CHECK_FALSE(res.converged);
  CHECK(res.status == jini::FitStatus::Separation);
  CHECK(model.param_box.contains(res.estimate));
}

TEST_CASE("logistic MLE zeroes the score equation") {
  jini::RngStream stream(101);
  const auto design = random_design(300, 4, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const auto data =
      jini::simulate(model, vec({0.5, -1.0, 0.7, 0.0}), stream.child(1));
  const auto spec = spec_of(jini::LogisticMle{});
  const auto res = jini::fit_logistic_mle(model, data, spec);
  REQUIRE(res.converged);

  const VectorXd mu =
      (1.0 + (-(*design * res.estimate).array()).exp()).inverse().matrix();
  const VectorXd score = design->transpose() * (data.y - mu);
  CHECK(score.lpNorm<Eigen::Infinity>() <= spec.tol);
}

TEST_CASE("logistic MLE ignores row order") {
  jini::RngStream stream(55);
  const int n = 120;
  const auto design = random_design(n, 3, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const auto data = jini::simulate(model, vec({0.2, -0.7, 0.4}), stream.child(1));

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[int(stream.child(2).uniform() * (i + 1))]);
  auto pd = std::make_shared<MatrixXd>(n, 3);
  jini::Dataset pdata;
  pdata.kind = jini::ResponseKind::Binary;
  pdata.y.resize(n);
  for (int i = 0; i < n; ++i) {
    pd->row(i) = design->row(perm[i]);
    pdata.y(i) = data.y(perm[i]);
  }
  const auto pmodel = jini::make_model(jini::Logistic{}, pd);
  pdata.design = pmodel.design;

  const auto a = jini::fit_logistic_mle(model, data, spec_of(jini::LogisticMle{}));
  const auto b = jini::fit_logistic_mle(pmodel, pdata, spec_of(jini::LogisticMle{}));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK((a.estimate - b.estimate).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("permuting design columns permutes the estimate") {
  jini::RngStream stream(66);
  const auto design = random_design(200, 3, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const auto data = jini::simulate(model, vec({0.4, -0.9, 0.6}), stream.child(1));

  auto swapped = std::make_shared<MatrixXd>(200, 3);
  swapped->col(0) = design->col(2);
  swapped->col(1) = design->col(1);
  swapped->col(2) = design->col(0);
  const auto smodel = jini::make_model(jini::Logistic{}, swapped);
  jini::Dataset sdata = data;
  sdata.design = smodel.design;

  const auto a = jini::fit_logistic_mle(model, data, spec_of(jini::LogisticMle{}));
  const auto b = jini::fit_logistic_mle(smodel, sdata, spec_of(jini::LogisticMle{}));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.estimate(0) - b.estimate(2)) <= 1e-7);
  CHECK(std::abs(a.estimate(1) - b.estimate(1)) <= 1e-7);
  CHECK(std::abs(a.estimate(2) - b.estimate(0)) <= 1e-7);

  // same property for the Pareto profile MLE
  const auto pm = jini::make_model(jini::Pareto{}, design);
  const auto pdata = jini::simulate(pm, vec({0.9, 0.3, -0.2, 2.0}), stream.child(2));
  const auto psm = jini::make_model(jini::Pareto{}, swapped);
  jini::Dataset psdata = pdata;
  psdata.design = psm.design;
  const auto pa = jini::fit_pareto_mle(pm, pdata, spec_of(jini::ParetoMle{}));
  const auto pb = jini::fit_pareto_mle(psm, psdata, spec_of(jini::ParetoMle{}));
  REQUIRE(pa.converged);
  REQUIRE(pb.converged);
  CHECK(std::abs(pa.estimate(0) - pb.estimate(2)) <= 1e-7);
  CHECK(std::abs(pa.estimate(3) - pb.estimate(3)) <= 1e-12);  // same min(y)
}

TEST_CASE("degenerate misclassified MLE equals the plain logistic MLE") {
  jini::RngStream stream(77);
  const auto design = random_design(150, 3, stream.child(0));
  const auto miscl =
      jini::make_model(jini::MisclassifiedLogistic{0.0, 0.0}, design);
  const auto data = jini::simulate(miscl, vec({0.3, -0.5, 0.8}), stream.child(1));

  const auto a = jini::fit_misclassified_mle(miscl, data, spec_of(jini::MisclassifiedMle{}));
  const auto logistic = jini::make_model(jini::Logistic{}, design);
  jini::Dataset ldata = data;
  ldata.design = logistic.design;
  const auto b = jini::fit_logistic_mle(logistic, ldata, spec_of(jini::LogisticMle{}));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK((a.estimate - b.estimate).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("misclassified MLE inverts the contaminated mean") {
  // fnr = 0.05: mu_z = 0.95 expit(beta0); y-bar = 0.475 maps back to beta0=0
  const int n = 200;
  const auto model = jini::make_model(jini::MisclassifiedLogistic{0.0, 0.05},
                                      intercept_design(n));
  jini::Dataset data;
  data.design = model.design;
  data.kind = jini::ResponseKind::Binary;
  data.y = VectorXd::Zero(n);
  data.y.head(95).setOnes();  // 95/200 = 0.475
  const auto res =
      jini::fit_misclassified_mle(model, data, spec_of(jini::MisclassifiedMle{}));
  REQUIRE(res.converged);
  CHECK(std::abs(res.estimate(0)) <= 1e-7);
}

TEST_CASE("misclassified MLE is consistent at n = 50000") {
  jini::RngStream stream(88);
  const auto design = random_design(50000, 2, stream.child(0));
  const auto model =
      jini::make_model(jini::MisclassifiedLogistic{0.0, 0.05}, design);
  const VectorXd truth = vec({0.3, -1.0});
  const auto data = jini::simulate(model, truth, stream.child(1));
  const auto res =
      jini::fit_misclassified_mle(model, data, spec_of(jini::MisclassifiedMle{}));
  REQUIRE(res.converged);
  CHECK((res.estimate - truth).lpNorm<Eigen::Infinity>() <= 0.05);

  // score of the exact likelihood vanishes at the estimate
  const auto ll = jini::log_likelihood(model, data, res.estimate);
  CHECK(ll.grad.lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("naive beta transform values") {
  CHECK(jini::beta_naive_shrink(0.0, 200) == doctest::Approx(0.0025).epsilon(1e-15));
  CHECK(jini::beta_naive_shrink(1.0, 200) == doctest::Approx(0.9975).epsilon(1e-15));
  CHECK(jini::beta_naive_shrink(0.5, 101) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("naive beta fit recovers an unrounded latent regression") {
  // responses snapped to the grid AFTER simulation keep this a sanity check
  // of the optimizer itself at large n
  jini::RngStream stream(909);
  const auto design = random_design(20000, 2, stream.child(0));
  const auto model = jini::make_model(jini::BetaRounded{}, design);
  const VectorXd truth = vec({0.2, 0.5, 10.0});
  const auto data = jini::simulate(model, truth, stream.child(1));

  const auto res =
      jini::fit_beta_naive_mle(model, data, spec_of(jini::BetaNaiveMle{}));
  REQUIRE(res.converged);
  // beta is nearly unbiased under rounding; phi is attenuated but finite
  CHECK(std::abs(res.estimate(0) - truth(0)) <= 0.05);
  CHECK(std::abs(res.estimate(1) - truth(1)) <= 0.05);
  CHECK(res.estimate(2) > 1.0);

  jini::Dataset flat = data;
  flat.y.setConstant(0.5);
  CHECK_THROWS_AS(
      jini::fit_beta_naive_mle(model, flat, spec_of(jini::BetaNaiveMle{})),
      jini::DegenerateResponse);
}

TEST_CASE("naive beta fit zeroes its own score equation") {
  jini::RngStream stream(910);
  const auto design = random_design(500, 2, stream.child(0));
  const auto model = jini::make_model(jini::BetaRounded{}, design);
  const auto data = jini::simulate(model, vec({-0.3, 0.8, 6.0}), stream.child(1));
  const auto spec = spec_of(jini::BetaNaiveMle{});
  const auto res = jini::fit_beta_naive_mle(model, data, spec);
  REQUIRE(res.converged);

  // rebuild the continuous-response beta log-likelihood on the shrunk data
  // and check its gradient in (beta, log phi) at the estimate
  const int n = model.n();
  auto loglik = [&](const VectorXd& z) {
    const double phi = std::exp(z(2));
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ys = jini::beta_naive_shrink(data.y(i), n);
      const double mu = jini::expit(design->row(i).dot(z.head(2)));
      const double a = mu * phi, b = (1.0 - mu) * phi;
      s += oracle::lgamma_ref(phi) - oracle::lgamma_ref(a) -
           oracle::lgamma_ref(b) + (a - 1.0) * std::log(ys) +
           (b - 1.0) * std::log1p(-ys);
    }
    return s;
  };
  VectorXd z(3);
  z.head(2) = res.estimate.head(2);
  z(2) = std::log(res.estimate(2));
  const VectorXd g = oracle::fd_gradient(loglik, z);
  CHECK(g.lpNorm<Eigen::Infinity>() <= 1e-3);  // FD noise over n=500 terms
}

TEST_CASE("rounded-beta fit centers a single repeated cell") {
  const int n = 50;
  const auto model =
      jini::make_model(jini::BetaRounded{}, intercept_design(n));
  jini::Dataset data;
  data.design = model.design;
  data.kind = jini::ResponseKind::Grid;
  data.y = VectorXd::Constant(n, 0.5);
  const auto res =
      jini::fit_beta_rounded_mle(model, data, spec_of(jini::BetaRoundedMle{}));
  CHECK(std::abs(jini::expit(res.estimate(0)) - 0.5) < 0.01);
}

TEST_CASE("rounded-beta fit beats the naive fit on the precision parameter") {
  jini::RngStream stream(321);
  const auto design = random_design(5000, 2, stream.child(0));
  const auto model = jini::make_model(jini::BetaRounded{}, design);
  const VectorXd truth = vec({0.3, 0.6, 10.0});
  const auto data = jini::simulate(model, truth, stream.child(1));

  const auto naive =
      jini::fit_beta_naive_mle(model, data, spec_of(jini::BetaNaiveMle{}));
  const auto exact =
      jini::fit_beta_rounded_mle(model, data, spec_of(jini::BetaRoundedMle{}));
  REQUIRE(naive.converged);
  REQUIRE(exact.converged);

  CHECK(std::abs(exact.estimate(2) - 10.0) <= 1.0);  // ~3 asymptotic sd
  CHECK(naive.estimate(2) < 9.0);                    // rounding bias, downward
  CHECK(std::abs(exact.estimate(2) - 10.0) < std::abs(naive.estimate(2) - 10.0));
  CHECK(std::abs(exact.estimate(0) - truth(0)) <= 0.1);
  CHECK(std::abs(exact.estimate(1) - truth(1)) <= 0.1);
}

TEST_CASE("rounded-beta estimate is a likelihood ascent point") {
  jini::RngStream stream(654);
  const auto design = random_design(120, 2, stream.child(0));
  const auto model = jini::make_model(jini::BetaRounded{}, design);
  const VectorXd truth = vec({0.2, -0.5, 8.0});
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = jini::simulate(model, truth, stream.child(1 + rep));
    const auto res =
        jini::fit_beta_rounded_mle(model, data, spec_of(jini::BetaRoundedMle{}));
    if (!res.converged) continue;  // rare: flagged, not silently wrong
    const double at_hat = jini::log_likelihood(model, data, res.estimate).value;
    const double at_truth = jini::log_likelihood(model, data, truth).value;
    CHECK_MESSAGE(at_hat >= at_truth - 1e-9, "rep " << rep);
  }
}

TEST_CASE("pareto MLE pins the scale at the sample minimum") {
  jini::RngStream stream(111);
  const auto design = random_design(200, 3, stream.child(0));
  const auto model = jini::make_model(jini::Pareto{}, design);
  const VectorXd truth = vec({1.0, 0.3, -0.4, 2.0});
  const auto data = jini::simulate(model, truth, stream.child(1));

  const auto spec = spec_of(jini::ParetoMle{});
  const auto res = jini::fit_pareto_mle(model, data, spec);
  REQUIRE(res.converged);
  CHECK(res.estimate(3) == data.y.minCoeff());

  // profile score sum_i (1 - alpha_i log(y_i/gamma-hat)) x_i vanishes
  const Eigen::ArrayXd alpha = (*design * res.estimate.head(3)).array().exp();
  const Eigen::ArrayXd l = (data.y.array() / res.estimate(3)).log();
  const VectorXd score = design->transpose() * (1.0 - alpha * l).matrix();
  CHECK(score.lpNorm<Eigen::Infinity>() <= spec.tol);

  // large-n consistency of the tail-index coefficients
  const auto big_design = random_design(20000, 2, stream.child(2));
  const auto big = jini::make_model(jini::Pareto{}, big_design);
  const auto bdata = jini::simulate(big, vec({0.8, 0.4, 3.0}), stream.child(3));
  const auto bres = jini::fit_pareto_mle(big, bdata, spec);
  REQUIRE(bres.converged);
  CHECK(std::abs(bres.estimate(0) - 0.8) <= 0.05);
  CHECK(std::abs(bres.estimate(1) - 0.4) <= 0.05);
  CHECK(std::abs(bres.estimate(2) - 3.0) <= 0.01);  // min(y) -> gamma fast
}

TEST_CASE("nwmle with an enormous tuning constant is the plain MLE") {
  jini::RngStream stream(222);
  const auto design = random_design(300, 3, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const auto data = jini::simulate(model, vec({0.5, -0.8, 0.3}), stream.child(1));

  const auto mle = jini::fit_logistic_mle(model, data, spec_of(jini::LogisticMle{}));
  const auto robust =
      jini::fit_nwmle(model, data, 1e9, spec_of(jini::NwmleTukey{1e9}));
  REQUIRE(mle.converged);
  REQUIRE(robust.converged);
  CHECK((mle.estimate - robust.estimate).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("nwmle resists a gross outlier far better than the MLE") {
  // clean p=1 logistic data plus one wild covariate with a contrary label
  jini::RngStream stream(333);
  const int n = 80;
  auto dc = std::make_shared<MatrixXd>(n, 1);
  for (int i = 0; i < n; ++i) (*dc)(i, 0) = stream.normal();
  const auto clean = jini::make_model(jini::Logistic{}, dc);
  const auto cdata = jini::simulate(clean, vec({1.0}), stream.child(1));

  auto dd = std::make_shared<MatrixXd>(n + 1, 1);
  dd->topRows(n) = *dc;
  (*dd)(n, 0) = 12.0;  // huge leverage point...
  jini::Dataset ddata;
  ddata.kind = jini::ResponseKind::Binary;
  ddata.y.resize(n + 1);
  ddata.y.head(n) = cdata.y;
  ddata.y(n) = 0.0;  // ...with the wrong label
  const auto dirty = jini::make_model(jini::Logistic{}, dd);
  ddata.design = dirty.design;

  const auto mle_clean =
      jini::fit_logistic_mle(clean, cdata, spec_of(jini::LogisticMle{}));
  const auto mle_dirty =
      jini::fit_logistic_mle(dirty, ddata, spec_of(jini::LogisticMle{}));
  const auto rob_clean =
      jini::fit_nwmle(clean, cdata, 2.8, spec_of(jini::NwmleTukey{}));
  const auto rob_dirty =
      jini::fit_nwmle(dirty, ddata, 2.8, spec_of(jini::NwmleTukey{}));
  REQUIRE(mle_clean.converged);
  REQUIRE(mle_dirty.converged);
  REQUIRE(rob_clean.converged);
  REQUIRE(rob_dirty.converged);

  const double mle_move = std::abs(mle_dirty.estimate(0) - mle_clean.estimate(0));
  const double rob_move = std::abs(rob_dirty.estimate(0) - rob_clean.estimate(0));
  CHECK(rob_move < 0.1 * mle_move);
}

TEST_CASE("nwmle solves the composite weighted score equation") {
  // p=1 fixed instance; compare against a dense-grid + bisection oracle on
  // f(b) = sum_i w_c(|r_i| |x_i|) r_i x_i with r_i = y_i - expit(b x_i)
  jini::RngStream stream(444);
  const int n = 30;
  auto d = std::make_shared<MatrixXd>(n, 1);
  for (int i = 0; i < n; ++i) (*d)(i, 0) = stream.normal();
  const auto model = jini::make_model(jini::Logistic{}, d);
  const auto data = jini::simulate(model, vec({0.8}), stream.child(1));
  const double c = 2.8;

  auto f = [&](double b) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (*d)(i, 0);
      const double r = data.y(i) - jini::expit(b * x);
      s += jini::tukey_weight(std::abs(r) * std::abs(x), c) * r * x;
    }
    return s;
  };

  const auto spec = spec_of(jini::NwmleTukey{c});
  const auto res = jini::fit_nwmle(model, data, c, spec);
  REQUIRE(res.converged);
  CHECK(std::abs(f(res.estimate(0))) <= spec.tol);

  // nearest sign-change root of the oracle
  double best = std::numeric_limits<double>::quiet_NaN();
  double prev = f(-10.0);
  for (double b = -10.0 + 0.001; b <= 10.0; b += 0.001) {
    const double cur = f(b);
    if ((prev > 0) != (cur > 0)) {
      const double root = oracle::bisect(f, b - 0.001, b);
      if (!std::isfinite(best) ||
          std::abs(root - res.estimate(0)) < std::abs(best - res.estimate(0)))
        best = root;
    }
    prev = cur;
  }
  REQUIRE(std::isfinite(best));
  CHECK(std::abs(res.estimate(0) - best) <= 1e-4);
}

TEST_CASE("nwmle reports AllWeightsZero when the constant kills every term") {
  jini::RngStream stream(445);
  const int n = 40;
  auto d = std::make_shared<MatrixXd>(n, 1);
  for (int i = 0; i < n; ++i) (*d)(i, 0) = 3.0 + stream.uniform();
  const auto model = jini::make_model(jini::Logistic{}, d);
  jini::Dataset data;
  data.design = model.design;
  data.kind = jini::ResponseKind::Binary;
  data.y.resize(n);
  for (int i = 0; i < n; ++i) data.y(i) = (i % 2 == 0) ? 1.0 : 0.0;
  // every |r_i| |x_i| is at least ~1.4 at beta=0; c far below that zeroes all
  const auto res = jini::fit_nwmle(model, data, 1e-4, spec_of(jini::NwmleTukey{1e-4}));
  CHECK_FALSE(res.converged);
  CHECK(res.status == jini::FitStatus::AllWeightsZero);
  CHECK_THROWS_AS(jini::fit_nwmle(model, data, -1.0, spec_of(jini::NwmleTukey{})),
                  jini::ConfigError);
}

TEST_CASE("toy fits are the closed-form statistics") {
  const auto unif = jini::make_toy_model(jini::UniformScaleToy{}, 3);
  jini::Dataset ud;
  ud.kind = jini::ResponseKind::Real;
  ud.y = vec({0.2, 0.9, 0.4});
  CHECK(jini::fit_toy(unif, ud).estimate(0) == 0.9);

  const auto gauss = jini::make_toy_model(jini::GaussianMeanToy{1.0}, 3);
  jini::Dataset gd;
  gd.kind = jini::ResponseKind::Real;
  gd.y = vec({1.0, 2.0, 3.0});
  CHECK(jini::fit_toy(gauss, gd).estimate(0) == doctest::Approx(2.0));

  jini::Dataset empty;
  empty.kind = jini::ResponseKind::Real;
  empty.y.resize(0);
  CHECK_THROWS_AS(jini::fit_toy(unif, empty), jini::EmptyData);
}

TEST_CASE("uniform toy maximum has the order-statistic mean") {
  const int n = 20, reps = 10000;
  const auto model = jini::make_toy_model(jini::UniformScaleToy{}, n);
  jini::RngStream root(777);
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto data = jini::simulate(model, vec({1.0}), root.child(r));
    sum += jini::fit_toy(model, data).estimate(0);
  }
  const double mean = sum / reps;
  // E(max) = n/(n+1); sd(max) = sqrt(n/((n+1)^2 (n+2)))
  const double want = double(n) / (n + 1);
  const double mc_sd = std::sqrt(n / std::pow(n + 1.0, 2) / (n + 2.0) / reps);
  CHECK(std::abs(mean - want) <= 3.0 * mc_sd);
}

TEST_CASE("dispatcher routes and validates estimator-model pairs") {
  jini::RngStream stream(555);
  const auto design = random_design(100, 2, stream.child(0));
  const auto miscl =
      jini::make_model(jini::MisclassifiedLogistic{0.0, 0.05}, design);
  const auto mdata = jini::simulate(miscl, vec({0.4, -0.6}), stream.child(1));

  // the naive tag runs the identical computation to the plain logistic MLE
  const auto via_dispatch =
      jini::fit_initial(spec_of(jini::NaiveMleForMisclassified{}), miscl, mdata);
  const auto direct =
      jini::fit_logistic_mle(miscl, mdata, spec_of(jini::LogisticMle{}));
  REQUIRE(via_dispatch.converged);
  CHECK((via_dispatch.estimate - direct.estimate).lpNorm<Eigen::Infinity>() == 0.0);

  const auto unif = jini::make_toy_model(jini::UniformScaleToy{}, 5);
  jini::Dataset ud;
  ud.kind = jini::ResponseKind::Real;
  ud.y = vec({0.1, 0.7, 0.3, 0.2, 0.6});
  CHECK(jini::fit_initial(spec_of(jini::ToyMle{}), unif, ud).estimate(0) == 0.7);

  const auto logistic = jini::make_model(jini::Logistic{}, design);
  const auto ldata = jini::simulate(logistic, vec({0.4, -0.6}), stream.child(2));
  CHECK_THROWS_AS(jini::fit_initial(spec_of(jini::ParetoMle{}), logistic, ldata),
                  jini::IncompatibleSpec);
  CHECK_THROWS_AS(jini::fit_initial(spec_of(jini::ToyMle{}), logistic, ldata),
                  jini::IncompatibleSpec);
  CHECK_THROWS_AS(jini::fit_initial(spec_of(jini::BetaNaiveMle{}), logistic, ldata),
                  jini::IncompatibleSpec);
  CHECK_THROWS_AS(
      jini::fit_initial(spec_of(jini::NaiveMleForMisclassified{}), logistic, ldata),
      jini::IncompatibleSpec);
  CHECK_THROWS_AS(
      jini::fit_initial(spec_of(jini::NwmleTukey{2.8, jini::NwmleTarget::Pareto}),
                        logistic, ldata),
      jini::IncompatibleSpec);

  // wrong-size data
  jini::Dataset stub = ldata;
  stub.y = ldata.y.head(10).eval();
  CHECK_THROWS_AS(jini::fit_initial(spec_of(jini::LogisticMle{}), logistic, stub),
                  jini::IncompatibleSpec);
}

TEST_CASE("robust logistic fit collapses to the MLE as c grows") {
  jini::RngStream stream(616);
  const auto design = random_design(400, 5, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const VectorXd truth = vec({0.5, -0.5, 0.5, -0.5, 0.5});
  const auto data = jini::simulate(model, truth, stream.child(1));

  const auto mle = jini::fit_initial(spec_of(jini::LogisticMle{}), model, data);
  REQUIRE(mle.converged);

  // with a huge tuning constant every weight is 1, so the weighted score is
  // the plain score and the two fits agree to solver tolerance
  const auto wide =
      jini::fit_initial(spec_of(jini::NwmleTukey{1e6}), model, data);
  REQUIRE(wide.converged);
  CHECK((wide.estimate - mle.estimate).lpNorm<Eigen::Infinity>() <= 1e-6);

  // at a working constant the estimator is deliberately inconsistent: it
  // must converge on clean data, but only to somewhere in the same basin,
  // not within sampling noise of the MLE (the downweighting bias is
  // first-order -- that is the bias the indirect solve removes)
  const auto rob = jini::fit_initial(spec_of(jini::NwmleTukey{2.8}), model, data);
  REQUIRE(rob.converged);
  for (int j = 0; j < 5; ++j) {
    CHECK_MESSAGE(std::abs(rob.estimate(j) - truth(j)) <= 1.5, "coord " << j);
    CHECK_MESSAGE(std::isfinite(rob.estimate(j)), "coord " << j);
  }
}

TEST_CASE("start overrides are validated") {
  jini::RngStream stream(818);
  const auto design = random_design(60, 2, stream.child(0));
  const auto model = jini::make_model(jini::Logistic{}, design);
  const auto data = jini::simulate(model, vec({0.2, 0.4}), stream.child(1));

  jini::EstimatorSpec bad = spec_of(jini::LogisticMle{});
  bad.start = vec({0.0, 0.0, 0.0});
  CHECK_THROWS_AS(jini::fit_logistic_mle(model, data, bad),
                  std::invalid_argument);

  jini::EstimatorSpec good = spec_of(jini::LogisticMle{});
  good.start = vec({0.1, 0.3});
  const auto res = jini::fit_logistic_mle(model, data, good);
  CHECK(res.converged);
}
