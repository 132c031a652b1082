#include "jini/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <sstream>

#include "jini/errors.hpp"
#include "jini/special.hpp"

namespace jini {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Box default_box(const ModelKind& kind, int p) {
  return std::visit(
      overloaded{
          [&](const Logistic&) { return Box::bounded(p, -kCoefBound, kCoefBound); },
          [&](const MisclassifiedLogistic&) {
            return Box::bounded(p, -kCoefBound, kCoefBound);
          },
          [&](const BetaRounded&) {
            Box b = Box::bounded(p + 1, -kCoefBound, kCoefBound);
            b.lower(p) = 1e-4;   // precision phi
            b.upper(p) = 1e6;
            return b;
          },
          [&](const Pareto&) {
            Box b = Box::bounded(p + 1, -kCoefBound, kCoefBound);
            b.lower(p) = 1e-12;  // scale gamma
            b.upper(p) = 1e12;
            return b;
          },
          [&](const GaussianMeanToy&) { return Box::unbounded(1); },
          [&](const UniformScaleToy&) {
            Box b = Box::unbounded(1);
            b.lower(0) = 1e-12;
            return b;
          }},
      kind);
}

// stable log(1 + exp(x))
double softplus(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

}  // namespace

int ModelSpec::n() const {
  return is_toy() ? n_toy : static_cast<int>(design->rows());
}

int ModelSpec::p() const {
  return is_toy() ? 0 : static_cast<int>(design->cols());
}

int ModelSpec::dim() const {
  return std::visit(
      overloaded{[&](const Logistic&) { return p(); },
                 [&](const MisclassifiedLogistic&) { return p(); },
                 [&](const BetaRounded&) { return p() + 1; },
                 [&](const Pareto&) { return p() + 1; },
                 [&](const GaussianMeanToy&) { return 1; },
                 [&](const UniformScaleToy&) { return 1; }},
      kind);
}

ResponseKind ModelSpec::response() const {
  return std::visit(
      overloaded{[](const Logistic&) { return ResponseKind::Binary; },
                 [](const MisclassifiedLogistic&) { return ResponseKind::Binary; },
                 [](const BetaRounded&) { return ResponseKind::Grid; },
                 [](const Pareto&) { return ResponseKind::Positive; },
                 [](const GaussianMeanToy&) { return ResponseKind::Real; },
                 [](const UniformScaleToy&) { return ResponseKind::Real; }},
      kind);
}

ModelSpec make_model(ModelKind kind,
                     std::shared_ptr<const Eigen::MatrixXd> design) {
  if (std::holds_alternative<GaussianMeanToy>(kind) ||
      std::holds_alternative<UniformScaleToy>(kind)) {
    throw IncompatibleSpec("make_model: toy models take no design; use make_toy_model");
  }
  if (!design) {
    throw IncompatibleSpec("make_model: regression models require a design matrix");
  }
  if (const auto* m = std::get_if<MisclassifiedLogistic>(&kind)) {
    if (!(m->fpr >= 0.0) || !(m->fnr >= 0.0) || !(m->fpr + m->fnr < 1.0)) {
      throw ConfigError("make_model: need fpr >= 0, fnr >= 0, fpr + fnr < 1");
    }
  }
  const auto n = design->rows();
  const auto p = design->cols();
  if (n <= p || p < 1) {
    throw IncompatibleSpec("make_model: need n > p >= 1, got n=" +
                           std::to_string(n) + " p=" + std::to_string(p));
  }
  if (!design->allFinite()) {
    throw ConfigError("make_model: design contains non-finite entries");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(*design);
  if (qr.rank() < p) {
    throw RankDeficient("make_model: design is rank deficient (rank " +
                        std::to_string(qr.rank()) + " < " + std::to_string(p) +
                        ")");
  }
  ModelSpec spec;
  spec.kind = kind;
  spec.design = std::move(design);
  spec.param_box = default_box(spec.kind, static_cast<int>(p));
  return spec;
}

ModelSpec make_toy_model(ModelKind kind, int n) {
  if (!(std::holds_alternative<GaussianMeanToy>(kind) ||
        std::holds_alternative<UniformScaleToy>(kind))) {
    throw IncompatibleSpec("make_toy_model: only toy models are design-free");
  }
  if (n < 1) {
    throw ConfigError("make_toy_model: n must be >= 1");
  }
  ModelSpec spec;
  spec.kind = kind;
  spec.n_toy = n;
  spec.param_box = default_box(spec.kind, 0);
  return spec;
}

double round_to_grid(double y) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("round_to_grid: y must be in [0,1]");
  }
  int j = static_cast<int>(std::floor(y / kGridStep + 0.5));
  if (j < 0) j = 0;
  if (j >= kGridCells) j = kGridCells - 1;
  // divide rather than multiply by the step so each grid point is the
  // correctly rounded double of j/10 -- the same value "0.3" etc. parse to
  // when a dataset comes back in through the CSV reader
  return j / 10.0;
}

void grid_cell_bounds(double y, double* lo, double* hi) {
  const int j = static_cast<int>(std::floor(y / kGridStep + 0.5));
  *lo = std::max(0.0, j * kGridStep - kGridHalfWidth);
  *hi = std::min(1.0, j * kGridStep + kGridHalfWidth);
}

namespace {

void check_theta(const ModelSpec& model, const Eigen::VectorXd& theta) {
  if (theta.size() != model.dim()) {
    throw std::invalid_argument("theta has dimension " +
                                std::to_string(theta.size()) + ", expected " +
                                std::to_string(model.dim()));
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument("theta contains non-finite entries");
  }
  if (!model.param_box.contains(theta, 1e-9)) {
    throw std::invalid_argument("theta lies outside the parameter box");
  }
}

Eigen::VectorXd linear_predictor(const ModelSpec& model,
                                 const Eigen::VectorXd& beta) {
  return (*model.design) * beta;
}

}  // namespace

Eigen::VectorXd mean_response(const ModelSpec& model,
                              const Eigen::VectorXd& theta) {
  check_theta(model, theta);
  const int n = model.n();
  return std::visit(
      overloaded{
          [&](const Logistic&) -> Eigen::VectorXd {
            Eigen::VectorXd mu = linear_predictor(model, theta);
            for (int i = 0; i < n; ++i) mu(i) = expit(mu(i));
            return mu;
          },
          [&](const MisclassifiedLogistic& m) -> Eigen::VectorXd {
            Eigen::VectorXd mu = linear_predictor(model, theta);
            const double t = 1.0 - m.fpr - m.fnr;
            for (int i = 0; i < n; ++i) mu(i) = m.fpr + t * expit(mu(i));
            return mu;
          },
          [&](const BetaRounded&) -> Eigen::VectorXd {
            Eigen::VectorXd mu =
                linear_predictor(model, theta.head(model.p()));
            for (int i = 0; i < n; ++i) mu(i) = expit(mu(i));
            return mu;
          },
          [&](const Pareto&) -> Eigen::VectorXd {
            const double gamma = theta(model.p());
            Eigen::VectorXd eta =
                linear_predictor(model, theta.head(model.p()));
            for (int i = 0; i < n; ++i) {
              const double alpha = std::exp(eta(i));
              if (alpha <= 1.0) {
                throw HeavyTail(
                    "mean_response: Pareto mean undefined, tail index <= 1");
              }
              eta(i) = gamma * alpha / (alpha - 1.0);
            }
            return eta;
          },
          [&](const GaussianMeanToy&) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(n, theta(0));
          },
          [&](const UniformScaleToy&) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(n, 0.5 * theta(0));
          }},
      model.kind);
}

Dataset simulate(const ModelSpec& model, const Eigen::VectorXd& theta,
                 RngStream stream) {
  check_theta(model, theta);
  const int n = model.n();
  Dataset data;
  data.design = model.design;
  data.kind = model.response();
  data.y.resize(n);

  std::visit(
      overloaded{
          [&](const Logistic&) {
            const Eigen::ArrayXd pr =
                (1.0 + (-linear_predictor(model, theta).array()).exp())
                    .inverse();
            for (int i = 0; i < n; ++i) {
              data.y(i) = (stream.uniform() < pr(i)) ? 1.0 : 0.0;
            }
          },
          [&](const MisclassifiedLogistic& m) {
            // draw directly from the marginal P(Z=1|x); equivalent in
            // distribution to flipping a latent response
            const double t = 1.0 - m.fpr - m.fnr;
            const Eigen::ArrayXd ps =
                m.fpr +
                t / (1.0 + (-linear_predictor(model, theta).array()).exp());
            for (int i = 0; i < n; ++i) {
              data.y(i) = (stream.uniform() < ps(i)) ? 1.0 : 0.0;
            }
          },
          [&](const BetaRounded&) {
            const double phi = theta(model.p());
            const Eigen::VectorXd eta =
                linear_predictor(model, theta.head(model.p()));
            for (int i = 0; i < n; ++i) {
              const double mu = expit(eta(i));
              const double latent = stream.beta(mu * phi, (1.0 - mu) * phi);
              data.y(i) = round_to_grid(latent);
            }
          },
          [&](const Pareto&) {
            // inverse-CDF draw: y = gamma * u^{-1/alpha}
            const double gamma = theta(model.p());
            const Eigen::ArrayXd alpha_inv =
                (-linear_predictor(model, theta.head(model.p())).array())
                    .exp();
            Eigen::ArrayXd u(n);
            for (int i = 0; i < n; ++i) u(i) = stream.uniform_pos();
            data.y = gamma * (-u.log() * alpha_inv).exp();
          },
          [&](const GaussianMeanToy& m) {
            for (int i = 0; i < n; ++i) {
              data.y(i) = theta(0) + m.sigma * stream.normal();
            }
          },
          [&](const UniformScaleToy&) {
            for (int i = 0; i < n; ++i) {
              data.y(i) = theta(0) * stream.uniform();
            }
          }},
      model.kind);
  return data;
}

namespace {

LogLik loglik_binary(const ModelSpec& model, const Dataset& data,
                     const Eigen::VectorXd& beta, double fpr, double fnr) {
  const Eigen::MatrixXd& X = *model.design;
  const int n = model.n();
  const double t = 1.0 - fpr - fnr;
  const Eigen::VectorXd eta = X * beta;
  LogLik out;
  out.grad = Eigen::VectorXd::Zero(model.p());
  Eigen::VectorXd gw(n);
  for (int i = 0; i < n; ++i) {
    const double mu = expit(eta(i));
    const double ps = fpr + t * mu;
    const double y = data.y(i);
    if (fpr == 0.0 && fnr == 0.0) {
      // plain logistic: y*eta - log(1+exp(eta)) is exact and stable
      out.value += y * eta(i) - softplus(eta(i));
    } else {
      out.value += (y == 1.0) ? std::log(ps) : std::log1p(-ps);
    }
    const double denom = ps * (1.0 - ps);
    gw(i) = (denom > 0.0) ? (y - ps) * t * mu * (1.0 - mu) / denom : 0.0;
  }
  out.grad = X.transpose() * gw;
  return out;
}

LogLik loglik_beta_rounded(const ModelSpec& model, const Dataset& data,
                           const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd& X = *model.design;
  const int n = model.n();
  const int p = model.p();
  const double phi = theta(p);
  const Eigen::VectorXd eta = X * theta.head(p);
  constexpr double kStep = 1e-100;  // complex-step size
  const std::complex<double> ih(0.0, kStep);

  LogLik out;
  out.grad = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd geta(n);
  for (int i = 0; i < n; ++i) {
    const double mu = expit(eta(i));
    const double a = mu * phi;
    const double b = (1.0 - mu) * phi;
    double lo, hi;
    grid_cell_bounds(data.y(i), &lo, &hi);
    const double prob = beta_interval_prob(a, b, lo, hi);
    if (!(prob > 0.0) || !std::isfinite(prob)) {
      throw NonFiniteLikelihood(
          "log_likelihood: grid cell probability underflowed to zero");
    }
    out.value += std::log(prob);
    // d log P / da and / db by complex step through the same code path
    const double dPda =
        beta_interval_prob(std::complex<double>(a) + ih,
                           std::complex<double>(b), lo, hi)
            .imag() /
        kStep;
    const double dPdb =
        beta_interval_prob(std::complex<double>(a),
                           std::complex<double>(b) + ih, lo, hi)
            .imag() /
        kStep;
    const double dlda = dPda / prob;
    const double dldb = dPdb / prob;
    // chain rule: a = mu*phi, b = (1-mu)*phi, dmu/deta = mu(1-mu)
    geta(i) = (dlda - dldb) * phi * mu * (1.0 - mu);
    out.grad(p) += dlda * mu + dldb * (1.0 - mu);
  }
  out.grad.head(p) = X.transpose() * geta;
  return out;
}

LogLik loglik_pareto(const ModelSpec& model, const Dataset& data,
                     const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd& X = *model.design;
  const int n = model.n();
  const int p = model.p();
  const double gamma = theta(p);
  const double log_gamma_scale = std::log(gamma);
  const Eigen::VectorXd eta = X * theta.head(p);
  LogLik out;
  out.grad = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd gw(n);
  double alpha_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = data.y(i);
    const double alpha = std::exp(eta(i));
    if (y < gamma) {
      out.value = -std::numeric_limits<double>::infinity();
      out.grad.setConstant(std::numeric_limits<double>::quiet_NaN());
      return out;
    }
    const double log_ratio = std::log(y) - log_gamma_scale;  // log(y/gamma)
    out.value += eta(i) - alpha * log_ratio - std::log(y);
    gw(i) = 1.0 - alpha * log_ratio;
    alpha_sum += alpha;
  }
  out.grad.head(p) = X.transpose() * gw;
  out.grad(p) = alpha_sum / gamma;  // one-sided: likelihood increases in gamma
  return out;
}

}  // namespace

LogLik log_likelihood(const ModelSpec& model, const Dataset& data,
                      const Eigen::VectorXd& theta) {
  check_theta(model, theta);
  if (data.y.size() != model.n()) {
    throw IncompatibleSpec("log_likelihood: dataset size does not match model");
  }
  return std::visit(
      overloaded{
          [&](const Logistic&) {
            return loglik_binary(model, data, theta, 0.0, 0.0);
          },
          [&](const MisclassifiedLogistic& m) {
            return loglik_binary(model, data, theta, m.fpr, m.fnr);
          },
          [&](const BetaRounded&) {
            return loglik_beta_rounded(model, data, theta);
          },
          [&](const Pareto&) { return loglik_pareto(model, data, theta); },
          [&](const GaussianMeanToy& m) {
            const int n = model.n();
            const double s2 = m.sigma * m.sigma;
            LogLik out;
            const Eigen::ArrayXd r = data.y.array() - theta(0);
            out.value = -0.5 * n * std::log(6.28318530717958647693 * s2) -
                        0.5 * r.square().sum() / s2;
            out.grad = Eigen::VectorXd::Constant(1, r.sum() / s2);
            return out;
          },
          [&](const UniformScaleToy&) {
            const int n = model.n();
            LogLik out;
            out.grad = Eigen::VectorXd::Constant(1, -n / theta(0));
            if (data.y.maxCoeff() > theta(0) || data.y.minCoeff() < 0.0) {
              out.value = -std::numeric_limits<double>::infinity();
              out.grad.setConstant(std::numeric_limits<double>::quiet_NaN());
            } else {
              out.value = -n * std::log(theta(0));
            }
            return out;
          }},
      model.kind);
}

// --- CSV ------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& s, int line_no, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("csv: line " + std::to_string(line_no) +
                      ": cannot parse numeric value '" + s + "' in column " +
                      col);
  }
}

}  // namespace

Dataset dataset_from_csv(std::istream& in, ResponseKind kind) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("csv: empty input, expected a header row");
  }
  const auto header = split_csv_line(line);
  int y_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "y") {
      if (y_col >= 0) throw ConfigError("csv: multiple columns named 'y'");
      y_col = static_cast<int>(j);
    }
  }
  if (y_col < 0) throw ConfigError("csv: no column named 'y' in header");
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) throw ConfigError("csv: need at least one covariate column");

  std::vector<double> ys;
  std::vector<double> xs;  // row-major covariates
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != p + 1) {
      throw ConfigError("csv: line " + std::to_string(line_no) + ": expected " +
                        std::to_string(p + 1) + " fields, got " +
                        std::to_string(fields.size()));
    }
    for (int j = 0; j < p + 1; ++j) {
      const double v = parse_number(fields[j], line_no, header[j]);
      if (j == y_col) {
        ys.push_back(v);
      } else {
        xs.push_back(v);
      }
    }
  }
  const int n = static_cast<int>(ys.size());
  if (n == 0) throw ConfigError("csv: no data rows");

  Dataset data;
  data.kind = kind;
  data.y.resize(n);
  auto design = std::make_shared<Eigen::MatrixXd>(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) (*design)(i, j) = xs[i * p + j];
  }
  for (int i = 0; i < n; ++i) {
    double v = ys[i];
    const int line_of = i + 2;
    switch (kind) {
      case ResponseKind::Binary:
        if (v != 0.0 && v != 1.0) {
          throw ConfigError("csv: line " + std::to_string(line_of) +
                            ": binary response must be 0 or 1, got " +
                            std::to_string(v));
        }
        break;
      case ResponseKind::Grid: {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ConfigError("csv: line " + std::to_string(line_of) +
                            ": grid response must lie in [0,1]");
        }
        const double snapped = round_to_grid(v);
        if (std::abs(snapped - v) > 1e-6) {
          throw ConfigError("csv: line " + std::to_string(line_of) +
                            ": response is not on the 0.1 grid");
        }
        v = snapped;
        break;
      }
      case ResponseKind::Positive:
        if (!(v > 0.0)) {
          throw ConfigError("csv: line " + std::to_string(line_of) +
                            ": response must be positive");
        }
        break;
      case ResponseKind::Real:
        break;
    }
    data.y(i) = v;
  }
  data.design = std::move(design);
  return data;
}

Dataset dataset_from_csv_file(const std::string& path, ResponseKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open file '" + path + "'");
  return dataset_from_csv(in, kind);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const int p = data.design ? static_cast<int>(data.design->cols()) : 0;
  out << "y";
  for (int j = 0; j < p; ++j) out << ",x" << j;
  out << "\n";
  char buf[64];
  for (int i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", data.y(i));
    out << buf;
    for (int j = 0; j < p; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", (*data.design)(i, j));
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace jini
