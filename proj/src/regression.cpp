#include "irj/regression.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "irj/errors.hpp"
#include "irj/log.hpp"

namespace irj {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

void check_dims(const ModelId& k, const ParamVector& x, const Dataset& data) {
  if (k.p_pred != data.p_pred())
    throw DimensionError("model " + format_model(k) + " does not match the dataset");
  if (x.size() != k.dim() + 1)
    throw DimensionError("parameter vector has " + std::to_string(x.size()) +
                         " entries, model " + format_model(k) + " needs " +
                         std::to_string(k.dim() + 1));
}

/// Cholesky of the Gram matrix with a conditioning check.
Eigen::LLT<Eigen::MatrixXd> gram_factor(const Eigen::MatrixXd& G, const ModelId& k) {
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    const double lo = diag.minCoeff(), hi = diag.maxCoeff();
    // Squared ratio of Cholesky diagonals bounds the condition number from below.
    ok = lo > 0.0 && (lo / hi) * (lo / hi) > 1e-13;
  }
  if (!ok) throw DegenerateDesignError("Gram matrix of model " + format_model(k) + " is singular");
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
  if (s == "normal") return ModelKind::kNormal;
  if (s == "lptn") return ModelKind::kLptn;
  throw DomainError("unknown model kind '" + s + "' (expected normal|lptn)");
}

std::string to_string(ModelKind kind) { return kind == ModelKind::kNormal ? "normal" : "lptn"; }

double lptn_rho_min() { return std::erf(1.0 / std::numbers::sqrt2); }

LptnConstants lptn_constants(double rho) {
  if (!(rho > lptn_rho_min() && rho < 1.0))
    throw DomainError("rho=" + std::to_string(rho) +
                      " outside the admissible range (2Phi(1)-1, 1) = (0.6826895, 1)");
  LptnConstants c;
  c.rho = rho;
  c.tau = std::numbers::sqrt2 * boost::math::erf_inv(rho);
  const double phi_tau = std::exp(-0.5 * c.tau * c.tau - kHalfLog2Pi);
  c.lambda = 2.0 / (1.0 - rho) * phi_tau * c.tau * std::log(c.tau);
  return c;
}

double lptn_logpdf(double x, const LptnConstants& c) {
  const double ax = std::abs(x);
  if (ax <= c.tau) return -0.5 * x * x - kHalfLog2Pi;
  return -0.5 * c.tau * c.tau - kHalfLog2Pi + std::log(c.tau) - std::log(ax) +
         (c.lambda + 1.0) * (std::log(std::log(c.tau)) - std::log(std::log(ax)));
}

double lptn_dlogpdf(double x, const LptnConstants& c) {
  const double ax = std::abs(x);
  if (ax <= c.tau) return -x;
  return -(1.0 + (c.lambda + 1.0) / std::log(ax)) / x;
}

double log_model_prior(const ModelId& k, const Dataset& data) {
  const Eigen::MatrixXd Ck = data.design(k);
  const Eigen::MatrixXd G = Ck.transpose() * Ck;
  return 0.5 * log_det(gram_factor(G, k)) -
         0.5 * k.dim() * std::log(static_cast<double>(data.n()));
}

double log_unnorm_posterior(const ModelSpec& spec, const ModelId& k, const ParamVector& x,
                            const Dataset& data) {
  check_dims(k, x, data);
  const Eigen::MatrixXd Ck = data.design(k);
  const double eta = eta_of(x);
  const Eigen::VectorXd z = (data.y - Ck * beta_of(x)) * std::exp(-eta);
  double ll = 0.0;
  if (spec.kind == ModelKind::kNormal) {
    ll = -0.5 * z.squaredNorm() - kHalfLog2Pi * static_cast<double>(z.size());
  } else {
    for (Eigen::Index i = 0; i < z.size(); ++i) ll += lptn_logpdf(z[i], spec.lptn);
  }
  return log_model_prior(k, data) - static_cast<double>(data.n()) * eta + ll;
}

Eigen::VectorXd grad_log_posterior_lptn(const ModelId& k, const ParamVector& x,
                                        const Dataset& data, const LptnConstants& c) {
  check_dims(k, x, data);
  const Eigen::MatrixXd Ck = data.design(k);
  const double e = std::exp(-eta_of(x));
  const Eigen::VectorXd z = (data.y - Ck * beta_of(x)) * e;
  Eigen::VectorXd psi(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (std::abs(z[i]) == c.tau) warn("standardised residual exactly at the LPTN threshold");
    psi[i] = lptn_dlogpdf(z[i], c);
  }
  Eigen::VectorXd g(x.size());
  g.head(Ck.cols()) = -e * (Ck.transpose() * psi);
  g[g.size() - 1] = -static_cast<double>(data.n()) - psi.dot(z);
  return g;
}

Eigen::VectorXd grad_log_posterior_normal(const ModelId& k, const ParamVector& x,
                                          const Dataset& data) {
  check_dims(k, x, data);
  const Eigen::MatrixXd Ck = data.design(k);
  const double e2 = std::exp(-2.0 * eta_of(x));
  const Eigen::VectorXd r = data.y - Ck * beta_of(x);
  Eigen::VectorXd g(x.size());
  g.head(Ck.cols()) = e2 * (Ck.transpose() * r);
  g[g.size() - 1] = -static_cast<double>(data.n()) + e2 * r.squaredNorm();
  return g;
}

double normal_log_evidence(const ModelId& k, const Dataset& data) {
  ModelPosterior post(ModelSpec::normal(), k, data);
  const double n = static_cast<double>(data.n());
  const double d = k.dim();
  // Residuals at rounding level count as an exact fit.
  if (!(post.rss() > 1e-20 * data.y.squaredNorm()))
    throw InfiniteEvidenceError("model " + format_model(k) + " fits the response exactly");
  return post.log_prior() + std::lgamma(0.5 * (n - d)) + 0.5 * d * std::log(std::numbers::pi) -
         0.5 * (n - d) * std::log(post.rss()) - 0.5 * post.log_det_gram();
}

double normal_evidence_constant(Eigen::Index n) {
  return -0.5 * static_cast<double>(n) * std::log(std::numbers::pi) - std::numbers::ln2;
}

double NormalConditionals::eta_hat(Eigen::Index n) const {
  return 0.5 * std::log(rss / static_cast<double>(n));
}

double NormalConditionals::eta_log_density(double eta) const {
  return shape * std::log(rate) - std::lgamma(shape) + std::numbers::ln2 - 2.0 * shape * eta -
         rate * std::exp(-2.0 * eta);
}

double NormalConditionals::mean_eta() const {
  return 0.5 * (std::log(rate) - boost::math::digamma(shape));
}

ParamVector NormalConditionals::sample(Stream& rng) const {
  const double sigma2 = rate / rng.gamma(shape);
  const auto d = beta_hat.size();
  ParamVector x(d + 1);
  x.head(d) = beta_hat + std::sqrt(sigma2) * (gram_inv_chol * rng.normal_vector(d));
  x[d] = 0.5 * std::log(sigma2);
  return x;
}

NormalConditionals normal_conditionals(const ModelId& k, const Dataset& data) {
  ModelPosterior post(ModelSpec::normal(), k, data);
  NormalConditionals nc;
  nc.beta_hat = post.beta_hat();
  // G^{-1} = L^{-T} L^{-1}; its lower Cholesky factor is obtained directly.
  const Eigen::MatrixXd Ginv = post.gram().inverse();
  nc.gram_inv_chol = Eigen::LLT<Eigen::MatrixXd>(Ginv).matrixL();
  nc.shape = 0.5 * static_cast<double>(data.n() - k.dim());
  nc.rss = post.rss();
  nc.rate = 0.5 * post.rss();
  return nc;
}

ModelPosterior::ModelPosterior(const ModelSpec& spec, const ModelId& k, const Dataset& data)
    : spec_(spec), k_(k), data_(&data), n_(data.n()), d_(k.dim()) {
  if (n_ <= d_)
    throw DegenerateDesignError("model " + format_model(k) + " has at least as many columns as rows");
  Ck_ = data.design(k);
  G_ = Ck_.transpose() * Ck_;
  const auto llt = gram_factor(G_, k);
  log_det_gram_ = log_det(llt);
  log_prior_ = 0.5 * log_det_gram_ - 0.5 * static_cast<double>(d_) * std::log(static_cast<double>(n_));
  beta_hat_ = llt.solve(Ck_.transpose() * data.y);
  rss_ = (data.y - Ck_ * beta_hat_).squaredNorm();
  if (spec.kind == ModelKind::kLptn && n_ <= d_ + 1)
    warn("LPTN posterior of model " + format_model(k) + " may be improper (n <= d_k + 1)");
}

double ModelPosterior::value(const Eigen::VectorXd& x) const {
  if (x.size() != d_ + 1) throw DimensionError("parameter vector size mismatch");
  const double eta = x[d_];
  const double n = static_cast<double>(n_);
  if (spec_.kind == ModelKind::kNormal) {
    const Eigen::VectorXd db = x.head(d_) - beta_hat_;
    const double q = db.dot(G_ * db);
    return log_prior_ - n * eta - n * kHalfLog2Pi - 0.5 * std::exp(-2.0 * eta) * (q + rss_);
  }
  const Eigen::VectorXd z = (data_->y - Ck_ * x.head(d_)) * std::exp(-eta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) ll += lptn_logpdf(z[i], spec_.lptn);
  return log_prior_ - n * eta + ll;
}

double ModelPosterior::kink_distance(const Eigen::VectorXd& x) const {
  if (spec_.kind == ModelKind::kNormal) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd z = (data_->y - Ck_ * x.head(d_)) * std::exp(-x[d_]);
  return (z.array().abs() - spec_.lptn.tau).abs().minCoeff();
}

double ModelPosterior::value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  if (x.size() != d_ + 1) throw DimensionError("parameter vector size mismatch");
  const double eta = x[d_];
  const double n = static_cast<double>(n_);
  grad.resize(d_ + 1);
  if (spec_.kind == ModelKind::kNormal) {
    const Eigen::VectorXd db = x.head(d_) - beta_hat_;
    const Eigen::VectorXd Gdb = G_ * db;
    const double q = db.dot(Gdb);
    const double e2 = std::exp(-2.0 * eta);
    grad.head(d_) = -e2 * Gdb;
    grad[d_] = -n + e2 * (q + rss_);
    return log_prior_ - n * eta - n * kHalfLog2Pi - 0.5 * e2 * (q + rss_);
  }
  const double e = std::exp(-eta);
  const Eigen::VectorXd z = (data_->y - Ck_ * x.head(d_)) * e;
  Eigen::VectorXd psi(n_);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) {
    ll += lptn_logpdf(z[i], spec_.lptn);
    psi[i] = lptn_dlogpdf(z[i], spec_.lptn);
  }
  grad.head(d_) = -e * (Ck_.transpose() * psi);
  grad[d_] = -n - psi.dot(z);
  return log_prior_ - n * eta + ll;
}

}  // namespace irj
