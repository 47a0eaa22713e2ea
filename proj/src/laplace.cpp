#include "irj/laplace.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "irj/errors.hpp"
#include "irj/log.hpp"

namespace irj {
namespace {

constexpr double kLog2Pi = 1.83787706640934548356;

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// BFGS on f = -log posterior. Starting inverse Hessian is the inverse of the
/// normal-form information, which is exact for Gaussian residuals.
///
/// The LPTN mode frequently sits on a kink (some |z_i| = tau), where the
/// gradient jumps and never becomes small. There we stop once the iterates
/// stall and the point is within rounding of a kink.
ParamVector bfgs_ascent(const ModelPosterior& post, ParamVector x, Eigen::MatrixXd H,
                        const MapOptions& opt) {
  const Eigen::Index D = x.size();
  Eigen::VectorXd g(D), g_new(D);
  double f = -post.value_and_gradient(x, g);
  g = -g;
  int stalled = 0;
  auto on_kink = [&](const ParamVector& v) { return post.kink_distance(v) < 1e-7; };
  for (int it = 0; it < opt.max_iter; ++it) {
    if (g.norm() < opt.grad_tol) return x;
    if (stalled >= 3 && (on_kink(x) || g.norm() < 1e3 * opt.grad_tol)) return x;
    Eigen::VectorXd p = -H * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {  // lost descent direction; restart from steepest descent
      H = Eigen::MatrixXd::Identity(D, D) / std::max(1.0, g.norm());
      p = -H * g;
      slope = g.dot(p);
    }
    double step = 1.0;
    ParamVector x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + step * p;
      f_new = -post.value_and_gradient(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        found = true;
        break;
      }
      step *= 0.5;
    }
    if (!found) {
      // Sufficient-decrease test is below round-off; accept if already stationary enough.
      if (g.norm() < 1e3 * opt.grad_tol || on_kink(x)) return x;
      throw ConvergenceError("line search failed in MAP search for model " +
                                 format_model(post.model()),
                             to_vector(x), g.norm());
    }
    g_new = -g_new;
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double r = 1.0 / sy;
      const Eigen::VectorXd Hy = H * yv;
      H += ((sy + yv.dot(Hy)) * r * r) * (s * s.transpose()) -
           r * (Hy * s.transpose() + s * Hy.transpose());
    }
    const bool tiny = s.norm() <= 1e-10 * (1.0 + x.norm()) && f - f_new <= 1e-13 * (1.0 + std::abs(f));
    stalled = tiny ? stalled + 1 : 0;
    x = x_new;
    f = f_new;
    g = g_new;
  }
  if (g.norm() < opt.grad_tol || (stalled > 0 && (on_kink(x) || g.norm() < 1e3 * opt.grad_tol))) return x;
  throw ConvergenceError("MAP search for model " + format_model(post.model()) +
                             " did not converge in " + std::to_string(opt.max_iter) + " iterations",
                         to_vector(x), g.norm());
}

}  // namespace

ParamVector map_estimate(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                         const MapOptions& opt) {
  const ModelPosterior normal(ModelSpec::normal(), k, data);
  ParamVector x(k.dim() + 1);
  x.head(k.dim()) = normal.beta_hat();
  x[k.dim()] = 0.5 * std::log(normal.rss() / static_cast<double>(data.n()));
  if (!std::isfinite(x[k.dim()]))
    throw InfiniteEvidenceError("model " + format_model(k) + " fits the response exactly");
  if (spec.kind == ModelKind::kNormal) return x;

  const ModelPosterior post(spec, k, data);
  const Eigen::MatrixXd I0 = observed_info(spec, k, data, x);
  return bfgs_ascent(post, x, I0.inverse(), opt);
}

Eigen::MatrixXd observed_info(const ModelSpec&, const ModelId& k, const Dataset& data,
                              const ParamVector& map) {
  const Eigen::MatrixXd Ck = data.design(k);
  const Eigen::Index d = Ck.cols();
  if (map.size() != d + 1) throw DimensionError("MAP vector size mismatch");
  Eigen::MatrixXd I = Eigen::MatrixXd::Zero(d + 1, d + 1);
  I.topLeftCorner(d, d) = Ck.transpose() * Ck * std::exp(-2.0 * map[d]);
  I(d, d) = 2.0 * static_cast<double>(data.n());
  return I;
}

double laplace_log_normaliser(double log_density_at_mode, const Eigen::MatrixXd& precision) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw DomainError("precision matrix is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return log_density_at_mode + 0.5 * static_cast<double>(precision.rows()) * kLog2Pi - 0.5 * log_det;
}

double log_laplace_evidence(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                            const ModelInfo& info) {
  const ModelPosterior post(spec, k, data);
  return laplace_log_normaliser(post.value(info.map), info.obs_info);
}

ModelInfo build_model_info(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                           const MapOptions& opt) {
  ModelInfo info;
  info.k = k;
  info.map = map_estimate(spec, k, data, opt);
  info.obs_info = observed_info(spec, k, data, info.map);
  Eigen::LLT<Eigen::MatrixXd> llt(info.obs_info);
  if (llt.info() != Eigen::Success)
    throw DegenerateDesignError("observed information of model " + format_model(k) +
                                " is not positive definite");
  info.log_det_info = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k.dim() + 1, k.dim() + 1));
  info.inv_chol = Eigen::LLT<Eigen::MatrixXd>(0.5 * (cov + cov.transpose())).matrixL();
  info.log_laplace = log_laplace_evidence(spec, k, data, info);
  return info;
}

GaussianProposal::GaussianProposal(Eigen::VectorXd mean, Eigen::MatrixXd precision,
                                   Eigen::MatrixXd cov_chol, double log_det_precision)
    : mean_(std::move(mean)), precision_(std::move(precision)), cov_chol_(std::move(cov_chol)) {
  log_norm_ = -0.5 * static_cast<double>(mean_.size()) * kLog2Pi + 0.5 * log_det_precision;
}

Eigen::VectorXd GaussianProposal::sample(Stream& rng) const {
  return mean_ + cov_chol_ * rng.normal_vector(mean_.size());
}

double GaussianProposal::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd dx = x - mean_;
  return log_norm_ - 0.5 * dx.dot(precision_ * dx);
}

double GaussianProposal::log_density_and_gradient(const Eigen::VectorXd& x,
                                                  Eigen::VectorXd& grad) const {
  const Eigen::VectorXd dx = x - mean_;
  grad = -(precision_ * dx);
  return log_norm_ + 0.5 * dx.dot(grad);
}

Balancing parse_balancing(const std::string& s) {
  if (s == "sqrt") return Balancing::kSqrt;
  if (s == "barker") return Balancing::kBarker;
  if (s == "identity") return Balancing::kIdentity;
  throw DomainError("unknown balancing function '" + s + "' (expected sqrt|barker|identity)");
}

std::string to_string(Balancing h) {
  switch (h) {
    case Balancing::kSqrt: return "sqrt";
    case Balancing::kBarker: return "barker";
    case Balancing::kIdentity: return "identity";
  }
  return "?";
}

double balancing(Balancing h, double x) {
  if (!(x >= 0.0)) throw DomainError("balancing function needs a nonnegative argument");
  switch (h) {
    case Balancing::kSqrt: return std::sqrt(x);
    case Balancing::kBarker: return std::isinf(x) ? 1.0 : x / (1.0 + x);
    case Balancing::kIdentity: return x;
  }
  return 0.0;
}

double log_balancing(Balancing h, double log_x) {
  switch (h) {
    case Balancing::kSqrt: return 0.5 * log_x;
    case Balancing::kIdentity: return log_x;
    case Balancing::kBarker:
      // log(x/(1+x)) = -log(1 + 1/x)
      return log_x > 0.0 ? -std::log1p(std::exp(-log_x)) : log_x - std::log1p(std::exp(log_x));
  }
  return 0.0;
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  // Sorted accumulation so the result does not depend on input order.
  std::vector<double> terms;
  terms.reserve(v.size());
  for (double x : v) terms.push_back(std::exp(x - m));
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return m + std::log(s);
}

double log_mean_exp(const std::vector<double>& v) {
  if (v.size() == 1) return v[0];
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

const ModelId& ProposalPmf::sample(double u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return support[i];
  }
  // u within round-off of 1: last model with positive mass
  for (std::size_t i = probs.size(); i-- > 0;)
    if (probs[i] > 0.0) return support[i];
  return support.back();
}

std::size_t ProposalPmf::index_of(const ModelId& k) const {
  const auto it = std::lower_bound(support.begin(), support.end(), k);
  if (it == support.end() || *it != k)
    throw DomainError("model " + format_model(k) + " is not in the proposal support");
  return static_cast<std::size_t>(it - support.begin());
}

ProposalPmf balanced_pmf(const std::vector<ModelId>& support, const std::vector<double>& log_ratios,
                         Balancing h) {
  if (support.size() != log_ratios.size() || support.empty())
    throw DimensionError("proposal support and ratios differ in size");
  ProposalPmf pmf;
  pmf.support = support;
  std::vector<double> lh(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) lh[i] = log_balancing(h, log_ratios[i]);
  pmf.log_c = log_sum_exp(lh);
  if (!std::isfinite(pmf.log_c))
    throw DomainError("all model proposal weights vanish or are not finite");
  pmf.log_probs.resize(lh.size());
  pmf.probs.resize(lh.size());
  for (std::size_t i = 0; i < lh.size(); ++i) {
    pmf.log_probs[i] = lh[i] - pmf.log_c;
    pmf.probs[i] = std::exp(pmf.log_probs[i]);
  }
  return pmf;
}

}  // namespace irj
