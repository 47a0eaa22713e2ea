#pragma once

#include <Eigen/Core>

#include <string>

#include "irj/dataset.hpp"
#include "irj/model_space.hpp"
#include "irj/rng.hpp"

namespace irj {

enum class ModelKind { kNormal, kLptn };

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind kind);

struct LptnConstants {
  double rho = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
};

/// Lower end of the admissible rho interval, 2*Phi(1) - 1.
double lptn_rho_min();

/// tau = Phi^{-1}((1+rho)/2), lambda = 2 phi(tau) tau log(tau) / (1-rho).
LptnConstants lptn_constants(double rho);

/// Log density of the log-Pareto-tailed normal: standard normal on [-tau, tau],
/// phi(tau) (tau/|x|) (log tau / log|x|)^(lambda+1) beyond.
double lptn_logpdf(double x, const LptnConstants& c);

/// d/dx lptn_logpdf. At |x| == tau the core branch is used.
double lptn_dlogpdf(double x, const LptnConstants& c);

/// Likelihood family plus its constants.
struct ModelSpec {
  ModelKind kind = ModelKind::kNormal;
  LptnConstants lptn{};

  static ModelSpec normal() { return {}; }
  static ModelSpec robust(double rho) { return {ModelKind::kLptn, lptn_constants(rho)}; }
};

/// Parameters of one model: beta (d_k entries, intercept first) then eta = log sigma.
using ParamVector = Eigen::VectorXd;

inline auto beta_of(const ParamVector& x) { return x.head(x.size() - 1); }
inline double eta_of(const ParamVector& x) { return x[x.size() - 1]; }

/// 0.5 log|C_k'C_k| - (d_k/2) log n. Throws DegenerateDesignError.
double log_model_prior(const ModelId& k, const Dataset& data);

/// log pi(k) - n eta + sum_i log f((y_i - c_i'beta) e^{-eta}), f = phi or LPTN.
/// Computed directly from the residuals.
double log_unnorm_posterior(const ModelSpec& spec, const ModelId& k, const ParamVector& x,
                            const Dataset& data);

/// Gradient of log_unnorm_posterior for the LPTN model, (d_k + 1) entries.
Eigen::VectorXd grad_log_posterior_lptn(const ModelId& k, const ParamVector& x,
                                        const Dataset& data, const LptnConstants& c);

/// Same for the normal model.
Eigen::VectorXd grad_log_posterior_normal(const ModelId& k, const ParamVector& x,
                                          const Dataset& data);

/// Closed-form log posterior model weight under the normal model:
///   log pi(k) + lgamma((n-d)/2) + (d/2) log pi - (n-d) log||y - yhat|| - 0.5 log|G|.
double normal_log_evidence(const ModelId& k, const Dataset& data);

/// k-independent offset such that
///   log integral exp(log_unnorm_posterior) d(beta, eta)
///     = normal_log_evidence + normal_evidence_constant(n).
double normal_evidence_constant(Eigen::Index n);

/// Exact conditional structure of the normal posterior: beta | sigma ~
/// N(beta_hat, sigma^2 G^{-1}) and sigma^2 ~ InvGamma(shape, rate).
struct NormalConditionals {
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd gram_inv_chol;  // L with L L' = G^{-1}
  double shape = 0.0;             // (n - d_k) / 2
  double rate = 0.0;              // RSS / 2
  double rss = 0.0;

  /// Joint maximiser of the unnormalised posterior in eta: log sqrt(RSS/n).
  double eta_hat(Eigen::Index n) const;
  /// Log density of eta = log sigma (normalised).
  double eta_log_density(double eta) const;
  /// E[eta] = 0.5 (log rate - digamma(shape)).
  double mean_eta() const;
  ParamVector sample(Stream& rng) const;
};

NormalConditionals normal_conditionals(const ModelId& k, const Dataset& data);

/// Differentiable log density on R^d.
class LogDensity {
 public:
  virtual ~LogDensity() = default;
  virtual Eigen::Index dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const = 0;
};

/// Unnormalised log posterior of one model with the design and sufficient
/// statistics precomputed. For the normal model the quadratic form is
/// expanded around beta_hat, which avoids touching the n x d design.
class ModelPosterior final : public LogDensity {
 public:
  ModelPosterior(const ModelSpec& spec, const ModelId& k, const Dataset& data);

  Eigen::Index dim() const override { return d_ + 1; }
  double value(const Eigen::VectorXd& x) const override;
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const override;

  /// min_i | |z_i| - tau | over standardised residuals; +inf for the normal model.
  /// The LPTN log density has a kink at |z| = tau.
  double kink_distance(const Eigen::VectorXd& x) const;

  const ModelId& model() const noexcept { return k_; }
  const ModelSpec& spec() const noexcept { return spec_; }
  const Eigen::MatrixXd& design() const noexcept { return Ck_; }
  const Eigen::MatrixXd& gram() const noexcept { return G_; }
  const Eigen::VectorXd& beta_hat() const noexcept { return beta_hat_; }
  double rss() const noexcept { return rss_; }
  double log_prior() const noexcept { return log_prior_; }
  double log_det_gram() const noexcept { return log_det_gram_; }

 private:
  ModelSpec spec_;
  ModelId k_;
  const Dataset* data_;
  Eigen::Index n_;
  Eigen::Index d_;
  Eigen::MatrixXd Ck_;
  Eigen::MatrixXd G_;
  Eigen::VectorXd beta_hat_;
  double rss_ = 0.0;
  double log_prior_ = 0.0;
  double log_det_gram_ = 0.0;
};

}  // namespace irj
