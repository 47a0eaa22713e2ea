#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "irj/dataset.hpp"
#include "irj/model_space.hpp"
#include "irj/regression.hpp"
#include "irj/rng.hpp"

namespace irj {

/// Per-model quantities needed by the informed samplers. Depends only on
/// (spec, k, data).
struct ModelInfo {
  ModelId k;
  ParamVector map;
  Eigen::MatrixXd obs_info;  // I_k
  Eigen::MatrixXd inv_chol;  // L with L L' = I_k^{-1}
  double log_det_info = 0.0;
  double log_laplace = 0.0;
};

struct MapOptions {
  double grad_tol = 1e-8;
  int max_iter = 500;
};

/// Normal model: closed form (beta_hat, log sqrt(RSS/n)). LPTN: BFGS ascent
/// from the normal MAP. Throws ConvergenceError.
ParamVector map_estimate(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                         const MapOptions& opt = {});

/// [[C_k'C_k e^{-2 eta_hat}, 0], [0, 2n]] with eta_hat taken from `map`.
Eigen::MatrixXd observed_info(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                              const ParamVector& map);

/// log pi_un(map) + ((d_k+1)/2) log 2pi - 0.5 log|I_k|  (log pi(k) is part of pi_un).
double log_laplace_evidence(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                            const ModelInfo& info);

/// Laplace evidence of an arbitrary log density given its mode and precision.
double laplace_log_normaliser(double log_density_at_mode, const Eigen::MatrixXd& precision);

ModelInfo build_model_info(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                           const MapOptions& opt = {});

/// N(mean, precision^{-1}) with the factor of the covariance precomputed.
class GaussianProposal {
 public:
  GaussianProposal() = default;
  GaussianProposal(Eigen::VectorXd mean, Eigen::MatrixXd precision, Eigen::MatrixXd cov_chol,
                   double log_det_precision);
  explicit GaussianProposal(const ModelInfo& info)
      : GaussianProposal(info.map, info.obs_info, info.inv_chol, info.log_det_info) {}

  Eigen::Index dim() const noexcept { return mean_.size(); }
  Eigen::VectorXd sample(Stream& rng) const;
  double log_density(const Eigen::VectorXd& x) const;
  /// Returns log density, writes its gradient -P (x - mean).
  double log_density_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd precision_;
  Eigen::MatrixXd cov_chol_;
  double log_norm_ = 0.0;
};

enum class Balancing { kSqrt, kBarker, kIdentity };

Balancing parse_balancing(const std::string& s);
std::string to_string(Balancing h);

/// sqrt(x), x/(1+x) or x. Throws DomainError for x < 0.
double balancing(Balancing h, double x);

/// log h(exp(log_x)), evaluated without leaving log space.
double log_balancing(Balancing h, double log_x);

/// Model proposal over a neighbourhood: g(k, l) = h(ratio_l) / c(k).
struct ProposalPmf {
  std::vector<ModelId> support;
  std::vector<double> probs;
  std::vector<double> log_probs;
  double log_c = 0.0;

  /// Inverse-CDF draw from a uniform on [0,1).
  const ModelId& sample(double u) const;
  std::size_t index_of(const ModelId& k) const;  // throws if absent
  double prob(const ModelId& k) const { return probs[index_of(k)]; }
  double log_prob(const ModelId& k) const { return log_probs[index_of(k)]; }
};

/// log_ratios[i] = log(pi(support[i]) / pi(k)), with 0 for k itself.
ProposalPmf balanced_pmf(const std::vector<ModelId>& support, const std::vector<double>& log_ratios,
                         Balancing h);

double log_sum_exp(const std::vector<double>& v);
double log_mean_exp(const std::vector<double>& v);

}  // namespace irj
