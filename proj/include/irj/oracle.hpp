#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "irj/dataset.hpp"
#include "irj/laplace.hpp"
#include "irj/regression.hpp"
#include "irj/types.hpp"

namespace irj {

constexpr int kMaxEnumeratedPredictors = 20;

/// Closed-form posterior model probabilities under the normal model.
ModelPmf exact_model_pmf_normal(const Dataset& data);

struct GoldenReport {
  std::map<std::uint64_t, double> ess;          // importance-sampling ESS per model
  std::map<std::uint64_t, double> log_evidence;  // unnormalised
};

/// Model probabilities from per-model importance sampling. The proposal is an
/// equal mixture of the Laplace Gaussian N(x_hat, I^{-1}) and a t_4 with twice
/// its scale. Throws LowEssError if any model has
/// fewer than `min_ess` effective draws.
ModelPmf golden_model_pmf(const Dataset& data, const ModelSpec& spec, std::size_t budget,
                          std::uint64_t seed, GoldenReport* report = nullptr, double min_ess = 100.0);

inline ModelPmf golden_model_pmf_lptn(const Dataset& data, double rho, std::size_t budget,
                                      std::uint64_t seed, GoldenReport* report = nullptr) {
  ModelPmf p = golden_model_pmf(data, ModelSpec::robust(rho), budget, seed, report);
  p.source = PmfSource::kGoldenLptn;
  return p;
}

/// g(k, .) over N(k) from exact probabilities.
ProposalPmf exact_proposal_pmf(const ModelPmf& pmf, const ModelId& k, Balancing h);

struct IdealChainResult {
  std::vector<ModelId> trace;
  std::size_t switch_proposals = 0;
  std::size_t switch_accepts = 0;
  /// Largest |alpha - min(1, c(k)/c(k'))| seen at a switch proposal.
  double max_identity_gap = 0.0;

  double switch_acceptance() const {
    return switch_proposals ? static_cast<double>(switch_accepts) / switch_proposals : 0.0;
  }
};

/// Metropolis-Hastings on the model space with exact informed proposals: the
/// limiting sampler the informed RJ schemes approach.
IdealChainResult ideal_mh_model_chain(const ModelPmf& pmf, Balancing h, std::size_t iters,
                                      std::uint64_t seed);

/// Stationary expected acceptance rate of the ideal sampler, restricted to switches.
double ideal_expected_switch_acceptance(const ModelPmf& pmf, Balancing h);

struct QuadratureOptions {
  int panels = 2;           // composite panels per dimension (20-point Gauss-Legendre each)
  double beta_halfwidth = 10.0;  // in conditional SDs e^eta sqrt(diag G^{-1})
  double eta_lower = 10.0;  // in Laplace SDs of eta
  double eta_upper = 16.0;
};

struct QuadratureResult {
  double log_value = 0.0;
  double rel_error = 0.0;  // |fine - coarse| / fine
};

/// log of the integral of exp(log_unnorm_posterior) over (beta, eta), by tensor
/// Gauss-Legendre quadrature. Supports d_k <= 3 (four integration dimensions).
QuadratureResult brute_force_evidence(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                                      const QuadratureOptions& opt = {});

/// log integral of exp(f) over a box by tensor Gauss-Legendre quadrature (<= 4 dims).
double box_log_integral(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int panels,
                        double log_offset);

/// Two-column text file: `# p_pred=P source=S` header then "bits probability".
void write_pmf(const std::string& path, const ModelPmf& pmf);
ModelPmf read_pmf(const std::string& path);

}  // namespace irj
