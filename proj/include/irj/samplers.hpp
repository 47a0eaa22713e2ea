#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "irj/hmc.hpp"
#include "irj/laplace.hpp"
#include "irj/model_cache.hpp"
#include "irj/rng.hpp"
#include "irj/types.hpp"

namespace irj {

enum class Combiner { kMedian, kSimpleAverage, kAverageOfTwo };

Combiner parse_combiner(const std::string& s);
std::string to_string(Combiner c);

struct AnnealConfig {
  int T = 1;
  double ell = 2.0;
  int N = 1;
  Combiner combiner = Combiner::kMedian;
};

/// Merges the Laplace ratio with annealed ratio estimates (all positive).
double combine_ratio(Combiner c, double laplace_ratio, const std::vector<double>& r_samples);
/// Same on log values, without leaving log space.
double combine_log_ratio(Combiner c, double log_laplace_ratio, const std::vector<double>& log_r);

/// rho_t on z = (x_k, y_k'):
///   (1-g)[log pi(k,x) + log q_k'(y)] + g[log pi(k',y) + log q_k(x)],  g = t/T.
class AnnealedDensity final : public LogDensity {
 public:
  AnnealedDensity(const CachedModel& from, const CachedModel& to, double gamma)
      : from_(&from), to_(&to), gamma_(gamma) {}

  Eigen::Index dim() const override { return dx() + dy(); }
  double value(const Eigen::VectorXd& z) const override;
  double value_and_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const override;

  Eigen::Index dx() const { return from_->info.map.size(); }
  Eigen::Index dy() const { return to_->info.map.size(); }
  double gamma() const { return gamma_; }

  /// [log pi(k',y) + log q_k(x)] - [log pi(k,x) + log q_k'(y)]
  static double log_delta(const CachedModel& from, const CachedModel& to, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y);

 private:
  const CachedModel* from_;
  const CachedModel* to_;
  double gamma_;
};

double annealed_log_density(int t, int T, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const CachedModel& from, const CachedModel& to);

/// ell / D^{1/6} with D the total parameter count of the pair.
double mala_step_size(double ell, Eigen::Index total_dim);

struct MalaResult {
  Eigen::VectorXd z;
  bool accepted = false;
  double log_alpha = 0.0;
};

/// One MALA Metropolis-Hastings step leaving `target` invariant. With a
/// lower-triangular `chol` (M = L L'), the proposal is
///   N(z + step^2/2 M grad, step^2 M),
/// i.e. plain MALA in the coordinates L^{-1} z. Null means M = I.
MalaResult mala_annealed_kernel(const LogDensity& target, const Eigen::VectorXd& z, double step,
                                Stream& proposal_rng, Stream& accept_rng,
                                const Eigen::MatrixXd* chol = nullptr);

/// log of the MALA proposal density q(a -> b) up to a constant common to both directions.
double mala_log_q(const LogDensity& target, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                  double step, const Eigen::MatrixXd* chol = nullptr);

/// blockdiag(L_k, L_k') from the Laplace covariances of the pair; the
/// preconditioner used on annealed paths. Swapping the pair swaps the blocks,
/// so paths k -> k' and k' -> k share their proposal family.
Eigen::MatrixXd anneal_preconditioner(const CachedModel& from, const CachedModel& to);

struct AisPath {
  Eigen::VectorXd x_end;  // parameters of the source model after T-1 kernels
  Eigen::VectorXd y_end;  // proposed parameters of the destination model
  double log_r = 0.0;     // log r_RJ2
};

/// Runs kernels t = 1..T-1 from (x0, y0) and accumulates the telescoping ratio.
/// Kernel randomness comes from Path streams (slot, replicate, step).
AisPath run_anneal_path(const CachedModel& from, const CachedModel& to, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& y0, const AnnealConfig& cfg, const IterationRng& rng,
                        std::uint64_t slot, std::uint64_t replicate);

/// Draws y0 ~ N(x_hat_k', I_k'^{-1}) from the Proposal stream (slot, replicate)
/// and runs the annealed path from s.
AisPath ais_switch(const ChainState& s, const ModelId& k2, const AnnealConfig& cfg,
                   ModelInfoCache& cache, const IterationRng& rng, std::uint64_t slot = 0,
                   std::uint64_t replicate = 0);

// ---- transition kernels -----------------------------------------------------
// Each mutates `s` into the next state and returns the iteration record.

/// Single-step RJ with uniform model proposals over N(k).
TraceRecord rj_uninformed_step(ChainState& s, ModelInfoCache& cache, const IterationRng& rng);

/// Single-step RJ: Laplace-informed model proposal, independent Gaussian parameter
/// proposal for switches, HMC for k' = k.
TraceRecord rj_informed_step(ChainState& s, Balancing h, ModelInfoCache& cache,
                             const IterationRng& rng);

/// Annealed RJ: switches through an annealed bridge of T steps.
TraceRecord rj_ais_step(ChainState& s, Balancing h, const AnnealConfig& cfg, ModelInfoCache& cache,
                        const IterationRng& rng);

/// Multi-estimate RJ: N annealed estimates per switch, randomised forward/reverse branch.
TraceRecord rj_multi_step(ChainState& s, Balancing h, const AnnealConfig& cfg,
                          ModelInfoCache& cache, const IterationRng& rng);

/// Improved-g RJ: model proposal rebuilt from combined Laplace/annealed ratio estimates.
TraceRecord rj_improved_g_step(ChainState& s, Balancing h, const AnnealConfig& cfg,
                               ModelInfoCache& cache, const IterationRng& rng);

/// Parameter-only HMC move for the current model.
TraceRecord param_update_step(ChainState& s, ModelInfoCache& cache, const IterationRng& rng);

enum class SamplerKind { kUninformed, kInformed, kAis, kMulti, kImproved };

SamplerKind parse_sampler(const std::string& s);
std::string to_string(SamplerKind k);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kInformed;
  Balancing h = Balancing::kBarker;
  AnnealConfig anneal;
};

TraceRecord sampler_step(const SamplerConfig& cfg, ChainState& s, ModelInfoCache& cache,
                         const IterationRng& rng);

}  // namespace irj
