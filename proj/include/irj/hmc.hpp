#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "irj/laplace.hpp"
#include "irj/regression.hpp"
#include "irj/rng.hpp"

namespace irj {

/// Vanilla HMC settings for one model. mass_diag holds per-coordinate scales
/// (marginal posterior SDs); momenta are drawn as p_i ~ N(0, 1/s_i^2), so the
/// dynamics are those of unit-mass HMC in the coordinates x_i / s_i.
struct HmcTuning {
  double step_size = 0.1;
  int traj_len = 10;
  Eigen::VectorXd mass_diag;
  double eval_accept_rate = -1.0;  // diagnostic from tuning, -1 if unknown
  bool fallback = false;
};

/// Integrates L leapfrog steps in place. `grad`/`logp` must hold the values at
/// `x` on entry and are updated. Returns false if a non-finite value appears.
bool leapfrog(const LogDensity& target, Eigen::VectorXd& x, Eigen::VectorXd& p,
              Eigen::VectorXd& grad, double& logp, double eps, int L,
              const Eigen::VectorXd& inv_mass);

struct HmcProposal {
  Eigen::VectorXd x;
  double log_accept = 0.0;  // -Delta H; -inf when the trajectory diverged
};

/// Draws a momentum from `momentum_rng` and integrates one trajectory.
HmcProposal hmc_propose(const LogDensity& target, const Eigen::VectorXd& x, const HmcTuning& tuning,
                        Stream& momentum_rng);

struct HmcResult {
  Eigen::VectorXd x;
  bool accepted = false;
  double log_alpha = 0.0;
};

/// One HMC Metropolis step. A non-finite Hamiltonian is rejected with a warning.
HmcResult hmc_update(const LogDensity& target, const Eigen::VectorXd& x, const HmcTuning& tuning,
                     Stream& momentum_rng, Stream& accept_rng);

struct AutotuneOptions {
  int adapt_iters = 150;
  int pilot_iters = 150;
  int readapt_iters = 400;
  int eval_iters = 250;
  int pilot_traj_len = 10;
  double target_accept = 0.8;
  std::vector<int> traj_grid{5, 10, 20, 40};
};

/// Warm-up from the MAP: dual-averaging step adaptation, marginal SDs from the
/// pilot, then a grid search over trajectory lengths by minimum marginal ESS.
/// Falls back to step 0.1/sqrt(D), 10 steps, Laplace SDs if the pilot diverges.
HmcTuning hmc_autotune(const LogDensity& target, const ModelInfo& info, std::uint64_t seed,
                       const AutotuneOptions& opt = {});

HmcTuning hmc_fallback_tuning(const ModelInfo& info);

}  // namespace irj
