#include "irj/hmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irj/diagnostics.hpp"
#include "irj/errors.hpp"
#include "irj/log.hpp"

namespace irj {

bool leapfrog(const LogDensity& target, Eigen::VectorXd& x, Eigen::VectorXd& p,
              Eigen::VectorXd& grad, double& logp, double eps, int L,
              const Eigen::VectorXd& inv_mass) {
  p += 0.5 * eps * grad;
  for (int l = 0; l < L; ++l) {
    x += eps * inv_mass.cwiseProduct(p);
    logp = target.value_and_gradient(x, grad);
    if (!std::isfinite(logp) || !grad.allFinite()) return false;
    if (l + 1 < L) p += eps * grad;
  }
  p += 0.5 * eps * grad;
  return true;
}

HmcProposal hmc_propose(const LogDensity& target, const Eigen::VectorXd& x, const HmcTuning& tuning,
                        Stream& momentum_rng) {
  const Eigen::VectorXd& s = tuning.mass_diag;
  if (s.size() != x.size()) throw DimensionError("HMC scale vector does not match the parameter");
  const Eigen::VectorXd inv_mass = s.cwiseProduct(s);
  Eigen::VectorXd p = momentum_rng.normal_vector(x.size()).cwiseQuotient(s);
  Eigen::VectorXd grad;
  double logp = target.value_and_gradient(x, grad);
  const double h0 = -logp + 0.5 * p.dot(inv_mass.cwiseProduct(p));
  HmcProposal out{x, -std::numeric_limits<double>::infinity()};
  if (!leapfrog(target, out.x, p, grad, logp, tuning.step_size, tuning.traj_len, inv_mass))
    return out;
  const double h1 = -logp + 0.5 * p.dot(inv_mass.cwiseProduct(p));
  out.log_accept = h0 - h1;
  if (!std::isfinite(out.log_accept)) out.log_accept = -std::numeric_limits<double>::infinity();
  return out;
}

HmcResult hmc_update(const LogDensity& target, const Eigen::VectorXd& x, const HmcTuning& tuning,
                     Stream& momentum_rng, Stream& accept_rng) {
  HmcProposal prop = hmc_propose(target, x, tuning, momentum_rng);
  const double u = accept_rng.uniform();
  HmcResult r{x, false, prop.log_accept};
  if (!std::isfinite(prop.log_accept)) {
    warn("non-finite Hamiltonian in HMC trajectory; proposal rejected");
    return r;
  }
  if (std::log(u) < prop.log_accept) {
    r.x = std::move(prop.x);
    r.accepted = true;
  }
  return r;
}

HmcTuning hmc_fallback_tuning(const ModelInfo& info) {
  HmcTuning t;
  const auto D = info.map.size();
  t.step_size = 0.1 / std::sqrt(static_cast<double>(D));
  t.traj_len = 10;
  t.mass_diag = (info.inv_chol * info.inv_chol.transpose()).diagonal().cwiseSqrt();
  t.fallback = true;
  return t;
}

namespace {

/// Hoffman & Gelman dual averaging on log step size.
class DualAveraging {
 public:
  DualAveraging(double eps0, double target) : mu_(std::log(10.0 * eps0)), target_(target) {}
  double update(double accept_stat) {
    ++m_;
    const double w = 1.0 / (m_ + t0_);
    hbar_ = (1.0 - w) * hbar_ + w * (target_ - accept_stat);
    const double log_eps = mu_ - std::sqrt(m_) / gamma_ * hbar_;
    const double eta = std::pow(m_, -kappa_);
    log_eps_bar_ = eta * log_eps + (1.0 - eta) * log_eps_bar_;
    return std::exp(log_eps);
  }
  double final_step() const { return std::exp(log_eps_bar_); }

 private:
  double mu_;
  double target_;
  double hbar_ = 0.0;
  double log_eps_bar_ = 0.0;
  double m_ = 0.0;
  static constexpr double gamma_ = 0.05, t0_ = 10.0, kappa_ = 0.75;
};

struct PilotState {
  Eigen::VectorXd x;
  bool diverged = false;
};

/// Runs `iters` HMC steps; adapts the step if `da` is given; records draws if `draws` is given.
void run_pilot(const LogDensity& target, PilotState& st, HmcTuning& tun, std::uint64_t seed,
               std::uint64_t phase, int iters, DualAveraging* da,
               std::vector<Eigen::VectorXd>* draws, int* accepted) {
  int div = 0;
  for (int it = 0; it < iters; ++it) {
    Stream mom(StreamKey{seed, 0, static_cast<std::uint64_t>(it), Purpose::kPilot, phase, 0, 0});
    Stream acc(StreamKey{seed, 0, static_cast<std::uint64_t>(it), Purpose::kPilot, phase, 1, 0});
    const HmcProposal prop = hmc_propose(target, st.x, tun, mom);
    const double a = std::isfinite(prop.log_accept) ? std::min(1.0, std::exp(prop.log_accept)) : 0.0;
    if (!std::isfinite(prop.log_accept)) ++div;
    if (acc.uniform() < a) {
      st.x = prop.x;
      if (accepted) ++*accepted;
    }
    if (da) tun.step_size = da->update(a);
    if (draws) draws->push_back(st.x);
  }
  // Occasional divergences during early adaptation are expected; persistent ones are not.
  if (div > iters / 2) st.diverged = true;
}

double min_ess(const std::vector<Eigen::VectorXd>& draws) {
  const Eigen::Index D = draws.front().size();
  double m = std::numeric_limits<double>::infinity();
  std::vector<double> series(draws.size());
  for (Eigen::Index j = 0; j < D; ++j) {
    for (std::size_t i = 0; i < draws.size(); ++i) series[i] = draws[i][j];
    m = std::min(m, ess_scalar(series));
  }
  return m;
}

}  // namespace

HmcTuning hmc_autotune(const LogDensity& target, const ModelInfo& info, std::uint64_t seed,
                       const AutotuneOptions& opt) {
  const Eigen::Index D = info.map.size();
  HmcTuning tun = hmc_fallback_tuning(info);
  tun.fallback = false;
  tun.traj_len = opt.pilot_traj_len;
  tun.step_size = 1.0 / std::pow(static_cast<double>(D), 0.25) / opt.pilot_traj_len * 5.0;

  PilotState st{info.map};
  DualAveraging da(tun.step_size, opt.target_accept);
  run_pilot(target, st, tun, seed, 1, opt.adapt_iters, &da, nullptr, nullptr);
  tun.step_size = da.final_step();

  std::vector<Eigen::VectorXd> pilot;
  run_pilot(target, st, tun, seed, 2, opt.pilot_iters, nullptr, &pilot, nullptr);

  bool ok = !st.diverged && std::isfinite(tun.step_size) && tun.step_size > 1e-8;
  if (ok) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(D), sq = Eigen::VectorXd::Zero(D);
    for (const auto& v : pilot) mean += v;
    mean /= static_cast<double>(pilot.size());
    for (const auto& v : pilot) sq += (v - mean).cwiseAbs2();
    Eigen::VectorXd sd = (sq / static_cast<double>(pilot.size() - 1)).cwiseSqrt();
    // A stuck pilot gives zero spread; keep the Laplace scale for those coordinates.
    for (Eigen::Index j = 0; j < D; ++j)
      if (!(sd[j] > 1e-3 * tun.mass_diag[j]) || !std::isfinite(sd[j])) sd[j] = tun.mass_diag[j];
    tun.mass_diag = sd;

    DualAveraging da2(tun.step_size, opt.target_accept);
    run_pilot(target, st, tun, seed, 3, opt.readapt_iters, &da2, nullptr, nullptr);
    tun.step_size = da2.final_step();
    ok = !st.diverged && std::isfinite(tun.step_size) && tun.step_size > 1e-8;
  }
  if (ok) {
    double best = -1.0;
    int best_len = opt.traj_grid.front();
    double best_acc = 0.0;
    for (std::size_t g = 0; g < opt.traj_grid.size(); ++g) {
      HmcTuning trial = tun;
      trial.traj_len = opt.traj_grid[g];
      PilotState s2{st.x};
      std::vector<Eigen::VectorXd> draws;
      int acc = 0;
      run_pilot(target, s2, trial, seed, 10 + g, opt.eval_iters, nullptr, &draws, &acc);
      if (s2.diverged) continue;
      const double e = min_ess(draws);
      if (e > best) {
        best = e;
        best_len = trial.traj_len;
        best_acc = static_cast<double>(acc) / opt.eval_iters;
      }
    }
    if (best < 0.0) ok = false;
    tun.traj_len = best_len;
    tun.eval_accept_rate = best_acc;
  }
  if (!ok) {
    warn("HMC pilot for model " + format_model(info.k) + " diverged; using fallback tuning");
    return hmc_fallback_tuning(info);
  }
  return tun;
}

}  // namespace irj
