#include "irj/samplers.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>

#include "irj/errors.hpp"
#include "irj/log.hpp"

namespace irj {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

bool accept(double log_alpha, Stream& accept_rng) {
  const double u = accept_rng.uniform();
  return std::log(u) < log_alpha;
}

TraceRecord make_record(const IterationRng& rng, MoveType move, const ModelId& proposed,
                        bool accepted, const ChainState& s, double log_alpha) {
  return TraceRecord{rng.iter(), move, proposed, accepted, s, log_alpha};
}

/// Index proportional to exp(log_w).
std::size_t sample_log_weights(const std::vector<double>& log_w, double u) {
  const double m = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(log_w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = std::exp(log_w[i] - m));
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] / total;
    if (u < acc) return i;
  }
  return w.size() - 1;
}

void check_state(const ChainState& s) {
  if (s.x.size() != s.k.dim() + 1)
    throw DimensionError("chain state has " + std::to_string(s.x.size()) +
                         " parameters for model " + format_model(s.k));
}

}  // namespace

// ---- combiners ----------------------------------------------------------------

Combiner parse_combiner(const std::string& s) {
  if (s == "median") return Combiner::kMedian;
  if (s == "simple_average") return Combiner::kSimpleAverage;
  if (s == "average_of_two") return Combiner::kAverageOfTwo;
  throw DomainError("unknown combiner '" + s + "' (expected median|simple_average|average_of_two)");
}

std::string to_string(Combiner c) {
  switch (c) {
    case Combiner::kMedian: return "median";
    case Combiner::kSimpleAverage: return "simple_average";
    case Combiner::kAverageOfTwo: return "average_of_two";
  }
  return "?";
}

double combine_ratio(Combiner c, double laplace_ratio, const std::vector<double>& r) {
  if (!(laplace_ratio > 0.0)) throw DomainError("Laplace ratio must be positive");
  if (r.empty()) {
    if (c == Combiner::kMedian) return laplace_ratio;
    throw DomainError("ratio combiner needs at least one annealed estimate");
  }
  for (double v : r)
    if (!(v > 0.0)) throw DomainError("annealed ratio estimates must be positive");
  switch (c) {
    case Combiner::kMedian: {
      std::vector<double> all(r);
      all.push_back(laplace_ratio);
      std::sort(all.begin(), all.end());
      const std::size_t m = all.size();
      return m % 2 ? all[m / 2] : 0.5 * (all[m / 2 - 1] + all[m / 2]);
    }
    case Combiner::kSimpleAverage: {
      double s = laplace_ratio;
      for (double v : r) s += v;
      return s / static_cast<double>(r.size() + 1);
    }
    case Combiner::kAverageOfTwo: {
      double s = 0.0;
      for (double v : r) s += v;
      return 0.5 * (laplace_ratio + s / static_cast<double>(r.size()));
    }
  }
  return laplace_ratio;
}

double combine_log_ratio(Combiner c, double log_lap, const std::vector<double>& log_r) {
  if (log_r.empty()) {
    if (c == Combiner::kMedian) return log_lap;
    throw DomainError("ratio combiner needs at least one annealed estimate");
  }
  switch (c) {
    case Combiner::kMedian: {
      std::vector<double> all(log_r);
      all.push_back(log_lap);
      std::sort(all.begin(), all.end());
      const std::size_t m = all.size();
      if (m % 2) return all[m / 2];
      return log_add_exp(all[m / 2 - 1], all[m / 2]) - std::numbers::ln2;
    }
    case Combiner::kSimpleAverage: {
      std::vector<double> all(log_r);
      all.push_back(log_lap);
      return log_mean_exp(all);
    }
    case Combiner::kAverageOfTwo:
      return log_add_exp(log_lap, log_mean_exp(log_r)) - std::numbers::ln2;
  }
  return log_lap;
}

// ---- annealed bridge --------------------------------------------------------

double AnnealedDensity::log_delta(const CachedModel& from, const CachedModel& to,
                                  const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (to.posterior.value(y) + from.proposal.log_density(x)) -
         (from.posterior.value(x) + to.proposal.log_density(y));
}

double AnnealedDensity::value(const Eigen::VectorXd& z) const {
  const Eigen::VectorXd x = z.head(dx()), y = z.tail(dy());
  const double a = from_->posterior.value(x) + to_->proposal.log_density(y);
  const double b = to_->posterior.value(y) + from_->proposal.log_density(x);
  return (1.0 - gamma_) * a + gamma_ * b;
}

double AnnealedDensity::value_and_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const {
  const Eigen::VectorXd x = z.head(dx()), y = z.tail(dy());
  Eigen::VectorXd gpx, gqy, gpy, gqx;
  const double px = from_->posterior.value_and_gradient(x, gpx);
  const double qy = to_->proposal.log_density_and_gradient(y, gqy);
  const double py = to_->posterior.value_and_gradient(y, gpy);
  const double qx = from_->proposal.log_density_and_gradient(x, gqx);
  grad.resize(dim());
  grad.head(dx()) = (1.0 - gamma_) * gpx + gamma_ * gqx;
  grad.tail(dy()) = (1.0 - gamma_) * gqy + gamma_ * gpy;
  return (1.0 - gamma_) * (px + qy) + gamma_ * (py + qx);
}

double annealed_log_density(int t, int T, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const CachedModel& from, const CachedModel& to) {
  if (T < 1 || t < 0 || t > T) throw DomainError("annealing index out of range");
  Eigen::VectorXd z(x.size() + y.size());
  z << x, y;
  return AnnealedDensity(from, to, static_cast<double>(t) / T).value(z);
}

double mala_step_size(double ell, Eigen::Index total_dim) {
  return ell / std::pow(static_cast<double>(total_dim), 1.0 / 6.0);
}

namespace {

/// Residual of b against the MALA mean from a, in whitened coordinates.
Eigen::VectorXd mala_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& grad_a, double step,
                              const Eigen::MatrixXd* chol) {
  const double h2 = step * step;
  if (!chol) return b - a - 0.5 * h2 * grad_a;
  const auto L = chol->triangularView<Eigen::Lower>();
  // L^{-1}(b - a - h2/2 L L' g) = L^{-1}(b - a) - h2/2 L' g
  return L.solve(Eigen::VectorXd(b - a)) - 0.5 * h2 * (chol->transpose() * grad_a);
}

}  // namespace

double mala_log_q(const LogDensity& target, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                  double step, const Eigen::MatrixXd* chol) {
  Eigen::VectorXd g;
  target.value_and_gradient(a, g);
  return -mala_residual(a, b, g, step, chol).squaredNorm() / (2.0 * step * step);
}

MalaResult mala_annealed_kernel(const LogDensity& target, const Eigen::VectorXd& z, double step,
                                Stream& proposal_rng, Stream& accept_rng,
                                const Eigen::MatrixXd* chol) {
  Eigen::VectorXd g0, g1;
  const double f0 = target.value_and_gradient(z, g0);
  const double h2 = step * step;
  const Eigen::VectorXd xi = proposal_rng.normal_vector(z.size());
  const Eigen::VectorXd zp = chol ? Eigen::VectorXd(z + 0.5 * h2 * (*chol * (chol->transpose() * g0)) +
                                                    step * (*chol * xi))
                                  : Eigen::VectorXd(z + 0.5 * h2 * g0 + step * xi);
  const double f1 = target.value_and_gradient(zp, g1);
  const double log_fwd = -mala_residual(z, zp, g0, step, chol).squaredNorm() / (2.0 * h2);
  const double log_bwd = -mala_residual(zp, z, g1, step, chol).squaredNorm() / (2.0 * h2);
  MalaResult r{z, false, f1 - f0 + log_bwd - log_fwd};
  const double u = accept_rng.uniform();
  if (!std::isfinite(r.log_alpha) || !g1.allFinite()) {
    warn("non-finite value in annealed MALA proposal; rejected");
    r.log_alpha = kNegInf;
    return r;
  }
  if (std::log(u) < r.log_alpha) {
    r.z = zp;
    r.accepted = true;
  }
  return r;
}

Eigen::MatrixXd anneal_preconditioner(const CachedModel& from, const CachedModel& to) {
  const Eigen::Index dx = from.info.map.size(), dy = to.info.map.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dx + dy, dx + dy);
  L.topLeftCorner(dx, dx) = from.info.inv_chol;
  L.bottomRightCorner(dy, dy) = to.info.inv_chol;
  return L;
}

AisPath run_anneal_path(const CachedModel& from, const CachedModel& to, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& y0, const AnnealConfig& cfg, const IterationRng& rng,
                        std::uint64_t slot, std::uint64_t replicate) {
  if (cfg.T < 1) throw DomainError("T must be at least 1");
  const Eigen::Index dx = x0.size(), dy = y0.size();
  double sum = AnnealedDensity::log_delta(from, to, x0, y0);
  if (cfg.T == 1) return {x0, y0, sum};

  const double step = mala_step_size(cfg.ell, dx + dy);
  const Eigen::MatrixXd L = anneal_preconditioner(from, to);
  Eigen::VectorXd z(dx + dy);
  z << x0, y0;
  for (int t = 1; t < cfg.T; ++t) {
    const AnnealedDensity rho(from, to, static_cast<double>(t) / cfg.T);
    Stream prop = rng.stream(Purpose::kPath, slot, replicate, 2 * static_cast<std::uint64_t>(t));
    Stream acc = rng.stream(Purpose::kPath, slot, replicate, 2 * static_cast<std::uint64_t>(t) + 1);
    z = mala_annealed_kernel(rho, z, step, prop, acc, &L).z;
    sum += AnnealedDensity::log_delta(from, to, z.head(dx), z.tail(dy));
  }
  return {z.head(dx), z.tail(dy), sum / static_cast<double>(cfg.T)};
}

AisPath ais_switch(const ChainState& s, const ModelId& k2, const AnnealConfig& cfg,
                   ModelInfoCache& cache, const IterationRng& rng, std::uint64_t slot,
                   std::uint64_t replicate) {
  if (k2 == s.k) throw DomainError("annealed switch needs a different destination model");
  const CachedModel& from = cache.get(s.k);
  const CachedModel& to = cache.get(k2);
  Stream prop = rng.stream(Purpose::kProposal, slot, replicate);
  const Eigen::VectorXd y0 = to.proposal.sample(prop);
  return run_anneal_path(from, to, s.x, y0, cfg, rng, slot, replicate);
}

// ---- kernels ----------------------------------------------------------------

TraceRecord param_update_step(ChainState& s, ModelInfoCache& cache, const IterationRng& rng) {
  const CachedModel& m = cache.get(s.k);
  Stream mom = rng.stream(Purpose::kMomentum);
  Stream acc = rng.stream(Purpose::kAccept);
  HmcResult r = hmc_update(m.posterior, s.x, cache.tuning(s.k), mom, acc);
  if (r.accepted) s.x = std::move(r.x);
  return make_record(rng, MoveType::kParamUpdate, s.k, r.accepted, s, r.log_alpha);
}

namespace {

/// Shared body of the single-step RJ move for a given pair of model-proposal PMFs.
TraceRecord switch_or_update(ChainState& s, const ProposalPmf& g_k,
                             const std::function<const ProposalPmf&(const ModelId&)>& pmf_at,
                             ModelInfoCache& cache, const IterationRng& rng) {
  check_state(s);
  Stream choice = rng.stream(Purpose::kModelChoice);
  const ModelId k2 = g_k.sample(choice.uniform());
  if (k2 == s.k) return param_update_step(s, cache, rng);

  const CachedModel& from = cache.get(s.k);
  const CachedModel& to = cache.get(k2);
  Stream prop = rng.stream(Purpose::kProposal);
  Eigen::VectorXd y = to.proposal.sample(prop);
  // Swap map (x, u) -> (u, x): unit Jacobian, nothing to add.
  const double log_r = AnnealedDensity::log_delta(from, to, s.x, y);
  const double log_alpha = (pmf_at(k2).log_prob(s.k) - g_k.log_prob(k2)) + log_r;
  Stream acc = rng.stream(Purpose::kAccept);
  const bool ok = accept(log_alpha, acc);
  if (ok) s = ChainState{k2, std::move(y)};
  return make_record(rng, MoveType::kModelSwitch, k2, ok, s, log_alpha);
}

}  // namespace

TraceRecord rj_uninformed_step(ChainState& s, ModelInfoCache& cache, const IterationRng& rng) {
  return switch_or_update(
      s, cache.uniform_pmf(s.k), [&](const ModelId& k) -> const ProposalPmf& { return cache.uniform_pmf(k); },
      cache, rng);
}

TraceRecord rj_informed_step(ChainState& s, Balancing h, ModelInfoCache& cache,
                             const IterationRng& rng) {
  return switch_or_update(
      s, cache.proposal_pmf(s.k, h),
      [&](const ModelId& k) -> const ProposalPmf& { return cache.proposal_pmf(k, h); }, cache, rng);
}

TraceRecord rj_ais_step(ChainState& s, Balancing h, const AnnealConfig& cfg, ModelInfoCache& cache,
                        const IterationRng& rng) {
  check_state(s);
  const ProposalPmf& g_k = cache.proposal_pmf(s.k, h);
  Stream choice = rng.stream(Purpose::kModelChoice);
  const ModelId k2 = g_k.sample(choice.uniform());
  if (k2 == s.k) return param_update_step(s, cache, rng);

  AisPath path = ais_switch(s, k2, cfg, cache, rng, 0, 0);
  const double log_alpha = (cache.proposal_pmf(k2, h).log_prob(s.k) - g_k.log_prob(k2)) + path.log_r;
  Stream acc = rng.stream(Purpose::kAccept);
  const bool ok = accept(log_alpha, acc);
  if (ok) s = ChainState{k2, std::move(path.y_end)};
  return make_record(rng, MoveType::kModelSwitch, k2, ok, s, log_alpha);
}

TraceRecord rj_multi_step(ChainState& s, Balancing h, const AnnealConfig& cfg,
                          ModelInfoCache& cache, const IterationRng& rng) {
  check_state(s);
  if (cfg.N < 1) throw DomainError("N must be at least 1");
  const ProposalPmf& g_k = cache.proposal_pmf(s.k, h);
  Stream choice = rng.stream(Purpose::kModelChoice);
  const ModelId k2 = g_k.sample(choice.uniform());
  if (k2 == s.k) return param_update_step(s, cache, rng);

  const double log_g = cache.proposal_pmf(k2, h).log_prob(s.k) - g_k.log_prob(k2);
  Stream coin = rng.stream(Purpose::kBranchCoin);
  const bool forward = coin.uniform() <= 0.5;
  const auto N = static_cast<std::size_t>(cfg.N);

  Eigen::VectorXd y;
  double log_alpha;
  if (forward) {
    std::vector<AisPath> paths;
    std::vector<double> lr(N);
    for (std::size_t j = 0; j < N; ++j) {
      paths.push_back(ais_switch(s, k2, cfg, cache, rng, 0, j));
      lr[j] = paths.back().log_r;
    }
    Stream sel = rng.stream(Purpose::kSelection);
    const std::size_t jstar = N == 1 ? 0 : sample_log_weights(lr, sel.uniform());
    y = std::move(paths[jstar].y_end);
    log_alpha = log_g + log_mean_exp(lr);
  } else {
    AisPath fwd = ais_switch(s, k2, cfg, cache, rng, 0, 0);
    const ChainState from_new{k2, fwd.y_end};
    std::vector<double> est{-fwd.log_r};
    for (std::size_t j = 1; j < N; ++j)
      est.push_back(ais_switch(from_new, s.k, cfg, cache, rng, 1, j).log_r);
    y = std::move(fwd.y_end);
    log_alpha = log_g + -log_mean_exp(est);
  }
  Stream acc = rng.stream(Purpose::kAccept);
  const bool ok = accept(log_alpha, acc);
  if (ok) s = ChainState{k2, std::move(y)};
  return make_record(rng, MoveType::kModelSwitch, k2, ok, s, log_alpha);
}

// ---- improved model proposal -------------------------------------------------

namespace {

/// Ratio estimate of pi(l)/pi(k) from the chain position x of model k.
struct RatioEstimate {
  double log_ratio = 0.0;
  std::vector<AisPath> forward;  // forward paths k -> l (N for direct, 1 for indirect)
  double log_rbar = 0.0;         // direct: log mean r(k,l); indirect: log mean r(l,k)
};

class ImprovedEstimator {
 public:
  ImprovedEstimator(ModelInfoCache& cache, const AnnealConfig& cfg, const IterationRng& rng)
      : cache_(cache), cfg_(cfg), rng_(rng) {}

  std::uint64_t slot(const ModelId& l, std::uint64_t phase) const { return l.bits * 8 + phase; }

  double log_lap(const ModelId& a, const ModelId& b) {
    return cache_.info(b).log_laplace - cache_.info(a).log_laplace;
  }

  /// combine(lap(k,l), {r_j}) using N forward paths from (k, x).
  RatioEstimate direct(const ChainState& s, const ModelId& l, std::uint64_t phase) {
    RatioEstimate e;
    std::vector<double> lr;
    for (int j = 0; j < cfg_.N; ++j) {
      e.forward.push_back(ais_switch(s, l, cfg_, cache_, rng_, slot(l, phase), j));
      lr.push_back(e.forward.back().log_r);
    }
    e.log_rbar = log_mean_exp(lr);
    e.log_ratio = combine_log_ratio(cfg_.combiner, log_lap(s.k, l), lr);
    return e;
  }

  /// 1 / combine(lap(l,k), {1/r_fwd, r'_2..r'_N}) using one forward path to l and
  /// N-1 reverse paths from its endpoint back to k.
  RatioEstimate indirect(const ChainState& s, const ModelId& l, std::uint64_t phase) {
    RatioEstimate e;
    e.forward.push_back(ais_switch(s, l, cfg_, cache_, rng_, slot(l, phase), 0));
    const ChainState at_l{l, e.forward.back().y_end};
    std::vector<double> est{-e.forward.back().log_r};
    for (int j = 1; j < cfg_.N; ++j)
      est.push_back(ais_switch(at_l, s.k, cfg_, cache_, rng_, slot(l, phase + 1), j).log_r);
    e.log_rbar = log_mean_exp(est);
    e.log_ratio = -combine_log_ratio(cfg_.combiner, log_lap(l, s.k), est);
    return e;
  }

 private:
  ModelInfoCache& cache_;
  const AnnealConfig& cfg_;
  const IterationRng& rng_;
};

}  // namespace

TraceRecord rj_improved_g_step(ChainState& s, Balancing h, const AnnealConfig& cfg,
                               ModelInfoCache& cache, const IterationRng& rng) {
  check_state(s);
  if (cfg.N < 1) throw DomainError("N must be at least 1");
  ImprovedEstimator est(cache, cfg, rng);
  Stream coin = rng.stream(Purpose::kBranchCoin);
  const bool branch_i = coin.uniform() <= 0.5;

  // First part: estimates for every l in N(k) from the current state.
  const auto nk = neighborhood(s.k);
  std::vector<RatioEstimate> first(nk.size());
  std::vector<double> lt1(nk.size(), 0.0);
  for (std::size_t i = 0; i < nk.size(); ++i) {
    if (nk[i] == s.k) continue;  // ratio fixed to 1, no paths needed
    first[i] = branch_i ? est.direct(s, nk[i], 0) : est.indirect(s, nk[i], 0);
    lt1[i] = first[i].log_ratio;
  }
  const ProposalPmf g1 = balanced_pmf(nk, lt1, h);
  Stream choice = rng.stream(Purpose::kModelChoice);
  const ModelId k2 = g1.sample(choice.uniform());
  const std::size_t i2 = g1.index_of(k2);

  // Second part for the mirrored move; s-estimates use the opposite estimator.
  auto second_pmf = [&](const ChainState& at, const ModelId& back_to, double back_log_ratio) {
    const auto nb = neighborhood(at.k);
    std::vector<double> lt2(nb.size(), 0.0);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == at.k) continue;
      if (nb[i] == back_to && back_to != at.k) {
        lt2[i] = back_log_ratio;
        continue;
      }
      lt2[i] = branch_i ? est.indirect(at, nb[i], 2).log_ratio : est.direct(at, nb[i], 2).log_ratio;
    }
    return balanced_pmf(nb, lt2, h);
  };

  if (k2 == s.k) {
    // Parameter update, corrected by the ratio of the two improved PMFs at k.
    const CachedModel& m = cache.get(s.k);
    Stream mom = rng.stream(Purpose::kMomentum);
    HmcProposal prop = hmc_propose(m.posterior, s.x, cache.tuning(s.k), mom);
    Stream acc = rng.stream(Purpose::kAccept);
    if (!std::isfinite(prop.log_accept)) {
      warn("non-finite Hamiltonian in HMC trajectory; proposal rejected");
      acc.uniform();
      return make_record(rng, MoveType::kParamUpdate, s.k, false, s, kNegInf);
    }
    const ProposalPmf g2 = second_pmf(ChainState{s.k, prop.x}, s.k, 0.0);
    const double log_alpha = prop.log_accept + (g2.log_prob(s.k) - g1.log_prob(s.k));
    const bool ok = accept(log_alpha, acc);
    if (ok) s.x = std::move(prop.x);
    return make_record(rng, MoveType::kParamUpdate, s.k, ok, s, log_alpha);
  }

  Eigen::VectorXd y;
  double log_r;
  if (branch_i) {
    std::vector<double> lr;
    for (const auto& p : first[i2].forward) lr.push_back(p.log_r);
    Stream sel = rng.stream(Purpose::kSelection);
    const std::size_t jstar = lr.size() == 1 ? 0 : sample_log_weights(lr, sel.uniform());
    y = first[i2].forward[jstar].y_end;
    log_r = first[i2].log_rbar;
  } else {
    y = first[i2].forward.front().y_end;
    log_r = -first[i2].log_rbar;
  }
  const ProposalPmf g2 = second_pmf(ChainState{k2, y}, s.k, -lt1[i2]);
  const double log_alpha = (g2.log_prob(s.k) - g1.log_prob(k2)) + log_r;
  Stream acc = rng.stream(Purpose::kAccept);
  const bool ok = accept(log_alpha, acc);
  if (ok) s = ChainState{k2, std::move(y)};
  return make_record(rng, MoveType::kModelSwitch, k2, ok, s, log_alpha);
}

// ---- dispatch ---------------------------------------------------------------

SamplerKind parse_sampler(const std::string& s) {
  if (s == "uninformed") return SamplerKind::kUninformed;
  if (s == "informed") return SamplerKind::kInformed;
  if (s == "ais") return SamplerKind::kAis;
  if (s == "multi") return SamplerKind::kMulti;
  if (s == "improved") return SamplerKind::kImproved;
  throw DomainError("unknown sampler '" + s + "' (expected uninformed|informed|ais|multi|improved)");
}

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::kUninformed: return "uninformed";
    case SamplerKind::kInformed: return "informed";
    case SamplerKind::kAis: return "ais";
    case SamplerKind::kMulti: return "multi";
    case SamplerKind::kImproved: return "improved";
  }
  return "?";
}

TraceRecord sampler_step(const SamplerConfig& cfg, ChainState& s, ModelInfoCache& cache,
                         const IterationRng& rng) {
  switch (cfg.kind) {
    case SamplerKind::kUninformed: return rj_uninformed_step(s, cache, rng);
    case SamplerKind::kInformed: return rj_informed_step(s, cfg.h, cache, rng);
    case SamplerKind::kAis: return rj_ais_step(s, cfg.h, cfg.anneal, cache, rng);
    case SamplerKind::kMulti: return rj_multi_step(s, cfg.h, cfg.anneal, cache, rng);
    case SamplerKind::kImproved: return rj_improved_g_step(s, cfg.h, cfg.anneal, cache, rng);
  }
  throw DomainError("unknown sampler");
}

}  // namespace irj
