#include "irj/model_cache.hpp"

#include <chrono>
#include <cstring>
#include <mutex>

namespace irj {

ModelInfoCache::ModelInfoCache(const Dataset& data, const ModelSpec& spec, AutotuneOptions tune,
                               MapOptions map_opt)
    : data_(&data),
      spec_(spec),
      tune_opt_(std::move(tune)),
      map_opt_(map_opt),
      fingerprint_(data.fingerprint()) {}

template <class Map, class Make>
const typename Map::mapped_type::element_type& ModelInfoCache::lookup(Map& m, std::uint64_t key,
                                                                      Make make, bool count) {
  {
    std::shared_lock lock(mu_);
    const auto it = m.find(key);
    if (it != m.end()) {
      if (count) ++hits_;
      return *it->second;
    }
  }
  if (count) ++misses_;
  const auto t0 = std::chrono::steady_clock::now();
  auto fresh = make();  // may throw; nothing is stored then
  compute_ns_ += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
          .count());
  std::unique_lock lock(mu_);
  // If another thread got there first its (identical) entry is kept.
  const auto [it, inserted] = m.try_emplace(key, std::move(fresh));
  return *it->second;
}

const CachedModel& ModelInfoCache::get(const ModelId& k) {
  return lookup(
      models_, k.bits,
      [&] {
        ModelInfo info = build_model_info(spec_, k, *data_, map_opt_);
        GaussianProposal prop(info);
        return std::make_unique<CachedModel>(
            CachedModel{std::move(info), ModelPosterior(spec_, k, *data_), std::move(prop)});
      },
      true);
}

std::uint64_t ModelInfoCache::tuning_seed(const ModelId& k) const {
  std::uint64_t h = mix64(fingerprint_ ^ 0x686d63ULL);
  h = mix64(h ^ k.bits);
  h = mix64(h ^ static_cast<std::uint64_t>(spec_.kind));
  std::uint64_t rho_bits;
  static_assert(sizeof rho_bits == sizeof spec_.lptn.rho);
  std::memcpy(&rho_bits, &spec_.lptn.rho, sizeof rho_bits);
  return mix64(h ^ rho_bits);
}

const HmcTuning& ModelInfoCache::tuning(const ModelId& k) {
  return lookup(
      tunings_, k.bits,
      [&] {
        const CachedModel& m = get(k);
        return std::make_unique<HmcTuning>(
            hmc_autotune(m.posterior, m.info, tuning_seed(k), tune_opt_));
      },
      false);
}

const ProposalPmf& ModelInfoCache::proposal_pmf(const ModelId& k, Balancing h) {
  return lookup(
      pmfs_, k.bits * 4 + static_cast<std::uint64_t>(h),
      [&] {
        const auto nb = neighborhood(k);
        const double base = get(k).info.log_laplace;
        std::vector<double> lr(nb.size());
        for (std::size_t i = 0; i < nb.size(); ++i)
          lr[i] = nb[i] == k ? 0.0 : get(nb[i]).info.log_laplace - base;
        return std::make_unique<ProposalPmf>(balanced_pmf(nb, lr, h));
      },
      false);
}

const ProposalPmf& ModelInfoCache::uniform_pmf(const ModelId& k) {
  return lookup(
      pmfs_, k.bits * 4 + 3,
      [&] {
        const auto nb = neighborhood(k);
        return std::make_unique<ProposalPmf>(
            balanced_pmf(nb, std::vector<double>(nb.size(), 0.0), Balancing::kIdentity));
      },
      false);
}

bool ModelInfoCache::contains(const ModelId& k) const {
  std::shared_lock lock(mu_);
  return models_.count(k.bits) > 0;
}

CacheStats ModelInfoCache::stats() const {
  std::shared_lock lock(mu_);
  return {hits_.load(), misses_.load(), static_cast<double>(compute_ns_.load()) * 1e-9,
          models_.size()};
}

void ModelInfoCache::clear() {
  std::unique_lock lock(mu_);
  models_.clear();
  tunings_.clear();
  pmfs_.clear();
  hits_ = 0;
  misses_ = 0;
  compute_ns_ = 0;
}

}  // namespace irj
