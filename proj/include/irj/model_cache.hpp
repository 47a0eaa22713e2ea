#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>

#include "irj/dataset.hpp"
#include "irj/hmc.hpp"
#include "irj/laplace.hpp"
#include "irj/regression.hpp"

namespace irj {

/// Everything the samplers need about one model, built once.
struct CachedModel {
  ModelInfo info;
  ModelPosterior posterior;
  GaussianProposal proposal;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double compute_seconds = 0.0;
  std::size_t entries = 0;
};

/// On-the-fly store of per-model quantities. Entries are pure functions of
/// (spec, k, data, options) and never change after insertion, so any chain may
/// read them. Failed constructions are not stored.
class ModelInfoCache {
 public:
  ModelInfoCache(const Dataset& data, const ModelSpec& spec, AutotuneOptions tune = {},
                 MapOptions map_opt = {});
  ModelInfoCache(const ModelInfoCache&) = delete;
  ModelInfoCache& operator=(const ModelInfoCache&) = delete;

  const CachedModel& get(const ModelId& k);
  const ModelInfo& info(const ModelId& k) { return get(k).info; }
  const HmcTuning& tuning(const ModelId& k);
  /// g(k, .) built from Laplace evidences over N(k).
  const ProposalPmf& proposal_pmf(const ModelId& k, Balancing h);
  /// Uniform g(k, .) over N(k).
  const ProposalPmf& uniform_pmf(const ModelId& k);

  bool contains(const ModelId& k) const;
  CacheStats stats() const;
  void clear();

  const Dataset& data() const noexcept { return *data_; }
  const ModelSpec& spec() const noexcept { return spec_; }
  /// Seed of the path-independent HMC tuner for k.
  std::uint64_t tuning_seed(const ModelId& k) const;

 private:
  template <class Map, class Make>
  const typename Map::mapped_type::element_type& lookup(Map& m, std::uint64_t key, Make make,
                                                        bool count);

  const Dataset* data_;
  ModelSpec spec_;
  AutotuneOptions tune_opt_;
  MapOptions map_opt_;
  std::uint64_t fingerprint_;

  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, std::unique_ptr<CachedModel>> models_;
  std::unordered_map<std::uint64_t, std::unique_ptr<HmcTuning>> tunings_;
  std::unordered_map<std::uint64_t, std::unique_ptr<ProposalPmf>> pmfs_;  // key bits*4 + h
  std::atomic<std::uint64_t> hits_{0}, misses_{0};
  std::atomic<std::uint64_t> compute_ns_{0};
};

/// g(k, .) proportional to h(pi_hat(l)/pi_hat(k)) over N(k).
inline const ProposalPmf& model_proposal_pmf(const ModelId& k, Balancing h, ModelInfoCache& cache) {
  return cache.proposal_pmf(k, h);
}

}  // namespace irj
