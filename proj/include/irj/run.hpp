#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irj/diagnostics.hpp"
#include "irj/model_cache.hpp"
#include "irj/samplers.hpp"

namespace irj {

struct RunConfig {
  SamplerKind sampler = SamplerKind::kInformed;
  Balancing h = Balancing::kBarker;
  ModelKind model_kind = ModelKind::kNormal;
  double rho = 0.95;
  std::uint64_t iters = 10000;
  std::uint64_t burnin = 1000;
  std::uint64_t seed = 1;
  AnnealConfig anneal;
  bool calibrate_ell = false;  // ell = auto
  int chains = 1;

  ModelSpec spec() const {
    return model_kind == ModelKind::kNormal ? ModelSpec::normal() : ModelSpec::robust(rho);
  }
  SamplerConfig sampler_config() const { return {sampler, h, anneal}; }
};

/// Flat `key = value` text, `#` starts a comment. Throws ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);

/// Deterministic starting point: greedy ascent of the Laplace evidence from the
/// intercept-only model, at that model's MAP.
ChainState initial_state(ModelInfoCache& cache);

std::vector<TraceRecord> run_chain(const SamplerConfig& cfg, ModelInfoCache& cache,
                                   std::uint64_t iters, std::uint64_t seed, std::uint64_t chain,
                                   std::optional<ChainState> start = std::nullopt);

/// Line search for the MALA scale: the value in `grid` with the highest
/// model-switch acceptance of the annealed sampler on a short run.
double calibrate_ell(const SamplerConfig& cfg, ModelInfoCache& cache, std::uint64_t seed,
                     std::uint64_t iters = 2000, const std::vector<double>& grid = {0.5, 1, 2, 4});

struct RunResult {
  std::vector<std::vector<TraceRecord>> traces;  // one per chain
  RunSummary summary;
};

/// Runs all chains (concurrently, sharing the cache) and summarises them.
RunResult run_sampler(const RunConfig& cfg, ModelInfoCache& cache,
                      const ModelPmf* reference = nullptr);

RunSummary summarise(const RunConfig& cfg, const std::vector<std::vector<TraceRecord>>& traces,
                     const ModelPmf* reference);

}  // namespace irj
