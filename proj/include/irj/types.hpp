#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "irj/model_space.hpp"
#include "irj/regression.hpp"

namespace irj {

/// Current (k, x_k) of one trans-dimensional chain.
struct ChainState {
  ModelId k;
  ParamVector x;
};

enum class MoveType { kParamUpdate, kModelSwitch };

std::string to_string(MoveType m);

struct TraceRecord {
  std::uint64_t iter = 0;
  MoveType move = MoveType::kParamUpdate;
  ModelId proposed_k;
  bool accepted = false;
  ChainState state;
  double log_alpha = 0.0;
};

enum class PmfSource { kExactNormal, kGoldenLptn, kEmpirical, kOther };

std::string to_string(PmfSource s);
PmfSource parse_pmf_source(const std::string& s);

/// Probability mass function over models, keyed by bits. Absent models have mass 0.
struct ModelPmf {
  int p_pred = 0;
  std::map<std::uint64_t, double> probs;
  PmfSource source = PmfSource::kOther;

  double operator()(const ModelId& k) const {
    const auto it = probs.find(k.bits);
    return it == probs.end() ? 0.0 : it->second;
  }
  double total() const;
  ModelId mode() const;
};

}  // namespace irj
