#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace irj {

/// Covariate-inclusion bitmask. The intercept is always in the model and is
/// not represented; bit j (0-based) stands for predictor j+1.
struct ModelId {
  std::uint64_t bits = 0;
  int p_pred = 0;

  static constexpr int kMaxPredictors = 62;

  ModelId() = default;
  ModelId(std::uint64_t b, int p);

  /// Number of regression coefficients, intercept included.
  int dim() const noexcept { return std::popcount(bits) + 1; }
  bool includes(int j) const noexcept { return (bits >> j) & 1ULL; }
  ModelId toggled(int j) const { return ModelId(bits ^ (1ULL << j), p_pred); }
  std::size_t count() const noexcept { return std::size_t{1} << p_pred; }

  /// 1-based sorted predictor list, e.g. "{2,3}"; "{}" for intercept only.
  std::string label() const;

  auto operator<=>(const ModelId& o) const noexcept {
    if (auto c = p_pred <=> o.p_pred; c != 0) return c;
    return bits <=> o.bits;
  }
  bool operator==(const ModelId& o) const noexcept = default;
};

/// `6 "{2,3}"`
std::string format_model(const ModelId& k);

/// Models at Hamming distance one from k, plus k itself, ascending bits.
std::vector<ModelId> neighborhood(const ModelId& k);

/// All 2^p_pred models in ascending bits order.
std::vector<ModelId> all_models(int p_pred);

struct ModelIdHash {
  std::size_t operator()(const ModelId& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.bits * 131 + static_cast<std::uint64_t>(k.p_pred));
  }
};

}  // namespace irj
