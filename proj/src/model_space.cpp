#include "irj/model_space.hpp"

#include <string>

#include "irj/errors.hpp"

namespace irj {

ModelId::ModelId(std::uint64_t b, int p) : bits(b), p_pred(p) {
  if (p < 0 || p > kMaxPredictors)
    throw DomainError("p_pred must be in [0, 62], got " + std::to_string(p));
  if (b >> p != 0)
    throw DomainError("model bits " + std::to_string(b) + " exceed p_pred=" + std::to_string(p));
}

std::string ModelId::label() const {
  std::string s = "{";
  bool first = true;
  for (int j = 0; j < p_pred; ++j) {
    if (!includes(j)) continue;
    if (!first) s += ',';
    s += std::to_string(j + 1);
    first = false;
  }
  return s + "}";
}

std::string format_model(const ModelId& k) {
  return std::to_string(k.bits) + " \"" + k.label() + "\"";
}

std::vector<ModelId> neighborhood(const ModelId& k) {
  std::vector<ModelId> out;
  out.reserve(static_cast<std::size_t>(k.p_pred) + 1);
  // Removing bit j gives a smaller number than k, adding gives a larger one, and
  // each group is ordered by j when scanned from the appropriate end.
  for (int j = k.p_pred - 1; j >= 0; --j)
    if (k.includes(j)) out.push_back(k.toggled(j));
  out.push_back(k);
  for (int j = 0; j < k.p_pred; ++j)
    if (!k.includes(j)) out.push_back(k.toggled(j));
  return out;
}

std::vector<ModelId> all_models(int p_pred) {
  if (p_pred > 30) throw DomainError("refusing to enumerate 2^" + std::to_string(p_pred) + " models");
  std::vector<ModelId> out;
  const std::uint64_t count = 1ULL << p_pred;
  out.reserve(count);
  for (std::uint64_t b = 0; b < count; ++b) out.emplace_back(b, p_pred);
  return out;
}

}  // namespace irj
