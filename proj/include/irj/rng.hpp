#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <limits>

namespace irj {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Purpose : std::uint32_t {
  kModelChoice = 1,
  kAccept = 2,
  kProposal = 3,
  kPath = 4,
  kMomentum = 5,
  kBranchCoin = 6,
  kSelection = 7,
  kPilot = 8,
  kOracle = 9,
  kData = 10,
};

/// Coordinates of an independent random substream. Every draw in the
/// library comes from a stream addressed this way, so results do not depend
/// on execution order and replicates can run in any order or concurrently.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;
  std::uint64_t iter = 0;
  Purpose purpose = Purpose::kModelChoice;
  std::uint64_t slot = 0;
  std::uint64_t replicate = 0;
  std::uint64_t step = 0;

  std::uint64_t hash() const noexcept;
};

/// xoshiro256++ seeded from a 64-bit key through SplitMix64.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept;
  explicit Stream(const StreamKey& key) noexcept : Stream(key.hash()) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Standard normal (Marsaglia polar method, no cached state across calls).
  double normal() noexcept;
  Eigen::VectorXd normal_vector(Eigen::Index n) noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Stream factory for one iteration of one chain.
class IterationRng {
 public:
  IterationRng(std::uint64_t seed, std::uint64_t chain, std::uint64_t iter)
      : seed_(seed), chain_(chain), iter_(iter) {}

  Stream stream(Purpose purpose, std::uint64_t slot = 0, std::uint64_t replicate = 0,
                std::uint64_t step = 0) const noexcept {
    return Stream(StreamKey{seed_, chain_, iter_, purpose, slot, replicate, step});
  }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t chain() const noexcept { return chain_; }
  std::uint64_t iter() const noexcept { return iter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t chain_;
  std::uint64_t iter_;
};

}  // namespace irj
