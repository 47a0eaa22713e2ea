#include "irj/rng.hpp"

#include <cmath>

namespace irj {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t StreamKey::hash() const noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ chain);
  h = mix64(h ^ iter);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ slot);
  h = mix64(h ^ replicate);
  h = mix64(h ^ step);
  return h;
}

Stream::Stream(std::uint64_t key) noexcept {
  std::uint64_t z = key;
  for (auto& w : s_) {
    z += 0x9e3779b97f4a7c15ULL;
    w = mix64(z);
  }
}

Stream::result_type Stream::operator()() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Stream::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Stream::normal() noexcept {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  // The second variate is discarded so that a stream has no hidden state.
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

Eigen::VectorXd Stream::normal_vector(Eigen::Index n) noexcept {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
  return z;
}

double Stream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace irj
