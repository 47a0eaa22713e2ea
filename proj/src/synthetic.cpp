#include "irj/synthetic.hpp"

#include <cmath>

#include "irj/errors.hpp"
#include "irj/rng.hpp"

namespace irj {

SyntheticData generate_synthetic(const SyntheticOptions& opt) {
  if (opt.n < 2 || opt.p_pred < 1) throw DomainError("synthetic data needs n >= 2 and p >= 1");
  const Eigen::VectorXd beta =
      opt.beta.size() == opt.p_pred ? opt.beta : Eigen::VectorXd::Zero(opt.p_pred);
  SyntheticData d;
  d.X.resize(opt.n, opt.p_pred);
  d.y.resize(opt.n);
  Stream rng(StreamKey{opt.seed, 0, 0, Purpose::kData, 0, 0, 0});
  const double r = opt.correlation;
  const double innov = std::sqrt(1.0 - r * r);
  for (int i = 0; i < opt.n; ++i) {
    double prev = rng.normal();
    d.X(i, 0) = prev;
    for (int j = 1; j < opt.p_pred; ++j) {
      prev = r * prev + innov * rng.normal();
      d.X(i, j) = prev;
    }
  }
  // Coefficients refer to standardised columns.
  Eigen::MatrixXd Z = d.X;
  for (int j = 0; j < opt.p_pred; ++j) {
    auto c = Z.col(j);
    c.array() -= c.mean();
    c /= std::sqrt(c.squaredNorm() / opt.n);
  }
  for (int i = 0; i < opt.n; ++i) d.y[i] = 2.5 + Z.row(i).dot(beta) + opt.sigma * rng.normal();
  const int n_out = static_cast<int>(std::lround(opt.outlier_fraction * opt.n));
  for (int m = 0; m < n_out; ++m) {
    const int i = static_cast<int>(rng.uniform() * opt.n);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    d.y[i] += sign * opt.outlier_scale * opt.sigma;
  }
  return d;
}

SyntheticOptions synthetic_preset(const std::string& name, std::uint64_t seed) {
  SyntheticOptions o;
  o.seed = seed;
  if (name == "small") {
    o.n = 12;
    o.p_pred = 2;
    o.beta = Eigen::Vector2d(0.8, 0.3);
  } else if (name == "sixteen") {
    o.n = 100;
    o.p_pred = 4;
    o.correlation = 0.3;
    o.beta = Eigen::Vector4d(0.5, 0.2, 0.0, 0.15);
  } else if (name == "prostate_like") {
    o.n = 97;
    o.p_pred = 8;
    o.correlation = 0.4;
    o.sigma = 0.7;
    o.beta.resize(8);
    o.beta << 0.65, 0.25, -0.12, 0.12, 0.28, -0.08, 0.03, 0.08;
    o.outlier_fraction = 0.03;
    o.outlier_scale = 5.0;
  } else {
    throw DomainError("unknown synthetic preset '" + name + "' (expected small|sixteen|prostate_like)");
  }
  return o;
}

Dataset synthetic_dataset(const std::string& preset, std::uint64_t seed) {
  const SyntheticData d = generate_synthetic(synthetic_preset(preset, seed));
  return make_dataset(d.y, d.X, true);
}

}  // namespace irj
