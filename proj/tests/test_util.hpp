#pragma once

#include <Eigen/Core>

#include <functional>

#include "irj/dataset.hpp"
#include "irj/rng.hpp"
#include "irj/synthetic.hpp"

namespace irj::testing {

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// Dataset with a handful of gross outliers so LPTN tails are exercised.
inline Dataset outlier_dataset(std::uint64_t seed, int n = 40, int p = 3) {
  SyntheticOptions o;
  o.n = n;
  o.p_pred = p;
  o.beta = Eigen::VectorXd::LinSpaced(p, 0.8, 0.2);
  o.outlier_fraction = 0.1;
  o.outlier_scale = 8.0;
  o.seed = seed;
  const auto d = generate_synthetic(o);
  return make_dataset(d.y, d.X);
}

}  // namespace irj::testing
