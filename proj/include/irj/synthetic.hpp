#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "irj/dataset.hpp"

namespace irj {

struct SyntheticOptions {
  int n = 100;
  int p_pred = 4;
  double correlation = 0.0;   // AR(1) correlation between adjacent predictors
  Eigen::VectorXd beta;       // true coefficients on standardised predictors (size p_pred)
  double sigma = 1.0;
  double outlier_fraction = 0.0;  // responses replaced by far draws
  double outlier_scale = 10.0;    // in units of sigma
  std::uint64_t seed = 1;
};

struct SyntheticData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
};

SyntheticData generate_synthetic(const SyntheticOptions& opt);

/// Presets used by the tests and the gen-data command:
///   "small"   n=12, p=2
///   "sixteen" n=100, p=4 (16 models)
///   "prostate_like"  n=97, p=8, correlated predictors, a few gross outliers; a
///             stand-in for the prostate cancer data (which is not bundled).
SyntheticOptions synthetic_preset(const std::string& name, std::uint64_t seed);

Dataset synthetic_dataset(const std::string& preset, std::uint64_t seed);

}  // namespace irj
