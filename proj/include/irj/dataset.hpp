#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "irj/model_space.hpp"

namespace irj {

/// Response and full design (first column ones). Immutable once built.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd C;
  bool standardized = false;
  std::vector<std::string> names;  // predictor names, size p_pred

  Eigen::Index n() const noexcept { return y.size(); }
  int p_pred() const noexcept { return static_cast<int>(C.cols()) - 1; }

  /// Columns of C selected by k (intercept first).
  Eigen::MatrixXd design(const ModelId& k) const;

  /// Hash of the numeric contents; used to key deterministic per-model seeds.
  std::uint64_t fingerprint() const noexcept;
};

/// Prepends the intercept column and, if requested, centres and scales every
/// predictor to mean 0 and (divisor-n) standard deviation 1.
Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool standardize = true,
                     std::vector<std::string> names = {});

/// Delimited text with a header row: response first, then predictors.
/// Delimiter is detected from the header (comma, tab, semicolon or whitespace).
Dataset load_csv(const std::string& path, bool standardize = true);

void write_csv(const std::string& path, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names = {});

}  // namespace irj
