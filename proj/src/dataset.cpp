#include "irj/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "irj/errors.hpp"
#include "irj/rng.hpp"

namespace irj {

Eigen::MatrixXd Dataset::design(const ModelId& k) const {
  if (k.p_pred != p_pred())
    throw DimensionError("model " + format_model(k) + " does not match dataset with p_pred=" +
                         std::to_string(p_pred()));
  Eigen::MatrixXd Ck(n(), k.dim());
  Ck.col(0) = C.col(0);
  Eigen::Index c = 1;
  for (int j = 0; j < k.p_pred; ++j)
    if (k.includes(j)) Ck.col(c++) = C.col(j + 1);
  return Ck;
}

std::uint64_t Dataset::fingerprint() const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(n()) * 1000003ULL + C.cols());
  auto eat = [&h](double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    h = mix64(h ^ u);
  };
  for (Eigen::Index i = 0; i < y.size(); ++i) eat(y[i]);
  for (Eigen::Index j = 0; j < C.cols(); ++j)
    for (Eigen::Index i = 0; i < C.rows(); ++i) eat(C(i, j));
  return h;
}

Dataset make_dataset(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool standardize,
                     std::vector<std::string> names) {
  const Eigen::Index n = y.size();
  if (X.rows() != n)
    throw DimensionError("response has " + std::to_string(n) + " rows but predictors have " +
                         std::to_string(X.rows()));
  if (X.cols() > ModelId::kMaxPredictors) throw DomainError("at most 62 predictors are supported");
  if (n <= X.cols() + 1)
    throw DataError("need more observations than columns (n=" + std::to_string(n) +
                    ", p=" + std::to_string(X.cols() + 1) + ")");
  if (!y.allFinite() || !X.allFinite()) throw DataError("non-finite value in data");

  Dataset d;
  d.y = y;
  d.C.resize(n, X.cols() + 1);
  d.C.col(0).setOnes();
  d.C.rightCols(X.cols()) = X;
  if (standardize) {
    for (Eigen::Index j = 1; j < d.C.cols(); ++j) {
      auto col = d.C.col(j);
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
      if (!(sd > 0.0))
        throw DataError("predictor column " + std::to_string(j) + " is constant", 0,
                        static_cast<std::size_t>(j + 1));
      col /= sd;
    }
  }
  d.standardized = standardize;
  if (names.empty())
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  if (static_cast<Eigen::Index>(names.size()) != X.cols())
    throw DimensionError("predictor name count does not match columns");
  d.names = std::move(names);
  return d;
}

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, bool standardize) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError("data file '" + path + "' is empty", 1);
  if (!header.empty() && header.back() == '\r') header.pop_back();

  char delim = ' ';
  for (char c : {',', '\t', ';'})
    if (header.find(c) != std::string::npos) {
      delim = c;
      break;
    }
  std::vector<std::string> cols = split(header, delim);
  for (auto& c : cols) c = trim(c);
  if (cols.size() < 2) throw DataError("header needs a response and at least one predictor", 1);
  const std::size_t width = cols.size();

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line, delim);
    if (cells.size() != width)
      throw DataError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                          " fields, expected " + std::to_string(width),
                      lineno);
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      const std::string cell = trim(cells[j]);
      const char* b = cell.data();
      const char* e = b + cell.size();
      auto [p, ec] = std::from_chars(b, e, row[j]);
      if (cell.empty() || ec != std::errc() || p != e || !std::isfinite(row[j]))
        throw DataError("non-numeric cell '" + cell + "' at row " + std::to_string(lineno) +
                            ", column " + std::to_string(j + 1),
                        lineno, j + 1);
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(width - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[i][0];
    for (std::size_t j = 1; j < width; ++j) X(i, static_cast<Eigen::Index>(j - 1)) = rows[i][j];
  }
  return make_dataset(y, X, standardize, std::vector<std::string>(cols.begin() + 1, cols.end()));
}

void write_csv(const std::string& path, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
               const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "y";
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    out << ',' << (names.empty() ? "x" + std::to_string(j + 1) : names[static_cast<std::size_t>(j)]);
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out << y[i];
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << ',' << X(i, j);
    out << '\n';
  }
}

}  // namespace irj
