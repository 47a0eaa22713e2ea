#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irj/types.hpp"

namespace irj {

/// Accepted model switches over proposed switches (k' != k). Empty when no
/// switch was proposed.
std::optional<double> switch_acceptance_rate(const std::vector<TraceRecord>& trace);

/// Accepted model switches per iteration.
double visit_rate(const std::vector<TraceRecord>& trace);

/// Fraction of iterations that proposed a model switch.
double switch_proposal_fraction(const std::vector<TraceRecord>& trace);

/// Visit frequencies of the post-burn-in states.
ModelPmf empirical_model_pmf(const std::vector<TraceRecord>& trace, std::size_t burnin);

/// Geyer initial-positive-sequence ESS. Constant series -> length.
double ess_scalar(const std::vector<double>& series);

/// 0.5 * sum |p - q| over the union of supports.
double tv_distance(const ModelPmf& p, const ModelPmf& q);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace, int p_pred);
void write_trace(const std::string& path, const std::vector<TraceRecord>& trace, int p_pred);
std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace(const std::string& path);

struct RunSummary {
  std::string sampler;
  std::string balancing;
  std::string model_kind;
  std::optional<double> switch_acc_rate;
  double visit_rate = 0.0;
  ModelPmf empirical_pmf;
  std::optional<double> tv_to_reference;
  std::uint64_t iters = 0;
  std::uint64_t burnin = 0;
  std::uint64_t seed = 0;
  int chains = 1;
  double wall_time = 0.0;
  std::uint64_t cache_entries = 0;
};

std::string summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const std::string& text);
void write_summary(const std::string& path, const RunSummary& s);
RunSummary read_summary(const std::string& path);

}  // namespace irj
