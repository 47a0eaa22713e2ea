#include "irj/diagnostics.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "irj/errors.hpp"

namespace irj {

std::string to_string(MoveType m) {
  return m == MoveType::kParamUpdate ? "param_update" : "model_switch";
}

std::string to_string(PmfSource s) {
  switch (s) {
    case PmfSource::kExactNormal: return "exact_normal";
    case PmfSource::kGoldenLptn: return "golden_lptn";
    case PmfSource::kEmpirical: return "empirical";
    case PmfSource::kOther: return "other";
  }
  return "other";
}

PmfSource parse_pmf_source(const std::string& s) {
  if (s == "exact_normal") return PmfSource::kExactNormal;
  if (s == "golden_lptn") return PmfSource::kGoldenLptn;
  if (s == "empirical") return PmfSource::kEmpirical;
  return PmfSource::kOther;
}

double ModelPmf::total() const {
  double s = 0.0;
  for (const auto& [b, p] : probs) s += p;
  return s;
}

ModelId ModelPmf::mode() const {
  std::uint64_t best = 0;
  double bp = -1.0;
  for (const auto& [b, p] : probs)
    if (p > bp) {
      bp = p;
      best = b;
    }
  return ModelId(best, p_pred);
}

std::optional<double> switch_acceptance_rate(const std::vector<TraceRecord>& trace) {
  std::size_t proposed = 0, accepted = 0;
  for (const auto& r : trace)
    if (r.move == MoveType::kModelSwitch) {
      ++proposed;
      accepted += r.accepted;
    }
  if (proposed == 0) return std::nullopt;
  return static_cast<double>(accepted) / static_cast<double>(proposed);
}

double visit_rate(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) return 0.0;
  std::size_t accepted = 0;
  for (const auto& r : trace) accepted += (r.move == MoveType::kModelSwitch && r.accepted);
  return static_cast<double>(accepted) / static_cast<double>(trace.size());
}

double switch_proposal_fraction(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) return 0.0;
  std::size_t proposed = 0;
  for (const auto& r : trace) proposed += (r.move == MoveType::kModelSwitch);
  return static_cast<double>(proposed) / static_cast<double>(trace.size());
}

ModelPmf empirical_model_pmf(const std::vector<TraceRecord>& trace, std::size_t burnin) {
  if (burnin >= trace.size()) throw DomainError("burn-in must be shorter than the trace");
  ModelPmf pmf;
  pmf.source = PmfSource::kEmpirical;
  pmf.p_pred = trace.front().state.k.p_pred;
  std::map<std::uint64_t, std::size_t> counts;
  for (std::size_t i = burnin; i < trace.size(); ++i) ++counts[trace[i].state.k.bits];
  const double m = static_cast<double>(trace.size() - burnin);
  for (const auto& [b, c] : counts) pmf.probs[b] = static_cast<double>(c) / m;
  return pmf;
}

double ess_scalar(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) throw DomainError("ESS needs a longer series");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double g0 = autocov(0);
  if (!(g0 > 1e-300 * (1.0 + mean * mean))) return static_cast<double>(n);
  // Sum consecutive lag pairs while they stay positive.
  double sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (!(pair > 0.0)) break;
    sum += pair;
  }
  double tau = (-g0 + 2.0 * sum) / g0;
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

double tv_distance(const ModelPmf& p, const ModelPmf& q) {
  double s = 0.0;
  auto ip = p.probs.begin();
  auto iq = q.probs.begin();
  while (ip != p.probs.end() || iq != q.probs.end()) {
    if (iq == q.probs.end() || (ip != p.probs.end() && ip->first < iq->first)) {
      s += std::abs(ip->second);
      ++ip;
    } else if (ip == p.probs.end() || iq->first < ip->first) {
      s += std::abs(iq->second);
      ++iq;
    } else {
      s += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return 0.5 * s;
}

// ---- trace files ------------------------------------------------------------

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace, int p_pred) {
  out << "# p_pred=" << p_pred << '\n' << std::setprecision(17);
  for (const auto& r : trace) {
    out << "iter=" << r.iter << " move=" << to_string(r.move)
        << " proposed=" << format_model(r.proposed_k) << " accepted=" << (r.accepted ? 1 : 0)
        << " model=" << format_model(r.state.k) << " log_alpha=" << r.log_alpha << " theta=";
    for (Eigen::Index i = 0; i < r.state.x.size(); ++i) out << (i ? "," : "") << r.state.x[i];
    out << '\n';
  }
}

void write_trace(const std::string& path, const std::vector<TraceRecord>& trace, int p_pred) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace '" + path + "'");
  write_trace(out, trace, p_pred);
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("bad number '" + s + "' in trace", line);
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("bad integer '" + s + "' in trace", line);
  return v;
}

}  // namespace

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  int p_pred = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("p_pred=");
      if (pos != std::string::npos) p_pred = static_cast<int>(parse_u64(line.substr(pos + 7), lineno));
      continue;
    }
    if (p_pred < 0) throw DataError("trace is missing its p_pred header", lineno);
    std::istringstream ss(line);
    std::string tok;
    TraceRecord r;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;  // quoted label following a model field
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "iter") r.iter = parse_u64(val, lineno);
      else if (key == "move") r.move = val == "model_switch" ? MoveType::kModelSwitch : MoveType::kParamUpdate;
      else if (key == "proposed") r.proposed_k = ModelId(parse_u64(val, lineno), p_pred);
      else if (key == "accepted") r.accepted = val == "1";
      else if (key == "model") r.state.k = ModelId(parse_u64(val, lineno), p_pred);
      else if (key == "log_alpha") r.log_alpha = parse_double(val, lineno);
      else if (key == "theta") {
        std::vector<double> v;
        std::size_t start = 0;
        while (start <= val.size()) {
          const auto comma = val.find(',', start);
          const auto end = comma == std::string::npos ? val.size() : comma;
          if (end > start) v.push_back(parse_double(val.substr(start, end - start), lineno));
          start = end + 1;
        }
        r.state.x = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TraceRecord> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace '" + path + "'");
  return read_trace(in);
}

// ---- summaries --------------------------------------------------------------

std::string summary_to_json(const RunSummary& s) {
  nlohmann::json j;
  j["sampler"] = s.sampler;
  j["balancing"] = s.balancing;
  j["model_kind"] = s.model_kind;
  j["switch_acc_rate"] = s.switch_acc_rate ? nlohmann::json(*s.switch_acc_rate) : nlohmann::json();
  j["visit_rate"] = s.visit_rate;
  j["tv_to_reference"] = s.tv_to_reference ? nlohmann::json(*s.tv_to_reference) : nlohmann::json();
  j["iters"] = s.iters;
  j["burnin"] = s.burnin;
  j["seed"] = s.seed;
  j["chains"] = s.chains;
  j["wall_time"] = s.wall_time;
  j["cache_entries"] = s.cache_entries;
  nlohmann::json pmf;
  pmf["p_pred"] = s.empirical_pmf.p_pred;
  pmf["source"] = to_string(s.empirical_pmf.source);
  nlohmann::json probs = nlohmann::json::object();
  for (const auto& [b, p] : s.empirical_pmf.probs) probs[std::to_string(b)] = p;
  pmf["probs"] = probs;
  j["empirical_pmf"] = pmf;
  return j.dump(2);
}

RunSummary summary_from_json(const std::string& text) {
  RunSummary s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.sampler = j.at("sampler").get<std::string>();
    s.balancing = j.at("balancing").get<std::string>();
    s.model_kind = j.at("model_kind").get<std::string>();
    if (!j.at("switch_acc_rate").is_null()) s.switch_acc_rate = j["switch_acc_rate"].get<double>();
    s.visit_rate = j.at("visit_rate").get<double>();
    if (!j.at("tv_to_reference").is_null()) s.tv_to_reference = j["tv_to_reference"].get<double>();
    s.iters = j.at("iters").get<std::uint64_t>();
    s.burnin = j.at("burnin").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.chains = j.at("chains").get<int>();
    s.wall_time = j.at("wall_time").get<double>();
    s.cache_entries = j.value("cache_entries", std::uint64_t{0});
    const auto& pmf = j.at("empirical_pmf");
    s.empirical_pmf.p_pred = pmf.at("p_pred").get<int>();
    s.empirical_pmf.source = parse_pmf_source(pmf.at("source").get<std::string>());
    for (const auto& [key, val] : pmf.at("probs").items())
      s.empirical_pmf.probs[std::stoull(key)] = val.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run summary: ") + e.what());
  }
  return s;
}

void write_summary(const std::string& path, const RunSummary& s) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write summary '" + path + "'");
  out << summary_to_json(s) << '\n';
}

RunSummary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open summary '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return summary_from_json(ss.str());
}

}  // namespace irj
