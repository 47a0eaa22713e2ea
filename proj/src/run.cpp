#include "irj/run.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "irj/errors.hpp"

namespace irj {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

int as_positive_int(const std::string& key, const std::string& v) {
  const std::uint64_t x = as_u64(key, v);
  if (x < 1 || x > 1000000) throw ConfigError(key, "expected an integer in [1, 1000000], got '" + v + "'");
  return static_cast<int>(x);
}

double as_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key, "expected a real number, got '" + v + "'");
  return out;
}

template <class F>
auto as_enum(const std::string& key, const std::string& v, F parse) {
  try {
    return parse(v);
  } catch (const DomainError& e) {
    throw ConfigError(key, e.what());
  }
}

bool is_annealed(SamplerKind k) {
  return k == SamplerKind::kAis || k == SamplerKind::kMulti || k == SamplerKind::kImproved;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "line " + std::to_string(lineno) + " is not of the form key = value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + " has an empty key");
    if (!kv.emplace(key, val).second) throw ConfigError(key, "given more than once");
  }

  static const char* known[] = {"sampler", "h",  "model_kind", "rho",      "iters", "burnin",
                                "seed",    "T",  "N",          "combiner", "ell",   "chains"};
  for (const auto& [k, v] : kv)
    if (std::find(std::begin(known), std::end(known), k) == std::end(known))
      throw ConfigError(k, "unknown key");

  RunConfig c;
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  if (!has("sampler")) throw ConfigError("sampler", "required (uninformed|informed|ais|multi|improved)");
  c.sampler = as_enum("sampler", kv["sampler"], parse_sampler);
  if (has("h")) c.h = as_enum("h", kv["h"], parse_balancing);
  if (has("model_kind")) c.model_kind = as_enum("model_kind", kv["model_kind"], parse_model_kind);
  if (has("rho")) {
    if (c.model_kind != ModelKind::kLptn) throw ConfigError("rho", "only used with model_kind = lptn");
    c.rho = as_real("rho", kv["rho"]);
    try {
      lptn_constants(c.rho);
    } catch (const DomainError& e) {
      throw ConfigError("rho", e.what());
    }
  }
  if (has("iters")) c.iters = as_u64("iters", kv["iters"]);
  if (c.iters < 1) throw ConfigError("iters", "must be positive");
  c.burnin = has("burnin") ? as_u64("burnin", kv["burnin"]) : c.iters / 10;
  if (c.burnin >= c.iters)
    throw ConfigError("burnin", "must be smaller than iters (" + std::to_string(c.iters) + ")");
  if (has("seed")) c.seed = as_u64("seed", kv["seed"]);
  if (has("chains")) c.chains = as_positive_int("chains", kv["chains"]);

  const bool annealed = is_annealed(c.sampler);
  const bool needs_n = c.sampler == SamplerKind::kMulti || c.sampler == SamplerKind::kImproved;
  const bool needs_comb = c.sampler == SamplerKind::kImproved;
  const std::string sname = to_string(c.sampler);
  if (annealed != has("T"))
    throw ConfigError("T", annealed ? "required by sampler " + sname : "not used by sampler " + sname);
  if (needs_n != has("N"))
    throw ConfigError("N", needs_n ? "required by sampler " + sname : "not used by sampler " + sname);
  if (needs_comb != has("combiner"))
    throw ConfigError("combiner",
                      needs_comb ? "required by sampler " + sname : "not used by sampler " + sname);
  if (has("ell") && !annealed) throw ConfigError("ell", "not used by sampler " + sname);
  if (has("T")) c.anneal.T = as_positive_int("T", kv["T"]);
  if (has("N")) c.anneal.N = as_positive_int("N", kv["N"]);
  if (has("combiner")) c.anneal.combiner = as_enum("combiner", kv["combiner"], parse_combiner);
  if (has("ell")) {
    if (kv["ell"] == "auto") {
      c.calibrate_ell = true;
    } else {
      c.anneal.ell = as_real("ell", kv["ell"]);
      if (!(c.anneal.ell > 0.0)) throw ConfigError("ell", "must be positive");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "sampler = " << to_string(c.sampler) << "\nh = " << to_string(c.h)
    << "\nmodel_kind = " << to_string(c.model_kind) << '\n';
  if (c.model_kind == ModelKind::kLptn) o << "rho = " << c.rho << '\n';
  o << "iters = " << c.iters << "\nburnin = " << c.burnin << "\nseed = " << c.seed
    << "\nchains = " << c.chains << '\n';
  if (is_annealed(c.sampler)) {
    o << "T = " << c.anneal.T << '\n';
    if (c.calibrate_ell) o << "ell = auto\n";
    else o << "ell = " << c.anneal.ell << '\n';
  }
  if (c.sampler == SamplerKind::kMulti || c.sampler == SamplerKind::kImproved)
    o << "N = " << c.anneal.N << '\n';
  if (c.sampler == SamplerKind::kImproved) o << "combiner = " << to_string(c.anneal.combiner) << '\n';
  return o.str();
}

ChainState initial_state(ModelInfoCache& cache) {
  ModelId k(0, cache.data().p_pred());
  for (;;) {
    ModelId best = k;
    double best_val = cache.info(k).log_laplace;
    for (const auto& l : neighborhood(k)) {
      const double v = cache.info(l).log_laplace;
      if (v > best_val) {
        best_val = v;
        best = l;
      }
    }
    if (best == k) break;
    k = best;
  }
  return ChainState{k, cache.info(k).map};
}

std::vector<TraceRecord> run_chain(const SamplerConfig& cfg, ModelInfoCache& cache,
                                   std::uint64_t iters, std::uint64_t seed, std::uint64_t chain,
                                   std::optional<ChainState> start) {
  ChainState s = start ? *start : initial_state(cache);
  std::vector<TraceRecord> trace;
  trace.reserve(iters);
  for (std::uint64_t i = 0; i < iters; ++i) {
    trace.push_back(sampler_step(cfg, s, cache, IterationRng(seed, chain, i)));
    if (s.x.size() != s.k.dim() + 1) throw DimensionError("chain entered a state of wrong dimension");
  }
  return trace;
}

double calibrate_ell(const SamplerConfig& cfg, ModelInfoCache& cache, std::uint64_t seed,
                     std::uint64_t iters, const std::vector<double>& grid) {
  SamplerConfig trial = cfg;
  trial.kind = SamplerKind::kAis;
  double best_ell = grid.front(), best_acc = -1.0;
  for (double ell : grid) {
    trial.anneal.ell = ell;
    const auto trace = run_chain(trial, cache, iters, mix64(seed ^ 0xca11b7a7eULL), 0);
    const double acc = switch_acceptance_rate(trace).value_or(0.0);
    if (acc > best_acc) {
      best_acc = acc;
      best_ell = ell;
    }
  }
  return best_ell;
}

RunSummary summarise(const RunConfig& cfg, const std::vector<std::vector<TraceRecord>>& traces,
                     const ModelPmf* reference) {
  RunSummary s;
  s.sampler = to_string(cfg.sampler);
  s.balancing = to_string(cfg.h);
  s.model_kind = to_string(cfg.model_kind);
  s.iters = cfg.iters;
  s.burnin = cfg.burnin;
  s.seed = cfg.seed;
  s.chains = static_cast<int>(traces.size());
  std::vector<TraceRecord> post;
  for (const auto& t : traces) post.insert(post.end(), t.begin() + static_cast<long>(cfg.burnin), t.end());
  s.switch_acc_rate = switch_acceptance_rate(post);
  s.visit_rate = visit_rate(post);
  s.empirical_pmf = empirical_model_pmf(post, 0);
  if (reference) s.tv_to_reference = tv_distance(s.empirical_pmf, *reference);
  return s;
}

RunResult run_sampler(const RunConfig& cfg, ModelInfoCache& cache, const ModelPmf* reference) {
  const auto t0 = std::chrono::steady_clock::now();
  SamplerConfig sc = cfg.sampler_config();
  if (cfg.calibrate_ell) sc.anneal.ell = calibrate_ell(sc, cache, cfg.seed);
  const ChainState start = initial_state(cache);

  RunResult res;
  res.traces.resize(static_cast<std::size_t>(cfg.chains));
  std::vector<std::exception_ptr> errors(res.traces.size());
  auto work = [&](std::size_t c) {
    try {
      res.traces[c] = run_chain(sc, cache, cfg.iters, cfg.seed, c, start);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (cfg.chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < res.traces.size(); ++c) pool.emplace_back(work, c);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  res.summary = summarise(cfg, res.traces, reference);
  res.summary.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.summary.cache_entries = cache.stats().entries;
  return res;
}

}  // namespace irj
