// irj: batch front end for the informed reversible-jump samplers.
//
//   irj run --config run.cfg --data prostate.csv --out results/
//   irj enumerate --data d.csv --model-kind lptn --out pmf.txt
//   irj compare results/a/summary.json results/b/summary.json --reference pmf.txt
//   irj gen-data --preset prostate_like --seed 3 --out synth.csv
//
// Exit codes: 0 ok, 1 usage, 2 config, 3 data, 4 runtime, 5 oracle ESS refusal.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irj/dataset.hpp"
#include "irj/diagnostics.hpp"
#include "irj/errors.hpp"
#include "irj/oracle.hpp"
#include "irj/run.hpp"
#include "irj/synthetic.hpp"

namespace fs = std::filesystem;
using namespace irj;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kRuntime = 4, kLowEss = 5 };

struct RunArgs {
  std::string config, data, out, reference;
  std::optional<std::uint64_t> seed;
  bool no_standardize = false;
};

int cmd_run(const RunArgs& a) {
  RunConfig cfg = load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  const Dataset data = load_csv(a.data, !a.no_standardize);
  std::optional<ModelPmf> ref;
  if (!a.reference.empty()) {
    ref = read_pmf(a.reference);
    if (ref->p_pred != data.p_pred()) throw DataError("reference PMF has a different number of predictors");
  }
  fs::create_directories(a.out);
  ModelInfoCache cache(data, cfg.spec());
  const RunResult res = run_sampler(cfg, cache, ref ? &*ref : nullptr);
  for (std::size_t c = 0; c < res.traces.size(); ++c)
    write_trace((fs::path(a.out) / ("trace_chain" + std::to_string(c) + ".tsv")).string(), res.traces[c],
                data.p_pred());
  write_summary((fs::path(a.out) / "summary.json").string(), res.summary);
  std::ofstream((fs::path(a.out) / "config.cfg").string()) << format_config(cfg);

  const auto& s = res.summary;
  std::cout << s.sampler << '/' << s.balancing << " on " << s.model_kind << ": switch acc "
            << (s.switch_acc_rate ? std::to_string(*s.switch_acc_rate) : std::string("n/a")) << ", visit rate "
            << s.visit_rate;
  if (s.tv_to_reference) std::cout << ", TV " << *s.tv_to_reference;
  std::cout << ", " << s.wall_time << " s\n";
  return kOk;
}

struct EnumArgs {
  std::string data, out, kind = "normal";
  double rho = 0.95;
  std::size_t budget = 10000;
  std::uint64_t seed = 1;
};

int cmd_enumerate(const EnumArgs& a) {
  const ModelKind kind = parse_model_kind(a.kind);
  const Dataset data = load_csv(a.data);
  const ModelPmf pmf = kind == ModelKind::kNormal ? exact_model_pmf_normal(data)
                                                  : golden_model_pmf_lptn(data, a.rho, a.budget, a.seed);
  write_pmf(a.out, pmf);
  const ModelId top = pmf.mode();
  std::cout << pmf.probs.size() << " models, mode " << format_model(top) << " with probability " << pmf(top)
            << '\n';
  return kOk;
}

struct CompareArgs {
  std::vector<std::string> summaries;
  std::string reference, out;
};

int cmd_compare(const CompareArgs& a) {
  if (a.summaries.size() < 2) throw ConfigError("summaries", "need at least two summaries");
  std::optional<ModelPmf> ref;
  if (!a.reference.empty()) ref = read_pmf(a.reference);

  struct Row {
    std::string name;
    RunSummary s;
    double tv = 0.0;
  };
  std::vector<Row> rows;
  for (const auto& path : a.summaries) {
    Row r{path, read_summary(path)};
    if (ref) {
      if (r.s.empirical_pmf.p_pred != ref->p_pred)
        throw DataError(path + ": model space does not match the reference (" +
                        std::to_string(r.s.empirical_pmf.p_pred) + " vs " + std::to_string(ref->p_pred) +
                        " predictors)");
      r.tv = tv_distance(r.s.empirical_pmf, *ref);
    } else if (r.s.tv_to_reference) {
      r.tv = *r.s.tv_to_reference;
    } else {
      throw ConfigError("reference", path + " has no TV to a reference; pass --reference");
    }
    rows.push_back(std::move(r));
  }
  if (!ref)
    for (const auto& r : rows)
      if (r.s.empirical_pmf.p_pred != rows.front().s.empirical_pmf.p_pred)
        throw DataError(r.name + ": model space differs from " + rows.front().name);

  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.tv < y.tv; });
  const double best = rows.front().tv;

  std::ostringstream o;
  o << "run\tsampler\th\tacc_rate\tvisit_rate\ttv\trel_increase_tv\n" << std::setprecision(6);
  for (const auto& r : rows) {
    o << r.name << '\t' << r.s.sampler << '\t' << r.s.balancing << '\t';
    if (r.s.switch_acc_rate) o << *r.s.switch_acc_rate;
    else o << "nan";
    o << '\t' << r.s.visit_rate << '\t' << r.tv << '\t' << (best > 0 ? r.tv / best - 1.0 : 0.0) << '\n';
  }
  if (a.out.empty()) std::cout << o.str();
  else std::ofstream(a.out) << o.str();
  return kOk;
}

struct GenArgs {
  std::string preset = "prostate_like", out;
  std::uint64_t seed = 1;
};

int cmd_gen_data(const GenArgs& a) {
  const SyntheticData d = generate_synthetic(synthetic_preset(a.preset, a.seed));
  write_csv(a.out, d.y, d.X);
  return kOk;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const LowEssError& e) {
    std::cerr << "oracle refused: " << e.what() << '\n';
    return kLowEss;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Informed reversible-jump samplers for Bayesian variable selection"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a configured sampler and write traces plus a summary");
  run->add_option("--config", ra.config, "key = value run configuration")->required();
  run->add_option("--data", ra.data, "CSV, response first")->required();
  run->add_option("--out", ra.out, "output directory")->required();
  run->add_option("--seed", ra.seed, "overrides the config seed");
  run->add_option("--reference", ra.reference, "PMF file for the TV column");
  run->add_flag("--no-standardize", ra.no_standardize, "use predictors as given");

  EnumArgs ea;
  auto* en = app.add_subcommand("enumerate", "exact (normal) or importance-sampled (lptn) model PMF");
  en->add_option("--data", ea.data)->required();
  en->add_option("--out", ea.out)->required();
  en->add_option("--model-kind", ea.kind)->check(CLI::IsMember({"normal", "lptn"}));
  en->add_option("--rho", ea.rho);
  en->add_option("--budget", ea.budget, "importance draws per model");
  en->add_option("--seed", ea.seed);

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "table of acceptance, visit rate, TV and relative TV increase");
  cmp->add_option("summaries", ca.summaries, "summary.json files")->required();
  cmp->add_option("--reference", ca.reference, "PMF file; defaults to each summary's own TV");
  cmp->add_option("--out", ca.out, "TSV output (default stdout)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic data set as CSV");
  gen->add_option("--preset", ga.preset)->check(CLI::IsMember({"small", "sixteen", "prostate_like"}));
  gen->add_option("--seed", ga.seed);
  gen->add_option("--out", ga.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (*run) return guarded([&] { return cmd_run(ra); });
  if (*en) return guarded([&] { return cmd_enumerate(ea); });
  if (*cmp) return guarded([&] { return cmd_compare(ca); });
  return guarded([&] { return cmd_gen_data(ga); });
}
