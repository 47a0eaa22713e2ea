#include <doctest.h>

#include <thread>

#include "irj/errors.hpp"
#include "irj/oracle.hpp"
#include "irj/run.hpp"
#include "test_util.hpp"

using namespace irj;

namespace {

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults and round trip") {
    const RunConfig c = parse_config("sampler = informed\n# comment\niters = 500  # trailing\n");
    CHECK(c.sampler == SamplerKind::kInformed);
    CHECK(c.h == Balancing::kBarker);
    CHECK(c.iters == 500);
    CHECK(c.burnin == 50);
    const RunConfig d = parse_config(
        "sampler = improved\nh = sqrt\nmodel_kind = lptn\nrho = 0.9\nT = 5\nN = 3\ncombiner = simple_average\n"
        "ell = auto\niters = 100\nburnin = 10\nseed = 9\nchains = 2\n");
    CHECK(d.calibrate_ell);
    CHECK(d.anneal.combiner == Combiner::kSimpleAverage);
    const RunConfig e = parse_config(format_config(d));
    CHECK(format_config(e) == format_config(d));
    CHECK(e.spec().lptn.rho == 0.9);
  }
  SUBCASE("errors name the offending key") {
    CHECK(config_error_key("iters = 10\n") == "sampler");
    CHECK(config_error_key("sampler = fancy\n") == "sampler");
    CHECK(config_error_key("sampler = informed\nsampler = ais\n") == "sampler");
    CHECK(config_error_key("sampler = informed\ncolour = red\n") == "colour");
    CHECK(config_error_key("sampler = ais\n") == "T");
    CHECK(config_error_key("sampler = informed\nT = 3\n") == "T");
    CHECK(config_error_key("sampler = multi\nT = 3\n") == "N");
    CHECK(config_error_key("sampler = improved\nT = 3\nN = 2\n") == "combiner");
    CHECK(config_error_key("sampler = multi\nT = 3\nN = 2\ncombiner = median\n") == "combiner");
    CHECK(config_error_key("sampler = informed\nell = 2\n") == "ell");
    CHECK(config_error_key("sampler = ais\nT = 2\nell = -1\n") == "ell");
    CHECK(config_error_key("sampler = ais\nT = 0\n") == "T");
    CHECK(config_error_key("sampler = informed\nrho = 0.9\n") == "rho");
    CHECK(config_error_key("sampler = informed\nmodel_kind = lptn\nrho = 0.5\n") == "rho");
    CHECK(config_error_key("sampler = informed\niters = 10\nburnin = 10\n") == "burnin");
    CHECK(config_error_key("sampler = informed\niters = ten\n") == "iters");
    CHECK(config_error_key("sampler = informed\nh = cubic\n") == "h");
    CHECK(config_error_key("sampler informed\n") != "<none>");
  }
}

TEST_CASE("model cache") {
  const Dataset d = synthetic_dataset("sixteen", 4);
  ModelInfoCache cache(d, ModelSpec::normal());
  const ModelId k(0b0101, 4);
  CHECK_FALSE(cache.contains(k));
  const CachedModel* a = &cache.get(k);
  CHECK(cache.contains(k));
  CHECK(&cache.get(k) == a);
  const CacheStats st = cache.stats();
  CHECK(st.misses == 1);
  CHECK(st.hits == 1);
  CHECK(st.entries == 1);

  SUBCASE("concurrent readers see one entry per model") {
    std::vector<const CachedModel*> seen(4);
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
      ts.emplace_back([&, t] {
        for (const auto& m : all_models(4)) cache.get(m);
        seen[t] = &cache.get(ModelId(0b1111, 4));
      });
    for (auto& t : ts) t.join();
    for (auto* p : seen) CHECK(p == seen[0]);
    CHECK(cache.stats().entries == 16);
  }
  SUBCASE("HMC tuning does not depend on the order of first use") {
    ModelInfoCache other(d, ModelSpec::normal());
    other.tuning(ModelId(0b1111, 4));
    const HmcTuning& t1 = other.tuning(k);
    const HmcTuning& t2 = cache.tuning(k);
    CHECK(t1.step_size == t2.step_size);
    CHECK(t1.traj_len == t2.traj_len);
    CHECK(t1.mass_diag == t2.mass_diag);
  }
  SUBCASE("proposal PMF follows Laplace evidences") {
    const ProposalPmf& g = cache.proposal_pmf(k, Balancing::kSqrt);
    for (std::size_t i = 0; i < g.support.size(); ++i) {
      const double lr = cache.info(g.support[i]).log_laplace - cache.info(k).log_laplace;
      CHECK(g.log_probs[i] == doctest::Approx(0.5 * lr - g.log_c).epsilon(1e-12));
    }
    const ProposalPmf& u = cache.uniform_pmf(k);
    for (double p : u.probs) CHECK(p == doctest::Approx(1.0 / 5.0));
  }
  cache.clear();
  CHECK(cache.stats().entries == 0);
}

TEST_CASE("initial state is a local maximum of the Laplace evidence") {
  const Dataset d = synthetic_dataset("sixteen", 6);
  ModelInfoCache cache(d, ModelSpec::normal());
  const ChainState s = initial_state(cache);
  for (const auto& l : neighborhood(s.k)) CHECK(cache.info(l).log_laplace <= cache.info(s.k).log_laplace);
  CHECK(s.x == cache.info(s.k).map);
}

TEST_CASE("runs are reproducible and chains are independent of threading") {
  const Dataset d = testing::outlier_dataset(5, 40, 3);
  RunConfig cfg = parse_config("sampler = multi\nmodel_kind = lptn\nT = 3\nN = 2\niters = 300\nseed = 8\nchains = 2\n");
  ModelInfoCache c1(d, cfg.spec()), c2(d, cfg.spec());
  const RunResult a = run_sampler(cfg, c1);
  const auto solo = run_chain(cfg.sampler_config(), c2, cfg.iters, cfg.seed, 1, initial_state(c2));
  REQUIRE(a.traces.size() == 2);
  for (std::size_t i = 0; i < solo.size(); ++i) {
    CHECK(a.traces[1][i].state.k == solo[i].state.k);
    CHECK(a.traces[1][i].state.x == solo[i].state.x);
  }
  CHECK(a.summary.chains == 2);
  CHECK(a.summary.empirical_pmf.total() == doctest::Approx(1.0));
}

TEST_CASE("ell calibration picks a grid value") {
  const Dataset d = synthetic_dataset("small", 2);
  ModelInfoCache cache(d, ModelSpec::normal());
  SamplerConfig sc{SamplerKind::kAis, Balancing::kBarker, {4, 2.0, 1, Combiner::kMedian}};
  const double ell = calibrate_ell(sc, cache, 3, 300);
  CHECK((ell == 0.5 || ell == 1.0 || ell == 2.0 || ell == 4.0));
}
