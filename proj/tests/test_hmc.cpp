#include <doctest.h>

#include <cmath>

#include "irj/hmc.hpp"
#include "irj/log.hpp"
#include "test_util.hpp"

using namespace irj;

namespace {

struct Gauss final : LogDensity {
  Eigen::VectorXd prec;
  explicit Gauss(Eigen::VectorXd p) : prec(std::move(p)) {}
  Eigen::Index dim() const override { return prec.size(); }
  double value(const Eigen::VectorXd& x) const override { return -0.5 * x.dot(prec.cwiseProduct(x)); }
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    g = -prec.cwiseProduct(x);
    return value(x);
  }
};

}  // namespace

TEST_CASE("leapfrog is reversible and nearly conserves energy") {
  const Gauss target(Eigen::Vector3d(1.0, 4.0, 0.25));
  const Eigen::VectorXd inv_mass = Eigen::Vector3d(1.0, 0.3, 2.0);
  Stream rng(3);
  Eigen::VectorXd x0 = rng.normal_vector(3), p0 = rng.normal_vector(3);
  Eigen::VectorXd x = x0, p = p0, g;
  double lp = target.value_and_gradient(x, g);
  const double H0 = -lp + 0.5 * p.dot(inv_mass.cwiseProduct(p));
  REQUIRE(leapfrog(target, x, p, g, lp, 0.05, 40, inv_mass));
  const double H1 = -lp + 0.5 * p.dot(inv_mass.cwiseProduct(p));
  CHECK(std::abs(H1 - H0) < 1e-2);
  p = -p;
  REQUIRE(leapfrog(target, x, p, g, lp, 0.05, 40, inv_mass));
  CHECK((x - x0).norm() < 1e-10);
  CHECK((p + p0).norm() < 1e-10);
}

TEST_CASE("divergent trajectories are rejected with a warning") {
  const Gauss target(Eigen::Vector2d(1.0, 1.0));
  HmcTuning t;
  t.step_size = 1e160;
  t.traj_len = 5;
  t.mass_diag = Eigen::Vector2d(1.0, 1.0);
  auto prev = set_warning_handler([](const std::string&) {});
  const auto before = warning_count();
  Stream m(1), a(2);
  const HmcResult r = hmc_update(target, Eigen::Vector2d(0.5, 0.5), t, m, a);
  set_warning_handler(prev);
  CHECK_FALSE(r.accepted);
  CHECK(r.x == Eigen::Vector2d(0.5, 0.5));
  CHECK(warning_count() > before);
}

TEST_CASE("HMC leaves the normal posterior invariant") {
  const Dataset d = synthetic_dataset("sixteen", 21);
  const ModelId k(0b0011, 4);
  const ModelPosterior post(ModelSpec::normal(), k, d);
  const ModelInfo info = build_model_info(ModelSpec::normal(), k, d);
  const HmcTuning tun = hmc_autotune(post, info, 77);
  CHECK(tun.step_size > 0.0);
  CHECK(std::find(AutotuneOptions{}.traj_grid.begin(), AutotuneOptions{}.traj_grid.end(), tun.traj_len) !=
        AutotuneOptions{}.traj_grid.end());

  const auto nc = normal_conditionals(k, d);
  // exact SDs: beta ~ multivariate t; eta = log sigma
  const Eigen::VectorXd laplace_sd = (info.inv_chol * info.inv_chol.transpose()).diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < laplace_sd.size(); ++i)
    CHECK(tun.mass_diag[i] == doctest::Approx(laplace_sd[i]).epsilon(0.35));

  Eigen::VectorXd x = info.map;
  const int M = 6000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
  int acc = 0;
  for (int i = 0; i < M; ++i) {
    Stream m(StreamKey{5, 0, std::uint64_t(i), Purpose::kMomentum});
    Stream a(StreamKey{5, 0, std::uint64_t(i), Purpose::kAccept});
    const auto r = hmc_update(post, x, tun, m, a);
    x = r.x;
    acc += r.accepted;
    sum += x;
  }
  const Eigen::VectorXd mean = sum / M;
  CHECK(acc > M / 2);
  for (Eigen::Index i = 0; i < k.dim(); ++i) CHECK(std::abs(mean[i] - nc.beta_hat[i]) < 0.1 * laplace_sd[i]);
  CHECK(std::abs(mean[k.dim()] - nc.mean_eta()) < 0.1 * laplace_sd[k.dim()]);
}

TEST_CASE("fallback tuning") {
  const Dataset d = synthetic_dataset("sixteen", 1);
  const ModelInfo info = build_model_info(ModelSpec::normal(), ModelId(0b111, 4), d);
  const HmcTuning t = hmc_fallback_tuning(info);
  CHECK(t.fallback);
  CHECK(t.traj_len == 10);
  CHECK(t.step_size == doctest::Approx(0.1 / std::sqrt(5.0)));
  CHECK(t.mass_diag[4] == doctest::Approx(1.0 / std::sqrt(2.0 * d.n())));
}

TEST_CASE("short trajectories on a standard Gaussian are almost always accepted") {
  const Gauss g(Eigen::VectorXd::Ones(4));
  HmcTuning tun;
  tun.step_size = 0.1;
  tun.traj_len = 10;
  tun.mass_diag = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  const int M = 10000;
  int acc = 0;
  for (int i = 0; i < M; ++i) {
    Stream m(StreamKey{8, 0, std::uint64_t(i), Purpose::kMomentum});
    Stream a(StreamKey{8, 0, std::uint64_t(i), Purpose::kAccept});
    const auto r = hmc_update(g, x, tun, m, a);
    x = r.x;
    acc += r.accepted;
  }
  CHECK(acc > 0.95 * M);
}

TEST_CASE("autotuned acceptance on Gaussian targets lies in [0.6, 0.95]") {
  Stream rng(12);
  for (int rep = 0; rep < 8; ++rep) {
    const Eigen::Index D = 2 + rep % 5;
    Eigen::VectorXd prec(D);
    for (Eigen::Index i = 0; i < D; ++i) prec[i] = std::exp(3.0 * (rng.uniform() - 0.5));  // scales over ~e^1.5
    const Gauss g(prec);
    ModelInfo info;
    info.map = Eigen::VectorXd::Zero(D);
    info.obs_info = prec.asDiagonal();
    info.inv_chol = prec.cwiseSqrt().cwiseInverse().asDiagonal();
    info.log_det_info = prec.array().log().sum();
    const HmcTuning tun = hmc_autotune(g, info, 200 + rep);
    CHECK_FALSE(tun.fallback);
    CHECK(tun.eval_accept_rate >= 0.6);
    CHECK(tun.eval_accept_rate <= 0.95);
  }
}
