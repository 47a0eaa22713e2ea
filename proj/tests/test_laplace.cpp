#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <numbers>

#include "irj/errors.hpp"
#include "irj/laplace.hpp"
#include "test_util.hpp"

using namespace irj;

namespace {

Eigen::MatrixXd numeric_hessian(const ModelSpec& spec, const ModelId& k, const Dataset& d,
                                const Eigen::VectorXd& x, double h = 1e-4) {
  const auto D = x.size();
  Eigen::MatrixXd H(D, D);
  for (Eigen::Index i = 0; i < D; ++i) {
    auto gi = [&](const Eigen::VectorXd& v) {
      return spec.kind == ModelKind::kNormal ? grad_log_posterior_normal(k, v, d)
                                             : grad_log_posterior_lptn(k, v, d, spec.lptn);
    };
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    H.col(i) = (gi(a) - gi(b)) / (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

}  // namespace

TEST_CASE("normal MAP is the closed-form joint mode") {
  const Dataset d = synthetic_dataset("sixteen", 2);
  for (const auto& k : all_models(4)) {
    const ParamVector m = map_estimate(ModelSpec::normal(), k, d);
    const auto nc = normal_conditionals(k, d);
    CHECK((beta_of(m) - nc.beta_hat).norm() < 1e-10);
    CHECK(eta_of(m) == doctest::Approx(0.5 * std::log(nc.rss / d.n())).epsilon(1e-12));
    CHECK(grad_log_posterior_normal(k, m, d).norm() < 1e-8);
  }
}

TEST_CASE("observed information equals the exact negative Hessian for the normal model") {
  const Dataset d = synthetic_dataset("sixteen", 6);
  const ModelId k(0b1101, 4);
  const ParamVector m = map_estimate(ModelSpec::normal(), k, d);
  const Eigen::MatrixXd I = observed_info(ModelSpec::normal(), k, d, m);
  const Eigen::MatrixXd H = numeric_hessian(ModelSpec::normal(), k, d, m);
  CHECK((I + H).norm() <= 1e-5 * I.norm());
  CHECK(I(k.dim(), k.dim()) == doctest::Approx(2.0 * d.n()));
  CHECK(I.col(k.dim()).head(k.dim()).norm() == 0.0);
}

TEST_CASE("LPTN MAP is a stationary local maximum") {
  const auto spec = ModelSpec::robust(0.95);
  int on_kink = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const Dataset d = testing::outlier_dataset(seed);
    for (const auto& k : all_models(3)) {
      const ParamVector m = map_estimate(spec, k, d);
      const ModelPosterior post(spec, k, d);
      if (post.kink_distance(m) > 1e-6) {
        CHECK(grad_log_posterior_lptn(k, m, d, spec.lptn).norm() < 1e-6);
      } else {
        ++on_kink;  // nonsmooth mode: only the local-maximum property applies
      }
      const double top = log_unnorm_posterior(spec, k, m, d);
      CHECK(top >= log_unnorm_posterior(spec, k, map_estimate(ModelSpec::normal(), k, d), d));
      Stream rng(seed * 31 + k.bits);
      for (int i = 0; i < 10; ++i)
        CHECK(log_unnorm_posterior(spec, k, m + 1e-3 * rng.normal_vector(m.size()), d) <= top);
    }
  }
  MESSAGE("modes on a kink: " << on_kink);
}

TEST_CASE("Laplace evidence error for the normal model is a known function of (n, d)") {
  // Laplace at the joint mode vs the exact integral: the RSS and the Gram
  // determinant cancel, leaving
  //   (n-d)/2 log n - n/2 - lgamma((n-d)/2) + (d+1-n)/2 log 2pi - 1/2 log 2n
  //   + (n-d)/2 log pi + log 2.
  auto gap = [](double n, double d) {
    const double l2pi = std::log(2 * std::numbers::pi), lpi = std::log(std::numbers::pi);
    return 0.5 * (n - d) * std::log(n) - 0.5 * n - std::lgamma(0.5 * (n - d)) + 0.5 * (d + 1 - n) * l2pi -
           0.5 * std::log(2 * n) + 0.5 * (n - d) * lpi + std::log(2.0);
  };
  const Dataset d = synthetic_dataset("sixteen", 12);
  for (const auto& k : all_models(4)) {
    const ModelInfo info = build_model_info(ModelSpec::normal(), k, d);
    const double exact = normal_log_evidence(k, d) + normal_evidence_constant(d.n());
    CHECK(info.log_laplace - exact == doctest::Approx(gap(d.n(), k.dim())).epsilon(1e-9));
    CHECK(std::abs(info.log_laplace - exact) < 0.1);
    CHECK(info.log_laplace == doctest::Approx(log_laplace_evidence(ModelSpec::normal(), k, d, info)));
  }
  CHECK(std::abs(gap(1e5, 5)) < 1e-3);  // vanishes as n grows
}

TEST_CASE("Laplace normaliser is exact for a Gaussian") {
  Eigen::Matrix3d P;
  P << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const double log_at_mode = 1.7;
  const double expect = log_at_mode + 1.5 * std::log(2 * std::numbers::pi) - 0.5 * std::log(P.determinant());
  CHECK(laplace_log_normaliser(log_at_mode, P) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("Gaussian proposal density and draws") {
  const Dataset d = testing::outlier_dataset(4);
  const ModelInfo info = build_model_info(ModelSpec::robust(0.95), ModelId(0b11, 3), d);
  const GaussianProposal q(info);
  const Eigen::MatrixXd cov = info.obs_info.inverse();
  Stream rng(1);
  const Eigen::VectorXd x = info.map + 0.1 * rng.normal_vector(q.dim());
  const Eigen::VectorXd r = x - info.map;
  const double manual = -0.5 * q.dim() * std::log(2 * std::numbers::pi) - 0.5 * std::log(cov.determinant()) -
                        0.5 * r.dot(info.obs_info * r);
  CHECK(q.log_density(x) == doctest::Approx(manual).epsilon(1e-12));
  Eigen::VectorXd g;
  CHECK(q.log_density_and_gradient(x, g) == doctest::Approx(manual).epsilon(1e-12));
  CHECK((g + info.obs_info * r).norm() < 1e-9 * (1 + g.norm()));

  const int M = 40000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(q.dim());
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(q.dim(), q.dim());
  for (int i = 0; i < M; ++i) {
    const Eigen::VectorXd z = q.sample(rng) - info.map;
    mean += z;
    second += z * z.transpose();
  }
  mean /= M;
  second /= M;
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    const double sd = std::sqrt(cov(i, i));
    CHECK(std::abs(mean[i]) < 4 * sd / std::sqrt(M));
    CHECK(second(i, i) == doctest::Approx(cov(i, i)).epsilon(0.04));
  }
}

TEST_CASE("balancing functions") {
  CHECK(balancing(Balancing::kSqrt, 4.0) == 2.0);
  CHECK(balancing(Balancing::kBarker, 3.0) == 0.75);
  CHECK(balancing(Balancing::kIdentity, 3.0) == 3.0);
  CHECK_THROWS_AS(balancing(Balancing::kSqrt, -1.0), DomainError);
  CHECK(parse_balancing("barker") == Balancing::kBarker);
  CHECK(to_string(parse_balancing("sqrt")) == "sqrt");
  CHECK_THROWS(parse_balancing("median"));

  for (auto h : {Balancing::kSqrt, Balancing::kBarker}) {
    for (double x : {1e-6, 0.3, 1.0, 2.5, 1e5}) {
      // balancing property h(x) = x h(1/x)
      CHECK(balancing(h, x) == doctest::Approx(x * balancing(h, 1.0 / x)).epsilon(1e-13));
      CHECK(log_balancing(h, std::log(x)) == doctest::Approx(std::log(balancing(h, x))).epsilon(1e-12));
    }
  }
  // extreme ratios stay finite
  CHECK(log_balancing(Balancing::kBarker, 900.0) == doctest::Approx(0.0));
  CHECK(log_balancing(Balancing::kBarker, -900.0) == doctest::Approx(-900.0));
  CHECK(std::isfinite(log_balancing(Balancing::kBarker, 900.0)));
}

TEST_CASE("balanced proposal pmf") {
  Stream rng(8);
  const ModelId k(0b101, 3);
  const auto nb = neighborhood(k);
  std::vector<double> lr;
  for (const auto& l : nb) lr.push_back(l == k ? 0.0 : 5.0 * rng.normal());
  for (auto h : {Balancing::kSqrt, Balancing::kBarker, Balancing::kIdentity}) {
    const ProposalPmf pmf = balanced_pmf(nb, lr, h);
    double s = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      s += pmf.probs[i];
      CHECK(std::log(pmf.probs[i]) == doctest::Approx(pmf.log_probs[i]).epsilon(1e-12));
      CHECK(pmf.prob(nb[i]) == pmf.probs[i]);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pmf.sample(0.0) == nb.front());
    CHECK(pmf.sample(std::nextafter(1.0, 0.0)) == nb.back());
    CHECK_THROWS(pmf.index_of(ModelId(0b010, 3)));  // two toggles away
  }
}

TEST_CASE("locally balanced proposals satisfy pi(k) h(pi(l)/pi(k)) = pi(l) h(pi(k)/pi(l))") {
  Stream rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    const double a = 10 * rng.normal(), b = 10 * rng.normal();
    for (auto h : {Balancing::kSqrt, Balancing::kBarker})
      CHECK(a + log_balancing(h, b - a) == doctest::Approx(b + log_balancing(h, a - b)).epsilon(1e-12));
  }
}

TEST_CASE("log-sum-exp helpers") {
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({-1000.0, -1e300}) == doctest::Approx(-1000.0));
  CHECK(std::isinf(log_sum_exp({})));
  CHECK(log_mean_exp({0.123456789}) == 0.123456789);
  CHECK(log_mean_exp({0.0, std::log(3.0)}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  // order independence
  const std::vector<double> v{0.3, -2.0, 5.1, 1e-3, 4.9}, w{4.9, 1e-3, 5.1, -2.0, 0.3};
  CHECK(log_sum_exp(v) == log_sum_exp(w));
}
