#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "irj/errors.hpp"
#include "irj/laplace.hpp"
#include "irj/oracle.hpp"
#include "irj/regression.hpp"
#include "irj/synthetic.hpp"
#include "test_util.hpp"

using namespace irj;

TEST_CASE("LPTN constants at rho = 0.95") {
  const auto c = lptn_constants(0.95);
  // scipy: norm.ppf(0.975); 2/(1-rho)*norm.pdf(tau)*tau*log(tau)
  CHECK(c.tau == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(c.lambda == doctest::Approx(3.0833536221397178).epsilon(1e-12));
  CHECK(std::erf(c.tau / std::numbers::sqrt2) == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("LPTN admissible range is the open interval (2Phi(1)-1, 1)") {
  CHECK(lptn_rho_min() == doctest::Approx(0.6826894921370859).epsilon(1e-15));
  CHECK_THROWS_AS(lptn_constants(lptn_rho_min()), DomainError);
  CHECK_THROWS_AS(lptn_constants(0.68), DomainError);
  CHECK_THROWS_AS(lptn_constants(1.0), DomainError);
  CHECK_THROWS_AS(lptn_constants(std::nan("")), DomainError);
  CHECK_NOTHROW(lptn_constants(0.6827));  // just inside the interval
  try {
    lptn_constants(0.5);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("(2Phi(1)-1, 1)") != std::string::npos);
  }
}

TEST_CASE("LPTN density: core, continuity, symmetry") {
  const auto c = lptn_constants(0.95);
  CHECK(lptn_logpdf(0.0, c) == doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(lptn_logpdf(c.tau, c) == doctest::Approx(lptn_logpdf(std::nextafter(c.tau, 10.0), c)).epsilon(1e-12));
  Stream rng(42);
  for (int i = 0; i < 200; ++i) {
    const double x = 6.0 * rng.normal();
    CHECK(lptn_logpdf(x, c) == lptn_logpdf(-x, c));
    if (std::abs(x) <= c.tau) CHECK(lptn_logpdf(x, c) == doctest::Approx(-0.5 * x * x - 0.9189385332046727));
  }
}

TEST_CASE("LPTN density integrates to one") {
  for (double rho : {0.8, 0.95, 0.99}) {
    const auto c = lptn_constants(rho);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [&](double x) { return std::exp(lptn_logpdf(x, c)); };
    const double core = GK::integrate(f, -c.tau, c.tau, 15, 1e-14);
    // Tail in u = log x: integrand e^u f(e^u) = phi(tau) tau (log tau / u)^(lambda+1).
    const double U = 50.0;
    auto g = [&](double u) { return std::exp(u + lptn_logpdf(std::exp(u), c)); };
    const double tail_num = GK::integrate(g, std::log(c.tau), U, 20, 1e-14);
    const double phi_tau = std::exp(lptn_logpdf(c.tau, c));
    const double tail_rest =
        phi_tau * c.tau * std::pow(std::log(c.tau), c.lambda + 1.0) * std::pow(U, -c.lambda) / c.lambda;
    const double total = core + 2.0 * (tail_num + tail_rest);
    CHECK(std::abs(total - 1.0) < 1e-8);
    CHECK(core == doctest::Approx(rho).epsilon(1e-12));
    // Closed form of one tail: phi(tau) tau log(tau) / lambda = (1 - rho) / 2
    CHECK(phi_tau * c.tau * std::log(c.tau) / c.lambda == doctest::Approx((1 - rho) / 2).epsilon(1e-12));
  }
}

TEST_CASE("normal posterior is maximised in beta at beta_hat") {
  const Dataset d = synthetic_dataset("sixteen", 3);
  const ModelId k(0b1011, 4);
  const ModelPosterior post(ModelSpec::normal(), k, d);
  ParamVector x(k.dim() + 1);
  x << post.beta_hat(), 0.1;
  const double top = log_unnorm_posterior(ModelSpec::normal(), k, x, d);
  Stream rng(7);
  for (int i = 0; i < 20; ++i) {
    ParamVector y = x;
    y.head(k.dim()) += 0.01 * rng.normal_vector(k.dim());
    CHECK(log_unnorm_posterior(ModelSpec::normal(), k, y, d) < top);
  }
}

TEST_CASE("LPTN equals normal when all residuals sit in the core") {
  const Dataset d = synthetic_dataset("sixteen", 5);
  const ModelId k(0b0011, 4);
  const ModelPosterior post(ModelSpec::normal(), k, d);
  ParamVector x(k.dim() + 1);
  x << post.beta_hat(), std::log(10.0);  // sigma = 10: |residual|/sigma << tau
  const auto spec = ModelSpec::robust(0.95);
  CHECK(log_unnorm_posterior(spec, k, x, d) ==
        doctest::Approx(log_unnorm_posterior(ModelSpec::normal(), k, x, d)).epsilon(1e-13));
  CHECK((grad_log_posterior_lptn(k, x, d, spec.lptn) - grad_log_posterior_normal(k, x, d)).norm() < 1e-10);
}

TEST_CASE("closed-form factorisation of the normal posterior") {
  // log joint = log evidence + log N(beta; beta_hat, sigma^2 G^{-1}) + log p(eta), exactly.
  const Dataset d = synthetic_dataset("sixteen", 11);
  Stream rng(3);
  for (const auto& k : all_models(4)) {
    const NormalConditionals nc = normal_conditionals(k, d);
    const ModelPosterior post(ModelSpec::normal(), k, d);
    const double expected = normal_log_evidence(k, d) + normal_evidence_constant(d.n());
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 100; ++i) {
      ParamVector x(k.dim() + 1);
      x.head(k.dim()) = nc.beta_hat + 0.3 * rng.normal_vector(k.dim());
      x[k.dim()] = nc.eta_hat(d.n()) + 0.3 * rng.normal();
      const double sigma2 = std::exp(2.0 * x[k.dim()]);
      const Eigen::VectorXd db = x.head(k.dim()) - nc.beta_hat;
      const double logdet_cov = k.dim() * std::log(sigma2) - post.log_det_gram();
      const double log_beta = -0.5 * k.dim() * std::log(2 * std::numbers::pi) - 0.5 * logdet_cov -
                              0.5 * db.dot(post.gram() * db) / sigma2;
      const double diff = log_unnorm_posterior(ModelSpec::normal(), k, x, d) - log_beta -
                          nc.eta_log_density(x[k.dim()]);
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    CHECK(hi - lo < 1e-8);
    CHECK(hi == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("fast and direct posterior evaluations agree") {
  const Dataset d = testing::outlier_dataset(9);
  const auto robust = ModelSpec::robust(0.95);
  Stream rng(5);
  for (const auto& spec : {ModelSpec::normal(), robust})
    for (const auto& k : all_models(3)) {
      const ModelPosterior post(spec, k, d);
      for (int i = 0; i < 5; ++i) {
        ParamVector x = map_estimate(ModelSpec::normal(), k, d) + 0.2 * rng.normal_vector(k.dim() + 1);
        Eigen::VectorXd g;
        const double v = post.value_and_gradient(x, g);
        CHECK(v == doctest::Approx(log_unnorm_posterior(spec, k, x, d)).epsilon(1e-11));
        CHECK(post.value(x) == doctest::Approx(v).epsilon(1e-12));
        const Eigen::VectorXd g2 = spec.kind == ModelKind::kNormal
                                       ? grad_log_posterior_normal(k, x, d)
                                       : grad_log_posterior_lptn(k, x, d, spec.lptn);
        CHECK((g - g2).norm() <= 1e-9 * (1.0 + g2.norm()));
      }
    }
}

TEST_CASE("gradients match central finite differences") {
  const Dataset d = testing::outlier_dataset(21);
  const auto robust = ModelSpec::robust(0.95);
  Stream rng(99);
  int tail_points = 0;
  for (const auto& spec : {ModelSpec::normal(), robust}) {
    const ModelId k(0b111, 3);
    const ParamVector c = map_estimate(ModelSpec::normal(), k, d);
    for (int i = 0; i < 50; ++i) {
      const ParamVector x = c + 0.3 * rng.normal_vector(c.size());
      auto f = [&](const Eigen::VectorXd& v) { return log_unnorm_posterior(spec, k, v, d); };
      const Eigen::VectorXd fd = testing::central_difference(f, x);
      const Eigen::VectorXd g = spec.kind == ModelKind::kNormal
                                    ? grad_log_posterior_normal(k, x, d)
                                    : grad_log_posterior_lptn(k, x, d, spec.lptn);
      CHECK((g - fd).norm() <= 1e-5 * g.norm());
      if (spec.kind == ModelKind::kLptn) {
        const Eigen::VectorXd z = (d.y - d.design(k) * x.head(k.dim())) * std::exp(-x[k.dim()]);
        tail_points += (z.array().abs() > spec.lptn.tau).any();
      }
    }
  }
  CHECK(tail_points > 40);  // the log-Pareto branch was actually exercised
}

TEST_CASE("normal evidence: enumeration and consistency") {
  SUBCASE("probabilities sum to one") {
    const auto pmf = exact_model_pmf_normal(synthetic_dataset("sixteen", 1));
    CHECK(pmf.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pmf.probs.size() == 16);
  }
  SUBCASE("strong single-predictor signal selects {1}") {
    SyntheticOptions o;
    o.n = 60;
    o.p_pred = 3;
    o.beta = Eigen::Vector3d(2.0, 0.0, 0.0);
    o.seed = 17;
    const auto raw = generate_synthetic(o);
    const auto pmf = exact_model_pmf_normal(make_dataset(raw.y, raw.X));
    CHECK(pmf.mode() == ModelId(1, 3));
  }
  SUBCASE("invariant to row order") {
    const auto raw = generate_synthetic(synthetic_preset("sixteen", 4));
    Eigen::PermutationMatrix<Eigen::Dynamic> P(raw.y.size());
    P.setIdentity();
    std::reverse(P.indices().data(), P.indices().data() + P.size());
    const Dataset a = make_dataset(raw.y, raw.X), b = make_dataset(P * raw.y, P * raw.X);
    for (const auto& k : all_models(4))
      CHECK(normal_log_evidence(k, a) == doctest::Approx(normal_log_evidence(k, b)).epsilon(1e-11));
  }
  SUBCASE("perfect fit is reported, not silently infinite") {
    Eigen::MatrixXd X(6, 1);
    X << 1, 2, 3, 4, 5, 7;
    const Eigen::VectorXd y = 2.0 * X.col(0).array() + 1.0;
    const Dataset d = make_dataset(y, X);
    CHECK_THROWS_AS(normal_log_evidence(ModelId(1, 1), d), InfiniteEvidenceError);
  }
}

TEST_CASE("normal conditionals") {
  const Dataset d = synthetic_dataset("sixteen", 8);
  const ModelId k(0b0101, 4);
  const NormalConditionals nc = normal_conditionals(k, d);
  const ModelPosterior post(ModelSpec::normal(), k, d);
  SUBCASE("eta_hat is the joint maximiser at beta_hat") {
    ParamVector x(k.dim() + 1);
    x << nc.beta_hat, nc.eta_hat(d.n());
    const double top = post.value(x);
    for (double h : {-1e-3, 1e-3}) {
      ParamVector y = x;
      y[k.dim()] += h;
      CHECK(post.value(y) < top);
    }
    Eigen::VectorXd g;
    post.value_and_gradient(x, g);
    CHECK(g.norm() < 1e-9);
  }
  SUBCASE("moments of draws") {
    Stream rng(2024);
    const int M = 100000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k.dim() + 1), sq = sum;
    for (int i = 0; i < M; ++i) {
      const ParamVector x = nc.sample(rng);
      sum += x;
      sq += x.cwiseAbs2();
    }
    const Eigen::VectorXd mean = sum / M;
    const Eigen::VectorXd se = ((sq / M - mean.cwiseAbs2()) / M).cwiseSqrt();
    for (Eigen::Index j = 0; j < k.dim(); ++j) CHECK(std::abs(mean[j] - nc.beta_hat[j]) < 3 * se[j]);
    CHECK(std::abs(mean[k.dim()] - nc.mean_eta()) < 3 * se[k.dim()]);
  }
  SUBCASE("eta density is normalised") {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double e0 = nc.eta_hat(d.n());
    const double total =
        GK::integrate([&](double e) { return std::exp(nc.eta_log_density(e)); }, e0 - 3, e0 + 3, 10, 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("dimension mismatch is reported") {
  const Dataset d = synthetic_dataset("sixteen", 1);
  CHECK_THROWS_AS(log_unnorm_posterior(ModelSpec::normal(), ModelId(1, 4), Eigen::VectorXd::Zero(2), d),
                  DimensionError);
}
