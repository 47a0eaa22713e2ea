#include "irj/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "irj/errors.hpp"
#include "irj/rng.hpp"

namespace irj {
namespace {

void check_enumerable(int p_pred) {
  if (p_pred > kMaxEnumeratedPredictors)
    throw OracleError("enumeration oracle supports at most " +
                      std::to_string(kMaxEnumeratedPredictors) + " predictors, data has " +
                      std::to_string(p_pred));
}

ModelPmf normalise(int p_pred, const std::vector<std::uint64_t>& bits, const std::vector<double>& logw,
                   PmfSource source) {
  const double lse = log_sum_exp(logw);
  ModelPmf pmf;
  pmf.p_pred = p_pred;
  pmf.source = source;
  for (std::size_t i = 0; i < bits.size(); ++i) pmf.probs[bits[i]] = std::exp(logw[i] - lse);
  return pmf;
}

/// Composite Gauss-Legendre nodes and weights on [-1, 1].
void gl_rule(int panels, std::vector<double>& nodes, std::vector<double>& weights) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& ab = Rule::abscissa();
  const auto& wt = Rule::weights();
  nodes.clear();
  weights.clear();
  const double width = 2.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = -1.0 + (p + 0.5) * width;
    for (std::size_t i = 0; i < ab.size(); ++i) {
      // 20 is even: no node at zero, every abscissa appears with both signs
      for (double sgn : {-1.0, 1.0}) {
        nodes.push_back(mid + sgn * ab[i] * 0.5 * width);
        weights.push_back(wt[i] * 0.5 * width);
      }
    }
  }
}

/// Sum of w * exp(f - offset) over a tensor grid, dims handled recursively.
double tensor_sum(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x,
                  Eigen::Index dim, const Eigen::VectorXd& centre, const Eigen::VectorXd& half,
                  const std::vector<double>& nodes, const std::vector<double>& weights,
                  double offset) {
  if (dim == x.size()) return std::exp(f(x) - offset);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x[dim] = centre[dim] + half[dim] * nodes[i];
    s += weights[i] * half[dim] *
         tensor_sum(f, x, dim + 1, centre, half, nodes, weights, offset);
  }
  return s;
}

/// Defensive importance proposal: an equal mixture of the Laplace Gaussian and a
/// multivariate t (nu = 4, scale 2x the Laplace scale) sharing its centre. The
/// t component keeps the weights bounded when the posterior tails are heavier
/// than Gaussian, as the LPTN posteriors are.
class DefensiveProposal {
 public:
  explicit DefensiveProposal(const ModelInfo& info)
      : mean_(info.map), L_(info.inv_chol), d_(static_cast<double>(info.map.size())),
        half_log_det_(-0.5 * info.log_det_info) {}

  Eigen::VectorXd sample(Stream& rng) const {
    const bool heavy = rng.uniform() < 0.5;
    const Eigen::VectorXd z = rng.normal_vector(mean_.size());
    if (!heavy) return mean_ + L_ * z;
    const double w = 2.0 * rng.gamma(kNu / 2) / kNu;  // chi^2_nu / nu
    return mean_ + (kScale / std::sqrt(w)) * (L_ * z);
  }

  double log_density(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd u = L_.triangularView<Eigen::Lower>().solve(x - mean_);
    const double q = u.squaredNorm();
    const double lg = -0.5 * d_ * std::log(2 * M_PI) - half_log_det_ - 0.5 * q;
    const double lt = std::lgamma((kNu + d_) / 2) - std::lgamma(kNu / 2) - 0.5 * d_ * std::log(kNu * M_PI) -
                      half_log_det_ - d_ * std::log(kScale) -
                      0.5 * (kNu + d_) * std::log1p(q / (kScale * kScale * kNu));
    return log_sum_exp({lg, lt}) - std::log(2.0);
  }

 private:
  static constexpr double kNu = 4.0;
  static constexpr double kScale = 2.0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd L_;
  double d_;
  double half_log_det_;
};

}  // namespace

ModelPmf exact_model_pmf_normal(const Dataset& data) {
  check_enumerable(data.p_pred());
  const auto models = all_models(data.p_pred());
  std::vector<std::uint64_t> bits;
  std::vector<double> logw;
  for (const auto& k : models) {
    bits.push_back(k.bits);
    logw.push_back(normal_log_evidence(k, data));
  }
  return normalise(data.p_pred(), bits, logw, PmfSource::kExactNormal);
}

ModelPmf golden_model_pmf(const Dataset& data, const ModelSpec& spec, std::size_t budget,
                          std::uint64_t seed, GoldenReport* report, double min_ess) {
  check_enumerable(data.p_pred());
  if (budget < 2) throw OracleError("importance-sampling budget too small");
  std::vector<std::uint64_t> bits;
  std::vector<double> logw;
  std::vector<std::string> low;
  for (const auto& k : all_models(data.p_pred())) {
    const ModelInfo info = build_model_info(spec, k, data);
    const DefensiveProposal q(info);
    const ModelPosterior post(spec, k, data);
    Stream rng(StreamKey{seed, 0, k.bits, Purpose::kOracle, 0, 0, 0});
    std::vector<double> lw(budget);
    for (std::size_t i = 0; i < budget; ++i) {
      const Eigen::VectorXd x = q.sample(rng);
      lw[i] = post.value(x) - q.log_density(x);
    }
    const double lme = log_mean_exp(lw);
    // ESS = (sum w)^2 / sum w^2, computed relative to the max weight
    const double m = *std::max_element(lw.begin(), lw.end());
    double s1 = 0.0, s2 = 0.0;
    for (double v : lw) {
      const double w = std::exp(v - m);
      s1 += w;
      s2 += w * w;
    }
    const double ess = s1 * s1 / s2;
    if (report) {
      report->ess[k.bits] = ess;
      report->log_evidence[k.bits] = lme;
    }
    if (ess < min_ess) low.push_back(format_model(k) + " (ESS " + std::to_string(ess) + ")");
    bits.push_back(k.bits);
    logw.push_back(lme);
  }
  if (!low.empty()) {
    std::string msg = "importance sampling too degenerate for " + std::to_string(low.size()) + " model(s):";
    for (const auto& s : low) msg += " " + s;
    throw LowEssError(msg, low);
  }
  return normalise(data.p_pred(), bits, logw,
                   spec.kind == ModelKind::kLptn ? PmfSource::kGoldenLptn : PmfSource::kOther);
}

ProposalPmf exact_proposal_pmf(const ModelPmf& pmf, const ModelId& k, Balancing h) {
  const auto nb = neighborhood(k);
  const double lk = std::log(pmf(k));
  std::vector<double> lr(nb.size());
  for (std::size_t i = 0; i < nb.size(); ++i) lr[i] = nb[i] == k ? 0.0 : std::log(pmf(nb[i])) - lk;
  return balanced_pmf(nb, lr, h);
}

IdealChainResult ideal_mh_model_chain(const ModelPmf& pmf, Balancing h, std::size_t iters,
                                      std::uint64_t seed) {
  IdealChainResult res;
  res.trace.reserve(iters);
  std::unordered_map<std::uint64_t, ProposalPmf> memo;
  auto g = [&](const ModelId& k) -> const ProposalPmf& {
    auto it = memo.find(k.bits);
    if (it == memo.end()) it = memo.emplace(k.bits, exact_proposal_pmf(pmf, k, h)).first;
    return it->second;
  };
  ModelId k = pmf.mode();
  for (std::size_t it = 0; it < iters; ++it) {
    const IterationRng rng(seed, 0, it);
    Stream choice = rng.stream(Purpose::kModelChoice);
    const ProposalPmf& gk = g(k);
    const ModelId k2 = gk.sample(choice.uniform());
    if (k2 != k) {
      const ProposalPmf& gk2 = g(k2);
      const double log_alpha =
          std::log(pmf(k2)) - std::log(pmf(k)) + gk2.log_prob(k) - gk.log_prob(k2);
      const double alpha = std::min(1.0, std::exp(log_alpha));
      if (h != Balancing::kIdentity) {
        const double limit = std::min(1.0, std::exp(gk.log_c - gk2.log_c));
        res.max_identity_gap = std::max(res.max_identity_gap, std::abs(alpha - limit));
      }
      ++res.switch_proposals;
      Stream acc = rng.stream(Purpose::kAccept);
      if (acc.uniform() < alpha) {
        k = k2;
        ++res.switch_accepts;
      }
    }
    res.trace.push_back(k);
  }
  return res;
}

double ideal_expected_switch_acceptance(const ModelPmf& pmf, Balancing h) {
  double num = 0.0, den = 0.0;
  for (const auto& [b, p] : pmf.probs) {
    if (!(p > 0.0)) continue;
    const ModelId k(b, pmf.p_pred);
    const ProposalPmf gk = exact_proposal_pmf(pmf, k, h);
    for (std::size_t i = 0; i < gk.support.size(); ++i) {
      const ModelId& k2 = gk.support[i];
      if (k2 == k || !(pmf(k2) > 0.0)) continue;
      const ProposalPmf gk2 = exact_proposal_pmf(pmf, k2, h);
      const double a = std::min(
          1.0, std::exp(std::log(pmf(k2)) - std::log(p) + gk2.log_prob(k) - gk.log_probs[i]));
      num += p * gk.probs[i] * a;
      den += p * gk.probs[i];
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

double box_log_integral(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int panels,
                        double log_offset) {
  if (lo.size() > 4) throw OracleError("tensor quadrature limited to 4 dimensions");
  std::vector<double> nodes, weights;
  gl_rule(panels, nodes, weights);
  const Eigen::VectorXd centre = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  Eigen::VectorXd x(lo.size());
  return log_offset + std::log(tensor_sum(f, x, 0, centre, half, nodes, weights, log_offset));
}

QuadratureResult brute_force_evidence(const ModelSpec& spec, const ModelId& k, const Dataset& data,
                                      const QuadratureOptions& opt) {
  if (k.dim() > 3)
    throw OracleError("brute-force evidence supports at most 3 coefficients (4 integration dims)");
  const ModelPosterior post(spec, k, data);
  const ParamVector map = map_estimate(spec, k, data);
  const Eigen::Index d = k.dim();
  const double sd_eta = 1.0 / std::sqrt(2.0 * static_cast<double>(data.n()));
  const Eigen::VectorXd sd_beta0 = post.gram().inverse().diagonal().cwiseSqrt();
  const Eigen::VectorXd beta_c = map.head(d);
  const double offset = post.value(map);

  auto integrate = [&](int panels) {
    std::vector<double> nodes, weights;
    gl_rule(panels, nodes, weights);
    const double lo = map[d] - opt.eta_lower * sd_eta, hi = map[d] + opt.eta_upper * sd_eta;
    const double ec = 0.5 * (lo + hi), eh = 0.5 * (hi - lo);
    Eigen::VectorXd beta(d), x(d + 1);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double eta = ec + eh * nodes[i];
      // beta box scales with sigma so the conditional spread is always covered
      const Eigen::VectorXd half = opt.beta_halfwidth * std::exp(eta) * sd_beta0;
      auto f = [&](const Eigen::VectorXd& b) {
        x.head(d) = b;
        x[d] = eta;
        return post.value(x);
      };
      total += weights[i] * eh * tensor_sum(f, beta, 0, beta_c, half, nodes, weights, offset);
    }
    return offset + std::log(total);
  };
  const double coarse = integrate(opt.panels);
  const double fine = integrate(opt.panels + 1);
  return {fine, std::abs(std::expm1(coarse - fine))};
}

void write_pmf(const std::string& path, const ModelPmf& pmf) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write PMF file '" + path + "'");
  out << "# p_pred=" << pmf.p_pred << " source=" << to_string(pmf.source) << '\n'
      << std::setprecision(17);
  for (const auto& [b, p] : pmf.probs) out << b << ' ' << p << '\n';
}

ModelPmf read_pmf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open PMF file '" + path + "'");
  ModelPmf pmf;
  pmf.p_pred = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        if (tok.rfind("p_pred=", 0) == 0) pmf.p_pred = std::stoi(tok.substr(7));
        if (tok.rfind("source=", 0) == 0) pmf.source = parse_pmf_source(tok.substr(7));
      }
      continue;
    }
    std::istringstream ss(line);
    std::uint64_t b;
    double p;
    if (!(ss >> b >> p)) throw DataError("malformed PMF line", lineno);
    pmf.probs[b] = p;
  }
  if (pmf.p_pred < 0) throw DataError("PMF file lacks its p_pred header", 1);
  return pmf;
}

}  // namespace irj
