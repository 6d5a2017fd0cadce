#include "exirt/irt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "exirt/log.hpp"

namespace exirt {

ResponseMatrix::ResponseMatrix(std::size_t respondents, std::size_t items)
    : respondents_(respondents), items_(items), cells_(respondents * items, 0) {
  respondent_ids.resize(respondents);
  item_ids.resize(items);
  for (std::size_t j = 0; j < respondents; ++j) respondent_ids[j] = static_cast<int>(j);
  for (std::size_t i = 0; i < items; ++i) item_ids[i] = static_cast<int>(i);
}

ResponseMatrix build_response_matrix(const RespondentPlan& plan, const TrainedEnsemble& model, const Dataset& test,
                                     const std::vector<ColumnStats>& train_stats, const VariationSettings& settings) {
  if (static_cast<std::size_t>(plan.attribute_count) != model.feature_count() ||
      test.attribute_count() != model.feature_count() || train_stats.size() != model.feature_count())
    throw Error("build_response_matrix: plan, model and test widths disagree");
  const Matrix x = test.features();
  ResponseMatrix rm(plan.size(), test.row_count());
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const auto& spec = plan.specs[j];
    rm.respondent_ids[j] = spec.respondent_id;
    std::vector<int> pred;
    try {
      pred = model.predict(apply_variation(x, spec, train_stats, settings));
    } catch (const std::exception& e) {
      throw Error(fmt::format("respondent {}: {}", spec.respondent_id, e.what()));
    }
    for (std::size_t i = 0; i < pred.size(); ++i) rm.set(j, i, pred[i] == test.labels[i]);
  }
  return rm;
}

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

Quadrature make_quadrature(int points) {
  if (points < 2) throw Error("quadrature needs at least 2 points");
  Quadrature q;
  std::vector<double> w(static_cast<std::size_t>(points));
  double total = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = kThetaMin + (kThetaMax - kThetaMin) * k / (points - 1);
    q.nodes.push_back(t);
    w[static_cast<std::size_t>(k)] = std::exp(-0.5 * t * t);
    total += w[static_cast<std::size_t>(k)];
  }
  for (double v : w) q.log_weights.push_back(std::log(v / total));
  return q;
}

ItemParams clamp_params(ItemParams p, const IrtBounds& b) {
  p.a = std::clamp(p.a, b.a_min, b.a_max);
  p.b = std::clamp(p.b, b.b_min, b.b_max);
  p.c = std::clamp(p.c, b.c_min, b.c_max);
  return p;
}

constexpr double kGuessFloor = 1e-9;

double param_log_prior(const ItemParams& p, const ItemPriors& pr) {
  if (!pr.enabled) return 0.0;
  const double la = std::log(p.a);
  const double z = (la - pr.a_log_mean) / pr.a_log_sd;
  const double c = std::clamp(p.c, kGuessFloor, 1.0 - kGuessFloor);
  return -la - 0.5 * z * z + (pr.c_alpha - 1.0) * std::log(c) + (pr.c_beta - 1.0) * std::log(1.0 - c);
}

// Gradient of the log-prior and a non-negative curvature (for the scoring matrix).
void param_log_prior_derivatives(const ItemParams& p, const ItemPriors& pr, double& ga, double& gc, double& ha,
                                 double& hc) {
  ga = gc = ha = hc = 0.0;
  if (!pr.enabled) return;
  const double s2 = pr.a_log_sd * pr.a_log_sd;
  const double dev = std::log(p.a) - pr.a_log_mean;
  ga = -1.0 / p.a - dev / (s2 * p.a);
  ha = std::max(0.0, ((1.0 - dev) / s2 - 1.0) / (p.a * p.a));
  const double c = std::clamp(p.c, kGuessFloor, 1.0 - kGuessFloor);
  gc = (pr.c_alpha - 1.0) / c - (pr.c_beta - 1.0) / (1.0 - c);
  hc = std::max(0.0, (pr.c_alpha - 1.0) / (c * c) + (pr.c_beta - 1.0) / ((1.0 - c) * (1.0 - c)));
}

// Expected complete-data log-likelihood of one item, given expected counts
// per quadrature node: n[q] respondents at node q, r[q] of them correct.
// The item log-prior is added when enabled.
double item_objective(const ItemParams& p, const Quadrature& quad, std::span<const double> n, std::span<const double> r,
                      const ItemPriors& priors) {
  double s = param_log_prior(p, priors);
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double prob = clamp_prob(icc_probability(quad.nodes[q], p));
    s += r[q] * std::log(prob) + (n[q] - r[q]) * std::log(1.0 - prob);
  }
  return s;
}

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Solves the system restricted to coordinates with free[k] set; others get 0.
Vec3 solve_free(Mat3 m, Vec3 rhs, const std::array<bool, 3>& free) {
  std::array<int, 3> idx{};
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (free[static_cast<std::size_t>(i)]) idx[static_cast<std::size_t>(k++)] = i;
  Vec3 out{0, 0, 0};
  if (k == 0) return out;
  // Dense Gaussian elimination with partial pivoting on the k x k block.
  std::array<std::array<double, 4>, 3> aug{};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) aug[i][j] = m[idx[i]][idx[j]];
    aug[i][3] = rhs[idx[i]];
  }
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int i = col + 1; i < k; ++i)
      if (std::abs(aug[i][col]) > std::abs(aug[piv][col])) piv = i;
    std::swap(aug[col], aug[piv]);
    if (std::abs(aug[col][col]) < 1e-300) return out;
    for (int i = 0; i < k; ++i) {
      if (i == col) continue;
      const double factor = aug[i][col] / aug[col][col];
      for (int j = col; j < 4; ++j) aug[i][j] -= factor * aug[col][j];
    }
  }
  for (int i = 0; i < k; ++i) out[idx[i]] = aug[i][3] / aug[i][i];
  return out;
}

// Projected Fisher scoring with backtracking. Only improving steps are taken,
// so the item objective never decreases.
ItemParams maximize_item(ItemParams p, const Quadrature& quad, std::span<const double> n, std::span<const double> r,
                         const IrtBounds& bounds, const ItemPriors& priors) {
  const Vec3 lo{bounds.a_min, bounds.b_min, bounds.c_min};
  const Vec3 hi{bounds.a_max, bounds.b_max, bounds.c_max};
  double current = item_objective(p, quad, n, r, priors);
  for (int inner = 0; inner < 25; ++inner) {
    Vec3 g{0, 0, 0};
    Mat3 info{};
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
      const double theta = quad.nodes[q];
      const double s = logistic(p.a * (theta - p.b));
      const double prob = clamp_prob(p.c + (1.0 - p.c) * s);
      const double ds = (1.0 - p.c) * s * (1.0 - s);
      const Vec3 grad_p{ds * (theta - p.b), -ds * p.a, 1.0 - s};
      const double denom = prob * (1.0 - prob);
      const double resid = (r[q] - n[q] * prob) / denom;
      for (int i = 0; i < 3; ++i) {
        g[i] += resid * grad_p[i];
        for (int j = 0; j < 3; ++j) info[i][j] += n[q] * grad_p[i] * grad_p[j] / denom;
      }
    }
    {
      double ga, gc, ha, hc;
      param_log_prior_derivatives(p, priors, ga, gc, ha, hc);
      g[0] += ga;
      g[2] += gc;
      info[0][0] += ha;
      info[2][2] += hc;
    }
    const Vec3 x{p.a, p.b, p.c};
    std::array<bool, 3> free{};
    for (int i = 0; i < 3; ++i) {
      const bool at_lo = x[i] <= lo[i] && g[i] <= 0.0;
      const bool at_hi = x[i] >= hi[i] && g[i] >= 0.0;
      free[i] = !(at_lo || at_hi);
    }
    double ridge = 1e-6;
    for (int i = 0; i < 3; ++i) ridge = std::max(ridge, 1e-8 * info[i][i]);
    for (int i = 0; i < 3; ++i) info[i][i] += ridge;

    const Vec3 newton = solve_free(info, g, free);
    Vec3 scaled{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      if (free[i]) scaled[i] = g[i] / info[i][i];

    bool improved = false;
    for (const Vec3& dir : {newton, scaled}) {
      double step = 1.0;
      for (int bt = 0; bt < 30 && !improved; ++bt, step *= 0.5) {
        ItemParams cand{x[0] + step * dir[0], x[1] + step * dir[1], x[2] + step * dir[2]};
        cand = clamp_params(cand, bounds);
        const double val = item_objective(cand, quad, n, r, priors);
        if (val > current) {
          const double gain = val - current;
          p = cand;
          current = val;
          improved = true;
          if (gain < 1e-10) return p;
        }
      }
      if (improved) break;
    }
    if (!improved) break;
  }
  return p;
}

}  // namespace

double icc_probability(double theta, double a, double b, double c) {
  return c + (1.0 - c) * logistic(a * (theta - b));
}

double icc_derivative(double theta, double a, double b, double c) {
  const double s = logistic(a * (theta - b));
  return (1.0 - c) * a * s * (1.0 - s);
}

double item_log_prior(const ItemParameters& params, const std::vector<bool>& skip, const ItemPriors& priors) {
  double s = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (skip.empty() || !skip[i]) s += param_log_prior(params.items[i], priors);
  return s;
}

double marginal_log_likelihood(const ResponseMatrix& rm, const ItemParameters& params, const std::vector<bool>& skip,
                               const IrtConfig& config) {
  const Quadrature quad = make_quadrature(config.quadrature_points);
  const std::size_t nq = quad.nodes.size();
  std::vector<double> logp(rm.items() * nq), logq(rm.items() * nq);
  for (std::size_t i = 0; i < rm.items(); ++i)
    for (std::size_t q = 0; q < nq; ++q) {
      const double p = clamp_prob(icc_probability(quad.nodes[q], params.items[i]));
      logp[i * nq + q] = std::log(p);
      logq[i * nq + q] = std::log(1.0 - p);
    }
  double ll = 0.0;
  std::vector<double> lj(nq);
  for (std::size_t j = 0; j < rm.respondents(); ++j) {
    for (std::size_t q = 0; q < nq; ++q) lj[q] = quad.log_weights[q];
    for (std::size_t i = 0; i < rm.items(); ++i) {
      if (!skip.empty() && skip[i]) continue;
      const double* src = rm(j, i) ? &logp[i * nq] : &logq[i * nq];
      for (std::size_t q = 0; q < nq; ++q) lj[q] += src[q];
    }
    const double mx = *std::max_element(lj.begin(), lj.end());
    double s = 0.0;
    for (double v : lj) s += std::exp(v - mx);
    ll += mx + std::log(s);
  }
  return ll;
}

FitResult fit_item_parameters(const ResponseMatrix& rm, const IrtConfig& config) {
  const std::size_t J = rm.respondents(), I = rm.items();
  if (J < 2 || I < 2) throw Error("fit_item_parameters: need at least 2 respondents and 2 items");
  const auto& bounds = config.bounds;

  FitResult out;
  out.params.items.resize(I);
  out.degenerate.assign(I, false);
  std::size_t informative = 0;
  bool any_one = false, any_zero = false;
  for (std::size_t i = 0; i < I; ++i) {
    std::size_t correct = 0;
    for (std::size_t j = 0; j < J; ++j) correct += rm(j, i);
    any_one = any_one || correct > 0;
    any_zero = any_zero || correct < J;
    if (correct == 0 || correct == J) {
      out.degenerate[i] = true;
      out.params.items[i] = {bounds.a_min, correct == J ? bounds.b_min : bounds.b_max, bounds.c_min};
      continue;
    }
    ++informative;
    const double p = std::clamp(static_cast<double>(correct) / static_cast<double>(J), 0.02, 0.98);
    out.params.items[i] = clamp_params({1.0, -std::log(p / (1.0 - p)), 0.1}, bounds);
  }
  if (!any_one || !any_zero) throw Error("fit_item_parameters: response matrix needs at least one 0 and one 1");
  if (informative == 0) throw Error("no discrimination signal: every respondent gave the same answers");

  const Quadrature quad = make_quadrature(config.quadrature_points);
  const std::size_t nq = quad.nodes.size();
  std::vector<double> logp(I * nq), logq(I * nq);
  std::vector<double> post(J * nq);
  std::vector<double> expected_n(nq);
  std::vector<double> expected_r(I * nq);

  // E-step: posterior over nodes for every respondent; returns the marginal log-likelihood.
  auto e_step = [&]() {
    for (std::size_t i = 0; i < I; ++i) {
      if (out.degenerate[i]) continue;
      for (std::size_t q = 0; q < nq; ++q) {
        const double p = clamp_prob(icc_probability(quad.nodes[q], out.params.items[i]));
        logp[i * nq + q] = std::log(p);
        logq[i * nq + q] = std::log(1.0 - p);
      }
    }
    double ll = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      double* lj = &post[j * nq];
      for (std::size_t q = 0; q < nq; ++q) lj[q] = quad.log_weights[q];
      for (std::size_t i = 0; i < I; ++i) {
        if (out.degenerate[i]) continue;
        const double* src = rm(j, i) ? &logp[i * nq] : &logq[i * nq];
        for (std::size_t q = 0; q < nq; ++q) lj[q] += src[q];
      }
      const double mx = *std::max_element(lj, lj + nq);
      double s = 0.0;
      for (std::size_t q = 0; q < nq; ++q) {
        lj[q] = std::exp(lj[q] - mx);
        s += lj[q];
      }
      for (std::size_t q = 0; q < nq; ++q) lj[q] /= s;
      ll += mx + std::log(s);
    }
    std::fill(expected_n.begin(), expected_n.end(), 0.0);
    std::fill(expected_r.begin(), expected_r.end(), 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double* pj = &post[j * nq];
      for (std::size_t q = 0; q < nq; ++q) expected_n[q] += pj[q];
      for (std::size_t i = 0; i < I; ++i) {
        if (out.degenerate[i] || !rm(j, i)) continue;
        double* ri = &expected_r[i * nq];
        for (std::size_t q = 0; q < nq; ++q) ri[q] += pj[q];
      }
    }
    return ll;
  };

  double ll = e_step();
  double obj = ll + item_log_prior(out.params, out.degenerate, config.priors);
  out.log_likelihood.push_back(ll);
  out.objective.push_back(obj);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    for (std::size_t i = 0; i < I; ++i) {
      if (out.degenerate[i]) continue;
      out.params.items[i] = maximize_item(out.params.items[i], quad, expected_n,
                                          std::span<const double>(&expected_r[i * nq], nq), bounds, config.priors);
    }
    ll = e_step();
    const double next = ll + item_log_prior(out.params, out.degenerate, config.priors);
    out.log_likelihood.push_back(ll);
    out.objective.push_back(next);
    out.iterations = iter + 1;
    if (next < obj - 1e-8 * std::max(1.0, std::abs(obj)))
      log::warn(fmt::format("EM objective decreased at iteration {}: {} -> {}", iter + 1, obj, next));
    const double improvement = next - obj;
    obj = next;
    if (improvement < config.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double ability_log_likelihood(std::span<const std::uint8_t> responses, const ItemParameters& items, double theta) {
  if (responses.size() != items.size()) throw Error("ability: response length does not match item count");
  double s = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const double p = clamp_prob(icc_probability(theta, items.items[i]));
    s += responses[i] ? std::log(p) : std::log(1.0 - p);
  }
  return s;
}

AbilityEstimate estimate_ability(std::span<const std::uint8_t> responses, const ItemParameters& items,
                                 SearchMethod method, double tol) {
  if (responses.size() != items.size()) throw Error("estimate_ability: response length does not match item count");
  auto f = [&](double theta) { return ability_log_likelihood(responses, items, theta); };
  const auto r = maximize(f, kThetaMin, kThetaMax, method, tol);
  return {r.x, method};
}

double total_score(std::span<const std::uint8_t> responses, double theta, const ItemParameters& items) {
  if (responses.size() != items.size()) throw Error("total_score: response length does not match item count");
  double t = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const double p = icc_probability(theta, items.items[i]);
    t += responses[i] ? p : -(1.0 - p);
  }
  return t;
}

std::string item_parameters_csv(const ItemParameters& params, std::span<const int> item_ids) {
  std::ostringstream out;
  out << "item_id,a,b,c\n";
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.items[i];
    out << (i < item_ids.size() ? item_ids[i] : static_cast<int>(i)) << ',' << format_number(p.a) << ','
        << format_number(p.b) << ',' << format_number(p.c) << '\n';
  }
  return out.str();
}

}  // namespace exirt
