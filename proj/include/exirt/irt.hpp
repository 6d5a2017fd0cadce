#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exirt/dataset.hpp"
#include "exirt/ensemble.hpp"
#include "exirt/perturbation.hpp"
#include "exirt/search.hpp"

namespace exirt {

/// Dichotomous respondents x items matrix. Cell (j, i) is 1 when respondent j
/// answered item i correctly.
class ResponseMatrix {
 public:
  ResponseMatrix() = default;
  ResponseMatrix(std::size_t respondents, std::size_t items);

  std::size_t respondents() const { return respondents_; }
  std::size_t items() const { return items_; }

  std::uint8_t operator()(std::size_t j, std::size_t i) const { return cells_[j * items_ + i]; }
  void set(std::size_t j, std::size_t i, bool correct) { cells_[j * items_ + i] = correct ? 1 : 0; }
  std::span<const std::uint8_t> row(std::size_t j) const { return {cells_.data() + j * items_, items_}; }

  std::vector<int> respondent_ids;
  std::vector<int> item_ids;

  friend bool operator==(const ResponseMatrix&, const ResponseMatrix&) = default;

 private:
  std::size_t respondents_ = 0;
  std::size_t items_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Row j holds the correctness of `model` on `test` after respondent j's variation.
ResponseMatrix build_response_matrix(const RespondentPlan& plan, const TrainedEnsemble& model, const Dataset& test,
                                     const std::vector<ColumnStats>& train_stats,
                                     const VariationSettings& settings = {});

struct ItemParams {
  double a = 1.0;  // discrimination
  double b = 0.0;  // difficulty
  double c = 0.0;  // guessing
};

struct ItemParameters {
  std::vector<ItemParams> items;
  std::size_t size() const { return items.size(); }
};

struct IrtBounds {
  double a_min = 0.01, a_max = 4.0;
  double b_min = -4.0, b_max = 4.0;
  double c_min = 0.0, c_max = 0.5;
};

/// Weak priors on discrimination (lognormal) and guessing (Beta). With them
/// enabled the EM maximizes the marginal log-posterior of the item parameters.
struct ItemPriors {
  bool enabled = true;
  double a_log_mean = 0.0;
  double a_log_sd = 0.5;
  double c_alpha = 2.0;
  double c_beta = 10.0;
};

struct IrtConfig {
  int quadrature_points = 40;
  int max_iter = 50;
  double tol = 1e-4;
  IrtBounds bounds;
  ItemPriors priors;
};

/// c + (1 - c) / (1 + exp(-a (theta - b)))
double icc_probability(double theta, double a, double b, double c);
inline double icc_probability(double theta, const ItemParams& p) { return icc_probability(theta, p.a, p.b, p.c); }
/// Analytic derivative of icc_probability with respect to theta.
double icc_derivative(double theta, double a, double b, double c);

struct FitResult {
  ItemParameters params;
  /// Marginal log-likelihood before the first iteration and after each one.
  std::vector<double> log_likelihood;
  /// The EM objective at the same points: log_likelihood plus the item log-prior.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
  /// Items whose column is all 0 or all 1; their parameters sit at clamp bounds.
  std::vector<bool> degenerate;
};

/// Marginal maximum likelihood by Bock-Aitkin EM on a fixed quadrature grid
/// over the ability bounds with a standard-normal prior.
FitResult fit_item_parameters(const ResponseMatrix& rm, const IrtConfig& config = {});

/// Sum of item log-prior densities over non-skipped items (0 when priors are disabled).
double item_log_prior(const ItemParameters& params, const std::vector<bool>& skip, const ItemPriors& priors);

/// Marginal log-likelihood of the non-degenerate items under `params`.
double marginal_log_likelihood(const ResponseMatrix& rm, const ItemParameters& params, const std::vector<bool>& skip,
                               const IrtConfig& config = {});

struct AbilityEstimate {
  double theta = 0.0;
  SearchMethod method = SearchMethod::golden;
};

inline constexpr double kThetaMin = -4.0;
inline constexpr double kThetaMax = 4.0;

double ability_log_likelihood(std::span<const std::uint8_t> responses, const ItemParameters& items, double theta);

AbilityEstimate estimate_ability(std::span<const std::uint8_t> responses, const ItemParameters& items,
                                 SearchMethod method = SearchMethod::golden, double tol = 1e-4);

/// Sum of hit probabilities over correct items minus miss probabilities over wrong ones.
double total_score(std::span<const std::uint8_t> responses, double theta, const ItemParameters& items);

std::string item_parameters_csv(const ItemParameters& params, std::span<const int> item_ids);

}  // namespace exirt
