#pragma once

#include <filesystem>
#include <vector>

#include "exirt/dataset.hpp"
#include "exirt/ensemble.hpp"
#include "exirt/irt.hpp"
#include "exirt/perturbation.hpp"
#include "exirt/rank.hpp"
#include "exirt/search.hpp"

namespace exirt {

struct ExplainConfig {
  std::vector<VariationKind> kinds{VariationKind::negate, VariationKind::binning};
  int max_arity = 2;
  std::uint64_t base_seed = 0;
  IrtConfig irt;
  SearchMethod search = SearchMethod::golden;
  VariationSettings variation;
};

struct ExplainReport {
  AttributeRank rank;
  RespondentPlan plan;
  ResponseMatrix responses;
  FitResult fit;
  std::vector<double> theta;        // per respondent
  std::vector<double> total_score;  // per respondent
  std::vector<int> covering_respondents;  // per attribute, in model feature order
};

/// Attribute relevance by item response theory: perturbed copies of the model
/// answer the test instances, item parameters and abilities are fitted, and
/// each attribute is scored by the mean Total Score of the respondents that
/// perturbed it. Lower score means more relevant; the rank is ascending.
ExplainReport explain(const TrainedEnsemble& model, const Dataset& train, const Dataset& test,
                      const ExplainConfig& cfg = {});

/// Writes rank.csv, item_parameters.csv, respondents.csv, plan.csv and rank.svg.
void export_report(const ExplainReport& report, const std::filesystem::path& out_dir);

}  // namespace exirt
