#include "exirt/explainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <sstream>

#include "exirt/svg.hpp"

namespace exirt {

ExplainReport explain(const TrainedEnsemble& model, const Dataset& train, const Dataset& test,
                      const ExplainConfig& cfg) {
  if (test.row_count() == 0) throw Error("explain: empty test set");
  if (train.attribute_names() != model.feature_names || test.attribute_names() != model.feature_names)
    throw Error("explain: model was not trained on this schema");
  const int f = static_cast<int>(model.feature_count());

  ExplainReport report;
  report.plan = build_plan(f, cfg.kinds, std::min(cfg.max_arity, f), cfg.base_seed);
  const auto stats = column_stats(train);
  report.responses = build_response_matrix(report.plan, model, test, stats, cfg.variation);
  report.fit = fit_item_parameters(report.responses, cfg.irt);

  const std::size_t n_resp = report.responses.respondents();
  report.theta.resize(n_resp);
  report.total_score.resize(n_resp);
  for (std::size_t j = 0; j < n_resp; ++j) {
    const auto row = report.responses.row(j);
    report.theta[j] = estimate_ability(row, report.fit.params, cfg.search).theta;
    report.total_score[j] = total_score(row, report.theta[j], report.fit.params);
  }

  // The original model (empty attribute set) covers no attribute and so never enters an average.
  std::vector<double> sums(static_cast<std::size_t>(f), 0.0);
  report.covering_respondents.assign(static_cast<std::size_t>(f), 0);
  for (std::size_t j = 0; j < n_resp; ++j) {
    for (int a : report.plan.specs[j].attribute_set) {
      sums[static_cast<std::size_t>(a)] += report.total_score[j];
      report.covering_respondents[static_cast<std::size_t>(a)] += 1;
    }
  }
  std::vector<double> scores(static_cast<std::size_t>(f));
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (report.covering_respondents[a] == 0) throw Error("explain: attribute without covering respondents");
    scores[a] = sums[a] / report.covering_respondents[a];
  }
  report.rank = make_rank("exirt", model.feature_names, scores, RankOrder::ascending);
  return report;
}

void export_report(const ExplainReport& report, const std::filesystem::path& out_dir) {
  write_file_atomic(out_dir / "rank.csv", rank_csv(report.rank));
  write_file_atomic(out_dir / "item_parameters.csv",
                    item_parameters_csv(report.fit.params, report.responses.item_ids));
  write_file_atomic(out_dir / "plan.csv", plan_csv(report.plan));

  std::ostringstream resp;
  resp << "respondent_id,theta,total_score\n";
  for (std::size_t j = 0; j < report.theta.size(); ++j)
    resp << report.responses.respondent_ids[j] << ',' << format_number(report.theta[j]) << ','
         << format_number(report.total_score[j]) << '\n';
  write_file_atomic(out_dir / "respondents.csv", resp.str());

  std::ostringstream em;
  em << "iteration,log_likelihood,objective\n";
  for (std::size_t k = 0; k < report.fit.log_likelihood.size(); ++k)
    em << k << ',' << format_number(report.fit.log_likelihood[k]) << ','
       << format_number(report.fit.objective[k]) << '\n';
  write_file_atomic(out_dir / "em_trace.csv", em.str());

  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& e : report.rank.entries) {
    labels.push_back(e.attribute);
    values.push_back(e.score);
  }
  write_file_atomic(out_dir / "rank.svg",
                    svg::bar_chart("eXirt attribute relevance", labels, values,
                                   "mean Total Score of covering respondents (lower = more relevant)"));
}

}  // namespace exirt
