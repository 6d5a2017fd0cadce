#include <doctest.h>

#include <fstream>
#include <sstream>

#include "exirt/baselines.hpp"
#include "exirt/explainer.hpp"
#include "helpers.hpp"

using namespace exirt;
using testing::make_dataset;
using testing::numeric_column;

namespace {

// y = x1 AND x2 on 0/1 columns plus an independent uniform column
Dataset planted(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<double> x1, x2, noise;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    x1.push_back(uniform01(rng) < 0.5);
    x2.push_back(uniform01(rng) < 0.5);
    noise.push_back(uniform01(rng));
    y.push_back(x1.back() == 1 && x2.back() == 1);
  }
  return make_dataset({numeric_column("x1", x1), numeric_column("x2", x2), numeric_column("noise", noise)}, y);
}

TrainedEnsemble planted_forest(const Dataset& train) {
  Hyperparameters h = Hyperparameters::random_forest_defaults();
  h.n_trees = 30;
  h.max_features = 3;
  return train_random_forest(train, h, 42);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("response matrix rows") {
  const auto [train, test] = split(planted(300, 1), 0.3, 1);
  const auto model = planted_forest(train);
  REQUIRE_FALSE(model.uses_feature(2));
  const auto plan = build_plan(3, {VariationKind::negate, VariationKind::binning}, 2, 0);
  const auto rm = build_response_matrix(plan, model, test, column_stats(train));
  CHECK(rm.respondents() == 1 + 6 + 6);
  CHECK(rm.items() == test.row_count());
  for (std::size_t i = 0; i < rm.items(); ++i) CHECK(rm(0, i) == 1);
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (plan.specs[j].attribute_set != std::vector<int>{2}) continue;
    for (std::size_t i = 0; i < rm.items(); ++i) CHECK(rm(j, i) == rm(0, i));
  }
}

TEST_CASE("unused attribute ranks last") {
  const auto [train, test] = split(planted(400, 2), 0.3, 2);
  const auto model = planted_forest(train);
  REQUIRE_FALSE(model.uses_feature(2));
  const auto report = explain(model, train, test);
  report.rank.validate();
  CHECK(report.rank.find("noise").position == 3);
  CHECK(report.covering_respondents == std::vector<int>{6, 6, 6});
  CHECK(report.theta.size() == report.plan.size());
  CHECK(report.rank.measure == "exirt");
}

TEST_CASE("single attribute and duplicate attributes") {
  Rng rng = make_rng(3);
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(uniform01(rng) * 2 - 0.5);
    y.push_back(x.back() + 0.3 * standard_normal(rng) > 0.5);
  }
  const Dataset base = make_dataset({numeric_column("x1", x)}, y);
  {
    const Dataset one = make_dataset({base.columns[0]}, base.labels);
    const auto [train, test] = split(one, 0.3, 3);
    Hyperparameters h = Hyperparameters::random_forest_defaults();
    h.n_trees = 10;
    const auto model = train_random_forest(train, h, 3);
    ExplainConfig cfg;
    cfg.max_arity = 1;
    const auto report = explain(model, train, test, cfg);
    REQUIRE(report.rank.size() == 1);
    CHECK(report.rank.entries[0].position == 1);
  }
  {
    AttributeColumn twin = base.columns[0];
    twin.name = "a_twin";
    AttributeColumn orig = base.columns[0];
    orig.name = "b_orig";
    const Dataset dup = make_dataset({orig, twin}, base.labels);
    const auto [train, test] = split(dup, 0.3, 3);
    // one stump per copy, equal weights
    TrainedEnsemble model;
    model.family = Family::random_forest;
    model.feature_names = {"b_orig", "a_twin"};
    model.categorical = {false, false};
    for (int f = 0; f < 2; ++f)
      model.trees.emplace_back(std::vector<TreeNode>{{f, 0.5, {}, 1, 2, 0.0}, {-1, 0, {}, -1, -1, 0.0},
                                                     {-1, 0, {}, -1, -1, 0.8}},
                               1);
    model.tree_weights = {0.5, 0.5};
    ExplainConfig cfg;
    cfg.kinds = {VariationKind::negate};
    cfg.max_arity = 1;
    const auto report = explain(model, train, test, cfg);
    const auto& a = report.rank.find("a_twin");
    const auto& b = report.rank.find("b_orig");
    CHECK(a.score == b.score);
    CHECK(a.position == 1);
    CHECK(b.position == 2);
  }
}

TEST_CASE("exported report is deterministic") {
  const auto [train, test] = split(planted(200, 4), 0.3, 4);
  const auto model = planted_forest(train);
  const auto dir = testing::scratch_dir();
  export_report(explain(model, train, test), dir / "rep1");
  export_report(explain(model, train, test), dir / "rep2");
  for (const char* f : {"rank.csv", "item_parameters.csv", "respondents.csv", "plan.csv", "rank.svg"}) {
    CAPTURE(f);
    CHECK(std::filesystem::exists(dir / "rep1" / f));
    CHECK(slurp(dir / "rep1" / f) == slurp(dir / "rep2" / f));
  }
  const auto back = read_rank_csv(dir / "rep1" / "rank.csv");
  CHECK(back.entries.size() == 3);
}

TEST_CASE("permutation importance") {
  const auto [train, test] = split(planted(300, 5), 0.3, 5);
  const auto model = planted_forest(train);
  const auto r = permutation_importance_rank(model, test, 3, 7);
  CHECK(r.find("noise").score == 0.0);
  CHECK(r.find("noise").position == 3);
  CHECK(rank_csv(permutation_importance_rank(model, test, 1, 9)) ==
        rank_csv(permutation_importance_rank(model, test, 1, 9)));

  // label equals the attribute
  Rng rng = make_rng(8);
  std::vector<double> x, z;
  std::vector<int> y;
  for (int i = 0; i < 400; ++i) {
    y.push_back(i % 2);
    x.push_back(i % 2);
    z.push_back(uniform01(rng));
  }
  const auto [tr, te] = split(make_dataset({numeric_column("x", x), numeric_column("z", z)}, y), 0.5, 8);
  Hyperparameters h = Hyperparameters::random_forest_defaults();
  h.n_trees = 10;
  h.max_features = 2;
  const auto m = train_random_forest(tr, h, 8);
  const auto rx = permutation_importance_rank(m, te, 20, 8);
  CHECK(rx.find("x").position == 1);
  CHECK(rx.find("x").score == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("leave one covariate out") {
  Rng rng = make_rng(10);
  std::vector<double> x, noise, twin, constant;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    const double v = uniform01(rng);
    x.push_back(v);
    twin.push_back(v);
    noise.push_back(uniform01(rng));
    constant.push_back(1.0);
    y.push_back(v > 0.5);
  }
  Hyperparameters h = Hyperparameters::random_forest_defaults();
  h.n_trees = 20;
  {
    const auto [tr, te] = split(make_dataset({numeric_column("x", x), numeric_column("noise", noise)}, y), 0.3, 1);
    const auto r = loco_rank(tr, te, Family::random_forest, h, 1);
    CHECK(r.find("x").position == 1);
    CHECK(r.find("x").score > 0.3);
  }
  {
    const auto [tr, te] = split(
        make_dataset({numeric_column("x", x), numeric_column("twin", twin), numeric_column("c", constant)}, y), 0.3, 1);
    const auto r = loco_rank(tr, te, Family::random_forest, h, 1);
    CHECK(std::abs(r.find("x").score) <= 0.05);
    CHECK(std::abs(r.find("twin").score) <= 0.05);
    CHECK(r.find("c").score == 0.0);
  }
}

TEST_CASE("information gain") {
  const std::vector<int> labels{0, 0, 1, 1, 0, 1, 0, 1};
  CHECK(information_gain(std::vector<double>{0, 0, 1, 1, 0, 1, 0, 1}, labels, false) == doctest::Approx(1.0));
  CHECK(information_gain(std::vector<double>{3, 3, 3, 3, 3, 3, 3, 3}, labels, false) == 0.0);
  // halves at 75/25 and 25/75
  const std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 1};
  const std::vector<double> v{0, 0, 0, 0, 1, 1, 1, 1};
  CHECK(information_gain(v, y, false) == doctest::Approx(0.18872187554086717).epsilon(1e-12));
  CHECK(information_gain(v, y, true) == doctest::Approx(0.18872187554086717).epsilon(1e-12));

  const Dataset ds = make_dataset({numeric_column("v", v), numeric_column("w", {5, 1, 5, 1, 5, 1, 5, 1})}, y);
  const auto r = info_gain_rank(ds);
  CHECK(r.find("v").position == 1);
}
