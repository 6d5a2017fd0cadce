#include <doctest.h>

#include <cmath>

#include "exirt/irt.hpp"
#include "exirt/search.hpp"
#include "helpers.hpp"

using namespace exirt;

namespace {

ItemParameters items_of(std::vector<ItemParams> v) { return ItemParameters{std::move(v)}; }

// respondents with ability spread answer items of spread difficulty
ResponseMatrix simulate(std::size_t respondents, const std::vector<ItemParams>& items, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  ResponseMatrix rm(respondents, items.size());
  for (std::size_t j = 0; j < respondents; ++j) {
    const double theta = standard_normal(rng);
    for (std::size_t i = 0; i < items.size(); ++i) rm.set(j, i, uniform01(rng) < icc_probability(theta, items[i]));
  }
  return rm;
}

std::vector<ItemParams> spread_items(int n) {
  std::vector<ItemParams> v;
  for (int i = 0; i < n; ++i) v.push_back({0.8 + 0.1 * (i % 8), -2.0 + 4.0 * i / (n - 1), 0.1});
  return v;
}

}  // namespace

TEST_CASE("icc values") {
  CHECK(icc_probability(0.7, 1.3, 0.7, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(icc_probability(-1.0, 2.0, -1.0, 0.2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(icc_probability(1.0, 2.0, 0.0, 0.0) == doctest::Approx(0.8807970779778823).epsilon(1e-15));
}

TEST_CASE("icc is bounded and monotone") {
  for (double c : {0.0, 0.1, 0.4}) {
    double prev = -1;
    for (double theta = -4; theta <= 4; theta += 0.25) {
      const double p = icc_probability(theta, 1.5, 0.3, c);
      CHECK(p > c);
      CHECK(p < 1.0);
      CHECK(p > prev);
      prev = p;
    }
  }
}

TEST_CASE("total score") {
  // theta = b makes P = (1 + c) / 2, so c = 0.8 gives 0.9
  const auto ten = items_of(std::vector<ItemParams>(10, ItemParams{1.0, 0.0, 0.8}));
  const std::vector<std::uint8_t> ones(10, 1), zeros(10, 0);
  CHECK(total_score(ones, 0.0, ten) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(total_score(zeros, 0.0, ten) == doctest::Approx(-1.0).epsilon(1e-12));

  const auto three = items_of({{1, 0, 0.6}, {1, 0, 0.2}, {1, 0, 0.4}});
  CHECK(total_score(std::vector<std::uint8_t>{1, 1, 0}, 0.0, three) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("total score rises when any wrong answer flips") {
  Rng rng = make_rng(21);
  std::vector<ItemParams> v;
  for (int i = 0; i < 12; ++i) v.push_back({0.5 + uniform01(rng) * 2, uniform01(rng) * 6 - 3, uniform01(rng) * 0.4});
  const auto items = items_of(v);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> row(12);
    for (auto& x : row) x = uniform01(rng) < 0.5;
    const double theta = uniform01(rng) * 8 - 4;
    const double base = total_score(row, theta, items);
    CHECK(std::abs(base) <= 12.0);
    for (std::size_t i = 0; i < 12; ++i) {
      if (row[i]) continue;
      auto flipped = row;
      flipped[i] = 1;
      CHECK(total_score(flipped, theta, items) > base);
    }
  }
}

TEST_CASE("ability edge rows") {
  const auto items = items_of({{1, -1, 0}, {1, 1, 0}, {1.5, 0, 0}});
  CHECK(estimate_ability(std::vector<std::uint8_t>{1, 1, 1}, items).theta >= 4.0 - 1e-3);
  CHECK(estimate_ability(std::vector<std::uint8_t>{0, 0, 0}, items).theta <= -4.0 + 1e-3);

  const auto pair = items_of({{1, -1, 0}, {1, 1, 0}});
  CHECK(estimate_ability(std::vector<std::uint8_t>{1, 0}, pair).theta == doctest::Approx(0.0).epsilon(1e-3));
  CHECK_THROWS_AS(estimate_ability(std::vector<std::uint8_t>{1}, pair), Error);
}

TEST_CASE("search methods agree on a probe row") {
  const auto items = items_of(spread_items(15));
  const std::vector<std::uint8_t> row{1, 1, 1, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 0, 0};
  const double reference = estimate_ability(row, items, SearchMethod::golden).theta;
  for (SearchMethod m : kAllSearchMethods) {
    const auto e = estimate_ability(row, items, m);
    CHECK(e.method == m);
    CHECK(std::abs(e.theta - reference) <= 1e-2);
  }
}

TEST_CASE("maximize finds interior and endpoint maxima") {
  for (SearchMethod m : kAllSearchMethods) {
    CHECK(std::abs(maximize([](double x) { return -(x - 1.3) * (x - 1.3); }, -4, 4, m).x - 1.3) < 1e-3);
    CHECK(maximize([](double x) { return x; }, -4, 4, m).x == doctest::Approx(4.0));
    CHECK(search_method_from_string(to_string(m)) == m);
  }
}

TEST_CASE("respondent dominance") {
  const auto items = items_of(spread_items(10));
  Rng rng = make_rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> low(10);
    for (auto& x : low) x = uniform01(rng) < 0.4;
    auto high = low;
    bool changed = false;
    for (auto& x : high)
      if (!x && uniform01(rng) < 0.3) x = 1, changed = true;
    if (!changed) continue;
    CHECK(estimate_ability(high, items).theta >= estimate_ability(low, items).theta - 1e-4);
  }
}

TEST_CASE("fit keeps parameters in bounds and the unpenalized likelihood monotone") {
  const auto rm = simulate(150, spread_items(12), 4);
  IrtConfig cfg;
  cfg.priors.enabled = false;
  const auto fit = fit_item_parameters(rm, cfg);
  REQUIRE(fit.params.size() == 12);
  for (const auto& p : fit.params.items) {
    CHECK(p.a >= 0.01);
    CHECK(p.a <= 4.0);
    CHECK(p.b >= -4.0);
    CHECK(p.b <= 4.0);
    CHECK(p.c >= 0.0);
    CHECK(p.c <= 0.5);
  }
  for (std::size_t k = 1; k < fit.log_likelihood.size(); ++k)
    CHECK(fit.log_likelihood[k] >= fit.log_likelihood[k - 1] - 1e-9);

  const auto with_prior = fit_item_parameters(rm);
  for (std::size_t k = 1; k < with_prior.objective.size(); ++k)
    CHECK(with_prior.objective[k] >= with_prior.objective[k - 1] - 1e-9);
  const std::vector<bool> none(12, false);
  CHECK(with_prior.objective.back() ==
        doctest::Approx(marginal_log_likelihood(rm, with_prior.params, none) +
                        item_log_prior(with_prior.params, none, IrtConfig{}.priors)));
}

TEST_CASE("degenerate and duplicate items") {
  auto rm = simulate(120, spread_items(8), 6);
  for (std::size_t j = 0; j < rm.respondents(); ++j) {
    rm.set(j, 0, true);
    rm.set(j, 7, rm(j, 3));
  }
  const auto fit = fit_item_parameters(rm);
  CHECK(fit.degenerate[0]);
  CHECK_FALSE(fit.degenerate[3]);
  CHECK(fit.params.items[0].b == -4.0);
  CHECK(fit.params.items[0].a <= 0.5);
  CHECK(fit.params.items[7].a == fit.params.items[3].a);
  CHECK(fit.params.items[7].b == fit.params.items[3].b);
  CHECK(fit.params.items[7].c == fit.params.items[3].c);
}

TEST_CASE("fit errors") {
  ResponseMatrix same(5, 4);
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 4; ++i) same.set(j, i, i % 2 == 0);
  CHECK_THROWS_WITH_AS(fit_item_parameters(same), doctest::Contains("no discrimination signal"), Error);
  CHECK_THROWS_AS(fit_item_parameters(ResponseMatrix(1, 4)), Error);
}

TEST_CASE("item parameter csv") {
  const auto csv = item_parameters_csv(items_of({{1.5, -0.25, 0.125}}), std::vector<int>{7});
  CHECK(csv == "item_id,a,b,c\n7,1.5,-0.25,0.125\n");
}
