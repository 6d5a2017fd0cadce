#include <doctest.h>

#include <cmath>
#include <numeric>

#include "exirt/analytics.hpp"
#include "exirt/rank.hpp"
#include "helpers.hpp"

using namespace exirt;

namespace {

AttributeRank by_positions(std::string measure, const std::vector<int>& positions) {
  std::vector<std::string> names;
  std::vector<double> scores;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    names.push_back(std::string(1, static_cast<char>('a' + i)));
    scores.push_back(positions[i]);
  }
  return make_rank(std::move(measure), names, scores, RankOrder::ascending);
}

}  // namespace

TEST_CASE("make_rank orders and breaks ties by name") {
  const auto r = make_rank("m", {"z", "b", "a"}, {1.0, 2.0, 1.0}, RankOrder::descending);
  REQUIRE(r.size() == 3);
  CHECK(r.entries[0].attribute == "b");
  CHECK(r.entries[1].attribute == "a");
  CHECK(r.entries[2].attribute == "z");
  CHECK(r.find("z").position == 3);
  AttributeRank broken = r;
  broken.entries[2].position = 2;
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("spearman on ranks") {
  const auto a = by_positions("a", {1, 2, 3, 4});
  CHECK(spearman(a, a) == doctest::Approx(1.0));
  CHECK(spearman(a, by_positions("b", {4, 3, 2, 1})) == doctest::Approx(-1.0));
  CHECK(spearman(a, by_positions("b", {2, 1, 4, 3})) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_THROWS_AS(spearman(a, by_positions("b", {1, 2, 3})), Error);
}

TEST_CASE("average ranks share ties") {
  CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  const std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 4};
  CHECK(spearman(x, y) == doctest::Approx(pearson(average_ranks(x), average_ranks(y))));
}

TEST_CASE("correlation matrix") {
  const auto m = correlation_matrix(
      {by_positions("p", {1, 2, 3, 4}), by_positions("q", {2, 1, 4, 3}), by_positions("r", {4, 3, 2, 1})});
  CHECK_NOTHROW(m.validate());
  CHECK(m.rho(0, 1) == doctest::Approx(0.6));
  CHECK(m.rho(1, 0) == m.rho(0, 1));
  CHECK(m.rho(2, 2) == 1.0);
  const auto path = testing::write_text("corr.csv", correlation_csv(m));
  const auto back = read_correlation_csv(path);
  CHECK(back.measures == m.measures);
  CHECK(back.rho == m.rho);

  CorrelationMatrix asym = m;
  asym.rho(0, 1) = 0.5;
  CHECK_THROWS_AS(asym.validate(), Error);
}

TEST_CASE("correlation bands") {
  CHECK(correlation_band(0.7) == "high");
  CHECK(correlation_band(-0.95) == "high");
  CHECK(correlation_band(0.3) == "moderate");
  CHECK(correlation_band(0.29) == "insignificant");
}

TEST_CASE("boxplot stats") {
  const auto one = boxplot_stats({0.4});
  CHECK(one.min == 0.4);
  CHECK(one.q1 == 0.4);
  CHECK(one.median == 0.4);
  CHECK(one.q3 == 0.4);
  CHECK(one.max == 0.4);
  CHECK(one.outliers.empty());

  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  const auto s = boxplot_stats(hundred);
  CHECK(s.median == doctest::Approx(50.5));
  CHECK(s.q1 == doctest::Approx(25.75));
  CHECK(s.q3 == doctest::Approx(75.25));
  CHECK(s.outliers.empty());
  CHECK(s.whisker_low == 1.0);
  CHECK(s.whisker_high == 100.0);

  const auto sym = boxplot_stats({-3, -1, 0, 1, 3});
  CHECK(sym.median == 0.0);
  const auto out = boxplot_stats({1, 2, 3, 4, 100});
  CHECK(out.outliers == std::vector<double>{100});
  CHECK(out.whisker_high == 4.0);
  CHECK_THROWS_AS(boxplot_stats({}), Error);
}

TEST_CASE("spearman matches its definition on random tied samples") {
  Rng rng = make_rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 9);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(uniform_index(rng, 4));
      y[i] = static_cast<double>(uniform_index(rng, 4));
    }
    const double rho = spearman(x, y);
    if (std::isnan(rho)) continue;
    CHECK(rho >= -1.0 - 1e-12);
    CHECK(rho <= 1.0 + 1e-12);
    CHECK(rho == doctest::Approx(spearman(y, x)));
  }
}
