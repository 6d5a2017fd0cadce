#include <doctest.h>

#include <cmath>
#include <set>

#include "exirt/clustering.hpp"
#include "exirt/item_report.hpp"
#include "exirt/mca.hpp"
#include "helpers.hpp"

using namespace exirt;

namespace {

Matrix blobs(std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Matrix m(30, 2);
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  for (std::size_t i = 0; i < 30; ++i) {
    m(i, 0) = centers[i / 10][0] + 0.5 * standard_normal(rng);
    m(i, 1) = centers[i / 10][1] + 0.5 * standard_normal(rng);
  }
  return m;
}

BinaryPropertyTable hs(std::vector<std::string> rows, std::vector<std::string> cols,
                       std::vector<std::vector<char>> cells) {
  return {std::move(rows), std::move(cols), std::move(cells)};
}

}  // namespace

TEST_CASE("kmeans recovers planted blobs") {
  const Matrix m = blobs(1);
  const auto r = kmeans(m, 3, 5);
  for (std::size_t i = 0; i < 30; ++i) CHECK(r.labels[i] == r.labels[(i / 10) * 10]);
  CHECK(std::set<int>(r.labels.begin(), r.labels.end()).size() == 3);
  for (std::size_t k = 1; k < r.wcss_trace.size(); ++k) CHECK(r.wcss_trace[k] <= r.wcss_trace[k - 1] + 1e-12);
  CHECK(r.wcss == doctest::Approx(r.wcss_trace.back()));
}

TEST_CASE("kmeans with K equal to the row count") {
  const Matrix m = blobs(2);
  Matrix five(5, 2);
  for (std::size_t i = 0; i < 5; ++i) five(i, 0) = static_cast<double>(i), five(i, 1) = static_cast<double>(i * i);
  const auto r = kmeans(five, 5, 1);
  CHECK(r.wcss == 0.0);
  CHECK(std::set<int>(r.labels.begin(), r.labels.end()).size() == 5);
  CHECK_THROWS_AS(kmeans(five, 6, 1), Error);
  CHECK_THROWS_AS(kmeans(m, 0, 1), Error);
}

TEST_CASE("silhouette") {
  // middle point is equidistant from its own cluster mate and the other cluster
  Matrix line(3, 1);
  line(0, 0) = 0;
  line(1, 0) = 1;
  line(2, 0) = 2;
  const auto s = silhouette_values(line, {0, 0, 1});
  CHECK(s[1] == doctest::Approx(0.0));
  CHECK(s[2] == 0.0);

  PropertyTable t;
  t.column_names = {"x", "y"};
  t.values = blobs(3);
  for (int i = 0; i < 30; ++i) t.row_names.push_back("d" + std::to_string(i));
  const auto scan = silhouette_scan(t, 11);
  CHECK(scan.chosen_k == 3);
  CHECK(scan.ks.front() == 2);
  CHECK(scan.ks.back() == 10);
  const auto path = testing::write_text("clusters.csv", cluster_csv(scan.best));
  const auto back = read_cluster_csv(path);
  CHECK(back.names == scan.best.names);
  CHECK(back.cluster == scan.best.cluster);
  CHECK(back.cluster_of("d4") == scan.best.cluster[4]);
}

TEST_CASE("standardize_columns") {
  Matrix m(3, 2);
  m(0, 0) = 1, m(1, 0) = 2, m(2, 0) = 3;
  m(0, 1) = m(1, 1) = m(2, 1) = 7;
  const Matrix z = standardize_columns(m);
  CHECK(z(0, 0) == doctest::Approx(-std::sqrt(1.5)));
  CHECK(z(1, 0) == 0.0);
  CHECK(z(2, 1) == 0.0);
}

TEST_CASE("indicator matrix") {
  std::vector<std::string> names;
  const Matrix z = indicator_matrix(hs({"r1", "r2"}, {"p", "q"}, {{'h', 's'}, {'s', 's'}}), &names);
  CHECK(names == std::vector<std::string>{"p:h", "p:s", "q:h", "q:s"});
  CHECK(z.rows() == 2);
  CHECK(z(0, 0) == 1);
  CHECK(z(0, 3) == 1);
  CHECK(z(1, 1) == 1);
  CHECK(z(1, 2) == 0);
}

TEST_CASE("mca symmetry") {
  // q duplicates p; rows r1 and r4 are equal
  const auto r = mca(hs({"r1", "r2", "r3", "r4", "r5"}, {"p", "q", "t"},
                        {{'h', 'h', 's'}, {'s', 's', 's'}, {'h', 'h', 'h'}, {'h', 'h', 's'}, {'s', 's', 'h'}}));
  REQUIRE(r.category_names.size() == 6);
  REQUIRE(r.row_coords.cols() == r.inertias.size());
  for (std::size_t d = 0; d < r.row_coords.cols(); ++d) {
    CHECK(r.column_coords(0, d) == doctest::Approx(r.column_coords(2, d)).epsilon(1e-12));
    CHECK(r.column_coords(1, d) == doctest::Approx(r.column_coords(3, d)).epsilon(1e-12));
    CHECK(r.row_coords(0, d) == doctest::Approx(r.row_coords(3, d)).epsilon(1e-12));
  }
  for (std::size_t d = 1; d < r.inertias.size(); ++d) CHECK(r.inertias[d] <= r.inertias[d - 1]);
  CHECK(r.dropped_categories.empty());
}

TEST_CASE("mca drops empty categories") {
  const auto r = mca(hs({"a", "b", "c"}, {"p", "q"}, {{'h', 'h'}, {'s', 'h'}, {'h', 'h'}}));
  CHECK(r.dropped_categories == std::vector<std::string>{"q:s"});
  CHECK(r.category_names.size() == 3);
}

TEST_CASE("item threshold report") {
  ClusterAssignment clusters;
  clusters.names = {"d1", "d2"};
  clusters.cluster = {0, 1};
  clusters.k = 2;

  SUBCASE("shared value") {
    const ItemParameters same{{{1.2, 0.5, 0.1}, {1.2, 0.5, 0.1}}};
    const auto r = item_param_threshold_report({{"d1", same}, {"d2", same}}, clusters);
    CHECK(r.thresholds[0] == doctest::Approx(1.2));
    CHECK(r.thresholds[1] == doctest::Approx(0.5));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t p = 0; p < 3; ++p) CHECK(r.percent_at_or_above(i, p) == 100.0);
  }
  SUBCASE("one above one below") {
    const ItemParameters lo{{{0.5, -1, 0.0}, {0.7, -1, 0.0}}};
    const ItemParameters hi{{{2.0, 1, 0.2}, {2.2, 1, 0.2}}};
    const auto r = item_param_threshold_report({{"d1", lo}, {"d2", hi}}, clusters);
    CHECK(r.percent_at_or_above(0, 0) == 0.0);
    CHECK(r.percent_at_or_above(1, 0) == 100.0);
    CHECK(r.percent_at_or_above(0, 1) == 0.0);
    CHECK(r.percent_at_or_above(1, 1) == 100.0);
  }
  SUBCASE("three datasets, hand computed") {
    ClusterAssignment three;
    three.names = {"x", "y", "z"};
    three.cluster = {0, 0, 1};
    three.k = 2;
    // a means 1, 2, 3 -> threshold 2
    const ItemParameters x{{{0.5, 0, 0}, {1.5, 0, 0}, {1.0, 0, 0}, {1.0, 0, 0}}};
    const ItemParameters y{{{2.5, 0, 0}, {1.5, 0, 0}, {2.0, 0, 0}, {2.0, 0, 0}}};
    const ItemParameters z{{{3.0, 0, 0}, {1.0, 0, 0}, {4.0, 0, 0}, {4.0, 0, 0}}};
    const auto r = item_param_threshold_report({{"x", x}, {"y", y}, {"z", z}}, three);
    CHECK(r.thresholds[0] == doctest::Approx(2.0));
    CHECK(r.percent_at_or_above(0, 0) == 0.0);
    CHECK(r.percent_at_or_above(1, 0) == 75.0);
    CHECK(r.percent_at_or_above(2, 0) == 75.0);
  }
}

TEST_CASE("median ICC curve is monotone") {
  ClusterAssignment clusters;
  clusters.names = {"d1", "d2", "d3"};
  clusters.cluster = {0, 0, 1};
  clusters.k = 2;
  const ItemParameters p1{{{1.0, -0.5, 0.1}, {1.4, 0.5, 0.2}}};
  const ItemParameters p2{{{0.8, 0.0, 0.0}, {2.0, 1.0, 0.1}}};
  const ItemParameters p3{{{0.3, 2.0, 0.3}}};
  const auto c = median_icc_curve({{"d1", p1}, {"d2", p2}, {"d3", p3}}, clusters);
  REQUIRE(c.theta.size() == 81);
  CHECK(c.theta.front() == -4.0);
  CHECK(c.theta.back() == doctest::Approx(4.0));
  REQUIRE(c.clusters == std::vector<int>{0, 1});
  // cluster 0: means (1.2, 0, 0.15) and (1.4, 0.5, 0.05); median of two is their midpoint
  CHECK(c.median_params[0].a == doctest::Approx(1.3));
  CHECK(c.median_params[0].b == doctest::Approx(0.25));
  CHECK(c.median_params[0].c == doctest::Approx(0.1));
  for (const auto& curve : c.probability)
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] >= curve[k - 1]);
  CHECK(c.probability[1][40] == doctest::Approx(icc_probability(0.0, 0.3, 2.0, 0.3)));
}
