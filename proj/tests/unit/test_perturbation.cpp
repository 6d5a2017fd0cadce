#include <doctest.h>

#include <algorithm>
#include <set>

#include "exirt/perturbation.hpp"

using namespace exirt;

namespace {

Matrix single_column(const std::vector<double>& v) {
  Matrix m(v.size(), 1);
  m.set_column(0, v);
  return m;
}

std::vector<double> vary(const std::vector<double>& col, VariationKind kind, ColumnStats stats, std::uint64_t seed = 1) {
  Rng rng = make_rng(seed);
  return vary_column(col, kind, stats, rng);
}

}  // namespace

TEST_CASE("plan sizes") {
  const std::vector<VariationKind> two{VariationKind::negate, VariationKind::binning};
  CHECK(build_plan(5, two, 2, 0).size() == 31);
  CHECK(build_plan(1, {VariationKind::negate}, 1, 0).size() == 2);
  CHECK(build_plan(4, two, 2, 0).size() == 21);
  CHECK(expected_plan_size(5, 2, 2) == 31);
  CHECK(expected_plan_size(4, 2, 1) == 9);
}

TEST_CASE("plan order and seeds") {
  const auto plan = build_plan(3, {VariationKind::negate, VariationKind::binning}, 2, 1000);
  REQUIRE(plan.size() == 1 + 6 + 6);
  CHECK(plan.specs[0].is_original());
  CHECK_FALSE(plan.specs[0].kind.has_value());
  // kinds by code: binning (7) before negate (8)
  CHECK(*plan.specs[1].kind == VariationKind::binning);
  CHECK(plan.specs[1].attribute_set == std::vector<int>{0});
  CHECK(plan.specs[3].attribute_set == std::vector<int>{2});
  CHECK(*plan.specs[4].kind == VariationKind::negate);
  CHECK(plan.specs[7].attribute_set == std::vector<int>{0, 1});
  CHECK(plan.specs[9].attribute_set == std::vector<int>{1, 2});
  for (const auto& s : plan.specs) {
    CHECK(s.respondent_id == &s - plan.specs.data());
    CHECK(s.seed == (1000u ^ static_cast<std::uint64_t>(s.respondent_id)));
  }
  CHECK(plan.specs[7].covers(1));
  CHECK_FALSE(plan.specs[7].covers(2));

  const auto swapped = build_plan(3, {VariationKind::binning, VariationKind::negate}, 2, 1000);
  CHECK(plan_csv(swapped) == plan_csv(plan));
}

TEST_CASE("plan preconditions") {
  CHECK_THROWS_AS(build_plan(0, {VariationKind::negate}, 1, 0), Error);
  CHECK_THROWS_AS(build_plan(1, {VariationKind::negate}, 2, 0), Error);
  CHECK_THROWS_AS(build_plan(3, {}, 1, 0), Error);
  CHECK_THROWS_AS(build_plan(3, {VariationKind::negate, VariationKind::negate}, 1, 0), Error);
  CHECK_THROWS_AS(build_plan(3, {VariationKind::negate}, 3, 0), Error);
}

TEST_CASE("variation kind names") {
  for (VariationKind k : all_variation_kinds()) CHECK(variation_kind_from_string(to_string(k)) == k);
  CHECK(parse_variation_kinds("negate,binning") ==
        std::vector<VariationKind>{VariationKind::negate, VariationKind::binning});
  CHECK_THROWS_AS(variation_kind_from_string("flip"), Error);
}

TEST_CASE("column variations") {
  const ColumnStats s{2.5, 0.5, 0.0, 1.0, false};
  CHECK(vary({1, -2, 3}, VariationKind::negate, s) == std::vector<double>{-1, 2, -3});
  CHECK(vary({1, -2, 3}, VariationKind::replace_mean, s) == std::vector<double>{2.5, 2.5, 2.5});
  CHECK(vary({1, -2, 3}, VariationKind::replace_std, s) == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(vary({1, -2, 3}, VariationKind::set_zero, s) == std::vector<double>{0, 0, 0});
  CHECK(vary({1, -2, 3}, VariationKind::reverse_index, s) == std::vector<double>{3, -2, 1});
  CHECK(vary({1, -2, 3}, VariationKind::sort_ascending, s) == std::vector<double>{-2, 1, 3});
  CHECK(vary({1, -2, 3}, VariationKind::sort_descending, s) == std::vector<double>{3, 1, -2});
  CHECK(vary({3, 2, 4}, VariationKind::standardize, s) == std::vector<double>{1, -1, 3});

  const auto binned = vary({0, 0.14, 0.99}, VariationKind::binning, s);
  REQUIRE(binned.size() == 3);
  CHECK(binned[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(binned[1] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(binned[2] == doctest::Approx(0.95).epsilon(1e-12));

  const ColumnStats flat{4.0, 0.0, 4.0, 4.0, false};
  CHECK(vary({4, 4}, VariationKind::standardize, flat) == std::vector<double>{0, 0});
}

TEST_CASE("constant fills are idempotent") {
  const ColumnStats s{1.25, 0.75, -3, 9, false};
  const std::vector<double> col{4, -3, 9, 0.5};
  for (VariationKind k : {VariationKind::set_zero, VariationKind::replace_mean, VariationKind::replace_std}) {
    const auto once = vary(col, k, s);
    CHECK(vary(once, k, s) == once);
  }
}

TEST_CASE("rescale off scale") {
  const ColumnStats wide{5, 2, 0, 10, false};
  const auto r = vary({0, 5, 10}, VariationKind::rescale_off_scale, wide);
  CHECK(r == std::vector<double>{0, 0.5, 1});
  const ColumnStats unit{0.5, 0.2, 0, 1, false};
  const auto u = vary({0, 0.5, 1}, VariationKind::rescale_off_scale, unit);
  CHECK(u == std::vector<double>{1, 1.5, 2});
}

TEST_CASE("permutation and noise are seeded") {
  const ColumnStats s{0, 1, -5, 5, false};
  std::vector<double> col(50);
  for (int i = 0; i < 50; ++i) col[i] = i;
  const auto p1 = vary(col, VariationKind::index_permutation, s, 3);
  CHECK(p1 == vary(col, VariationKind::index_permutation, s, 3));
  CHECK(p1 != col);
  auto sorted = p1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == col);

  const auto n1 = vary(col, VariationKind::additive_noise, s, 3);
  CHECK(n1 == vary(col, VariationKind::additive_noise, s, 3));
  CHECK(n1 != vary(col, VariationKind::additive_noise, s, 4));
}

TEST_CASE("apply_variation touches only the selected columns") {
  Matrix rows(6, 3);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 3; ++c) rows(r, c) = static_cast<double>(r * 3 + c) - 7.0;
  std::vector<ColumnStats> stats(3, ColumnStats{0, 1, -7, 10, false});
  const auto plan = build_plan(3, {all_variation_kinds().begin(), all_variation_kinds().end()}, 2, 17);
  for (const auto& spec : plan.specs) {
    const Matrix out = apply_variation(rows, spec, stats);
    CHECK(out == apply_variation(rows, spec, stats));
    for (std::size_t c = 0; c < 3; ++c) {
      if (spec.covers(static_cast<int>(c))) continue;
      CHECK(out.column(c) == rows.column(c));
    }
  }
  CHECK(apply_variation(rows, plan.specs[0], stats) == rows);
}

TEST_CASE("arithmetic variations on categorical columns permute") {
  Matrix rows = single_column({0, 1, 2, 3, 0, 1, 2, 3});
  std::vector<ColumnStats> stats{ColumnStats{1.5, 1.1, 0, 3, true}};
  RespondentSpec spec{1, {0}, VariationKind::negate, 5};
  const Matrix out = apply_variation(rows, spec, stats);
  auto a = out.column(0), b = rows.column(0);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(requires_arithmetic(VariationKind::negate));
  CHECK_FALSE(requires_arithmetic(VariationKind::index_permutation));
}

TEST_CASE("apply_variation errors") {
  Matrix rows = single_column({1, 2});
  std::vector<ColumnStats> stats{ColumnStats{}};
  CHECK_THROWS_AS(apply_variation(rows, RespondentSpec{1, {4}, VariationKind::negate, 0}, stats), Error);
  CHECK_THROWS_AS(apply_variation(rows, RespondentSpec{1, {0}, VariationKind::negate, 0}, {}), Error);
}
