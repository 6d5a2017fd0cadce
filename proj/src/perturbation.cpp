#include "exirt/perturbation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "exirt/log.hpp"

namespace exirt {

namespace {
constexpr std::array<std::string_view, kVariationKindCount> kKindNames{
    "index_permutation", "additive_noise", "set_zero", "rescale_off_scale", "sort_ascending", "sort_descending",
    "reverse_index",     "binning",        "negate",   "replace_mean",      "replace_std",    "standardize",
};
}  // namespace

const std::array<VariationKind, kVariationKindCount>& all_variation_kinds() {
  static const std::array<VariationKind, kVariationKindCount> kAll = [] {
    std::array<VariationKind, kVariationKindCount> a{};
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<VariationKind>(i);
    return a;
  }();
  return kAll;
}

std::string_view to_string(VariationKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

VariationKind variation_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<VariationKind>(i);
  throw Error(fmt::format("unknown variation kind '{}'", s));
}

std::vector<VariationKind> parse_variation_kinds(std::string_view list) {
  std::vector<VariationKind> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    auto item = list.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(variation_kind_from_string(item));
    start = end + 1;
  }
  return out;
}

bool requires_arithmetic(VariationKind kind) {
  switch (kind) {
    case VariationKind::index_permutation:
    case VariationKind::sort_ascending:
    case VariationKind::sort_descending:
    case VariationKind::reverse_index:
      return false;
    default:
      return true;
  }
}

bool RespondentSpec::covers(int attribute) const {
  return std::binary_search(attribute_set.begin(), attribute_set.end(), attribute);
}

std::size_t expected_plan_size(int attribute_count, int kind_count, int max_arity) {
  const auto f = static_cast<std::size_t>(attribute_count);
  const auto v = static_cast<std::size_t>(kind_count);
  std::size_t n = 1 + v * f;
  if (max_arity >= 2) n += v * (f * (f - 1) / 2);
  return n;
}

RespondentPlan build_plan(int attribute_count, const std::vector<VariationKind>& kinds, int max_arity,
                          std::uint64_t base_seed) {
  if (attribute_count < 1) throw Error("build_plan: attribute count must be >= 1");
  if (max_arity < 1 || max_arity > 2) throw Error("build_plan: max_arity must be 1 or 2");
  if (max_arity > attribute_count) throw Error("build_plan: max_arity exceeds attribute count");
  if (kinds.empty()) throw Error("build_plan: no variation kinds");
  if (std::set<VariationKind>(kinds.begin(), kinds.end()).size() != kinds.size())
    throw Error("build_plan: duplicate variation kinds");

  std::vector<VariationKind> ordered = kinds;
  std::sort(ordered.begin(), ordered.end());

  RespondentPlan plan;
  plan.attribute_count = attribute_count;
  plan.kind_count = static_cast<int>(kinds.size());
  plan.max_arity = max_arity;
  plan.specs.reserve(expected_plan_size(attribute_count, plan.kind_count, max_arity));

  auto add = [&](std::vector<int> set, std::optional<VariationKind> kind) {
    const int id = static_cast<int>(plan.specs.size());
    plan.specs.push_back({id, std::move(set), kind, base_seed ^ static_cast<std::uint64_t>(id)});
  };
  add({}, std::nullopt);
  for (auto k : ordered)
    for (int a = 0; a < attribute_count; ++a) add({a}, k);
  if (max_arity == 2) {
    for (auto k : ordered)
      for (int a = 0; a < attribute_count; ++a)
        for (int b = a + 1; b < attribute_count; ++b) add({a, b}, k);
  }
  return plan;
}

std::string plan_csv(const RespondentPlan& plan) {
  std::ostringstream out;
  out << "respondent_id,kind,attribute_set\n";
  for (const auto& s : plan.specs) {
    out << s.respondent_id << ',' << (s.kind ? to_string(*s.kind) : std::string_view("original")) << ',';
    for (std::size_t i = 0; i < s.attribute_set.size(); ++i) out << (i ? ";" : "") << s.attribute_set[i];
    out << '\n';
  }
  return out.str();
}

std::vector<ColumnStats> column_stats(const Dataset& train) {
  std::vector<ColumnStats> out;
  out.reserve(train.attribute_count());
  for (const auto& col : train.columns) {
    ColumnStats s;
    s.categorical = !col.numeric_valued();
    if (!col.values.empty()) {
      s.mean = mean(col.values);
      s.std = stddev(col.values);
      auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
      s.min = *lo;
      s.max = *hi;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> vary_column(std::vector<double> col, VariationKind kind, const ColumnStats& stats, Rng& rng,
                                const VariationSettings& settings) {
  switch (kind) {
    case VariationKind::index_permutation:
      shuffle(col, rng);
      break;
    case VariationKind::additive_noise:
      for (auto& v : col) v += settings.noise_scale * stats.std * standard_normal(rng);
      break;
    case VariationKind::set_zero:
      std::fill(col.begin(), col.end(), 0.0);
      break;
    case VariationKind::rescale_off_scale: {
      const double range = stats.max - stats.min;
      const double offset = (stats.min >= 0.0 && stats.max <= 1.0) ? 1.0 : 0.0;
      for (auto& v : col) v = (range > 0.0 ? (v - stats.min) / range : 0.0) + offset;
      break;
    }
    case VariationKind::sort_ascending:
      std::sort(col.begin(), col.end());
      break;
    case VariationKind::sort_descending:
      std::sort(col.begin(), col.end(), std::greater<>());
      break;
    case VariationKind::reverse_index:
      std::reverse(col.begin(), col.end());
      break;
    case VariationKind::binning: {
      const int bins = std::max(1, settings.bins);
      const double width = (stats.max - stats.min) / bins;
      for (auto& v : col) {
        if (width <= 0.0) {
          v = stats.min;
          continue;
        }
        auto b = static_cast<long>(std::floor((v - stats.min) / width));
        b = std::clamp<long>(b, 0, bins - 1);
        v = stats.min + (static_cast<double>(b) + 0.5) * width;
      }
      break;
    }
    case VariationKind::negate:
      for (auto& v : col) v = -v;
      break;
    case VariationKind::replace_mean:
      std::fill(col.begin(), col.end(), stats.mean);
      break;
    case VariationKind::replace_std:
      std::fill(col.begin(), col.end(), stats.std);
      break;
    case VariationKind::standardize:
      for (auto& v : col) v = stats.std > 0.0 ? (v - stats.mean) / stats.std : 0.0;
      break;
  }
  return col;
}

Matrix apply_variation(const Matrix& rows, const RespondentSpec& spec, const std::vector<ColumnStats>& stats,
                       const VariationSettings& settings) {
  if (spec.is_original() || !spec.kind) return rows;
  if (rows.empty()) throw Error("apply_variation: empty attribute matrix");
  if (stats.size() != rows.cols()) throw Error("apply_variation: column statistics do not match matrix width");
  Matrix out = rows;
  for (int a : spec.attribute_set) {
    if (a < 0 || static_cast<std::size_t>(a) >= rows.cols())
      throw Error(fmt::format("apply_variation: attribute index {} out of range", a));
    const auto& st = stats[static_cast<std::size_t>(a)];
    VariationKind kind = *spec.kind;
    if (st.categorical && requires_arithmetic(kind)) {
      log::debug(fmt::format("respondent {}: {} on categorical column {} falls back to index_permutation",
                             spec.respondent_id, to_string(kind), a));
      kind = VariationKind::index_permutation;
    }
    Rng rng = make_rng(mix_seed(spec.seed, static_cast<std::uint64_t>(a)));
    out.set_column(static_cast<std::size_t>(a), vary_column(rows.column(static_cast<std::size_t>(a)), kind, st, rng,
                                                            settings));
  }
  return out;
}

}  // namespace exirt
