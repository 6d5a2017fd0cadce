#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exirt/common.hpp"
#include "exirt/dataset.hpp"

namespace exirt {

/// The twelve input variations. Integer codes are stable and used in dumps.
enum class VariationKind : int {
  index_permutation = 0,
  additive_noise = 1,
  set_zero = 2,
  rescale_off_scale = 3,
  sort_ascending = 4,
  sort_descending = 5,
  reverse_index = 6,
  binning = 7,
  negate = 8,
  replace_mean = 9,
  replace_std = 10,
  standardize = 11,
};

inline constexpr std::size_t kVariationKindCount = 12;
const std::array<VariationKind, kVariationKindCount>& all_variation_kinds();
std::string_view to_string(VariationKind kind);
VariationKind variation_kind_from_string(std::string_view s);
/// Parses a comma-separated list such as "negate,binning".
std::vector<VariationKind> parse_variation_kinds(std::string_view list);
/// Kinds that need arithmetic on the column values.
bool requires_arithmetic(VariationKind kind);

struct RespondentSpec {
  int respondent_id = 0;
  std::vector<int> attribute_set;  // sorted; empty for the original model
  std::optional<VariationKind> kind;
  std::uint64_t seed = 0;

  bool is_original() const { return attribute_set.empty(); }
  bool covers(int attribute) const;
};

struct RespondentPlan {
  std::vector<RespondentSpec> specs;
  int attribute_count = 0;
  int kind_count = 0;
  int max_arity = 0;

  std::size_t size() const { return specs.size(); }
};

/// 1 + v*f (+ v*C(f,2) when max_arity is 2).
std::size_t expected_plan_size(int attribute_count, int kind_count, int max_arity);

/// Original model first, then singletons ordered by (kind, attribute), then
/// pairs ordered by (kind, lexicographic pair). Seeds are base_seed ^ id.
RespondentPlan build_plan(int attribute_count, const std::vector<VariationKind>& kinds, int max_arity,
                          std::uint64_t base_seed);

std::string plan_csv(const RespondentPlan& plan);

/// Training-set statistics that parameterize the variations.
struct ColumnStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  bool categorical = false;
};

std::vector<ColumnStats> column_stats(const Dataset& train);

struct VariationSettings {
  int bins = 10;
  double noise_scale = 1.0;  // multiples of the column's train std
};

/// Returns a copy of `rows` with the columns in spec.attribute_set varied.
/// Arithmetic kinds on categorical columns fall back to index_permutation.
Matrix apply_variation(const Matrix& rows, const RespondentSpec& spec, const std::vector<ColumnStats>& stats,
                       const VariationSettings& settings = {});

/// Column-level primitive used by apply_variation.
std::vector<double> vary_column(std::vector<double> column, VariationKind kind, const ColumnStats& stats, Rng& rng,
                                const VariationSettings& settings = {});

}  // namespace exirt
