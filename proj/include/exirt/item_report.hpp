#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "exirt/clustering.hpp"
#include "exirt/common.hpp"
#include "exirt/irt.hpp"

namespace exirt {

inline constexpr std::array<const char*, 3> kItemParameterNames{"a", "b", "c"};

struct ItemThresholdReport {
  std::vector<std::string> datasets;
  std::vector<int> cluster;
  Matrix means;                  // datasets x {a, b, c}
  std::array<double, 3> thresholds{};  // grand mean of the per-dataset means
  Matrix percent_at_or_above;    // datasets x {a, b, c}, in [0, 100]
};

/// Per dataset, the mean of each item parameter; the threshold is the mean of
/// those means over all datasets; then the share of each dataset's items at or
/// above the threshold.
ItemThresholdReport item_param_threshold_report(const std::map<std::string, ItemParameters>& params,
                                                const ClusterAssignment& clusters);

std::string threshold_report_csv(const ItemThresholdReport& r);
/// One box per (parameter, cluster) over the per-dataset percentages.
std::string threshold_report_svg(const ItemThresholdReport& r);

struct IccCurves {
  std::vector<double> theta;          // -4, -3.9, ..., 4
  std::vector<int> clusters;
  std::vector<ItemParams> median_params;  // per cluster
  std::vector<std::vector<double>> probability;  // per cluster, per theta
};

/// Per cluster: median over datasets of the per-dataset mean (a, b, c), then
/// the ICC of that triple sampled on the theta grid.
IccCurves median_icc_curve(const std::map<std::string, ItemParameters>& params, const ClusterAssignment& clusters);

std::string icc_curves_csv(const IccCurves& c);
std::string icc_params_csv(const IccCurves& c);
std::string icc_curves_svg(const IccCurves& c);

ItemParameters read_item_parameters_csv(const std::filesystem::path& path);

}  // namespace exirt
