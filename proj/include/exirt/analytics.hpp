#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "exirt/common.hpp"
#include "exirt/rank.hpp"

namespace exirt {

/// Ranks 1..n with tied values sharing the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman correlation of two samples (Pearson on average ranks).
double spearman(std::span<const double> x, std::span<const double> y);

/// Spearman correlation between two attribute ranks over the same attribute
/// set. Attributes with equal scores within a rank share their mean position.
double spearman(const AttributeRank& a, const AttributeRank& b);

struct CorrelationMatrix {
  std::vector<std::string> measures;
  Matrix rho;

  /// Throws unless symmetric with unit diagonal and entries in [-1, 1].
  void validate() const;
};

/// Pairwise Spearman over the measures, in the given order.
CorrelationMatrix correlation_matrix(const std::vector<AttributeRank>& ranks);
std::string correlation_csv(const CorrelationMatrix& m);
CorrelationMatrix read_correlation_csv(const std::filesystem::path& path);

/// Documented reporting convention: |rho| >= 0.7 high, >= 0.3 moderate, else insignificant.
std::string_view correlation_band(double rho);

struct BoxStats {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_low = 0, whisker_high = 0;  // most extreme points within 1.5 IQR of the box
  std::vector<double> outliers;
};

/// Five-number summary with linear-interpolation quartiles and 1.5 IQR whiskers.
BoxStats boxplot_stats(std::vector<double> values);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

std::string boxplot_csv(const std::vector<BoxGroup>& groups);
std::string boxplot_svg(const std::string& title, const std::vector<BoxGroup>& groups, const std::string& y_label);

}  // namespace exirt
