#include "exirt/analytics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "exirt/svg.hpp"

namespace exirt {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  if (x.size() < 2) throw Error("spearman needs at least 2 attributes");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

namespace {

// Position of each attribute, with score ties sharing the mean position.
std::map<std::string, double> tie_aware_positions(const AttributeRank& rank) {
  std::map<std::string, double> out;
  std::size_t i = 0;
  const auto& e = rank.entries;
  while (i < e.size()) {
    std::size_t j = i;
    while (j + 1 < e.size() && e[j + 1].score == e[i].score) ++j;
    double sum = 0.0;
    for (std::size_t k = i; k <= j; ++k) sum += e[k].position;
    for (std::size_t k = i; k <= j; ++k) out[e[k].attribute] = sum / static_cast<double>(j - i + 1);
    i = j + 1;
  }
  return out;
}

}  // namespace

double spearman(const AttributeRank& a, const AttributeRank& b) {
  if (a.size() != b.size()) throw Error("spearman: ranks cover different attribute sets");
  if (a.size() < 2) throw Error("spearman needs at least 2 attributes");
  const auto pa = tie_aware_positions(a);
  const auto pb = tie_aware_positions(b);
  std::vector<double> x, y;
  for (const auto& [name, pos] : pa) {
    auto it = pb.find(name);
    if (it == pb.end()) throw Error(fmt::format("spearman: attribute '{}' missing from rank '{}'", name, b.measure));
    x.push_back(pos);
    y.push_back(it->second);
  }
  return spearman(x, y);
}

void CorrelationMatrix::validate() const {
  const std::size_t n = measures.size();
  if (rho.rows() != n || rho.cols() != n) throw Error("correlation matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (rho(i, i) != 1.0) throw Error("correlation matrix diagonal is not 1");
    for (std::size_t j = 0; j < n; ++j) {
      if (rho(i, j) != rho(j, i)) throw Error("correlation matrix is not symmetric");
      if (!(rho(i, j) >= -1.0 && rho(i, j) <= 1.0)) throw Error("correlation outside [-1, 1]");
    }
  }
}

CorrelationMatrix correlation_matrix(const std::vector<AttributeRank>& ranks) {
  CorrelationMatrix m;
  const std::size_t n = ranks.size();
  m.rho = Matrix(n, n, 1.0);
  for (const auto& r : ranks) m.measures.push_back(r.measure);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = spearman(ranks[i], ranks[j]);
      m.rho(i, j) = r;
      m.rho(j, i) = r;
    }
  m.validate();
  return m;
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "measure";
  for (const auto& name : m.measures) out << ',' << csv_escape(name);
  out << '\n';
  for (std::size_t i = 0; i < m.measures.size(); ++i) {
    out << csv_escape(m.measures[i]);
    for (std::size_t j = 0; j < m.measures.size(); ++j) out << ',' << format_number(m.rho(i, j));
    out << '\n';
  }
  return out.str();
}

CorrelationMatrix read_correlation_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().empty() || rows.front()[0] != "measure")
    throw Error("not a correlation CSV: " + path.string());
  CorrelationMatrix m;
  m.measures.assign(rows.front().begin() + 1, rows.front().end());
  const std::size_t n = m.measures.size();
  if (rows.size() != n + 1) throw Error("correlation CSV is not square: " + path.string());
  m.rho = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n + 1) throw Error("correlation CSV row has wrong width: " + path.string());
    for (std::size_t j = 0; j < n; ++j) m.rho(i, j) = std::stod(rows[i + 1][j + 1]);
  }
  m.validate();
  return m;
}

std::string_view correlation_band(double rho) {
  const double r = std::abs(rho);
  if (r >= 0.7) return "high";
  if (r >= 0.3) return "moderate";
  return "insignificant";
}

BoxStats boxplot_stats(std::vector<double> values) {
  if (values.empty()) throw Error("boxplot_stats of an empty group");
  std::sort(values.begin(), values.end());
  BoxStats b;
  b.count = values.size();
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  bool low_set = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
      continue;
    }
    if (!low_set) {
      b.whisker_low = std::min(v, b.q1);
      low_set = true;
    }
    b.whisker_high = std::max(v, b.q3);
  }
  return b;
}

std::string boxplot_csv(const std::vector<BoxGroup>& groups) {
  std::ostringstream out;
  out << "group,count,min,whisker_low,q1,median,q3,whisker_high,max,outliers\n";
  for (const auto& g : groups) {
    if (g.values.empty()) continue;
    const auto b = boxplot_stats(g.values);
    out << csv_escape(g.label) << ',' << b.count << ',' << format_number(b.min) << ','
        << format_number(b.whisker_low) << ',' << format_number(b.q1) << ',' << format_number(b.median) << ','
        << format_number(b.q3) << ',' << format_number(b.whisker_high) << ',' << format_number(b.max) << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) out << (i ? ";" : "") << format_number(b.outliers[i]);
    out << '\n';
  }
  return out.str();
}

std::string boxplot_svg(const std::string& title, const std::vector<BoxGroup>& groups, const std::string& y_label) {
  std::vector<svg::Box> boxes;
  for (const auto& g : groups) {
    if (g.values.empty()) continue;
    const auto b = boxplot_stats(g.values);
    boxes.push_back({g.label, b.whisker_low, b.q1, b.median, b.q3, b.whisker_high, b.outliers});
  }
  return svg::box_chart(title, boxes, y_label);
}

}  // namespace exirt
