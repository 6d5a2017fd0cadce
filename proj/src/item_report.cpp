#include "exirt/item_report.hpp"

#include <fmt/format.h>

#include <set>
#include <sstream>

#include "exirt/analytics.hpp"
#include "exirt/svg.hpp"

namespace exirt {

namespace {

double param(const ItemParams& p, std::size_t k) { return k == 0 ? p.a : (k == 1 ? p.b : p.c); }

std::array<double, 3> mean_params(const ItemParameters& ps) {
  std::array<double, 3> m{};
  if (ps.items.empty()) throw Error("item parameter set is empty");
  for (const auto& p : ps.items)
    for (std::size_t k = 0; k < 3; ++k) m[k] += param(p, k);
  for (auto& v : m) v /= static_cast<double>(ps.items.size());
  return m;
}

std::vector<int> sorted_clusters(const std::vector<int>& ids) {
  std::set<int> s(ids.begin(), ids.end());
  return {s.begin(), s.end()};
}

}  // namespace

ItemThresholdReport item_param_threshold_report(const std::map<std::string, ItemParameters>& params,
                                                const ClusterAssignment& clusters) {
  if (params.empty()) throw Error("threshold report needs at least one dataset");
  ItemThresholdReport r;
  const std::size_t n = params.size();
  r.means = Matrix(n, 3);
  r.percent_at_or_above = Matrix(n, 3);
  std::size_t i = 0;
  for (const auto& [name, ps] : params) {
    r.datasets.push_back(name);
    r.cluster.push_back(clusters.cluster_of(name));
    const auto m = mean_params(ps);
    for (std::size_t k = 0; k < 3; ++k) r.means(i, k) = m[k];
    ++i;
  }
  for (std::size_t k = 0; k < 3; ++k) r.thresholds[k] = mean(r.means.column(k));
  i = 0;
  for (const auto& [name, ps] : params) {
    for (std::size_t k = 0; k < 3; ++k) {
      std::size_t hits = 0;
      for (const auto& p : ps.items)
        if (param(p, k) >= r.thresholds[k]) ++hits;
      r.percent_at_or_above(i, k) = 100.0 * static_cast<double>(hits) / static_cast<double>(ps.items.size());
    }
    ++i;
  }
  return r;
}

std::string threshold_report_csv(const ItemThresholdReport& r) {
  std::ostringstream out;
  out << "dataset,cluster,parameter,mean,threshold,percent_at_or_above\n";
  for (std::size_t i = 0; i < r.datasets.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k)
      out << csv_escape(r.datasets[i]) << ',' << r.cluster[i] << ',' << kItemParameterNames[k] << ','
          << format_number(r.means(i, k)) << ',' << format_number(r.thresholds[k]) << ','
          << format_number(r.percent_at_or_above(i, k)) << '\n';
  return out.str();
}

std::string threshold_report_svg(const ItemThresholdReport& r) {
  std::vector<BoxGroup> groups;
  for (std::size_t k = 0; k < 3; ++k)
    for (int c : sorted_clusters(r.cluster)) {
      BoxGroup g{fmt::format("{} / cluster {}", kItemParameterNames[k], c), {}};
      for (std::size_t i = 0; i < r.datasets.size(); ++i)
        if (r.cluster[i] == c) g.values.push_back(r.percent_at_or_above(i, k));
      groups.push_back(std::move(g));
    }
  return boxplot_svg("Items at or above the parameter threshold", groups, "% of items");
}

IccCurves median_icc_curve(const std::map<std::string, ItemParameters>& params, const ClusterAssignment& clusters) {
  IccCurves out;
  for (int k = 0; k <= 80; ++k) out.theta.push_back(-4.0 + 0.1 * k);
  std::map<int, std::array<std::vector<double>, 3>> per_cluster;
  for (const auto& [name, ps] : params) {
    const auto m = mean_params(ps);
    auto& slot = per_cluster[clusters.cluster_of(name)];
    for (std::size_t k = 0; k < 3; ++k) slot[k].push_back(m[k]);
  }
  for (const auto& [c, slot] : per_cluster) {
    out.clusters.push_back(c);
    const ItemParams med{median(slot[0]), median(slot[1]), median(slot[2])};
    out.median_params.push_back(med);
    std::vector<double> curve;
    for (double t : out.theta) curve.push_back(icc_probability(t, med));
    out.probability.push_back(std::move(curve));
  }
  return out;
}

std::string icc_curves_csv(const IccCurves& c) {
  std::ostringstream out;
  out << "theta";
  for (int id : c.clusters) out << ",cluster_" << id;
  out << '\n';
  for (std::size_t t = 0; t < c.theta.size(); ++t) {
    out << format_number(c.theta[t]);
    for (std::size_t k = 0; k < c.clusters.size(); ++k) out << ',' << format_number(c.probability[k][t]);
    out << '\n';
  }
  return out.str();
}

std::string icc_params_csv(const IccCurves& c) {
  std::ostringstream out;
  out << "cluster,a,b,c\n";
  for (std::size_t k = 0; k < c.clusters.size(); ++k)
    out << c.clusters[k] << ',' << format_number(c.median_params[k].a) << ',' << format_number(c.median_params[k].b)
        << ',' << format_number(c.median_params[k].c) << '\n';
  return out.str();
}

std::string icc_curves_svg(const IccCurves& c) {
  std::vector<svg::Series> series;
  for (std::size_t k = 0; k < c.clusters.size(); ++k)
    series.push_back({fmt::format("cluster {}", c.clusters[k]), c.probability[k]});
  return svg::line_chart("Median item characteristic curve per cluster", c.theta, series, "theta", "P(correct)");
}

ItemParameters read_item_parameters_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"item_id", "a", "b", "c"})
    throw Error("not an item parameter CSV: " + path.string());
  ItemParameters ps;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw Error("item parameter CSV row has wrong width: " + path.string());
    ps.items.push_back({std::stod(rows[r][1]), std::stod(rows[r][2]), std::stod(rows[r][3])});
  }
  return ps;
}

}  // namespace exirt
