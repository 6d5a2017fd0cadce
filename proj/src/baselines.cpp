#include "exirt/baselines.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace exirt {

AttributeRank permutation_importance_rank(const TrainedEnsemble& model, const Dataset& test, int repeats,
                                          std::uint64_t seed) {
  if (repeats < 1) throw Error("permutation importance needs repeats >= 1");
  if (test.attribute_names() != model.feature_names) throw Error("permutation importance: schema mismatch");
  const Matrix x = test.features();
  const double base = accuracy(model, x, test.labels);
  std::vector<double> scores(model.feature_count(), 0.0);
  for (std::size_t a = 0; a < model.feature_count(); ++a) {
    double drop = 0.0;
    for (int r = 0; r < repeats; ++r) {
      // Seeds depend on the attribute index, never on its name.
      Rng rng = make_rng(mix_seed(seed, a, static_cast<std::uint64_t>(r)));
      auto col = x.column(a);
      shuffle(col, rng);
      Matrix shuffled = x;
      shuffled.set_column(a, col);
      drop += base - accuracy(model, shuffled, test.labels);
    }
    scores[a] = drop / repeats;
  }
  return make_rank("permutation", model.feature_names, scores, RankOrder::descending);
}

namespace {

// The column keeps its slot but carries no information, so the retrained
// model sees the same attribute indices and random streams as the baseline.
Dataset neutralize(const Dataset& ds, std::size_t column) {
  Dataset out = ds;
  std::fill(out.columns[column].values.begin(), out.columns[column].values.end(), 0.0);
  return out;
}

}  // namespace

AttributeRank loco_rank(const Dataset& train, const Dataset& test, Family family, const Hyperparameters& hyper,
                        std::uint64_t seed) {
  if (train.attribute_count() < 2) throw Error("LOCO needs at least 2 attributes");
  if (train.attribute_names() != test.attribute_names()) throw Error("LOCO: train/test schema mismatch");
  const auto full = exirt::train(family, train, hyper, seed);
  const double base = accuracy(full, test.features(), test.labels);
  std::vector<double> scores(train.attribute_count());
  for (std::size_t a = 0; a < train.attribute_count(); ++a) {
    try {
      const auto reduced = exirt::train(family, neutralize(train, a), hyper, seed);
      const Dataset reduced_test = neutralize(test, a);
      scores[a] = base - accuracy(reduced, reduced_test.features(), reduced_test.labels);
    } catch (const std::exception& e) {
      throw Error(fmt::format("LOCO retrain without '{}': {}", train.columns[a].name, e.what()));
    }
  }
  return make_rank("loco", train.attribute_names(), scores, RankOrder::descending);
}

namespace {

double entropy2(double pos, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {pos, total - pos}) {
    const double p = c / total;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

double information_gain(std::span<const double> values, std::span<const int> labels, bool categorical) {
  if (values.size() != labels.size()) throw Error("information_gain: length mismatch");
  const double n = static_cast<double>(labels.size());
  if (labels.empty()) return 0.0;
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double parent = entropy2(pos, n);

  if (categorical) {
    std::map<double, std::pair<double, double>> groups;  // value -> (positives, count)
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto& g = groups[values[i]];
      g.first += labels[i];
      g.second += 1.0;
    }
    double child = 0.0;
    for (const auto& [v, g] : groups) child += g.second / n * entropy2(g.first, g.second);
    return std::max(0.0, parent - child);
  }

  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double best = 0.0;
  double left_pos = 0.0;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    left_pos += labels[idx[k]];
    if (values[idx[k]] == values[idx[k + 1]]) continue;
    const double nl = static_cast<double>(k + 1), nr = n - nl;
    const double child = nl / n * entropy2(left_pos, nl) + nr / n * entropy2(pos - left_pos, nr);
    best = std::max(best, parent - child);
  }
  return best;
}

AttributeRank info_gain_rank(const Dataset& train) {
  const auto ones = std::count(train.labels.begin(), train.labels.end(), 1);
  if (ones == 0 || ones == static_cast<std::ptrdiff_t>(train.row_count()))
    throw Error("info_gain_rank needs both classes present");
  std::vector<double> scores;
  for (const auto& col : train.columns) scores.push_back(information_gain(col.values, train.labels, col.categorical()));
  return make_rank("infogain", train.attribute_names(), scores, RankOrder::descending);
}

}  // namespace exirt
