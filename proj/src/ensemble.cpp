#include "exirt/ensemble.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace exirt {

std::string_view to_string(Family family) {
  return family == Family::random_forest ? "random_forest" : "gradient_boosting";
}

Family family_from_string(std::string_view s) {
  if (s == "random_forest" || s == "rf") return Family::random_forest;
  if (s == "gradient_boosting" || s == "gb") return Family::gradient_boosting;
  throw Error(fmt::format("unknown model family '{}'", s));
}

double DecisionTree::predict(std::span<const double> row) const {
  if (nodes_.empty()) throw Error("predict on an empty tree");
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    const double x = row[static_cast<std::size_t>(n.feature)];
    bool go_left;
    if (n.categorical()) {
      go_left = std::binary_search(n.left_categories.begin(), n.left_categories.end(), static_cast<int>(x));
    } else {
      go_left = x <= n.threshold;
    }
    i = go_left ? n.left : n.right;
  }
  return nodes_[i].value;
}

bool DecisionTree::uses_feature(int feature) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const TreeNode& n) { return n.feature == feature; });
}

void DecisionTree::validate(std::size_t n_features) const {
  if (nodes_.empty()) throw Error("tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= n_features) throw Error("tree node references unknown feature");
    for (int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) || child >= static_cast<int>(nodes_.size()))
        throw Error("tree node has an invalid child index");
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  if (parents[0] != 0) throw Error("tree root has a parent");
  for (std::size_t i = 1; i < parents.size(); ++i)
    if (parents[i] != 1) throw Error("tree node is not reachable exactly once");
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  std::vector<int> left_categories;
  double gain = 0.0;
};

// Grows one tree by greedy variance reduction on `target`. For 0/1 targets the
// variance reduction equals half the Gini decrease, so RF uses the same
// routine. Leaf values come from `leaf_value(rows)`.
class TreeGrower {
 public:
  TreeGrower(const Matrix& x, std::span<const double> target, const std::vector<bool>& categorical,
             const Hyperparameters& hyper, int features_per_split, Rng* rng)
      : x_(x), target_(target), categorical_(categorical), hyper_(hyper), mtry_(features_per_split), rng_(rng) {}

  template <typename LeafFn>
  DecisionTree grow(std::vector<std::size_t> rows, LeafFn&& leaf_value) {
    nodes_.clear();
    build(rows, 0, leaf_value);
    return DecisionTree(std::move(nodes_), hyper_.max_depth);
  }

 private:
  template <typename LeafFn>
  int build(std::vector<std::size_t>& rows, int depth, LeafFn& leaf_value) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, hyper_.min_leaf));
    Split best;
    if (depth < hyper_.max_depth && rows.size() >= 2 * min_leaf && !constant_target(rows)) {
      best = find_split(rows, min_leaf);
    }
    if (best.feature < 0) {
      nodes_[id].value = leaf_value(rows);
      return id;
    }
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      const double v = x_(r, static_cast<std::size_t>(best.feature));
      const bool left = best.left_categories.empty()
                            ? v <= best.threshold
                            : std::binary_search(best.left_categories.begin(), best.left_categories.end(),
                                                 static_cast<int>(v));
      (left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(left_rows, depth + 1, leaf_value);
    const int r = build(right_rows, depth + 1, leaf_value);
    auto& node = nodes_[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left_categories = std::move(best.left_categories);
    node.left = l;
    node.right = r;
    return id;
  }

  bool constant_target(const std::vector<std::size_t>& rows) const {
    const double first = target_[rows.front()];
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return target_[r] == first; });
  }

  std::vector<int> candidate_features() {
    std::vector<int> all(x_.cols());
    std::iota(all.begin(), all.end(), 0);
    const auto k = static_cast<std::size_t>(mtry_);
    if (rng_ == nullptr || k >= all.size()) return all;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + uniform_index(*rng_, all.size() - i);
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }

  Split find_split(const std::vector<std::size_t>& rows, std::size_t min_leaf) {
    double total = 0.0;
    for (std::size_t r : rows) total += target_[r];
    const double n = static_cast<double>(rows.size());
    const double parent_score = total * total / n;

    Split best;
    for (int f : candidate_features()) {
      Split s = categorical_[static_cast<std::size_t>(f)] ? categorical_split(rows, f, total, parent_score, min_leaf)
                                                          : numeric_split(rows, f, total, parent_score, min_leaf);
      if (s.feature >= 0 && s.gain > best.gain) best = std::move(s);
    }
    if (best.gain <= 1e-12) best.feature = -1;
    return best;
  }

  Split numeric_split(const std::vector<std::size_t>& rows, int f, double total, double parent_score,
                      std::size_t min_leaf) const {
    const auto fc = static_cast<std::size_t>(f);
    std::vector<std::pair<double, double>> vals;
    vals.reserve(rows.size());
    for (std::size_t r : rows) vals.emplace_back(x_(r, fc), target_[r]);
    std::sort(vals.begin(), vals.end());
    Split best;
    double left_sum = 0.0;
    const std::size_t n = vals.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += vals[i].second;
      if (vals[i].first == vals[i + 1].first) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) - parent_score;
      if (gain > best.gain) {
        double mid = 0.5 * (vals[i].first + vals[i + 1].first);
        if (mid >= vals[i + 1].first) mid = vals[i].first;
        best.feature = f;
        best.threshold = mid;
        best.gain = gain;
      }
    }
    return best;
  }

  Split categorical_split(const std::vector<std::size_t>& rows, int f, double total, double parent_score,
                          std::size_t min_leaf) const {
    const auto fc = static_cast<std::size_t>(f);
    std::map<int, std::pair<double, std::size_t>> per_cat;
    for (std::size_t r : rows) {
      auto& e = per_cat[static_cast<int>(x_(r, fc))];
      e.first += target_[r];
      e.second += 1;
    }
    Split best;
    if (per_cat.size() < 2) return best;
    // Ordering categories by mean target makes the best prefix an optimal subset split.
    std::vector<std::pair<int, std::pair<double, std::size_t>>> cats(per_cat.begin(), per_cat.end());
    std::stable_sort(cats.begin(), cats.end(), [](const auto& a, const auto& b) {
      return a.second.first / static_cast<double>(a.second.second) <
             b.second.first / static_cast<double>(b.second.second);
    });
    double left_sum = 0.0;
    std::size_t nl = 0;
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i + 1 < cats.size(); ++i) {
      left_sum += cats[i].second.first;
      nl += cats[i].second.second;
      const std::size_t nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) - parent_score;
      if (gain > best.gain) {
        best.feature = f;
        best.gain = gain;
        best.left_categories.clear();
        for (std::size_t j = 0; j <= i; ++j) best.left_categories.push_back(cats[j].first);
        std::sort(best.left_categories.begin(), best.left_categories.end());
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> target_;
  const std::vector<bool>& categorical_;
  const Hyperparameters& hyper_;
  int mtry_;
  Rng* rng_;
  std::vector<TreeNode> nodes_;
};

void check_trainable(const Dataset& train, const Hyperparameters& hyper) {
  train.validate();
  if (train.attribute_count() == 0) throw Error("training set has no attributes");
  const auto ones = std::count(train.labels.begin(), train.labels.end(), 1);
  if (ones == 0 || ones == static_cast<std::ptrdiff_t>(train.row_count()))
    throw Error("degenerate training set: only one class present");
  if (hyper.n_trees < 1) throw Error("n_trees must be >= 1");
  if (hyper.max_depth < 0) throw Error("max_depth must be >= 0");
  if (hyper.min_leaf < 1) throw Error("min_leaf must be >= 1");
}

TrainedEnsemble skeleton(Family family, const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed) {
  TrainedEnsemble m;
  m.family = family;
  m.hyper = hyper;
  m.feature_names = train.attribute_names();
  m.categorical = train.categorical_mask();
  m.training_seed = seed;
  return m;
}

}  // namespace

TrainedEnsemble train_random_forest(const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed) {
  check_trainable(train, hyper);
  TrainedEnsemble m = skeleton(Family::random_forest, train, hyper, seed);
  const Matrix x = train.features();
  std::vector<double> y(train.labels.begin(), train.labels.end());
  const std::size_t f = train.attribute_count();
  int mtry = hyper.max_features > 0 ? hyper.max_features
                                    : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(f)))));
  mtry = std::min<int>(mtry, static_cast<int>(f));
  const std::size_t n = train.row_count();

  auto leaf = [&](const std::vector<std::size_t>& rows) {
    double s = 0.0;
    for (std::size_t r : rows) s += y[r];
    return s / static_cast<double>(rows.size());
  };

  m.trees.reserve(static_cast<std::size_t>(hyper.n_trees));
  for (int t = 0; t < hyper.n_trees; ++t) {
    // Each tree's stream depends only on (seed, tree index).
    Rng rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = uniform_index(rng, n);
    TreeGrower grower(x, y, m.categorical, hyper, mtry, &rng);
    m.trees.push_back(grower.grow(std::move(sample), leaf));
  }
  m.tree_weights.assign(m.trees.size(), 1.0 / static_cast<double>(m.trees.size()));
  return m;
}

TrainedEnsemble train_gradient_boosting(const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed) {
  check_trainable(train, hyper);
  if (hyper.learning_rate < 0) throw Error("learning_rate must be >= 0");
  TrainedEnsemble m = skeleton(Family::gradient_boosting, train, hyper, seed);
  const Matrix x = train.features();
  const std::size_t n = train.row_count();
  const std::size_t f = train.attribute_count();
  const double prior = static_cast<double>(std::count(train.labels.begin(), train.labels.end(), 1)) /
                       static_cast<double>(n);
  m.initial_score = std::log(prior / (1.0 - prior));

  const int mtry = hyper.max_features > 0 ? std::min<int>(hyper.max_features, static_cast<int>(f))
                                          : static_cast<int>(f);
  std::vector<double> score(n, m.initial_score);
  std::vector<double> residual(n), hessian(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  auto leaf = [&](const std::vector<std::size_t>& rows) {
    // One Newton step on the logistic loss.
    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += residual[r];
      h += hessian[r];
    }
    return g / std::max(h, 1e-12);
  };

  for (int t = 0; t < hyper.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      residual[i] = static_cast<double>(train.labels[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    Rng rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    TreeGrower grower(x, residual, m.categorical, hyper, mtry, static_cast<std::size_t>(mtry) < f ? &rng : nullptr);
    DecisionTree tree = grower.grow(all, leaf);
    for (std::size_t i = 0; i < n; ++i) score[i] += hyper.learning_rate * tree.predict(x.row(i));
    m.trees.push_back(std::move(tree));
    m.tree_weights.push_back(hyper.learning_rate);
  }
  return m;
}

TrainedEnsemble train(Family family, const Dataset& train_set, const Hyperparameters& hyper, std::uint64_t seed) {
  return family == Family::random_forest ? train_random_forest(train_set, hyper, seed)
                                         : train_gradient_boosting(train_set, hyper, seed);
}

double TrainedEnsemble::predict_proba_row(std::span<const double> row) const {
  if (row.size() != feature_names.size())
    throw Error(fmt::format("row width {} does not match model width {}", row.size(), feature_names.size()));
  double acc = 0.0;
  for (std::size_t t = 0; t < trees.size(); ++t) acc += tree_weights[t] * trees[t].predict(row);
  if (family == Family::random_forest) return std::clamp(acc, 0.0, 1.0);
  return sigmoid(initial_score + acc);
}

std::vector<double> TrainedEnsemble::predict_proba(const Matrix& rows) const {
  if (!rows.empty() && rows.cols() != feature_names.size())
    throw Error(fmt::format("input width {} does not match model width {}", rows.cols(), feature_names.size()));
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_proba_row(rows.row(r));
  return out;
}

std::vector<int> TrainedEnsemble::predict(const Matrix& rows) const {
  const auto p = predict_proba(rows);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
  return out;
}

bool TrainedEnsemble::uses_feature(int feature) const {
  return std::any_of(trees.begin(), trees.end(), [&](const DecisionTree& t) { return t.uses_feature(feature); });
}

double accuracy(const TrainedEnsemble& model, const Matrix& rows, std::span<const int> labels) {
  if (rows.rows() != labels.size()) throw Error("accuracy: row/label count mismatch");
  if (labels.empty()) return 0.0;
  const auto pred = model.predict(rows);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::string model_to_json(const TrainedEnsemble& model) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["family"] = std::string(to_string(model.family));
  j["hyperparameters"] = {{"n_trees", model.hyper.n_trees},
                          {"max_depth", model.hyper.max_depth},
                          {"min_leaf", model.hyper.min_leaf},
                          {"learning_rate", model.hyper.learning_rate},
                          {"max_features", model.hyper.max_features}};
  j["training_seed"] = model.training_seed;
  j["feature_names"] = model.feature_names;
  j["categorical"] = model.categorical;
  j["initial_score"] = model.initial_score;
  j["tree_weights"] = model.tree_weights;
  ordered_json trees = ordered_json::array();
  for (const auto& t : model.trees) {
    ordered_json tj;
    tj["max_depth"] = t.max_depth();
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    std::vector<std::vector<int>> cats;
    for (const auto& n : t.nodes()) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
      cats.push_back(n.left_categories);
    }
    tj["feature"] = feature;
    tj["threshold"] = threshold;
    tj["left"] = left;
    tj["right"] = right;
    tj["value"] = value;
    tj["left_categories"] = cats;
    trees.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

TrainedEnsemble model_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion)
      throw Error(fmt::format("model schema version {} is not supported (expected {})", version, kModelSchemaVersion));
    TrainedEnsemble m;
    m.family = family_from_string(j.at("family").get<std::string>());
    const auto& h = j.at("hyperparameters");
    m.hyper.n_trees = h.at("n_trees").get<int>();
    m.hyper.max_depth = h.at("max_depth").get<int>();
    m.hyper.min_leaf = h.at("min_leaf").get<int>();
    m.hyper.learning_rate = h.at("learning_rate").get<double>();
    m.hyper.max_features = h.at("max_features").get<int>();
    m.training_seed = j.at("training_seed").get<std::uint64_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.categorical = j.at("categorical").get<std::vector<bool>>();
    m.initial_score = j.at("initial_score").get<double>();
    m.tree_weights = j.at("tree_weights").get<std::vector<double>>();
    for (const auto& tj : j.at("trees")) {
      const auto feature = tj.at("feature").get<std::vector<int>>();
      const auto threshold = tj.at("threshold").get<std::vector<double>>();
      const auto left = tj.at("left").get<std::vector<int>>();
      const auto right = tj.at("right").get<std::vector<int>>();
      const auto value = tj.at("value").get<std::vector<double>>();
      const auto cats = tj.at("left_categories").get<std::vector<std::vector<int>>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || cats.size() != n)
        throw Error("malformed model file: tree arrays differ in length");
      std::vector<TreeNode> nodes(n);
      for (std::size_t i = 0; i < n; ++i) nodes[i] = {feature[i], threshold[i], cats[i], left[i], right[i], value[i]};
      DecisionTree tree(std::move(nodes), tj.at("max_depth").get<int>());
      tree.validate(m.feature_names.size());
      m.trees.push_back(std::move(tree));
    }
    if (m.tree_weights.size() != m.trees.size()) throw Error("malformed model file: tree_weights length");
    if (m.categorical.size() != m.feature_names.size()) throw Error("malformed model file: categorical length");
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedEnsemble& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

TrainedEnsemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace exirt
