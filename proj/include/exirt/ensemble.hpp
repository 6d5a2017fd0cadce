#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exirt/common.hpp"
#include "exirt/dataset.hpp"

namespace exirt {

enum class Family { random_forest, gradient_boosting };

std::string_view to_string(Family family);
Family family_from_string(std::string_view s);

/// Flattened binary tree node. feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;          // numeric: go left when x <= threshold
  std::vector<int> left_categories;  // categorical: go left when id is listed (sorted)
  int left = -1;
  int right = -1;
  double value = 0.0;  // RF: class-1 probability; GB: additive log-odds update

  bool is_leaf() const { return feature < 0; }
  bool categorical() const { return !left_categories.empty(); }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, int max_depth) : nodes_(std::move(nodes)), max_depth_(max_depth) {}

  double predict(std::span<const double> row) const;
  bool uses_feature(int feature) const;
  /// Checks that the nodes form a single rooted tree where each internal node has two children.
  void validate(std::size_t n_features) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int max_depth() const { return max_depth_; }

 private:
  std::vector<TreeNode> nodes_;
  int max_depth_ = 0;
};

struct Hyperparameters {
  int n_trees = 100;
  int max_depth = 8;
  int min_leaf = 2;
  double learning_rate = 0.1;
  /// Attributes drawn per split; 0 means floor(sqrt(f)) for RF and all attributes for GB.
  int max_features = 0;

  static Hyperparameters random_forest_defaults() { return {100, 8, 2, 0.1, 0}; }
  static Hyperparameters gradient_boosting_defaults() { return {100, 3, 1, 0.1, 0}; }
  static Hyperparameters defaults(Family family) {
    return family == Family::random_forest ? random_forest_defaults() : gradient_boosting_defaults();
  }
};

struct TrainedEnsemble {
  Family family = Family::random_forest;
  Hyperparameters hyper;
  std::vector<DecisionTree> trees;
  std::vector<double> tree_weights;
  double initial_score = 0.0;
  std::vector<std::string> feature_names;
  std::vector<bool> categorical;
  std::uint64_t training_seed = 0;

  std::size_t feature_count() const { return feature_names.size(); }

  /// Probability of class 1 for each row; throws on width mismatch.
  std::vector<double> predict_proba(const Matrix& rows) const;
  std::vector<int> predict(const Matrix& rows) const;
  double predict_proba_row(std::span<const double> row) const;

  bool uses_feature(int feature) const;
};

TrainedEnsemble train_random_forest(const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed);
TrainedEnsemble train_gradient_boosting(const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed);
TrainedEnsemble train(Family family, const Dataset& train, const Hyperparameters& hyper, std::uint64_t seed);

double accuracy(const TrainedEnsemble& model, const Matrix& rows, std::span<const int> labels);

inline constexpr int kModelSchemaVersion = 1;

std::string model_to_json(const TrainedEnsemble& model);
TrainedEnsemble model_from_json(const std::string& text);
void save_model(const TrainedEnsemble& model, const std::filesystem::path& path);
TrainedEnsemble load_model(const std::filesystem::path& path);

}  // namespace exirt
