#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace exirt {

enum class RankOrder { ascending, descending };

struct RankEntry {
  std::string attribute;
  double score = 0.0;
  int position = 0;  // 1-based
};

/// Ordered attribute ranking shared by every measure. Position 1 is the most
/// relevant (or important) attribute.
struct AttributeRank {
  std::string measure;
  std::vector<RankEntry> entries;

  std::size_t size() const { return entries.size(); }
  const RankEntry& find(const std::string& attribute) const;
  /// Throws if positions are not a permutation of 1..f or names repeat.
  void validate() const;
};

/// Sorts by score in the given direction, ties by attribute name, and assigns positions.
AttributeRank make_rank(std::string measure, const std::vector<std::string>& attributes,
                        const std::vector<double>& scores, RankOrder order);

std::string rank_csv(const AttributeRank& rank);
AttributeRank read_rank_csv(const std::filesystem::path& path);

}  // namespace exirt
