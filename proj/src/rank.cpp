#include "exirt/rank.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "exirt/common.hpp"

namespace exirt {

const RankEntry& AttributeRank::find(const std::string& attribute) const {
  for (const auto& e : entries)
    if (e.attribute == attribute) return e;
  throw Error(fmt::format("attribute '{}' not in rank '{}'", attribute, measure));
}

void AttributeRank::validate() const {
  std::set<std::string> names;
  std::vector<int> positions;
  for (const auto& e : entries) {
    if (!names.insert(e.attribute).second) throw Error("rank repeats attribute " + e.attribute);
    positions.push_back(e.position);
  }
  std::sort(positions.begin(), positions.end());
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (positions[i] != static_cast<int>(i) + 1) throw Error("rank positions are not a permutation of 1..f");
}

AttributeRank make_rank(std::string measure, const std::vector<std::string>& attributes,
                        const std::vector<double>& scores, RankOrder order) {
  if (attributes.size() != scores.size()) throw Error("make_rank: attribute/score length mismatch");
  std::vector<std::size_t> idx(attributes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return order == RankOrder::ascending ? scores[a] < scores[b] : scores[a] > scores[b];
    return attributes[a] < attributes[b];
  });
  AttributeRank rank;
  rank.measure = std::move(measure);
  for (std::size_t p = 0; p < idx.size(); ++p)
    rank.entries.push_back({attributes[idx[p]], scores[idx[p]], static_cast<int>(p) + 1});
  rank.validate();
  return rank;
}

std::string rank_csv(const AttributeRank& rank) {
  std::ostringstream out;
  out << "measure,attribute,score,position\n";
  for (const auto& e : rank.entries)
    out << csv_escape(rank.measure) << ',' << csv_escape(e.attribute) << ',' << format_number(e.score) << ','
        << e.position << '\n';
  return out.str();
}

AttributeRank read_rank_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"measure", "attribute", "score", "position"})
    throw Error("not a rank CSV: " + path.string());
  AttributeRank rank;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4) throw Error(fmt::format("{}: row {} has wrong width", path.string(), r + 1));
    rank.measure = rows[r][0];
    rank.entries.push_back({rows[r][1], std::stod(rows[r][2]), std::stoi(rows[r][3])});
  }
  std::sort(rank.entries.begin(), rank.entries.end(),
            [](const RankEntry& a, const RankEntry& b) { return a.position < b.position; });
  rank.validate();
  return rank;
}

}  // namespace exirt
