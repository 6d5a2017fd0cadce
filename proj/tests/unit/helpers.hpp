#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "exirt/dataset.hpp"

namespace testing {

inline std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::path(EXIRT_UNIT_SCRATCH_DIR);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_text(const std::string& name, const std::string& contents) {
  auto path = scratch_dir() / name;
  std::ofstream(path, std::ios::binary) << contents;
  return path;
}

inline exirt::AttributeColumn numeric_column(std::string name, std::vector<double> values) {
  return {std::move(name), exirt::AttributeKind::numeric, std::move(values), {}};
}

inline exirt::Dataset make_dataset(std::vector<exirt::AttributeColumn> columns, std::vector<int> labels) {
  exirt::Dataset ds;
  ds.name = "toy";
  ds.columns = std::move(columns);
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

}  // namespace testing
