#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exirt {

/// Raised for any violated precondition or malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. Attribute matrices use one row per
/// instance and one column per attribute.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Deterministic randomness. std::mt19937_64 has a fully specified output
// sequence; the distributions below are written out so results do not depend
// on the standard library's distribution implementations.
using Rng = std::mt19937_64;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);
Rng make_rng(std::uint64_t seed);
double uniform01(Rng& rng);
std::size_t uniform_index(Rng& rng, std::size_t n);
double standard_normal(Rng& rng);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

double mean(std::span<const double> v);
/// Population standard deviation (divides by n).
double stddev(std::span<const double> v);
double pearson(std::span<const double> x, std::span<const double> y);
/// Quantile with linear interpolation between order statistics (position (n-1)p).
double quantile_sorted(std::span<const double> sorted, double p);
double median(std::vector<double> v);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

/// RFC-4180 field quoting, applied only when needed.
std::string csv_escape(std::string_view field);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace exirt
