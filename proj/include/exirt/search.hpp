#pragma once

#include <array>
#include <functional>
#include <string_view>

namespace exirt {

/// Bounded one-dimensional maximizers, interchangeable for ability estimation.
enum class SearchMethod { golden, brent, bounded, ternary, fibonacci, dichotomous, golden2 };

inline constexpr std::array<SearchMethod, 7> kAllSearchMethods{
    SearchMethod::golden,    SearchMethod::brent,       SearchMethod::bounded, SearchMethod::ternary,
    SearchMethod::fibonacci, SearchMethod::dichotomous, SearchMethod::golden2,
};

std::string_view to_string(SearchMethod method);
SearchMethod search_method_from_string(std::string_view s);

struct SearchResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Maximizes f on [lo, hi] to within `tol` in x. The interval endpoints are
/// also evaluated, so monotone objectives return the maximizing endpoint.
SearchResult maximize(const std::function<double(double)>& f, double lo, double hi, SearchMethod method,
                      double tol = 1e-4);

}  // namespace exirt
