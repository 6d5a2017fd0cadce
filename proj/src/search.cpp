#include "exirt/search.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "exirt/common.hpp"

namespace exirt {

namespace {

constexpr std::array<std::string_view, 7> kMethodNames{"golden",    "brent",       "bounded", "ternary",
                                                       "fibonacci", "dichotomous", "golden2"};

const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
const double kCGold = (3.0 - std::sqrt(5.0)) / 2.0;

// All routines below minimize g.
struct Counted {
  const std::function<double(double)>& f;
  int evals = 0;
  double operator()(double x) {
    ++evals;
    return -f(x);
  }
};

double golden(Counted& g, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = g(c), fd = g(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = g(d);
    }
  }
  return 0.5 * (a + b);
}

// Golden section without reusing the surviving interior point.
double golden2(Counted& g, double a, double b, double tol) {
  while (b - a > tol) {
    const double c = b - kInvPhi * (b - a);
    const double d = a + kInvPhi * (b - a);
    if (g(c) < g(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

double ternary(Counted& g, double a, double b, double tol) {
  while (b - a > tol) {
    const double c = a + (b - a) / 3.0;
    const double d = b - (b - a) / 3.0;
    if (g(c) < g(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return 0.5 * (a + b);
}

double dichotomous(Counted& g, double a, double b, double tol) {
  const double delta = tol / 4.0;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double x1 = m - delta, x2 = m + delta;
    if (g(x1) < g(x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return 0.5 * (a + b);
}

double fibonacci(Counted& g, double a, double b, double tol) {
  std::vector<double> fib{1.0, 1.0};
  while (fib.back() < 2.0 * (b - a) / tol) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  std::size_t n = fib.size() - 1;
  if (n < 3) return golden(g, a, b, tol);
  const double len = b - a;
  double x1 = a + fib[n - 2] / fib[n] * len;
  double x2 = a + fib[n - 1] / fib[n] * len;
  double f1 = g(x1), f2 = g(x2);
  for (std::size_t k = n; k > 2; --k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = a + fib[k - 3] / fib[k - 1] * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + fib[k - 2] / fib[k - 1] * (b - a);
      f2 = g(x2);
    }
  }
  return 0.5 * (a + b);
}

double sign_of(double magnitude, double sign) { return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Brent's parabolic interpolation with golden-section fallback, started from
// the bracket (lo, mid, hi).
double brent(Counted& g, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double x = 0.5 * (lo + hi), w = x, v = x;
  double fx = g(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = 1e-10 * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x)) {
        e = x >= xm ? a - x : b - x;
        d = kCGold * e;
      } else {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = sign_of(tol1, xm - x);
      }
    } else {
      e = x >= xm ? a - x : b - x;
      d = kCGold * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + sign_of(tol1, d);
    const double fu = g(u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      w = x;
      x = u;
      fv = fw;
      fw = fx;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        w = u;
        fv = fw;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return x;
}

// Bounded Brent minimization in the fminbound formulation: first probe at the
// golden point, relative-plus-absolute tolerance.
double bounded(Counted& g, double a, double b, double xatol) {
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double fulc = a + kCGold * (b - a);
  double nfc = fulc, xf = fulc;
  double rat = 0.0, e = 0.0;
  double fx = g(xf);
  double ffulc = fx, fnfc = fx;
  double xm = 0.5 * (a + b);
  double tol1 = sqrt_eps * std::abs(xf) + xatol / 3.0;
  double tol2 = 2.0 * tol1;
  for (int iter = 0; iter < 500 && std::abs(xf - xm) > tol2 - 0.5 * (b - a); ++iter) {
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      golden_step = false;
      double r = (xf - nfc) * (fx - ffulc);
      double q = (xf - fulc) * (fx - fnfc);
      double p = (xf - fulc) * q - (xf - nfc) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      r = e;
      e = rat;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - xf) && p < q * (b - xf)) {
        rat = p / q;
        const double x = xf + rat;
        if (x - a < tol2 || b - x < tol2) rat = tol1 * (xm - xf >= 0.0 ? 1.0 : -1.0);
      } else {
        golden_step = true;
      }
    }
    if (golden_step) {
      e = xf >= xm ? a - xf : b - xf;
      rat = kCGold * e;
    }
    const double si = rat >= 0.0 ? 1.0 : -1.0;
    const double x = xf + si * std::max(std::abs(rat), tol1);
    const double fu = g(x);
    if (fu <= fx) {
      if (x >= xf) {
        a = xf;
      } else {
        b = xf;
      }
      fulc = nfc;
      ffulc = fnfc;
      nfc = xf;
      fnfc = fx;
      xf = x;
      fx = fu;
    } else {
      if (x < xf) {
        a = x;
      } else {
        b = x;
      }
      if (fu <= fnfc || nfc == xf) {
        fulc = nfc;
        ffulc = fnfc;
        nfc = x;
        fnfc = fu;
      } else if (fu <= ffulc || fulc == xf || fulc == nfc) {
        fulc = x;
        ffulc = fu;
      }
    }
    xm = 0.5 * (a + b);
    tol1 = sqrt_eps * std::abs(xf) + xatol / 3.0;
    tol2 = 2.0 * tol1;
  }
  return xf;
}

}  // namespace

std::string_view to_string(SearchMethod method) { return kMethodNames.at(static_cast<std::size_t>(method)); }

SearchMethod search_method_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == s) return static_cast<SearchMethod>(i);
  throw Error(fmt::format("unknown search method '{}'", s));
}

SearchResult maximize(const std::function<double(double)>& f, double lo, double hi, SearchMethod method, double tol) {
  if (!(hi > lo)) throw Error("maximize: empty interval");
  if (!(tol > 0.0)) throw Error("maximize: tolerance must be positive");
  Counted g{f};
  double x = 0.0;
  switch (method) {
    case SearchMethod::golden: x = golden(g, lo, hi, tol); break;
    case SearchMethod::golden2: x = golden2(g, lo, hi, tol); break;
    case SearchMethod::ternary: x = ternary(g, lo, hi, tol); break;
    case SearchMethod::dichotomous: x = dichotomous(g, lo, hi, tol); break;
    case SearchMethod::fibonacci: x = fibonacci(g, lo, hi, tol); break;
    case SearchMethod::brent: x = brent(g, lo, hi, tol); break;
    case SearchMethod::bounded: x = bounded(g, lo, hi, tol); break;
  }
  x = std::clamp(x, lo, hi);
  SearchResult best{x, -g(x), 0};
  for (double end : {lo, hi}) {
    const double v = -g(end);
    if (v > best.value) best = {end, v, 0};
  }
  best.evaluations = g.evals;
  return best;
}

}  // namespace exirt
