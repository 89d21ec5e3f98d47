#pragma once

// Slow reference implementations used to cross-check the library. None of
// them share code with include/sqfr.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace sqfr::oracle {

// Literal double loop over all ordered pairs, self-pairs included:
// n / (n - 1) * sum |x_i - x_j| / (2 n^2 mean).
inline double gini_literal(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x) total += v;
  const double mean = total / n;
  if (mean == 0.0) return 0.0;
  double pairs = 0.0;
  for (double a : x) {
    for (double b : x) pairs += std::abs(a - b);
  }
  return n / (n - 1.0) * pairs / (2.0 * n * n * mean);
}

// Integer pooled scores only: thresholds min+1, ..., max by enumeration,
// then a full recount of every (group, threshold) pair.
inline double mdg_bruteforce(const std::map<std::string, std::vector<double>>& groups) {
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& [label, v] : groups) {
    for (double q : v) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  }
  std::vector<double> thresholds;
  for (double t = lo + 1.0; t <= hi; t += 1.0) thresholds.push_back(t);
  if (thresholds.empty()) return 0.0;
  double gaps = 0.0;
  for (double t : thresholds) {
    double fmin = 2.0;
    double fmax = -1.0;
    for (const auto& [label, v] : groups) {
      std::size_t below = 0;
      for (double q : v) {
        if (q < t) ++below;
      }
      const double f = static_cast<double>(below) / static_cast<double>(v.size());
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    gaps += fmax - fmin;
  }
  return gaps / static_cast<double>(thresholds.size());
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return area;
}

inline bool rel_close(double a, double b, double rel) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale || std::abs(a - b) <= 1e-300;
}

}  // namespace sqfr::oracle
