#pragma once

// Sample quality fairness rates: group aggregates, the bias-corrected Gini
// coefficient over those aggregates, and the discard-gap measure.
//
// Every function here is pure. Groups are never weighted by their sample
// count: each group contributes exactly one aggregate value to the Gini
// coefficient, however many samples it holds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqfr/errors.hpp"

namespace sqfr {

enum class Aggregator { mean, median, lwm };

enum class Measure {
  mean_gc_sqfr,
  median_gc_sqfr,
  mean_gc_csqfr,
  lwm_gc_sqfr,
  lwm_gc_csqfr,
  mdg_sqfr,
  // Not part of the standard report; exists so csqfr composes with any
  // aggregator.
  median_gc_csqfr,
};

// The six measures of a full report, in report order.
inline constexpr std::array<Measure, 6> kReportMeasures = {
    Measure::mean_gc_sqfr, Measure::median_gc_sqfr, Measure::mean_gc_csqfr,
    Measure::lwm_gc_sqfr,  Measure::lwm_gc_csqfr,   Measure::mdg_sqfr,
};

inline std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::mean_gc_sqfr: return "mean-gc-sqfr";
    case Measure::median_gc_sqfr: return "median-gc-sqfr";
    case Measure::mean_gc_csqfr: return "mean-gc-csqfr";
    case Measure::lwm_gc_sqfr: return "lwm-gc-sqfr";
    case Measure::lwm_gc_csqfr: return "lwm-gc-csqfr";
    case Measure::mdg_sqfr: return "mdg-sqfr";
    case Measure::median_gc_csqfr: return "median-gc-csqfr";
  }
  return "unknown";
}

// Accepts the hyphenated spelling, plus "lwm-csqfr" as an alias of
// "lwm-gc-csqfr".
inline std::optional<Measure> parse_measure(std::string_view name) {
  if (name == "lwm-csqfr") return Measure::lwm_gc_csqfr;
  for (auto m : {Measure::mean_gc_sqfr, Measure::median_gc_sqfr,
                 Measure::mean_gc_csqfr, Measure::lwm_gc_sqfr,
                 Measure::lwm_gc_csqfr, Measure::mdg_sqfr,
                 Measure::median_gc_csqfr}) {
    if (measure_name(m) == name) return m;
  }
  return std::nullopt;
}

inline std::string_view aggregator_name(Aggregator a) {
  switch (a) {
    case Aggregator::mean: return "mean";
    case Aggregator::median: return "median";
    case Aggregator::lwm: return "lwm";
  }
  return "unknown";
}

// Per-group quality scores of one quality component. Groups are keyed by
// an opaque label; std::map keeps them in a canonical order.
struct GroupedScores {
  std::string component_id;
  std::map<std::string, std::vector<double>> groups;

  friend bool operator==(const GroupedScores&, const GroupedScores&) = default;
};

struct GroupAggregates {
  Aggregator kind = Aggregator::mean;
  std::map<std::string, double> values;
};

struct FairnessScore {
  Measure measure = Measure::mean_gc_sqfr;
  double value = 1.0;  // in [0, 1], higher is fairer
};

// Per-group fraction of samples strictly below each threshold.
struct DiscardCurve {
  std::vector<double> thresholds;
  std::map<std::string, std::vector<double>> fractions;
};

enum class ThresholdMode {
  sequence,  // min + step, min + 2 step, ..., capped with max
  observed,  // distinct pooled scores above the minimum
};

struct EvalOptions {
  double threshold_step = 1.0;
  ThresholdMode thresholds = ThresholdMode::sequence;
};

namespace detail {

inline void require_well_formed(const GroupedScores& scores) {
  const std::string where =
      scores.component_id.empty() ? std::string("component")
                                  : "component '" + scores.component_id + "'";
  if (scores.groups.empty()) throw ValidationError(where + ": no groups");
  for (const auto& [label, values] : scores.groups) {
    if (values.empty()) {
      throw ValidationError(where + ": group '" + label + "' has no scores");
    }
    for (double q : values) {
      if (!std::isfinite(q) || q < 0.0) {
        throw ValidationError(where + ": group '" + label +
                              "' has a score that is negative or not finite");
      }
    }
  }
}

struct Range {
  double lo;
  double hi;
};

inline Range pooled_range(const GroupedScores& scores) {
  Range r{std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const auto& [label, values] : scores.groups) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    r.lo = std::min(r.lo, *lo);
    r.hi = std::max(r.hi, *hi);
  }
  return r;
}

// Sums run over sorted values so equal multisets give bit-identical results.
inline std::vector<double> sorted_copy(const std::vector<double>& values) {
  std::vector<double> out(values);
  std::sort(out.begin(), out.end());
  return out;
}

inline void require_unit_interval(double gc) {
  if (!(gc >= 0.0 && gc <= 1.0)) {
    throw DomainError("Gini coefficient must lie in [0, 1], got " +
                      std::to_string(gc));
  }
}

}  // namespace detail

inline GroupAggregates mean_aggregate(const GroupedScores& scores) {
  detail::require_well_formed(scores);
  GroupAggregates out{Aggregator::mean, {}};
  for (const auto& [label, values] : scores.groups) {
    const auto sorted = detail::sorted_copy(values);
    const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    out.values.emplace(label, sum / static_cast<double>(values.size()));
  }
  return out;
}

// Even-sized groups take the mean of the two middle order statistics.
inline double median_of(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty group");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return lower + (upper - lower) / 2.0;
}

inline GroupAggregates median_aggregate(const GroupedScores& scores) {
  detail::require_well_formed(scores);
  GroupAggregates out{Aggregator::median, {}};
  for (const auto& [label, values] : scores.groups) {
    out.values.emplace(label, median_of(values));
  }
  return out;
}

// Low-weighted mean. Every sample gets weight 1 - (q - min) / (max - min),
// with min and max taken over the pooled scores of all groups, so the
// lowest pooled score weighs 1 and the highest weighs 0.
//
// Degenerate cases: when every pooled score is the same, each group's value
// is that score; a group whose scores all equal the pooled maximum (weight
// sum 0) gets the pooled maximum.
inline GroupAggregates lwm_aggregate(const GroupedScores& scores) {
  detail::require_well_formed(scores);
  const auto [lo, hi] = detail::pooled_range(scores);
  GroupAggregates out{Aggregator::lwm, {}};
  if (lo == hi) {
    for (const auto& [label, values] : scores.groups) out.values.emplace(label, lo);
    return out;
  }
  const double span = hi - lo;
  for (const auto& [label, values] : scores.groups) {
    const auto sorted = detail::sorted_copy(values);
    double weighted = 0.0;
    double weights = 0.0;
    for (double q : sorted) {
      const double w = 1.0 - (q - lo) / span;
      weighted += w * q;
      weights += w;
    }
    if (weights <= 0.0) {
      out.values.emplace(label, hi);
      continue;
    }
    out.values.emplace(label, std::clamp(weighted / weights, sorted.front(), sorted.back()));
  }
  return out;
}

// Bias-corrected Gini coefficient over n >= 2 non-negative values:
//
//   GC = n / (n - 1) * sum_i sum_j |x_i - x_j| / (2 n^2 mean)
//
// evaluated in O(n log n) as sum_{i<j} |x_i - x_j| / ((n - 1) sum_i x_i),
// with the pair sum built from sorted gaps. All-equal input (including all
// zeros) yields 0.
inline double gini_coefficient(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    throw DomainError("Gini coefficient needs n >= 2 groups, got " +
                      std::to_string(n));
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError("Gini coefficient needs finite non-negative values");
    }
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return 0.0;

  // Each gap between neighbours k-1 and k is crossed by k * (n - k) pairs.
  double pair_sum = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double gap = sorted[k] - sorted[k - 1];
    pair_sum += gap * static_cast<double>(k) * static_cast<double>(n - k);
  }
  double total = 0.0;
  for (double v : sorted) total += v;
  const double gc = pair_sum / (static_cast<double>(n - 1) * total);
  return std::clamp(gc, 0.0, 1.0);
}

inline double gini_coefficient(const GroupAggregates& aggregates) {
  std::vector<double> values;
  values.reserve(aggregates.values.size());
  for (const auto& [label, v] : aggregates.values) values.push_back(v);
  return gini_coefficient(values);
}

inline FairnessScore sqfr(double gc, Aggregator from = Aggregator::mean) {
  detail::require_unit_interval(gc);
  Measure m = Measure::mean_gc_sqfr;
  if (from == Aggregator::median) m = Measure::median_gc_sqfr;
  if (from == Aggregator::lwm) m = Measure::lwm_gc_sqfr;
  return {m, 1.0 - gc};
}

inline FairnessScore csqfr(double gc, Aggregator from = Aggregator::mean) {
  detail::require_unit_interval(gc);
  Measure m = Measure::mean_gc_csqfr;
  if (from == Aggregator::median) m = Measure::median_gc_csqfr;
  if (from == Aggregator::lwm) m = Measure::lwm_gc_csqfr;
  const double s = 1.0 - gc;
  return {m, s * s * s};
}

// Thresholds at which discard behaviour is compared. With pooled min m and
// max M, the sequence mode yields m + k * step for k = 1, 2, ... while below
// M, then M itself; observed mode yields every distinct pooled score above m.
// Both are empty when m == M.
inline std::vector<double> relevant_thresholds(
    const GroupedScores& scores, double step = 1.0,
    ThresholdMode mode = ThresholdMode::sequence) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError("threshold step must be positive, got " +
                      std::to_string(step));
  }
  detail::require_well_formed(scores);
  const auto [lo, hi] = detail::pooled_range(scores);
  std::vector<double> out;
  if (lo == hi) return out;

  if (mode == ThresholdMode::observed) {
    for (const auto& [label, values] : scores.groups) {
      for (double q : values) {
        if (q > lo) out.push_back(q);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Points within a hair of M collapse onto M so rounding never produces a
  // near-duplicate final threshold.
  const double cutoff = hi - step * 1e-9;
  for (std::size_t k = 1;; ++k) {
    const double t = lo + static_cast<double>(k) * step;
    if (t >= cutoff) break;
    out.push_back(t);
  }
  out.push_back(hi);
  return out;
}

// Samples strictly below the threshold count as discarded.
inline bool is_discarded(double score, double threshold) {
  return score < threshold;
}

inline DiscardCurve discard_curve(const GroupedScores& scores,
                                  std::span<const double> thresholds) {
  detail::require_well_formed(scores);
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw DomainError("discard thresholds must be sorted ascending");
  }
  DiscardCurve curve;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  for (const auto& [label, values] : scores.groups) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<double> fractions;
    fractions.reserve(thresholds.size());
    for (double t : thresholds) {
      const auto below = std::partition_point(
          sorted.begin(), sorted.end(),
          [t](double q) { return is_discarded(q, t); });
      fractions.push_back(static_cast<double>(below - sorted.begin()) / n);
    }
    curve.fractions.emplace(label, std::move(fractions));
  }
  return curve;
}

// Mean over thresholds of (max - min) discard fraction across groups.
// Returns nullopt when the curve has no thresholds; that only happens when
// every pooled score is identical, which callers treat as a gap of 0.
inline std::optional<double> mdg(const DiscardCurve& curve) {
  if (curve.fractions.size() < 2) {
    throw DomainError("mean discard gap needs at least 2 groups");
  }
  const std::size_t k = curve.thresholds.size();
  for (const auto& [label, f] : curve.fractions) {
    if (f.size() != k) {
      throw DomainError("discard fractions of group '" + label +
                        "' are not aligned with the thresholds");
    }
  }
  if (k == 0) return std::nullopt;

  double gap_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& [label, f] : curve.fractions) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
    gap_sum += hi - lo;
  }
  return std::clamp(gap_sum / static_cast<double>(k), 0.0, 1.0);
}

inline FairnessScore mdg_sqfr(const GroupedScores& scores,
                              const EvalOptions& options = {}) {
  const auto thresholds =
      relevant_thresholds(scores, options.threshold_step, options.thresholds);
  const auto gap = mdg(discard_curve(scores, thresholds));
  return {Measure::mdg_sqfr, 1.0 - gap.value_or(0.0)};
}

inline GroupAggregates aggregate(const GroupedScores& scores, Aggregator kind) {
  switch (kind) {
    case Aggregator::mean: return mean_aggregate(scores);
    case Aggregator::median: return median_aggregate(scores);
    case Aggregator::lwm: return lwm_aggregate(scores);
  }
  throw DomainError("unknown aggregator");
}

// Computes any single measure from raw per-group scores.
inline FairnessScore evaluate_measure(const GroupedScores& scores, Measure m,
                                      const EvalOptions& options = {}) {
  switch (m) {
    case Measure::mean_gc_sqfr:
      return sqfr(gini_coefficient(mean_aggregate(scores)), Aggregator::mean);
    case Measure::median_gc_sqfr:
      return sqfr(gini_coefficient(median_aggregate(scores)), Aggregator::median);
    case Measure::mean_gc_csqfr:
      return csqfr(gini_coefficient(mean_aggregate(scores)), Aggregator::mean);
    case Measure::median_gc_csqfr:
      return csqfr(gini_coefficient(median_aggregate(scores)), Aggregator::median);
    case Measure::lwm_gc_sqfr:
      return sqfr(gini_coefficient(lwm_aggregate(scores)), Aggregator::lwm);
    case Measure::lwm_gc_csqfr:
      return csqfr(gini_coefficient(lwm_aggregate(scores)), Aggregator::lwm);
    case Measure::mdg_sqfr:
      return mdg_sqfr(scores, options);
  }
  throw DomainError("unknown measure");
}

// All six report measures for one quality component, in kReportMeasures
// order. Each aggregate is computed once.
inline std::vector<FairnessScore> evaluate_component(
    const GroupedScores& scores, const EvalOptions& options = {}) {
  const double gc_mean = gini_coefficient(mean_aggregate(scores));
  const double gc_median = gini_coefficient(median_aggregate(scores));
  const double gc_lwm = gini_coefficient(lwm_aggregate(scores));
  return {
      sqfr(gc_mean, Aggregator::mean),
      sqfr(gc_median, Aggregator::median),
      csqfr(gc_mean, Aggregator::mean),
      sqfr(gc_lwm, Aggregator::lwm),
      csqfr(gc_lwm, Aggregator::lwm),
      mdg_sqfr(scores, options),
  };
}

}  // namespace sqfr
