#pragma once

// Fairness reports over whole datasets and plot-ready distribution data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqfr/dataset.hpp"
#include "sqfr/errors.hpp"
#include "sqfr/fairness.hpp"

namespace sqfr {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ReportFormat { json, csv, markdown };

inline std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  return std::nullopt;
}

struct GroupSummary {
  std::string label;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double lwm = 0.0;
};

struct ComponentReport {
  std::string component_id;
  std::vector<GroupSummary> groups;
  std::vector<FairnessScore> scores;
};

struct ReportOptions {
  EvalOptions eval;
  std::vector<Measure> measures{kReportMeasures.begin(), kReportMeasures.end()};
  int precision = 3;  // decimals in markdown output
  std::string input;
};

struct FairnessReport {
  ReportOptions options;
  std::vector<ComponentReport> components;
};

inline ComponentReport evaluate_report_row(const GroupedScores& scores,
                                           const ReportOptions& options) {
  ComponentReport row;
  row.component_id = scores.component_id;
  const auto means = mean_aggregate(scores);
  const auto medians = median_aggregate(scores);
  const auto lwms = lwm_aggregate(scores);
  for (const auto& [label, values] : scores.groups) {
    row.groups.push_back({label, values.size(), means.values.at(label),
                          medians.values.at(label), lwms.values.at(label)});
  }
  for (Measure m : options.measures) {
    row.scores.push_back(evaluate_measure(scores, m, options.eval));
  }
  return row;
}

// Throws ValidationError when the dataset is structurally invalid.
inline FairnessReport build_report(const Dataset& ds, ReportOptions options = {}) {
  require_valid(ds);
  if (options.measures.empty()) throw ConfigError("no measures selected");
  if (options.precision < 0 || options.precision > 17) {
    throw ConfigError("precision must lie in [0, 17]");
  }
  FairnessReport report{std::move(options), {}};
  for (const auto& [id, scores] : ds.components) {
    report.components.push_back(evaluate_report_row(scores, report.options));
  }
  return report;
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline nlohmann::ordered_json report_to_json(const FairnessReport& r) {
  using json = nlohmann::ordered_json;
  json measures = json::array();
  for (Measure m : r.options.measures) measures.push_back(measure_name(m));
  json meta;
  meta["tool"] = "sqfr";
  meta["version"] = kVersion;
  meta["input"] = r.options.input;
  meta["threshold_step"] = r.options.eval.threshold_step;
  meta["thresholds"] =
      r.options.eval.thresholds == ThresholdMode::sequence ? "sequence" : "observed";
  meta["precision"] = r.options.precision;
  meta["measures"] = std::move(measures);

  json comps = json::array();
  for (const auto& c : r.components) {
    json groups = json::array();
    for (const auto& g : c.groups) {
      groups.push_back({{"label", g.label},
                        {"count", g.count},
                        {"mean", g.mean},
                        {"median", g.median},
                        {"lwm", g.lwm}});
    }
    json scores = json::object();
    for (const auto& s : c.scores) scores[std::string(measure_name(s.measure))] = s.value;
    comps.push_back({{"component", c.component_id},
                     {"groups", std::move(groups)},
                     {"scores", std::move(scores)}});
  }
  return {{"metadata", std::move(meta)}, {"components", std::move(comps)}};
}

// JSON and CSV carry raw doubles (shortest round-trip form); markdown is
// rounded to the report precision.
inline std::string render_report(const FairnessReport& r, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::json:
      out << report_to_json(r).dump(2) << '\n';
      break;
    case ReportFormat::csv:
      out << "component";
      for (Measure m : r.options.measures) out << ',' << measure_name(m);
      out << '\n';
      for (const auto& c : r.components) {
        out << csv_escape(c.component_id);
        for (const auto& s : c.scores) out << ',' << format_number(s.value);
        out << '\n';
      }
      break;
    case ReportFormat::markdown: {
      const int p = r.options.precision;
      out << "# Sample quality fairness report\n\n";
      out << "Input: `" << r.options.input << "`, threshold step "
          << format_number(r.options.eval.threshold_step) << " ("
          << (r.options.eval.thresholds == ThresholdMode::sequence ? "sequence"
                                                                     : "observed")
          << "), sqfr " << kVersion << "\n\n";
      out << "| component |";
      for (Measure m : r.options.measures) out << ' ' << measure_name(m) << " |";
      out << "\n|---|";
      for (std::size_t i = 0; i < r.options.measures.size(); ++i) out << "---:|";
      out << '\n';
      for (const auto& c : r.components) {
        out << "| " << c.component_id << " |";
        for (const auto& s : c.scores) out << ' ' << format_fixed(s.value, p) << " |";
        out << '\n';
      }
      for (const auto& c : r.components) {
        out << "\n## " << c.component_id << "\n\n";
        out << "| group | count | mean | median | lwm |\n|---|---:|---:|---:|---:|\n";
        for (const auto& g : c.groups) {
          out << "| " << g.label << " | " << g.count << " | " << format_fixed(g.mean, p)
              << " | " << format_fixed(g.median, p) << " | " << format_fixed(g.lwm, p)
              << " |\n";
        }
      }
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Plot data: per-group histograms and Gaussian kernel density estimates.

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 entries
  std::vector<std::size_t> counts;
};

struct Density {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> y;
};

struct GroupPlot {
  std::string component_id;
  std::string label;
  Histogram histogram;
  std::optional<Density> density;
};

struct PlotData {
  double bin_width = 1.0;
  std::vector<GroupPlot> series;
  std::vector<std::string> warnings;
};

struct PlotOptions {
  double bin_width = 1.0;
  bool density = true;
  std::optional<double> bandwidth;  // overrides Silverman's rule
};

// Bins are [edge_k, edge_k + width) and aligned to multiples of width; the
// last bin also holds the maximum.
inline Histogram histogram(std::span<const double> values, double width = 1.0) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw DomainError("histogram bin width must be positive");
  }
  if (values.empty()) throw DomainError("histogram of an empty group");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = std::floor(*mn / width) * width;
  const auto bins = static_cast<std::size_t>(std::floor((*mx - lo) / width)) + 1;
  Histogram h;
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(lo + static_cast<double>(i) * width);
  }
  for (double q : values) {
    auto k = static_cast<std::size_t>(std::floor((q - lo) / width));
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

// Linear-interpolation quantile of sorted data, p in [0, 1].
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (pos - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

// Silverman's rule of thumb, 0.9 * min(sd, IQR / 1.34) * n^(-1/5). Falls
// back to sd when the IQR is zero. Returns 0 for fewer than two samples or
// a single-valued group.
inline double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

// Gaussian KDE on a uniform grid spanning [min - 4h, max + 4h], with at
// least four grid points per bandwidth.
inline Density gaussian_kde(std::span<const double> values, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DomainError("kernel bandwidth must be positive");
  }
  if (values.empty()) throw DomainError("density of an empty group");
  std::map<double, std::size_t> distinct;
  for (double v : values) ++distinct[v];
  const double lo = distinct.begin()->first - 4.0 * bandwidth;
  const double hi = distinct.rbegin()->first + 4.0 * bandwidth;
  const auto points = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil((hi - lo) / (bandwidth / 4.0))) + 1, 256, 20000);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth *
                             std::sqrt(2.0 * std::numbers::pi));
  Density d;
  d.bandwidth = bandwidth;
  d.x.reserve(points);
  d.y.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    double sum = 0.0;
    for (const auto& [v, count] : distinct) {
      const double z = (x - v) / bandwidth;
      if (std::abs(z) < 40.0) sum += static_cast<double>(count) * std::exp(-0.5 * z * z);
    }
    d.x.push_back(x);
    d.y.push_back(sum * norm);
  }
  return d;
}

inline PlotData build_plot_data(const Dataset& ds, const PlotOptions& options = {}) {
  require_valid(ds);
  PlotData out;
  out.bin_width = options.bin_width;
  for (const auto& [id, c] : ds.components) {
    for (const auto& [label, values] : c.groups) {
      GroupPlot p{id, label, histogram(values, options.bin_width), std::nullopt};
      if (options.density) {
        const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(values);
        if (h > 0.0) {
          p.density = gaussian_kde(values, h);
        } else {
          out.warnings.push_back("component '" + id + "' group '" + label +
                                 "': degenerate bandwidth, histogram only");
        }
      }
      out.series.push_back(std::move(p));
    }
  }
  return out;
}

inline std::string render_plot_data(const PlotData& p, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::json) {
    using json = nlohmann::ordered_json;
    json series = json::array();
    for (const auto& s : p.series) {
      json h = {{"edges", s.histogram.edges}, {"counts", s.histogram.counts}};
      json d = nullptr;
      if (s.density) {
        d = {{"bandwidth", s.density->bandwidth}, {"x", s.density->x}, {"y", s.density->y}};
      }
      series.push_back({{"component", s.component_id},
                        {"group", s.label},
                        {"histogram", std::move(h)},
                        {"density", std::move(d)}});
    }
    json doc = {{"bin_width", p.bin_width}, {"series", std::move(series)}};
    out << doc.dump(2) << '\n';
  } else if (format == ReportFormat::csv) {
    out << "component,group,series,x,width,value\n";
    for (const auto& s : p.series) {
      const std::string prefix = csv_escape(s.component_id) + ',' + csv_escape(s.label);
      for (std::size_t k = 0; k < s.histogram.counts.size(); ++k) {
        out << prefix << ",histogram," << format_number(s.histogram.edges[k]) << ','
            << format_number(p.bin_width) << ',' << s.histogram.counts[k] << '\n';
      }
      if (!s.density) continue;
      for (std::size_t k = 0; k < s.density->x.size(); ++k) {
        out << prefix << ",density," << format_number(s.density->x[k]) << ",,"
            << format_number(s.density->y[k]) << '\n';
      }
    }
  } else {
    throw ConfigError("plot data supports json or csv output");
  }
  return out.str();
}

}  // namespace sqfr
