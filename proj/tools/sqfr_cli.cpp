// sqfr: evaluate sample quality fairness rates from quality-score datasets.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 validation or
// configuration failure. Nothing is written to the output when the exit code
// is non-zero.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqfr/sqfr.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw sqfr::IoError("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw sqfr::IoError("failed writing '" + path + "'");
}

struct InputFlags {
  std::string input;
  sqfr::ColumnMapping columns;
  bool lenient = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("-i,--input,input", input, "Dataset file (.csv or .json)")->required();
    cmd->add_option("--group-col", columns.group, "CSV column holding the group label")
        ->capture_default_str();
    cmd->add_option("--component-col", columns.component,
                    "CSV column holding the quality component id")
        ->capture_default_str();
    cmd->add_option("--score-col", columns.score, "CSV column holding the quality score")
        ->capture_default_str();
    cmd->add_option("--sample-col", columns.sample, "Optional CSV sample id column")
        ->capture_default_str();
    auto* strict = cmd->add_flag("--strict", "Fail on the first malformed row (default)");
    auto* lenient_flag =
        cmd->add_flag("--lenient", lenient, "Skip malformed rows with a warning");
    strict->excludes(lenient_flag);
  }

  sqfr::Dataset load() const {
    auto ds = sqfr::load(input, columns,
                         lenient ? sqfr::ParseMode::lenient : sqfr::ParseMode::strict);
    for (const auto& w : ds.provenance.warnings) std::cerr << w.to_string() << '\n';
    for (const auto& d : sqfr::validate(ds)) std::cerr << d.to_string() << '\n';
    return ds;
  }
};

std::vector<sqfr::Measure> parse_measures(const std::vector<std::string>& names) {
  std::vector<sqfr::Measure> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.insert(out.end(), sqfr::kReportMeasures.begin(), sqfr::kReportMeasures.end());
      continue;
    }
    const auto m = sqfr::parse_measure(n);
    if (!m) throw sqfr::ConfigError("unknown measure '" + n + "'");
    out.push_back(*m);
  }
  return out;
}

void print_summary(const sqfr::Dataset& ds, std::ostream& os) {
  for (const auto& [id, c] : ds.components) {
    const auto means = sqfr::mean_aggregate(c);
    const auto medians = sqfr::median_aggregate(c);
    os << id << ":\n";
    for (const auto& [label, values] : c.groups) {
      os << "  " << label << "  n=" << values.size()
         << "  mean=" << sqfr::format_fixed(means.values.at(label), 2)
         << "  median=" << sqfr::format_fixed(medians.values.at(label), 2) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample quality fairness rates for biometric quality components"};
  app.set_version_flag("--version", std::string(sqfr::kVersion));
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate fairness measures per quality component");
  InputFlags eval_in;
  eval_in.attach(eval);
  std::string eval_out;
  std::string eval_format = "json";
  std::vector<std::string> measure_names;
  double threshold_step = 1.0;
  std::string threshold_mode = "sequence";
  int precision = 3;
  eval->add_option("-o,--out", eval_out, "Output file (default: stdout)");
  eval->add_option("-f,--format", eval_format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "markdown"}))
      ->capture_default_str();
  eval->add_option("--measures", measure_names,
                   "Comma-separated measures, e.g. mean-gc-sqfr,mdg-sqfr (default: all)")
      ->delimiter(',');
  eval->add_option("--threshold-step", threshold_step, "Spacing of discard thresholds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval->add_option("--thresholds", threshold_mode,
                   "sequence: min+step..max; observed: distinct scores above min")
      ->check(CLI::IsMember({"sequence", "observed"}))
      ->capture_default_str();
  eval->add_option("--precision", precision, "Decimals in markdown output")
      ->envname("SQFR_PRECISION")
      ->check(CLI::Range(0, 17))
      ->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario dataset");
  std::string scenario;
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::string sim_out;
  std::string sim_format;
  bool list_scenarios = false;
  auto* scenario_opt = simulate->add_option("-s,--scenario", scenario, "Built-in scenario name");
  auto* spec_opt = simulate->add_option("--spec", spec_path, "Scenario spec JSON file");
  scenario_opt->excludes(spec_opt);
  simulate->add_option("--seed", seed, "Base seed (default 42 for built-in scenarios)");
  simulate->add_option("-o,--out", sim_out, "Output dataset file (default: stdout)");
  simulate->add_option("-f,--format", sim_format, "csv or json (default: from --out)")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_flag("--list", list_scenarios, "List built-in scenarios");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Export histograms and kernel densities");
  InputFlags plot_in;
  plot_in.attach(plot);
  std::string plot_out;
  std::string plot_format = "json";
  sqfr::PlotOptions plot_options;
  std::optional<double> bandwidth;
  bool no_density = false;
  plot->add_option("-o,--out", plot_out, "Output file (default: stdout)");
  plot->add_option("-f,--format", plot_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  plot->add_option("--bin-width", plot_options.bin_width, "Histogram bin width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plot->add_option("--bandwidth", bandwidth,
                   "Kernel bandwidth (default: Silverman's rule per group)")
      ->check(CLI::PositiveNumber);
  plot->add_flag("--no-density", no_density, "Histograms only");

  // fixtures
  auto* fixtures = app.add_subcommand("fixtures", "Print the published aggregate fixtures");
  std::string fixtures_format = "markdown";
  fixtures->add_option("-f,--format", fixtures_format, "markdown, json or csv")
      ->check(CLI::IsMember({"json", "csv", "markdown"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (eval->parsed()) {
      const auto ds = eval_in.load();
      sqfr::ReportOptions options;
      options.input = eval_in.input;
      options.eval.threshold_step = threshold_step;
      options.eval.thresholds = threshold_mode == "observed" ? sqfr::ThresholdMode::observed
                                                             : sqfr::ThresholdMode::sequence;
      options.precision = precision;
      if (!measure_names.empty()) options.measures = parse_measures(measure_names);
      const auto report = sqfr::build_report(ds, options);
      write_output(eval_out,
                   sqfr::render_report(report, *sqfr::parse_report_format(eval_format)));
    } else if (simulate->parsed()) {
      if (list_scenarios) {
        for (const auto& n : sqfr::builtin_scenario_names()) std::cout << n << '\n';
        return 0;
      }
      std::vector<sqfr::ScenarioSpec> specs;
      if (!spec_path.empty()) {
        specs = sqfr::load_scenarios(spec_path);
        if (seed) {
          for (std::size_t i = 0; i < specs.size(); ++i) {
            specs[i].seed = sqfr::mix_seed(*seed, i);
          }
        }
      } else if (!scenario.empty()) {
        specs = sqfr::builtin_scenario(scenario, seed.value_or(42));
      } else {
        throw sqfr::ConfigError("simulate needs --scenario or --spec");
      }
      const auto ds = sqfr::generate_dataset(specs);
      sqfr::DataFormat format = sqfr::format_from_path(sim_out);
      if (!sim_format.empty()) {
        format = sim_format == "json" ? sqfr::DataFormat::json : sqfr::DataFormat::csv;
      }
      const bool to_stdout = sim_out.empty() || sim_out == "-";
      write_output(sim_out, sqfr::serialize(ds, format));
      print_summary(ds, to_stdout ? std::cerr : std::cout);
    } else if (plot->parsed()) {
      const auto ds = plot_in.load();
      plot_options.bandwidth = bandwidth;
      plot_options.density = !no_density;
      const auto data = sqfr::build_plot_data(ds, plot_options);
      for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
      write_output(plot_out,
                   sqfr::render_plot_data(data, *sqfr::parse_report_format(plot_format)));
    } else if (fixtures->parsed()) {
      std::ostringstream out;
      nlohmann::ordered_json doc = nlohmann::ordered_json::array();
      if (fixtures_format == "markdown") {
        out << "| fixture | source | values | measure | expected | computed | tolerance |\n"
            << "|---|---|---|---|---:|---:|---:|\n";
      } else if (fixtures_format == "csv") {
        out << "fixture,source,values,measure,expected,computed,tolerance\n";
      }
      for (const auto& f : sqfr::builtin_fixtures()) {
        std::string values;
        for (const auto& [label, v] : f.group_values) {
          values += (values.empty() ? "" : " ") + sqfr::format_number(v);
        }
        for (const auto& [m, expected] : f.expected) {
          const double computed = sqfr::fixture_value(f, m);
          if (fixtures_format == "json") {
            doc.push_back({{"fixture", f.name},
                           {"source", f.source},
                           {"group_values", f.group_values},
                           {"measure", sqfr::measure_name(m)},
                           {"expected", expected},
                           {"computed", computed},
                           {"tolerance", f.tolerance}});
          } else if (fixtures_format == "csv") {
            out << f.name << ',' << sqfr::csv_escape(f.source) << ',' << values << ','
                << sqfr::measure_name(m) << ',' << sqfr::format_number(expected) << ','
                << sqfr::format_number(computed) << ',' << sqfr::format_number(f.tolerance)
                << '\n';
          } else {
            out << "| " << f.name << " | " << f.source << " | " << values << " | "
                << sqfr::measure_name(m) << " | " << sqfr::format_number(expected) << " | "
                << sqfr::format_fixed(computed, 4) << " | "
                << sqfr::format_number(f.tolerance) << " |\n";
          }
        }
      }
      if (fixtures_format == "json") out << doc.dump(2) << '\n';
      write_output("", out.str());
    }
  } catch (const sqfr::ValidationError& e) {
    std::cerr << "validation failed:\n" << e.what() << '\n';
    return kExitInvalid;
  } catch (const sqfr::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const sqfr::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const sqfr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
