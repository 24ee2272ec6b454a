#include <charconv>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cufair/io.hpp"

namespace cufair {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnfair = 1;
constexpr int kExitInput = 3;

struct CliOptions {
  std::string scenario_path;
  std::string demo;
  std::vector<std::string> metrics;
  std::optional<double> tau;
  std::optional<double> rho;
  std::optional<double> epsilon;
  std::string format = "json";
  bool assert_fair = false;
};

AttributeValue param_value(const std::string& text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && end == text.data() + text.size()) return v;
  return text;
}

// NAME or NAME:key=value,key=value
MetricRequest parse_metric_flag(const std::string& flag) {
  MetricRequest out;
  const auto colon = flag.find(':');
  out.name = flag.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string_view rest(flag);
  rest.remove_prefix(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view pair = rest.substr(0, comma);
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw SchemaError("--metric", fmt::format("malformed parameter '{}'", pair));
    }
    out.params[std::string(pair.substr(0, eq))] =
        param_value(std::string(pair.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void add_audit_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--metric", o.metrics,
                  "Metric to run (repeatable); NAME or NAME:key=value,...");
  cmd->add_option("--tau", o.tau, "Welfare threshold");
  cmd->add_option("--rho", o.rho, "Cost threshold");
  cmd->add_option("--epsilon", o.epsilon, "Equality tolerance (default 1e-9)");
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_flag("--assert-fair", o.assert_fair,
                "Exit 1 unless every non-vacuous metric is satisfied");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Audit decision-making scenarios for welfare-based fairness"};
  app.name(std::string(kToolName));
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CliOptions o;
  auto* eval = app.add_subcommand("eval", "Audit a scenario file");
  eval->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
  add_audit_options(eval, o);

  auto* demo = app.add_subcommand("demo", "Audit a bundled worked example");
  demo->add_option("name", o.demo, "recidivism or two-stage-loan")
      ->required()
      ->check(CLI::IsMember({"recidivism", "two-stage-loan"}));
  add_audit_options(demo, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << kToolName << ": " << e.what() << "\n";
    return kExitInput;
  }

  AuditReport report;
  try {
    ScenarioFile scenario;
    if (eval->parsed()) {
      scenario = load_scenario(o.scenario_path);
    } else {
      scenario = o.demo == "recidivism" ? recidivism_scenario()
                                        : two_stage_loan_file();
    }
    AuditFlags flags{o.tau, o.rho, o.epsilon, {}};
    for (const auto& m : o.metrics) {
      flags.metrics.push_back(parse_metric_flag(m));
      validate_metric(scenario.kind, flags.metrics.back(), "--metric");
    }
    report = run_audit(scenario, flags);
  } catch (const Error& e) {
    err << kToolName << ": " << e.kind() << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << kToolName << ": " << e.what() << "\n";
    return kExitInput;
  }

  out << (o.format == "table" ? report_to_table(report) : report_to_json(report));
  if (o.assert_fair && !report.all_fair()) return kExitUnfair;
  return kExitOk;
}

}  // namespace cufair
