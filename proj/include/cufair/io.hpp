#pragma once

// Scenario files, CSV inputs, audit reports and the command line driver.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cufair/classification.hpp"
#include "cufair/clustering.hpp"
#include "cufair/core.hpp"
#include "cufair/mdp.hpp"
#include "cufair/metrics.hpp"

namespace cufair {

inline constexpr std::string_view kToolName = "cufair";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row.
  std::vector<std::size_t> lines;

  /// Column index by name, or empty.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Comma-separated text with a header row and optional double quotes.
/// Throws ParseError on an unterminated quote or a row whose field count
/// differs from the header.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Columns stratum,group,decision,count in any order. Repeated cells add up.
StrataPopulation strata_from_csv(const CsvTable& table);

struct PredictionRow {
  std::vector<double> features;
  int y = 0;
  std::uint32_t group = 0;
  int yhat = 0;
  double weight = 1.0;
};

/// Columns y, z, yhat and optionally weight; every other column is a
/// feature, in header order.
std::vector<PredictionRow> predictions_from_csv(const CsvTable& table);

// ---------------------------------------------------------------------------
// Scenarios

enum class ScenarioKind { Classification, Strata, Mdp, Clustering };

std::string_view to_string(ScenarioKind kind);

/// A metric name with optional parameters, e.g. eq_opp_static with
/// {"alpha": 0.5, "attribute": "score"}.
struct MetricRequest {
  std::string name;
  std::map<std::string, AttributeValue> params;

  friend bool operator==(const MetricRequest&, const MetricRequest&) = default;
};

enum class ClassificationWelfare {
  Prediction,    // W = yhat, C = zero-one loss; defaults tau 1, rho 0
  GermanCredit,  // C = credit cost, W = -C; defaults tau -1, rho 0
};

struct ClassificationPayload {
  std::vector<PredictionRow> rows;
  ClassificationWelfare welfare = ClassificationWelfare::Prediction;
};

struct StrataPayload {
  std::map<StrataCell, double> counts;
};

struct MdpPayload {
  std::vector<MdpState> states;
  std::vector<std::string> actions;
  std::vector<EpisodicMdp::Transition> transitions;
  StateActionTable reward;
  StateActionTable welfare;
  double gamma = 1.0;
  std::optional<std::size_t> horizon;
  Eigen::VectorXd initial;
  Policy policy;

  EpisodicMdp model() const;
};

struct ClusteringPayload {
  Eigen::MatrixXd features;
  std::vector<GroupId> groups;
  std::size_t k = 1;
  ClusterAssignment assignment;
  bool representative = false;  // balanced welfare otherwise
};

using ScenarioPayload = std::variant<ClassificationPayload, StrataPayload,
                                     MdpPayload, ClusteringPayload>;

struct ScenarioFile {
  std::string id;
  ScenarioKind kind = ScenarioKind::Strata;
  // Explicit thresholds; missing values fall back to the kind's defaults.
  std::optional<double> tau;
  std::optional<double> rho;
  std::optional<double> epsilon;
  std::vector<MetricRequest> metrics;
  ScenarioPayload payload;
};

/// Thresholds used when a scenario and the command line set none.
Thresholds default_thresholds(const ScenarioFile& scenario);

/// Parses scenario JSON. Relative CSV paths resolve against `base_dir`.
/// Throws ParseError (with line and column) on malformed JSON or CSV, and
/// SchemaError naming the field on anything else.
ScenarioFile parse_scenario(std::string_view text,
                            const std::filesystem::path& base_dir = {});
/// Throws InvalidArgument when the file cannot be read.
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Self-contained JSON with every payload written inline.
std::string scenario_to_json(const ScenarioFile& scenario);

/// Throws SchemaError when `name` is not available for the kind, or when
/// its parameters are missing or mistyped.
void validate_metric(ScenarioKind kind, const MetricRequest& request,
                     const std::string& field = "metrics");

/// Metric names understood for a kind.
std::vector<std::string> metric_names(ScenarioKind kind);

/// The bundled worked examples.
ScenarioFile recidivism_scenario();
ScenarioFile two_stage_loan_file();

// ---------------------------------------------------------------------------
// Reports

struct ReportError {
  std::string kind;
  std::string message;

  friend bool operator==(const ReportError&, const ReportError&) = default;
};

struct MetricResult {
  std::string metric;
  std::optional<FairnessVerdict> verdict;
  std::optional<ReportError> error;

  friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

struct AuditReport {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::string scenario;
  double epsilon = kDefaultEpsilon;
  std::vector<MetricResult> results;

  /// True when no result errored and every non-vacuous verdict holds.
  bool all_fair() const;

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

struct AuditFlags {
  std::optional<double> tau;
  std::optional<double> rho;
  std::optional<double> epsilon;
  // Replaces the scenario's metric list when non-empty.
  std::vector<MetricRequest> metrics;
};

/// Runs every requested metric in order. A metric that raises is recorded
/// as an error and the remaining metrics still run.
AuditReport run_audit(const ScenarioFile& scenario, const AuditFlags& flags = {});

/// Doubles use 17 significant digits; non-finite values are the strings
/// "inf", "-inf" and "nan".
std::string report_to_json(const AuditReport& report);
/// Throws ParseError or SchemaError.
AuditReport report_from_json(std::string_view text);
/// Human-readable rendering with 4 decimals.
std::string report_to_table(const AuditReport& report);

/// Command line entry point. Returns 0 on success, 1 when --assert-fair
/// finds an unfair result, 3 on usage or input errors.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace cufair
