#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cufair/io.hpp"

namespace cufair {
namespace {

const std::filesystem::path kData{CUFAIR_DATA_DIR};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cufair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

TEST(Csv, QuotedFields) {
  const auto t = parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\n2,3\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_EQ(t.lines[1], 4u);
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_FALSE(t.column("c").has_value());
}

TEST(Csv, FieldCountMismatch) {
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, UnterminatedQuote) { EXPECT_THROW(parse_csv("a\n\"open\n"), ParseError); }

TEST(Csv, StrataMissingColumn) {
  try {
    strata_from_csv(parse_csv("stratum,group,decision\nSafe,0,detain\n"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "count");
  }
}

TEST(Csv, PredictionsFeaturesInHeaderOrder) {
  const auto rows = predictions_from_csv(
      parse_csv("age,y,z,yhat,income,weight\n30,1,0,1,5,2\n"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].features, (std::vector<double>{30, 5}));
  EXPECT_EQ(rows[0].weight, 2.0);
}

TEST(Scenario, RecidivismFixtureMatchesBundledCounts) {
  const auto s = load_scenario(kData / "recidivism.json");
  EXPECT_EQ(s.kind, ScenarioKind::Strata);
  EXPECT_EQ(std::get<StrataPayload>(s.payload).counts, recidivism_example().counts());
  EXPECT_EQ(s.metrics.size(), 3u);
}

TEST(Scenario, LoanFixtureMatchesBundledModel) {
  const auto s = load_scenario(kData / "two_stage_loan.json");
  const auto& p = std::get<MdpPayload>(s.payload);
  const auto loan = two_stage_loan_scenario();
  const auto mdp = p.model();
  ASSERT_EQ(mdp.state_count(), loan.mdp.state_count());
  for (std::size_t a = 0; a < mdp.action_count(); ++a) {
    EXPECT_EQ(mdp.transition(a), loan.mdp.transition(a));
  }
  // The file spells out 2.1 where the model computes 0.7 * 3.
  EXPECT_LE((mdp.reward() - loan.mdp.reward()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((p.welfare - loan.welfare).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(mdp.initial(), loan.mdp.initial());
  EXPECT_EQ(p.policy, loan.prime_only);
  const auto from_file = run_audit(s);
  const auto bundled = run_audit(two_stage_loan_file());
  ASSERT_EQ(from_file.results.size(), bundled.results.size());
  for (std::size_t k = 0; k < bundled.results.size(); ++k) {
    const auto& a = *from_file.results[k].verdict;
    const auto& b = *bundled.results[k].verdict;
    EXPECT_EQ(a.satisfied, b.satisfied);
    for (std::size_t g = 0; g < a.per_group().size(); ++g) {
      EXPECT_NEAR(*a.per_group()[g].value, *b.per_group()[g].value, 1e-12);
    }
  }
}

TEST(Scenario, TruncatedJsonReportsPosition) {
  try {
    parse_scenario("{\n  \"id\": \"x\",\n  \"kind\": ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(Scenario, SchemaErrorNamesField) {
  try {
    parse_scenario(R"({"id": "x", "kind": "strata",
                       "payload": {"counts": [{"stratum": "Safe", "group": 0,
                                               "decision": "detain", "count": "many"}]}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "payload.counts[0].count");
  }
  try {
    parse_scenario(R"({"id": "x", "kind": "orbit", "payload": {}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "kind");
  }
}

TEST(Scenario, UnknownMetricRejected) {
  EXPECT_THROW(parse_scenario(R"({"id": "x", "kind": "mdp", "metrics": ["principal_fairness"],
                                  "payload": {}})"),
               SchemaError);
  EXPECT_THROW(validate_metric(ScenarioKind::Mdp, {"eq_opp_mdp_static", {}}),
               SchemaError);
  EXPECT_NO_THROW(validate_metric(ScenarioKind::Mdp,
                                  {"eq_opp_mdp_static", {{"alpha", 0.5}}}));
}

TEST(Scenario, ConflictingPredictions) {
  EXPECT_THROW(parse_scenario(R"({"id": "x", "kind": "classification", "payload": {"rows": [
      {"features": [1], "y": 1, "z": 0, "yhat": 1},
      {"features": [1], "y": 0, "z": 0, "yhat": 0}]}})"),
               SchemaError);
}

TEST(Scenario, RoundTrip) {
  for (const auto& s : {recidivism_scenario(), two_stage_loan_file()}) {
    const std::string text = scenario_to_json(s);
    const auto back = parse_scenario(text);
    EXPECT_EQ(scenario_to_json(back), text);
    EXPECT_EQ(run_audit(back), run_audit(s));
  }
}

TEST(Scenario, ClusteringInline) {
  const auto s = parse_scenario(R"({"id": "c", "kind": "clustering", "thresholds": {"tau": 0.6},
      "metrics": ["dem_par_welf"],
      "payload": {"rows": [{"features": [0], "group": 0}, {"features": [1], "group": 0},
                           {"features": [10], "group": 1}, {"features": [11], "group": 1}],
                  "k": 2, "assignment": [0, 0, 0, 1]}})");
  const auto r = run_audit(s);
  ASSERT_EQ(r.results.size(), 1u);
  ASSERT_TRUE(r.results[0].verdict);
  EXPECT_FALSE(r.results[0].verdict->satisfied);
  EXPECT_DOUBLE_EQ(*r.results[0].verdict->per_group()[1].value, 0.5);
}

TEST(Audit, EmptyMetricListGivesEmptyReport) {
  auto s = recidivism_scenario();
  s.metrics.clear();
  const auto r = run_audit(s);
  EXPECT_TRUE(r.results.empty());
  EXPECT_TRUE(r.all_fair());
}

TEST(Audit, MetricErrorIsRecorded) {
  auto s = two_stage_loan_file();
  s.metrics = {{"eq_opp_static", {{"alpha", 0.5}, {"attribute", std::string("none")}}},
               {"dem_par_welf", {}}};
  const auto r = run_audit(s);
  ASSERT_EQ(r.results.size(), 2u);
  EXPECT_TRUE(r.results[0].error.has_value());
  EXPECT_TRUE(r.results[1].verdict.has_value());
  EXPECT_FALSE(r.all_fair());
}

TEST(Audit, FlagsOverrideThresholds) {
  AuditFlags flags;
  flags.tau = 3.0;
  flags.metrics = {{"eq_opp_cf_util", {}}};
  const auto r = run_audit(two_stage_loan_file(), flags);
  ASSERT_TRUE(r.results[0].verdict);
  EXPECT_TRUE(r.results[0].verdict->vacuous);
}

TEST(Report, JsonRoundTripIsByteStable) {
  for (const auto& s : {recidivism_scenario(), two_stage_loan_file()}) {
    const auto report = run_audit(s);
    const std::string text = report_to_json(report);
    const auto back = report_from_json(text);
    EXPECT_EQ(back, report);
    EXPECT_EQ(report_to_json(back), text);
  }
}

TEST(Report, NonFiniteValuesSurvive) {
  AuditReport r;
  FairnessVerdict v;
  v.metric = "m";
  v.max_abs_difference = std::numeric_limits<double>::infinity();
  r.results.push_back({"m", v, std::nullopt});
  const auto text = report_to_json(r);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
  EXPECT_EQ(report_from_json(text), r);
}

TEST(Report, TableAgreesWithJson) {
  const auto report = run_audit(recidivism_scenario());
  const std::string table = report_to_table(report);
  EXPECT_NE(table.find("0.6923"), std::string::npos);
  EXPECT_NE(table.find("0.7500"), std::string::npos);
  EXPECT_NE(table.find("0.3333"), std::string::npos);
  EXPECT_NE(table.find("UNSATISFIED"), std::string::npos);
  const std::string json = report_to_json(report);
  EXPECT_NE(json.find("0.69230769230769229"), std::string::npos);
}

TEST(Cli, DemoRecidivism) {
  const auto r = run_cli({"demo", "recidivism"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.6923"), std::string::npos);
  EXPECT_NE(r.out.find("0.75"), std::string::npos);
}

TEST(Cli, AssertFairOnUnfairLoan) {
  EXPECT_EQ(run_cli({"demo", "two-stage-loan", "--assert-fair"}).code, 1);
  EXPECT_EQ(run_cli({"demo", "two-stage-loan", "--metric",
                     "eq_opp_mdp_static:alpha=0.6666666666666666",
                     "--assert-fair"})
                .code,
            0);
}

TEST(Cli, InputErrors) {
  const auto missing = run_cli({"eval", "missing.json"});
  EXPECT_EQ(missing.code, 3);
  EXPECT_FALSE(missing.err.empty());
  EXPECT_EQ(run_cli({"demo", "nothing"}).code, 3);
  EXPECT_EQ(run_cli({}).code, 3);
  EXPECT_EQ(run_cli({"demo", "recidivism", "--metric", "bogus"}).code, 3);
  EXPECT_EQ(run_cli({"demo", "recidivism", "--format", "xml"}).code, 3);
  const auto bad = temp_file("cufair_bad.json", "{\"id\": ");
  const auto parse = run_cli({"eval", bad.string()});
  EXPECT_EQ(parse.code, 3);
  EXPECT_NE(parse.err.find("ParseError"), std::string::npos);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(std::string(kToolVersion)), std::string::npos);
}

TEST(Cli, EvalFixtureWithTable) {
  const auto r = run_cli({"eval", (kData / "recidivism.json").string(), "--format", "table"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("principal_fairness"), std::string::npos);
}

TEST(Cli, MetricParameters) {
  const auto r = run_cli({"demo", "two-stage-loan", "--metric",
                          "conditional_dem_par:attribute=type,value=prime"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto report = report_from_json(r.out);
  ASSERT_EQ(report.results.size(), 1u);
  EXPECT_TRUE(report.results[0].verdict.has_value());
}

}  // namespace
}  // namespace cufair
