#include <cmath>

#include <fmt/format.h>

#include "cufair/io.hpp"
#include "json_util.hpp"

namespace cufair {

using json_util::as_array;
using json_util::as_bool;
using json_util::as_index;
using json_util::as_number;
using json_util::as_string;
using json_util::at;
using json_util::Json;
using json_util::member;
using json_util::optional_member;

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? json_util::number(*v) : Json(nullptr);
}

Json groups_json(const std::vector<GroupId>& groups) {
  Json out = Json::array();
  for (GroupId g : groups) out.push_back(g.value);
  return out;
}

Json clause_json(const Clause& c) {
  Json out = Json::object();
  out["label"] = c.label;
  out["satisfied"] = c.satisfied;
  out["vacuous"] = c.vacuous;
  out["max_abs_difference"] = json_util::number(c.max_abs_difference);
  out["min_ratio"] = optional_number(c.min_ratio);
  out["offending_groups"] = groups_json(c.offending_groups);
  Json per_group = Json::array();
  for (const auto& g : c.per_group) {
    Json e = Json::object();
    e["group"] = g.group.value;
    e["value"] = optional_number(g.value);
    e["support_mass"] = json_util::number(g.support_mass);
    per_group.push_back(std::move(e));
  }
  out["per_group"] = std::move(per_group);
  return out;
}

Json verdict_json(const FairnessVerdict& v) {
  Json out = Json::object();
  out["metric"] = v.metric;
  out["satisfied"] = v.satisfied;
  out["vacuous"] = v.vacuous;
  out["max_abs_difference"] = json_util::number(v.max_abs_difference);
  out["min_ratio"] = optional_number(v.min_ratio);
  out["offending_groups"] = groups_json(v.offending_groups);
  out["epsilon"] = json_util::number(v.epsilon);
  out["diagnostics"] = v.diagnostics;
  Json clauses = Json::array();
  for (const auto& c : v.clauses) clauses.push_back(clause_json(c));
  out["clauses"] = std::move(clauses);
  return out;
}

std::optional<double> read_optional_number(const Json& v,
                                           const std::string& field) {
  if (v.is_null()) return std::nullopt;
  return as_number(v, field);
}

std::vector<GroupId> read_groups(const Json& v, const std::string& field) {
  std::vector<GroupId> out;
  as_array(v, field);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.emplace_back(static_cast<std::uint32_t>(as_index(v[i], at(field, i))));
  }
  return out;
}

Clause read_clause(const Json& v, const std::string& f) {
  Clause c;
  c.label = as_string(member(v, f, "label"), at(f, "label"));
  c.satisfied = as_bool(member(v, f, "satisfied"), at(f, "satisfied"));
  c.vacuous = as_bool(member(v, f, "vacuous"), at(f, "vacuous"));
  c.max_abs_difference = as_number(member(v, f, "max_abs_difference"),
                                   at(f, "max_abs_difference"));
  c.min_ratio = read_optional_number(member(v, f, "min_ratio"), at(f, "min_ratio"));
  c.offending_groups =
      read_groups(member(v, f, "offending_groups"), at(f, "offending_groups"));
  const std::string pf = at(f, "per_group");
  const auto& per_group = as_array(member(v, f, "per_group"), pf);
  for (std::size_t i = 0; i < per_group.size(); ++i) {
    const std::string gf = at(pf, i);
    GroupStats g;
    g.group = GroupId{static_cast<std::uint32_t>(
        as_index(member(per_group[i], gf, "group"), at(gf, "group")))};
    g.value = read_optional_number(member(per_group[i], gf, "value"), at(gf, "value"));
    g.support_mass =
        as_number(member(per_group[i], gf, "support_mass"), at(gf, "support_mass"));
    c.per_group.push_back(g);
  }
  return c;
}

FairnessVerdict read_verdict(const Json& v, const std::string& f) {
  FairnessVerdict out;
  out.metric = as_string(member(v, f, "metric"), at(f, "metric"));
  out.satisfied = as_bool(member(v, f, "satisfied"), at(f, "satisfied"));
  out.vacuous = as_bool(member(v, f, "vacuous"), at(f, "vacuous"));
  out.max_abs_difference = as_number(member(v, f, "max_abs_difference"),
                                     at(f, "max_abs_difference"));
  out.min_ratio =
      read_optional_number(member(v, f, "min_ratio"), at(f, "min_ratio"));
  out.offending_groups =
      read_groups(member(v, f, "offending_groups"), at(f, "offending_groups"));
  out.epsilon = as_number(member(v, f, "epsilon"), at(f, "epsilon"));
  const std::string df = at(f, "diagnostics");
  const auto& diagnostics = as_array(member(v, f, "diagnostics"), df);
  for (std::size_t i = 0; i < diagnostics.size(); ++i) {
    out.diagnostics.push_back(as_string(diagnostics[i], at(df, i)));
  }
  const std::string cf = at(f, "clauses");
  const auto& clauses = as_array(member(v, f, "clauses"), cf);
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    out.clauses.push_back(read_clause(clauses[i], at(cf, i)));
  }
  return out;
}

std::string fixed(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.4f}", v);
}

std::string fixed(const std::optional<double>& v) {
  return v ? fixed(*v) : std::string("-");
}

std::string status(const FairnessVerdict& v) {
  if (v.vacuous) return "vacuous";
  return v.satisfied ? "satisfied" : "UNSATISFIED";
}

}  // namespace

std::string report_to_json(const AuditReport& report) {
  Json root = Json::object();
  root["tool"] = report.tool;
  root["version"] = report.version;
  root["scenario"] = report.scenario;
  root["epsilon"] = json_util::number(report.epsilon);
  Json results = Json::array();
  for (const auto& r : report.results) {
    Json e = Json::object();
    e["metric"] = r.metric;
    if (r.verdict) e["verdict"] = verdict_json(*r.verdict);
    if (r.error) {
      Json err = Json::object();
      err["kind"] = r.error->kind;
      err["message"] = r.error->message;
      e["error"] = std::move(err);
    }
    results.push_back(std::move(e));
  }
  root["results"] = std::move(results);
  return json_util::write(root);
}

AuditReport report_from_json(std::string_view text) {
  const Json root = json_util::parse(text);
  AuditReport out;
  out.tool = as_string(member(root, "", "tool"), "tool");
  out.version = as_string(member(root, "", "version"), "version");
  out.scenario = as_string(member(root, "", "scenario"), "scenario");
  out.epsilon = as_number(member(root, "", "epsilon"), "epsilon");
  const auto& results = as_array(member(root, "", "results"), "results");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string f = at("results", i);
    MetricResult r;
    r.metric = as_string(member(results[i], f, "metric"), at(f, "metric"));
    if (const Json* v = optional_member(results[i], f, "verdict")) {
      r.verdict = read_verdict(*v, at(f, "verdict"));
    }
    if (const Json* e = optional_member(results[i], f, "error")) {
      const std::string ef = at(f, "error");
      r.error = ReportError{as_string(member(*e, ef, "kind"), at(ef, "kind")),
                            as_string(member(*e, ef, "message"), at(ef, "message"))};
    }
    out.results.push_back(std::move(r));
  }
  return out;
}

std::string report_to_table(const AuditReport& report) {
  std::string out = fmt::format("{} {}  scenario: {}  epsilon: {:g}\n",
                                report.tool, report.version,
                                report.scenario.empty() ? "-" : report.scenario,
                                report.epsilon);
  for (const auto& r : report.results) {
    out += "\n";
    if (r.error) {
      out += fmt::format("{}: ERROR {}: {}\n", r.metric, r.error->kind,
                         r.error->message);
      continue;
    }
    if (!r.verdict) continue;
    const auto& v = *r.verdict;
    out += fmt::format("{}: {}  max|diff| {}  min ratio {}", r.metric,
                       status(v), fixed(v.max_abs_difference),
                       fixed(v.min_ratio));
    if (!v.offending_groups.empty()) {
      std::vector<std::uint32_t> ids;
      for (GroupId g : v.offending_groups) ids.push_back(g.value);
      out += fmt::format("  offending Z={}", fmt::join(ids, ","));
    }
    out += "\n";
    for (const auto& c : v.clauses) {
      out += fmt::format("  {:<34} {:>11}", c.label,
                         c.vacuous ? "vacuous" : (c.satisfied ? "ok" : "differs"));
      for (const auto& g : c.per_group) {
        out += fmt::format("  Z={} {} (mass {})", g.group.value, fixed(g.value),
                           fixed(g.support_mass));
      }
      out += "\n";
    }
    for (const auto& d : v.diagnostics) out += fmt::format("  note: {}\n", d);
  }
  return out;
}

}  // namespace cufair
