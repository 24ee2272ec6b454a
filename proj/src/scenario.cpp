#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cufair/io.hpp"
#include "json_util.hpp"

namespace cufair {

using json_util::as_array;
using json_util::as_bool;
using json_util::as_index;
using json_util::as_number;
using json_util::as_object;
using json_util::as_string;
using json_util::at;
using json_util::Json;
using json_util::member;
using json_util::optional_member;

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Classification:
      return "classification";
    case ScenarioKind::Strata:
      return "strata";
    case ScenarioKind::Mdp:
      return "mdp";
    case ScenarioKind::Clustering:
      return "clustering";
  }
  return "?";
}

EpisodicMdp MdpPayload::model() const {
  return EpisodicMdp::from_triples(states, actions, transitions, reward, gamma,
                                   initial, horizon);
}

Thresholds default_thresholds(const ScenarioFile& scenario) {
  switch (scenario.kind) {
    case ScenarioKind::Classification: {
      const auto& p = std::get<ClassificationPayload>(scenario.payload);
      return p.welfare == ClassificationWelfare::GermanCredit
                 ? Thresholds{-1.0, 0.0}
                 : Thresholds{1.0, 0.0};
    }
    case ScenarioKind::Strata:
      return {1.0, 0.0};
    case ScenarioKind::Mdp:
      return {0.0, 0.0};
    case ScenarioKind::Clustering:
      return {0.5, std::numeric_limits<double>::infinity()};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Metric names

namespace {

struct ParamRule {
  const char* key;
  enum { Number, Text, Any } type;
  bool required;
};

struct MetricRule {
  const char* name;
  std::vector<ParamRule> params;
};

const std::vector<MetricRule>& extra_rules(ScenarioKind kind) {
  static const std::vector<MetricRule> classification{
      {"dem_par_clf", {}}, {"eq_opp_clf", {}}};
  static const std::vector<MetricRule> strata{
      {"dem_par_clf", {}}, {"eq_opp_clf", {}}, {"principal_fairness", {}}};
  static const std::vector<MetricRule> mdp{
      {"eq_opp_mdp_static",
       {{"alpha", ParamRule::Number, true},
        {"attribute", ParamRule::Text, false}}}};
  static const std::vector<MetricRule> none;
  switch (kind) {
    case ScenarioKind::Classification:
      return classification;
    case ScenarioKind::Strata:
      return strata;
    case ScenarioKind::Mdp:
      return mdp;
    case ScenarioKind::Clustering:
      return none;
  }
  return none;
}

std::vector<ParamRule> core_params(MetricKind kind) {
  switch (kind) {
    case MetricKind::ConditionalDemPar:
      return {{"attribute", ParamRule::Text, true},
              {"value", ParamRule::Any, true}};
    case MetricKind::EqOppStatic:
      return {{"alpha", ParamRule::Number, true},
              {"attribute", ParamRule::Text, false}};
    default:
      return {};
  }
}

void check_params(const MetricRequest& request,
                  const std::vector<ParamRule>& rules,
                  const std::string& field) {
  for (const auto& [key, value] : request.params) {
    const ParamRule* rule = nullptr;
    for (const auto& r : rules) {
      if (key == r.key) rule = &r;
    }
    const std::string where = at(at(field, "params"), key);
    if (rule == nullptr) {
      throw SchemaError(where, fmt::format("metric '{}' takes no parameter '{}'",
                                           request.name, key));
    }
    if (rule->type == ParamRule::Number &&
        !std::holds_alternative<double>(value)) {
      throw SchemaError(where, "expected a number");
    }
    if (rule->type == ParamRule::Text &&
        !std::holds_alternative<std::string>(value)) {
      throw SchemaError(where, "expected a string");
    }
  }
  for (const auto& r : rules) {
    if (r.required && !request.params.count(r.key)) {
      throw SchemaError(at(at(field, "params"), r.key),
                        fmt::format("metric '{}' requires '{}'", request.name,
                                    r.key));
    }
  }
}

}  // namespace

std::vector<std::string> metric_names(ScenarioKind kind) {
  std::vector<std::string> out;
  for (MetricKind k : all_metric_kinds()) out.emplace_back(metric_name(k));
  for (const auto& r : extra_rules(kind)) out.emplace_back(r.name);
  return out;
}

void validate_metric(ScenarioKind kind, const MetricRequest& request,
                     const std::string& field) {
  if (const auto core = parse_metric_kind(request.name)) {
    check_params(request, core_params(*core), field);
    return;
  }
  for (const auto& r : extra_rules(kind)) {
    if (request.name == r.name) {
      check_params(request, r.params, field);
      return;
    }
  }
  throw SchemaError(field, fmt::format("unknown metric '{}' for {} scenarios",
                                       request.name, to_string(kind)));
}

// ---------------------------------------------------------------------------
// Reading

namespace {

AttributeValue attribute_value(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.get<double>();
  throw SchemaError(field, "expected a number or a string");
}

std::uint32_t group_id(const Json& v, const std::string& field) {
  const std::size_t g = as_index(v, field);
  if (g > std::numeric_limits<std::uint32_t>::max()) {
    throw SchemaError(field, "group id is too large");
  }
  return static_cast<std::uint32_t>(g);
}

std::vector<double> number_list(const Json& v, const std::string& field) {
  std::vector<double> out;
  const auto& arr = as_array(v, field);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_number(arr[i], at(field, i)));
  }
  return out;
}

int binary(const Json& v, const std::string& field) {
  const double d = as_number(v, field);
  if (d != 0.0 && d != 1.0) throw SchemaError(field, "expected 0 or 1");
  return static_cast<int>(d);
}

CsvTable load_csv(const Json& payload, const std::string& field,
                  const std::filesystem::path& base_dir) {
  const std::string name = as_string(member(payload, field, "csv"),
                                     at(field, "csv"));
  std::filesystem::path path(name);
  if (path.is_relative()) path = base_dir / path;
  return read_csv_file(path);
}

// CSV schema errors name the column; prefix them with the payload field.
template <class F>
auto with_csv_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const SchemaError& e) {
    throw SchemaError(at(at(field, "csv"), e.field()), e.what());
  }
}

// Exactly one of `csv` and `inline_key` must be present.
bool uses_csv(const Json& payload, const std::string& field,
              std::string_view inline_key) {
  const bool csv = optional_member(payload, field, "csv") != nullptr;
  const bool inl = optional_member(payload, field, inline_key) != nullptr;
  if (csv == inl) {
    throw SchemaError(field, fmt::format("needs exactly one of 'csv' and '{}'",
                                         inline_key));
  }
  return csv;
}

ClassificationPayload read_classification(const Json& payload,
                                          const std::string& field,
                                          const std::filesystem::path& base) {
  ClassificationPayload out;
  if (const Json* w = optional_member(payload, field, "welfare")) {
    const std::string name = as_string(*w, at(field, "welfare"));
    if (name == "prediction") {
      out.welfare = ClassificationWelfare::Prediction;
    } else if (name == "german_credit") {
      out.welfare = ClassificationWelfare::GermanCredit;
    } else {
      throw SchemaError(at(field, "welfare"),
                        "expected 'prediction' or 'german_credit'");
    }
  }
  if (uses_csv(payload, field, "rows")) {
    out.rows = with_csv_field(field, [&] {
      return predictions_from_csv(load_csv(payload, field, base));
    });
  } else {
    const std::string rows_field = at(field, "rows");
    const auto& rows = as_array(member(payload, field, "rows"), rows_field);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string f = at(rows_field, i);
      PredictionRow row;
      row.features = number_list(member(rows[i], f, "features"), at(f, "features"));
      row.y = binary(member(rows[i], f, "y"), at(f, "y"));
      row.group = group_id(member(rows[i], f, "z"), at(f, "z"));
      row.yhat = binary(member(rows[i], f, "yhat"), at(f, "yhat"));
      if (const Json* w = optional_member(rows[i], f, "weight")) {
        row.weight = as_number(*w, at(f, "weight"));
      }
      out.rows.push_back(std::move(row));
    }
  }
  if (out.rows.empty()) throw SchemaError(field, "no prediction rows");
  std::map<std::pair<std::vector<double>, std::uint32_t>, int> seen;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& r = out.rows[i];
    auto [it, fresh] = seen.try_emplace({r.features, r.group}, r.yhat);
    if (!fresh && it->second != r.yhat) {
      throw SchemaError(at(at(field, "rows"), i),
                        "conflicting predictions for identical inputs");
    }
  }
  return out;
}

StrataPayload read_strata(const Json& payload, const std::string& field,
                          const std::filesystem::path& base) {
  StrataPayload out;
  if (uses_csv(payload, field, "counts")) {
    out.counts = with_csv_field(field, [&] {
      return strata_from_csv(load_csv(payload, field, base)).counts();
    });
    return out;
  }
  const std::string counts_field = at(field, "counts");
  const auto& rows = as_array(member(payload, field, "counts"), counts_field);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string f = at(counts_field, i);
    StrataCell c{};
    try {
      c.stratum =
          parse_stratum(as_string(member(rows[i], f, "stratum"), at(f, "stratum")));
    } catch (const InvalidArgument& e) {
      throw SchemaError(at(f, "stratum"), e.what());
    }
    try {
      c.decision = parse_detention(
          as_string(member(rows[i], f, "decision"), at(f, "decision")));
    } catch (const InvalidArgument& e) {
      throw SchemaError(at(f, "decision"), e.what());
    }
    c.group = GroupId{group_id(member(rows[i], f, "group"), at(f, "group"))};
    const double n = as_number(member(rows[i], f, "count"), at(f, "count"));
    if (!(n >= 0.0)) throw SchemaError(at(f, "count"), "must be non-negative");
    out.counts[c] += n;
  }
  return out;
}

StateActionTable read_table(const Json& payload, const std::string& field,
                            std::string_view key, const MdpPayload& mdp,
                            const std::map<std::string, std::size_t>& states,
                            const std::map<std::string, std::size_t>& actions) {
  StateActionTable table = StateActionTable::Zero(
      static_cast<Eigen::Index>(mdp.states.size()),
      static_cast<Eigen::Index>(mdp.actions.size()));
  const Json* entries = optional_member(payload, field, key);
  if (entries == nullptr) return table;
  const std::string list = at(field, key);
  as_array(*entries, list);
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const Json& e = (*entries)[i];
    const std::string f = at(list, i);
    const std::string s = as_string(member(e, f, "s"), at(f, "s"));
    const std::string a = as_string(member(e, f, "a"), at(f, "a"));
    if (!states.count(s)) throw SchemaError(at(f, "s"), "unknown state '" + s + "'");
    if (!actions.count(a)) throw SchemaError(at(f, "a"), "unknown action '" + a + "'");
    table(static_cast<Eigen::Index>(states.at(s)),
          static_cast<Eigen::Index>(actions.at(a))) =
        as_number(member(e, f, "value"), at(f, "value"));
  }
  return table;
}

MdpPayload read_mdp(const Json& payload, const std::string& field) {
  MdpPayload out;
  std::map<std::string, std::size_t> state_index;
  std::map<std::string, std::size_t> action_index;

  const std::string states_field = at(field, "states");
  const auto& states = as_array(member(payload, field, "states"), states_field);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string f = at(states_field, i);
    MdpState s;
    s.id = as_string(member(states[i], f, "id"), at(f, "id"));
    s.group = GroupId{group_id(member(states[i], f, "group"), at(f, "group"))};
    if (const Json* attrs = optional_member(states[i], f, "attrs")) {
      Attributes::Map map;
      for (const auto& [k, v] : as_object(*attrs, at(f, "attrs")).items()) {
        map.emplace(k, attribute_value(v, at(at(f, "attrs"), k)));
      }
      s.attrs = Attributes(std::move(map));
    }
    if (const Json* a = optional_member(states[i], f, "absorbing")) {
      s.absorbing = as_bool(*a, at(f, "absorbing"));
    }
    if (!state_index.emplace(s.id, i).second) {
      throw SchemaError(at(f, "id"), "duplicate state '" + s.id + "'");
    }
    out.states.push_back(std::move(s));
  }

  const std::string actions_field = at(field, "actions");
  const auto& actions = as_array(member(payload, field, "actions"), actions_field);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    std::string name = as_string(actions[i], at(actions_field, i));
    if (!action_index.emplace(name, i).second) {
      throw SchemaError(at(actions_field, i), "duplicate action '" + name + "'");
    }
    out.actions.push_back(std::move(name));
  }

  const std::string tr_field = at(field, "transitions");
  const auto& transitions =
      as_array(member(payload, field, "transitions"), tr_field);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Json& t = transitions[i];
    const std::string f = at(tr_field, i);
    const std::string s = as_string(member(t, f, "s"), at(f, "s"));
    const std::string a = as_string(member(t, f, "a"), at(f, "a"));
    const std::string next = as_string(member(t, f, "next"), at(f, "next"));
    if (!state_index.count(s)) throw SchemaError(at(f, "s"), "unknown state '" + s + "'");
    if (!action_index.count(a)) throw SchemaError(at(f, "a"), "unknown action '" + a + "'");
    if (!state_index.count(next)) {
      throw SchemaError(at(f, "next"), "unknown state '" + next + "'");
    }
    out.transitions.push_back({state_index[s], action_index[a], state_index[next],
                               as_number(member(t, f, "p"), at(f, "p"))});
  }

  out.reward = read_table(payload, field, "rewards", out, state_index, action_index);
  out.welfare = read_table(payload, field, "welfare", out, state_index, action_index);

  if (const Json* g = optional_member(payload, field, "gamma")) {
    out.gamma = as_number(*g, at(field, "gamma"));
  }
  if (const Json* h = optional_member(payload, field, "horizon")) {
    if (!h->is_null()) out.horizon = as_index(*h, at(field, "horizon"));
  }

  out.initial = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.states.size()));
  const std::string init_field = at(field, "initial");
  for (const auto& [id, p] :
       as_object(member(payload, field, "initial"), init_field).items()) {
    if (!state_index.count(id)) {
      throw SchemaError(at(init_field, id), "unknown state '" + id + "'");
    }
    out.initial(static_cast<Eigen::Index>(state_index[id])) =
        as_number(p, at(init_field, id));
  }

  out.policy.assign(out.states.size(), 0);
  if (const Json* policy = optional_member(payload, field, "policy")) {
    const std::string pf = at(field, "policy");
    for (const auto& [id, a] : as_object(*policy, pf).items()) {
      if (!state_index.count(id)) {
        throw SchemaError(at(pf, id), "unknown state '" + id + "'");
      }
      const std::string name = as_string(a, at(pf, id));
      if (!action_index.count(name)) {
        throw SchemaError(at(pf, id), "unknown action '" + name + "'");
      }
      out.policy[state_index[id]] = action_index[name];
    }
  }

  try {
    (void)out.model();
  } catch (const InvalidModel& e) {
    throw SchemaError(field, e.what());
  }
  return out;
}

ClusteringPayload read_clustering(const Json& payload, const std::string& field,
                                  const std::filesystem::path& base) {
  ClusteringPayload out;
  out.k = as_index(member(payload, field, "k"), at(field, "k"));
  if (const Json* w = optional_member(payload, field, "welfare")) {
    const std::string name = as_string(*w, at(field, "welfare"));
    if (name == "representative") {
      out.representative = true;
    } else if (name != "balanced") {
      throw SchemaError(at(field, "welfare"),
                        "expected 'balanced' or 'representative'");
    }
  }

  std::vector<std::vector<double>> rows;
  if (uses_csv(payload, field, "rows")) {
    const CsvTable table = load_csv(payload, field, base);
    const auto group_col = table.column("group");
    if (!group_col) {
      throw SchemaError(at(at(field, "csv"), "group"), "CSV has no 'group' column");
    }
    const auto cluster_col = table.column("cluster");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      std::vector<double> x;
      for (std::size_t c = 0; c < table.header.size(); ++c) {
        double v = 0.0;
        const std::string& text = table.rows[r][c];
        const auto [end, ec] =
            std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || end != text.data() + text.size()) {
          throw ParseError("'" + text + "' is not a number", table.lines[r], 1);
        }
        if (c == *group_col) {
          out.groups.push_back(GroupId{static_cast<std::uint32_t>(v)});
        } else if (cluster_col && c == *cluster_col) {
          out.assignment.push_back(static_cast<std::size_t>(v));
        } else {
          x.push_back(v);
        }
      }
      rows.push_back(std::move(x));
    }
  } else {
    const std::string rows_field = at(field, "rows");
    const auto& list = as_array(member(payload, field, "rows"), rows_field);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string f = at(rows_field, i);
      rows.push_back(number_list(member(list[i], f, "features"), at(f, "features")));
      out.groups.push_back(GroupId{group_id(member(list[i], f, "group"), at(f, "group"))});
    }
  }
  if (const Json* a = optional_member(payload, field, "assignment")) {
    out.assignment.clear();
    const std::string af = at(field, "assignment");
    const auto& arr = as_array(*a, af);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.assignment.push_back(as_index(arr[i], at(af, i)));
    }
  }
  if (rows.empty()) throw SchemaError(field, "no clustering rows");
  const std::size_t dims = rows.front().size();
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dims) {
      throw SchemaError(at(at(field, "rows"), i), "feature length differs");
    }
    for (std::size_t d = 0; d < dims; ++d) {
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
          rows[i][d];
    }
  }
  if (out.assignment.size() != rows.size()) {
    throw SchemaError(at(field, "assignment"), "needs one cluster per row");
  }
  for (std::size_t i = 0; i < out.assignment.size(); ++i) {
    if (out.assignment[i] >= out.k) {
      throw SchemaError(at(at(field, "assignment"), i), "cluster id is not below k");
    }
  }
  return out;
}

MetricRequest read_metric(const Json& v, const std::string& field) {
  MetricRequest out;
  if (v.is_string()) {
    out.name = v.get<std::string>();
    return out;
  }
  out.name = as_string(member(v, field, "name"), at(field, "name"));
  if (const Json* params = optional_member(v, field, "params")) {
    for (const auto& [k, p] : as_object(*params, at(field, "params")).items()) {
      out.params.emplace(k, attribute_value(p, at(at(field, "params"), k)));
    }
  }
  return out;
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text,
                            const std::filesystem::path& base_dir) {
  const Json root = json_util::parse(text);
  as_object(root, "<root>");

  ScenarioFile out;
  if (const Json* id = optional_member(root, "", "id")) {
    out.id = as_string(*id, "id");
  }
  const std::string kind = as_string(member(root, "", "kind"), "kind");
  if (kind == "classification") {
    out.kind = ScenarioKind::Classification;
  } else if (kind == "strata") {
    out.kind = ScenarioKind::Strata;
  } else if (kind == "mdp") {
    out.kind = ScenarioKind::Mdp;
  } else if (kind == "clustering") {
    out.kind = ScenarioKind::Clustering;
  } else {
    throw SchemaError("kind", "unknown scenario kind '" + kind + "'");
  }

  if (const Json* th = optional_member(root, "", "thresholds")) {
    if (const Json* tau = optional_member(*th, "thresholds", "tau")) {
      out.tau = as_number(*tau, "thresholds.tau");
    }
    if (const Json* rho = optional_member(*th, "thresholds", "rho")) {
      out.rho = as_number(*rho, "thresholds.rho");
    }
  }
  if (const Json* eps = optional_member(root, "", "epsilon")) {
    out.epsilon = as_number(*eps, "epsilon");
    if (!(*out.epsilon >= 0.0)) throw SchemaError("epsilon", "must be non-negative");
  }
  if (const Json* metrics = optional_member(root, "", "metrics")) {
    as_array(*metrics, "metrics");
    for (std::size_t i = 0; i < metrics->size(); ++i) {
      const std::string f = at("metrics", i);
      out.metrics.push_back(read_metric((*metrics)[i], f));
      validate_metric(out.kind, out.metrics.back(), f);
    }
  }

  const Json& payload = member(root, "", "payload");
  switch (out.kind) {
    case ScenarioKind::Classification:
      out.payload = read_classification(payload, "payload", base_dir);
      break;
    case ScenarioKind::Strata:
      out.payload = read_strata(payload, "payload", base_dir);
      break;
    case ScenarioKind::Mdp:
      out.payload = read_mdp(payload, "payload");
      break;
    case ScenarioKind::Clustering:
      out.payload = read_clustering(payload, "payload", base_dir);
      break;
  }
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument(fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Writing

namespace {

Json attribute_json(const AttributeValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return json_util::number(*d);
  return std::get<std::string>(v);
}

Json write_payload(const ClassificationPayload& p) {
  Json out = Json::object();
  out["welfare"] = p.welfare == ClassificationWelfare::GermanCredit
                       ? "german_credit"
                       : "prediction";
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    Json row = Json::object();
    Json features = Json::array();
    for (double x : r.features) features.push_back(json_util::number(x));
    row["features"] = std::move(features);
    row["y"] = r.y;
    row["z"] = r.group;
    row["yhat"] = r.yhat;
    row["weight"] = json_util::number(r.weight);
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  return out;
}

Json write_payload(const StrataPayload& p) {
  Json counts = Json::array();
  for (const auto& [cell, n] : p.counts) {
    Json row = Json::object();
    row["stratum"] = std::string(to_string(cell.stratum));
    row["group"] = cell.group.value;
    row["decision"] = std::string(to_string(cell.decision));
    row["count"] = json_util::number(n);
    counts.push_back(std::move(row));
  }
  Json out = Json::object();
  out["counts"] = std::move(counts);
  return out;
}

Json table_json(const MdpPayload& p, const StateActionTable& table) {
  Json out = Json::array();
  for (Eigen::Index s = 0; s < table.rows(); ++s) {
    for (Eigen::Index a = 0; a < table.cols(); ++a) {
      if (table(s, a) == 0.0) continue;
      Json e = Json::object();
      e["s"] = p.states[static_cast<std::size_t>(s)].id;
      e["a"] = p.actions[static_cast<std::size_t>(a)];
      e["value"] = json_util::number(table(s, a));
      out.push_back(std::move(e));
    }
  }
  return out;
}

Json write_payload(const MdpPayload& p) {
  Json out = Json::object();
  Json states = Json::array();
  for (const auto& s : p.states) {
    Json state = Json::object();
    state["id"] = s.id;
    state["group"] = s.group.value;
    Json attrs = Json::object();
    for (const auto& [k, v] : s.attrs.items()) attrs[k] = attribute_json(v);
    state["attrs"] = std::move(attrs);
    state["absorbing"] = s.absorbing;
    states.push_back(std::move(state));
  }
  out["states"] = std::move(states);
  out["actions"] = p.actions;
  Json transitions = Json::array();
  for (const auto& t : p.transitions) {
    Json e = Json::object();
    e["s"] = p.states[t.state].id;
    e["a"] = p.actions[t.action];
    e["next"] = p.states[t.next].id;
    e["p"] = json_util::number(t.probability);
    transitions.push_back(std::move(e));
  }
  out["transitions"] = std::move(transitions);
  out["rewards"] = table_json(p, p.reward);
  out["welfare"] = table_json(p, p.welfare);
  out["gamma"] = json_util::number(p.gamma);
  if (p.horizon) out["horizon"] = *p.horizon;
  Json initial = Json::object();
  for (std::size_t s = 0; s < p.states.size(); ++s) {
    const double mu = p.initial(static_cast<Eigen::Index>(s));
    if (mu != 0.0) initial[p.states[s].id] = json_util::number(mu);
  }
  out["initial"] = std::move(initial);
  Json policy = Json::object();
  for (std::size_t s = 0; s < p.states.size(); ++s) {
    policy[p.states[s].id] = p.actions[p.policy[s]];
  }
  out["policy"] = std::move(policy);
  return out;
}

Json write_payload(const ClusteringPayload& p) {
  Json out = Json::object();
  out["k"] = p.k;
  out["welfare"] = p.representative ? "representative" : "balanced";
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < p.features.rows(); ++i) {
    Json row = Json::object();
    Json features = Json::array();
    for (Eigen::Index d = 0; d < p.features.cols(); ++d) {
      features.push_back(json_util::number(p.features(i, d)));
    }
    row["features"] = std::move(features);
    row["group"] = p.groups[static_cast<std::size_t>(i)].value;
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  out["assignment"] = p.assignment;
  return out;
}

}  // namespace

std::string scenario_to_json(const ScenarioFile& scenario) {
  Json root = Json::object();
  root["id"] = scenario.id;
  root["kind"] = std::string(to_string(scenario.kind));
  if (scenario.tau || scenario.rho) {
    Json th = Json::object();
    if (scenario.tau) th["tau"] = json_util::number(*scenario.tau);
    if (scenario.rho) th["rho"] = json_util::number(*scenario.rho);
    root["thresholds"] = std::move(th);
  }
  if (scenario.epsilon) root["epsilon"] = json_util::number(*scenario.epsilon);
  Json metrics = Json::array();
  for (const auto& m : scenario.metrics) {
    if (m.params.empty()) {
      metrics.push_back(m.name);
      continue;
    }
    Json entry = Json::object();
    entry["name"] = m.name;
    Json params = Json::object();
    for (const auto& [k, v] : m.params) params[k] = attribute_json(v);
    entry["params"] = std::move(params);
    metrics.push_back(std::move(entry));
  }
  root["metrics"] = std::move(metrics);
  root["payload"] =
      std::visit([](const auto& p) { return write_payload(p); }, scenario.payload);
  return json_util::write(root);
}

// ---------------------------------------------------------------------------
// Bundled scenarios

ScenarioFile recidivism_scenario() {
  ScenarioFile out;
  out.id = "recidivism";
  out.kind = ScenarioKind::Strata;
  out.tau = 1.0;
  out.rho = 0.0;
  out.metrics = {{"eq_opp_clf", {}}, {"eq_opp_cf_util", {}},
                 {"principal_fairness", {}}};
  out.payload = StrataPayload{recidivism_example().counts()};
  return out;
}

ScenarioFile two_stage_loan_file() {
  const TwoStageLoan loan = two_stage_loan_scenario();
  const EpisodicMdp& mdp = loan.mdp;
  MdpPayload p;
  p.states = mdp.states();
  p.actions = mdp.actions();
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    for (std::size_t a = 0; a < mdp.action_count(); ++a) {
      for (std::size_t t = 0; t < mdp.state_count(); ++t) {
        const double prob = mdp.transition(a)(static_cast<Eigen::Index>(s),
                                              static_cast<Eigen::Index>(t));
        if (prob > 0.0) p.transitions.push_back({s, a, t, prob});
      }
    }
  }
  p.reward = mdp.reward();
  p.welfare = loan.welfare;
  p.gamma = mdp.gamma();
  p.horizon = mdp.horizon();
  p.initial = mdp.initial();
  p.policy = loan.prime_only;

  ScenarioFile out;
  out.id = "two-stage-loan";
  out.kind = ScenarioKind::Mdp;
  out.tau = loan.thresholds.tau;
  out.rho = loan.thresholds.rho;
  out.metrics = {{"dem_par_welf", {}},
                 {"eq_opp_cf_util", {}},
                 {"eq_opp_mdp_static", {{"alpha", 2.0 / 3.0}}}};
  out.payload = std::move(p);
  return out;
}

}  // namespace cufair
