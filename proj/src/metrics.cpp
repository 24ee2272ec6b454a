#include "cufair/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

namespace cufair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string group_label(GroupId g) { return fmt::format("Z={}", g.value); }

/// E[values | cond, Z=z] for every group.
std::vector<GroupStats> conditional_means(const Population& pop,
                                          const std::vector<double>& values,
                                          const Mask& cond) {
  std::vector<GroupStats> stats;
  for (std::uint32_t z = 0; z < pop.group_count(); ++z) {
    const GroupId g{z};
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (!cond[i] || pop.group(i) != g) continue;
      total += pop.weight(i);
      weighted += pop.weight(i) * values[i];
    }
    GroupStats s{g, std::nullopt, total};
    if (total > 0.0) s.value = weighted / total;
    stats.push_back(s);
  }
  return stats;
}

Mask all_of(const Population& pop) { return Mask(pop.size(), 1); }

/// Distinct values merged into support points: a new point starts whenever
/// a value is more than epsilon above the current point's first value.
std::vector<std::pair<double, double>> support_points(std::vector<double> values,
                                                      double epsilon) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> points;
  for (double v : values) {
    if (points.empty() || v - points.back().first > epsilon) {
      points.emplace_back(v, v);
    } else {
      points.back().second = v;
    }
  }
  return points;
}

Mask in_point(const std::vector<double>& values,
              const std::pair<double, double>& point) {
  Mask out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] >= point.first && values[i] <= point.second) ? 1 : 0;
  }
  return out;
}

FairnessVerdict single_clause(std::string metric, std::string label,
                              std::vector<GroupStats> stats,
                              const MetricOptions& opts) {
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  clauses.push_back(
      compare_groups(std::move(label), std::move(stats), opts.epsilon,
                     diagnostics));
  return make_verdict(std::move(metric), std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

}  // namespace

std::vector<GroupStats> conditional_stats(const Population& pop,
                                          const Mask& event, const Mask& cond) {
  std::vector<GroupStats> stats;
  stats.reserve(pop.group_count());
  for (std::uint32_t z = 0; z < pop.group_count(); ++z) {
    const GroupId g{z};
    const Mask cond_g = mask_and(cond, group_mask(pop, g));
    GroupStats s{g, std::nullopt, mass(pop, cond_g)};
    if (s.support_mass > 0.0) {
      s.value = conditional_probability(pop, event, cond_g);
    }
    stats.push_back(s);
  }
  return stats;
}

const std::vector<GroupStats>& FairnessVerdict::per_group() const {
  static const std::vector<GroupStats> kEmpty;
  return clauses.empty() ? kEmpty : clauses.front().per_group;
}

std::optional<double> symmetric_ratio(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    return std::nullopt;
  }
  if (a == 0.0 && b == 0.0) return 1.0;
  if (a == 0.0 || b == 0.0) return 0.0;
  return std::min(a / b, b / a);
}

Clause compare_groups(std::string label, std::vector<GroupStats> stats,
                      double epsilon, std::vector<std::string>& diagnostics) {
  Clause clause;
  clause.label = std::move(label);
  clause.per_group = std::move(stats);
  if (clause.per_group.empty()) return clause;

  const GroupStats& ref = clause.per_group.front();
  bool ratio_defined = true;
  double ratio = 1.0;
  for (std::size_t k = 1; k < clause.per_group.size(); ++k) {
    const GroupStats& other = clause.per_group[k];
    if (!ref.value || !other.value) {
      const GroupId empty = ref.value ? other.group : ref.group;
      diagnostics.push_back(fmt::format(
          "{}: {} has zero conditioning mass; comparison {} vs {} skipped",
          clause.label, group_label(empty), group_label(ref.group),
          group_label(other.group)));
      continue;
    }
    clause.vacuous = false;
    const double a = *ref.value;
    const double b = *other.value;
    double diff;
    if (std::isinf(a) || std::isinf(b)) {
      diff = (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) ? 0.0 : kInf;
      diagnostics.push_back(fmt::format(
          "DivergentRatio: {}: zero denominator in {}", clause.label,
          group_label(std::isinf(a) ? ref.group : other.group)));
    } else {
      diff = std::abs(a - b);
    }
    clause.max_abs_difference = std::max(clause.max_abs_difference, diff);
    if (!(diff <= epsilon)) {
      clause.satisfied = false;
      clause.offending_groups.push_back(other.group);
    }
    if (auto r = symmetric_ratio(a, b)) {
      ratio = std::min(ratio, *r);
    } else {
      ratio_defined = false;
    }
  }
  if (!clause.vacuous && ratio_defined) clause.min_ratio = ratio;
  return clause;
}

FairnessVerdict make_verdict(std::string metric, std::vector<Clause> clauses,
                             std::vector<std::string> diagnostics,
                             double epsilon) {
  FairnessVerdict v;
  v.metric = std::move(metric);
  v.epsilon = epsilon;
  v.diagnostics = std::move(diagnostics);
  for (const auto& c : clauses) {
    if (c.vacuous) continue;
    v.vacuous = false;
    v.max_abs_difference = std::max(v.max_abs_difference, c.max_abs_difference);
    if (!c.satisfied) v.satisfied = false;
    if (c.min_ratio) {
      v.min_ratio = v.min_ratio ? std::min(*v.min_ratio, *c.min_ratio)
                                : *c.min_ratio;
    }
    for (GroupId g : c.offending_groups) {
      if (std::find(v.offending_groups.begin(), v.offending_groups.end(), g) ==
          v.offending_groups.end()) {
        v.offending_groups.push_back(g);
      }
    }
  }
  std::sort(v.offending_groups.begin(), v.offending_groups.end());
  if (v.vacuous) {
    v.diagnostics.push_back(
        "vacuous: no group pair had positive conditioning mass");
  }
  v.clauses = std::move(clauses);
  return v;
}

const Mask& AuditData::gamma() const {
  if (!qualified) {
    throw InvalidArgument("audit was built without qualification");
  }
  return *qualified;
}

Mask welfare_event(const AuditData& audit) {
  Mask out(audit.welfare.size());
  for (std::size_t i = 0; i < audit.welfare.size(); ++i) {
    out[i] = meets_welfare(audit.welfare[i], audit.tau) ? 1 : 0;
  }
  return out;
}

FairnessVerdict dem_par_welf(const AuditData& audit, const MetricOptions& opts) {
  const auto& pop = audit.pop();
  return single_clause(
      "dem_par_welf", "P(W>=tau | Z)",
      conditional_stats(pop, welfare_event(audit), all_of(pop)), opts);
}

FairnessVerdict eq_opp_cf_util(const AuditData& audit,
                               const MetricOptions& opts) {
  return single_clause(
      "eq_opp_cf_util", "P(W>=tau | Gamma=1, Z)",
      conditional_stats(audit.pop(), welfare_event(audit), audit.gamma()),
      opts);
}

FairnessVerdict equalized_odds_cf_util(const AuditData& audit,
                                       const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask ok = welfare_event(audit);
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  clauses.push_back(compare_groups("P(W>=tau | Gamma=1, Z)",
                                   conditional_stats(pop, ok, audit.gamma()),
                                   opts.epsilon, diagnostics));
  clauses.push_back(
      compare_groups("P(W>=tau | Gamma=0, Z)",
                     conditional_stats(pop, ok, mask_not(audit.gamma())),
                     opts.epsilon, diagnostics));
  return make_verdict("equalized_odds_cf_util", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict predictive_parity_cf_util(const AuditData& audit,
                                          const MetricOptions& opts) {
  return single_clause(
      "predictive_parity_cf_util", "P(Gamma=1 | W>=tau, Z)",
      conditional_stats(audit.pop(), audit.gamma(), welfare_event(audit)),
      opts);
}

FairnessVerdict conditional_dem_par(const AuditData& audit,
                                    const EventPredicate& legit,
                                    std::string_view legit_label,
                                    const MetricOptions& opts) {
  const auto& pop = audit.pop();
  return single_clause(
      "conditional_dem_par", fmt::format("P(W>=tau | {}, Z)", legit_label),
      conditional_stats(pop, welfare_event(audit), evaluate_event(pop, legit)),
      opts);
}

FairnessVerdict predictive_equality_cf_util(const AuditData& audit,
                                            const MetricOptions& opts) {
  return single_clause("predictive_equality_cf_util", "P(W>=tau | Gamma=0, Z)",
                       conditional_stats(audit.pop(), welfare_event(audit),
                                         mask_not(audit.gamma())),
                       opts);
}

FairnessVerdict conditional_use_accuracy_cf_util(const AuditData& audit,
                                                 const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask ok = welfare_event(audit);
  const Mask& gamma = audit.gamma();
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  clauses.push_back(compare_groups("P(Gamma=1 | W>=tau, Z)",
                                   conditional_stats(pop, gamma, ok),
                                   opts.epsilon, diagnostics));
  clauses.push_back(
      compare_groups("P(Gamma=0 | W<tau, Z)",
                     conditional_stats(pop, mask_not(gamma), mask_not(ok)),
                     opts.epsilon, diagnostics));
  return make_verdict("conditional_use_accuracy_cf_util", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict overall_accuracy_cf_util(const AuditData& audit,
                                         const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask ok = welfare_event(audit);
  const Mask& gamma = audit.gamma();
  const Mask everyone = all_of(pop);
  std::vector<std::string> diagnostics;
  for (std::uint32_t z = 0; z < pop.group_count(); ++z) {
    const Mask g = group_mask(pop, GroupId{z});
    if (mass(pop, g) > 0.0 && mass(pop, mask_and(g, mask_not(gamma))) == 0.0) {
      diagnostics.push_back(
          fmt::format("Z={} has no unqualified individuals", z));
    }
  }
  std::vector<Clause> clauses;
  clauses.push_back(
      compare_groups("P(W>=tau, Gamma=1 | Z)",
                     conditional_stats(pop, mask_and(ok, gamma), everyone),
                     opts.epsilon, diagnostics));
  clauses.push_back(compare_groups(
      "P(W<tau, Gamma=0 | Z)",
      conditional_stats(pop, mask_and(mask_not(ok), mask_not(gamma)),
                        everyone),
      opts.epsilon, diagnostics));
  return make_verdict("overall_accuracy_cf_util", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict treatment_equality_cf_util(const AuditData& audit,
                                           const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask ok = welfare_event(audit);
  const Mask& gamma = audit.gamma();
  const auto misses = conditional_stats(pop, mask_not(ok), gamma);
  const auto false_alarms = conditional_stats(pop, ok, mask_not(gamma));

  std::vector<GroupStats> ratios;
  for (std::size_t z = 0; z < misses.size(); ++z) {
    GroupStats s{misses[z].group, std::nullopt,
                 std::min(misses[z].support_mass,
                          false_alarms[z].support_mass)};
    if (misses[z].value && false_alarms[z].value) {
      const double num = *misses[z].value;
      const double den = *false_alarms[z].value;
      if (den > 0.0) {
        s.value = num / den;
      } else if (num > 0.0) {
        s.value = kInf;
      } else {
        s.support_mass = 0.0;  // 0/0
      }
    } else {
      s.support_mass = 0.0;
    }
    ratios.push_back(s);
  }
  return single_clause(
      "treatment_equality_cf_util",
      "P(W<tau | Gamma=1, Z) / P(W>=tau | Gamma=0, Z)", std::move(ratios),
      opts);
}

FairnessVerdict test_fairness_cf_util(const AuditData& audit,
                                      const MetricOptions& opts) {
  const auto& pop = audit.pop();
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  for (const auto& point : support_points(audit.welfare, opts.epsilon)) {
    clauses.push_back(compare_groups(
        fmt::format("P(Gamma=1 | W={:.17g}, Z)", point.first),
        conditional_stats(pop, audit.gamma(), in_point(audit.welfare, point)),
        opts.epsilon, diagnostics));
  }
  return make_verdict("test_fairness_cf_util", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict expected_welfare_parity(const AuditData& audit,
                                        const MetricOptions& opts) {
  const auto& pop = audit.pop();
  return single_clause("expected_welfare_parity", "E[W | Z]",
                       conditional_means(pop, audit.welfare, all_of(pop)),
                       opts);
}

FairnessVerdict distribution_parity(const AuditData& audit,
                                    const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask everyone = all_of(pop);
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  for (const auto& point : support_points(audit.welfare, opts.epsilon)) {
    clauses.push_back(compare_groups(
        fmt::format("P(W={:.17g} | Z)", point.first),
        conditional_stats(pop, in_point(audit.welfare, point), everyone),
        opts.epsilon, diagnostics));
  }
  return make_verdict("distribution_parity", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict eq_opp_static(const AuditData& audit,
                              const std::function<double(const Individual&)>& p0,
                              double alpha, const MetricOptions& opts) {
  const auto& pop = audit.pop();
  const Mask cleared = evaluate_event(
      pop, [&](const Individual& ind) { return p0(ind) >= alpha; });
  return single_clause("eq_opp_static",
                       fmt::format("E[W | p0>={:.6g}, Z]", alpha),
                       conditional_means(pop, audit.welfare, cleared), opts);
}

RatioMeasure min_ratio_measure(std::string metric,
                               std::vector<GroupStats> rates) {
  RatioMeasure out;
  out.metric = std::move(metric);
  out.rates = std::move(rates);
  out.ratio = 1.0;
  if (out.rates.empty()) return out;
  const GroupStats& ref = out.rates.front();
  for (std::size_t k = 1; k < out.rates.size(); ++k) {
    const GroupStats& other = out.rates[k];
    if (!ref.value || !other.value) {
      out.diagnostics.push_back(fmt::format(
          "{}: rate undefined for Z={} vs Z={}; ratio set to 0", out.metric,
          ref.group.value, other.group.value));
      out.ratio = 0.0;
      continue;
    }
    const double a = *ref.value;
    const double b = *other.value;
    if (!(a > 0.0) || !(b > 0.0)) {
      out.diagnostics.push_back(fmt::format(
          "{}: zero rate in Z={} vs Z={}; ratio set to 0", out.metric,
          ref.group.value, other.group.value));
      out.ratio = 0.0;
      continue;
    }
    out.ratio = std::min(out.ratio, std::min(a / b, b / a));
  }
  return out;
}

RatioMeasure dem_par_clf_ratio(const AuditData& audit) {
  const auto& pop = audit.pop();
  return min_ratio_measure(
      "dem_par_clf_ratio",
      conditional_stats(pop, welfare_event(audit), all_of(pop)));
}

RatioMeasure eq_opp_clf_ratio(const AuditData& audit) {
  return min_ratio_measure(
      "eq_opp_clf_ratio",
      conditional_stats(audit.pop(), welfare_event(audit), audit.gamma()));
}

RatioMeasure dem_par_welf_ratio(const AuditData& audit) {
  const auto& pop = audit.pop();
  return min_ratio_measure(
      "dem_par_welf_ratio",
      conditional_stats(pop, welfare_event(audit), all_of(pop)));
}

namespace {

struct KindName {
  MetricKind kind;
  std::string_view name;
};

constexpr std::array kKindNames{
    KindName{MetricKind::DemParWelf, "dem_par_welf"},
    KindName{MetricKind::EqOppCfUtil, "eq_opp_cf_util"},
    KindName{MetricKind::EqualizedOddsCfUtil, "equalized_odds_cf_util"},
    KindName{MetricKind::PredictiveParityCfUtil, "predictive_parity_cf_util"},
    KindName{MetricKind::ConditionalDemPar, "conditional_dem_par"},
    KindName{MetricKind::PredictiveEqualityCfUtil,
             "predictive_equality_cf_util"},
    KindName{MetricKind::ConditionalUseAccuracyCfUtil,
             "conditional_use_accuracy_cf_util"},
    KindName{MetricKind::OverallAccuracyCfUtil, "overall_accuracy_cf_util"},
    KindName{MetricKind::TreatmentEqualityCfUtil, "treatment_equality_cf_util"},
    KindName{MetricKind::TestFairnessCfUtil, "test_fairness_cf_util"},
    KindName{MetricKind::ExpectedWelfareParity, "expected_welfare_parity"},
    KindName{MetricKind::DistributionParity, "distribution_parity"},
    KindName{MetricKind::DemParClfRatio, "dem_par_clf_ratio"},
    KindName{MetricKind::EqOppClfRatio, "eq_opp_clf_ratio"},
    KindName{MetricKind::DemParWelfRatio, "dem_par_welf_ratio"},
    KindName{MetricKind::EqOppStatic, "eq_opp_static"},
};

FairnessVerdict with_ratio(FairnessVerdict base, const RatioMeasure& ratio) {
  base.metric = ratio.metric;
  base.min_ratio = ratio.ratio;
  base.diagnostics.insert(base.diagnostics.end(), ratio.diagnostics.begin(),
                          ratio.diagnostics.end());
  return base;
}

}  // namespace

std::string_view metric_name(MetricKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  return std::nullopt;
}

const std::vector<MetricKind>& all_metric_kinds() {
  static const std::vector<MetricKind> kinds = [] {
    std::vector<MetricKind> out;
    for (const auto& kn : kKindNames) out.push_back(kn.kind);
    return out;
  }();
  return kinds;
}

bool requires_qualification(MetricKind kind) {
  switch (kind) {
    case MetricKind::DemParWelf:
    case MetricKind::ConditionalDemPar:
    case MetricKind::ExpectedWelfareParity:
    case MetricKind::DistributionParity:
    case MetricKind::DemParClfRatio:
    case MetricKind::DemParWelfRatio:
    case MetricKind::EqOppStatic:
      return false;
    default:
      return true;
  }
}

MetricSpec MetricSpec::of(MetricKind kind) {
  MetricSpec spec;
  spec.kind = kind;
  return spec;
}

MetricSpec MetricSpec::conditional(LegitimateStratum legit) {
  MetricSpec spec;
  spec.kind = MetricKind::ConditionalDemPar;
  spec.legit = std::move(legit);
  return spec;
}

MetricSpec MetricSpec::eq_opp_static(StaticQualification q) {
  MetricSpec spec;
  spec.kind = MetricKind::EqOppStatic;
  spec.static_qualification = std::move(q);
  return spec;
}

void MetricSpec::validate() const {
  const bool wants_legit = kind == MetricKind::ConditionalDemPar;
  const bool wants_static = kind == MetricKind::EqOppStatic;
  if (wants_legit != (legit.has_value() && legit->predicate)) {
    throw InvalidArgument(
        fmt::format("{}: legitimate-attribute predicate {}", metric_name(kind),
                    wants_legit ? "is required" : "is not accepted"));
  }
  if (wants_static !=
      (static_qualification.has_value() && static_qualification->p0)) {
    throw InvalidArgument(fmt::format("{}: alpha and p0 {}", metric_name(kind),
                                      wants_static ? "are required"
                                                   : "are not accepted"));
  }
}

FairnessVerdict evaluate(const AuditData& audit, const MetricSpec& spec,
                         const MetricOptions& opts) {
  spec.validate();
  switch (spec.kind) {
    case MetricKind::DemParWelf:
      return dem_par_welf(audit, opts);
    case MetricKind::EqOppCfUtil:
      return eq_opp_cf_util(audit, opts);
    case MetricKind::EqualizedOddsCfUtil:
      return equalized_odds_cf_util(audit, opts);
    case MetricKind::PredictiveParityCfUtil:
      return predictive_parity_cf_util(audit, opts);
    case MetricKind::ConditionalDemPar:
      return conditional_dem_par(audit, spec.legit->predicate,
                                 spec.legit->label, opts);
    case MetricKind::PredictiveEqualityCfUtil:
      return predictive_equality_cf_util(audit, opts);
    case MetricKind::ConditionalUseAccuracyCfUtil:
      return conditional_use_accuracy_cf_util(audit, opts);
    case MetricKind::OverallAccuracyCfUtil:
      return overall_accuracy_cf_util(audit, opts);
    case MetricKind::TreatmentEqualityCfUtil:
      return treatment_equality_cf_util(audit, opts);
    case MetricKind::TestFairnessCfUtil:
      return test_fairness_cf_util(audit, opts);
    case MetricKind::ExpectedWelfareParity:
      return expected_welfare_parity(audit, opts);
    case MetricKind::DistributionParity:
      return distribution_parity(audit, opts);
    case MetricKind::DemParClfRatio:
      return with_ratio(dem_par_welf(audit, opts), dem_par_clf_ratio(audit));
    case MetricKind::EqOppClfRatio:
      return with_ratio(eq_opp_cf_util(audit, opts), eq_opp_clf_ratio(audit));
    case MetricKind::DemParWelfRatio:
      return with_ratio(dem_par_welf(audit, opts), dem_par_welf_ratio(audit));
    case MetricKind::EqOppStatic:
      return eq_opp_static(audit, spec.static_qualification->p0,
                           spec.static_qualification->alpha, opts);
  }
  throw InvalidArgument("unhandled metric kind");
}

}  // namespace cufair
