#pragma once

// Group-fairness definitions evaluated as verdicts over a fairness
// decision-making problem and one audited algorithm.
//
// Every metric compares a per-group statistic of group z against the
// reference group 0, for every z >= 1. A comparison whose conditioning set
// is empty in either group is skipped with a diagnostic; a clause with no
// comparison left is vacuous and counts as satisfied.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cufair/core.hpp"

namespace cufair {

inline constexpr double kDefaultEpsilon = 1e-9;

struct MetricOptions {
  double epsilon = kDefaultEpsilon;
};

/// One side of a comparison: the statistic of a group, absent when the
/// group's conditioning set has no mass.
struct GroupStats {
  GroupId group;
  std::optional<double> value;
  double support_mass = 0.0;

  friend bool operator==(const GroupStats&, const GroupStats&) = default;
};

/// One equality constraint across groups, e.g. the Gamma=1 half of
/// equalized odds.
struct Clause {
  std::string label;
  std::vector<GroupStats> per_group;
  double max_abs_difference = 0.0;
  std::optional<double> min_ratio;
  bool satisfied = true;
  bool vacuous = true;
  std::vector<GroupId> offending_groups;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct FairnessVerdict {
  std::string metric;
  std::vector<Clause> clauses;
  double max_abs_difference = 0.0;
  std::optional<double> min_ratio;
  bool satisfied = true;
  bool vacuous = true;
  std::vector<GroupId> offending_groups;
  std::vector<std::string> diagnostics;
  double epsilon = kDefaultEpsilon;

  /// Group statistics of the first clause.
  const std::vector<GroupStats>& per_group() const;

  friend bool operator==(const FairnessVerdict&,
                         const FairnessVerdict&) = default;
};

/// Compares every group's statistic against group 0 at tolerance epsilon.
/// Infinite values compare equal to each other and unequal to anything
/// finite. Vacuous groups are skipped and reported in `diagnostics`.
Clause compare_groups(std::string label, std::vector<GroupStats> stats,
                      double epsilon, std::vector<std::string>& diagnostics);

/// Folds clauses into a verdict: satisfied iff every clause is.
FairnessVerdict make_verdict(std::string metric, std::vector<Clause> clauses,
                             std::vector<std::string> diagnostics,
                             double epsilon);

/// P(event | cond, Z=z) for every group z; absent where cond has no mass
/// in the group.
std::vector<GroupStats> conditional_stats(const Population& pop,
                                          const Mask& event, const Mask& cond);

/// min(a/b, b/a), 1 when both are zero, 0 when exactly one is. Empty for
/// negative or non-finite inputs.
std::optional<double> symmetric_ratio(double a, double b);

/// Everything the metrics need from an audit: the welfare of the audited
/// algorithm for every individual, and Gamma when a metric conditions on it.
struct AuditData {
  const Population* population = nullptr;
  std::vector<double> welfare;
  std::optional<Mask> qualified;
  double tau = 0.0;

  const Population& pop() const { return *population; }
  /// Throws InvalidArgument when Gamma was not computed.
  const Mask& gamma() const;
};

/// Evaluates W_m for every individual, and Gamma when requested.
/// Throws UnknownAlgorithm when m is outside the decision space.
template <class Algorithm>
AuditData make_audit(const Fdmp<Algorithm>& fdmp, const Algorithm& m,
                     bool with_qualification) {
  if (!fdmp.decisions.contains(m)) {
    throw UnknownAlgorithm("audited algorithm is not in the decision space");
  }
  AuditData audit;
  audit.population = &fdmp.population;
  audit.tau = fdmp.thresholds.tau;
  audit.welfare.reserve(fdmp.population.size());
  for (const auto& ind : fdmp.population.individuals()) {
    audit.welfare.push_back(
        detail::checked_utility(fdmp.utilities.welfare(ind, m), "welfare"));
  }
  if (with_qualification) audit.qualified = qualification_mask(fdmp);
  return audit;
}

/// Mask of W_m >= tau.
Mask welfare_event(const AuditData& audit);

// Audit-level metrics.

FairnessVerdict dem_par_welf(const AuditData& audit,
                             const MetricOptions& opts = {});
FairnessVerdict eq_opp_cf_util(const AuditData& audit,
                               const MetricOptions& opts = {});
FairnessVerdict equalized_odds_cf_util(const AuditData& audit,
                                       const MetricOptions& opts = {});
FairnessVerdict predictive_parity_cf_util(const AuditData& audit,
                                          const MetricOptions& opts = {});
/// Demographic parity among individuals for which `legit` holds.
FairnessVerdict conditional_dem_par(const AuditData& audit,
                                    const EventPredicate& legit,
                                    std::string_view legit_label,
                                    const MetricOptions& opts = {});
FairnessVerdict predictive_equality_cf_util(const AuditData& audit,
                                            const MetricOptions& opts = {});
FairnessVerdict conditional_use_accuracy_cf_util(
    const AuditData& audit, const MetricOptions& opts = {});
/// Joint probabilities P(W>=tau, Gamma=1) and P(W<tau, Gamma=0), each
/// normalized within the group.
FairnessVerdict overall_accuracy_cf_util(const AuditData& audit,
                                         const MetricOptions& opts = {});
/// Ratio P(W<tau | Gamma=1) / P(W>=tau | Gamma=0). A zero denominator with a
/// positive numerator yields an infinite ratio (DivergentRatio diagnostic);
/// 0/0 makes the group vacuous.
FairnessVerdict treatment_equality_cf_util(const AuditData& audit,
                                           const MetricOptions& opts = {});
/// P(Gamma=1 | W=w) for every distinct welfare value w. Values closer than
/// epsilon are one support point.
FairnessVerdict test_fairness_cf_util(const AuditData& audit,
                                      const MetricOptions& opts = {});
FairnessVerdict expected_welfare_parity(const AuditData& audit,
                                        const MetricOptions& opts = {});
/// Equality of the whole welfare PMF, one clause per support point.
FairnessVerdict distribution_parity(const AuditData& audit,
                                    const MetricOptions& opts = {});
/// Expected welfare among individuals whose static score p0 clears alpha.
FairnessVerdict eq_opp_static(const AuditData& audit,
                              const std::function<double(const Individual&)>& p0,
                              double alpha, const MetricOptions& opts = {});

/// Disparate-impact style quantification of a parity metric.
struct RatioMeasure {
  std::string metric;
  double ratio = 0.0;
  std::vector<GroupStats> rates;
  std::vector<std::string> diagnostics;
};

/// min over z of min(r0/rz, rz/r0); 0 with a diagnostic when a compared rate
/// is zero or undefined.
RatioMeasure min_ratio_measure(std::string metric,
                               std::vector<GroupStats> rates);

/// Positive-outcome rates P(W>=tau | Z) of a classification instantiation.
RatioMeasure dem_par_clf_ratio(const AuditData& audit);
/// True-positive rates P(W>=tau | Gamma=1, Z).
RatioMeasure eq_opp_clf_ratio(const AuditData& audit);
RatioMeasure dem_par_welf_ratio(const AuditData& audit);

enum class MetricKind {
  DemParWelf,
  EqOppCfUtil,
  EqualizedOddsCfUtil,
  PredictiveParityCfUtil,
  ConditionalDemPar,
  PredictiveEqualityCfUtil,
  ConditionalUseAccuracyCfUtil,
  OverallAccuracyCfUtil,
  TreatmentEqualityCfUtil,
  TestFairnessCfUtil,
  ExpectedWelfareParity,
  DistributionParity,
  DemParClfRatio,
  EqOppClfRatio,
  DemParWelfRatio,
  EqOppStatic,
};

std::string_view metric_name(MetricKind kind);
std::optional<MetricKind> parse_metric_kind(std::string_view name);
const std::vector<MetricKind>& all_metric_kinds();
bool requires_qualification(MetricKind kind);

struct LegitimateStratum {
  EventPredicate predicate;
  std::string label;
};

struct StaticQualification {
  double alpha = 0.0;
  std::function<double(const Individual&)> p0;
};

/// A metric and its parameters. Parameters are present exactly when the
/// kind needs them.
struct MetricSpec {
  MetricKind kind = MetricKind::DemParWelf;
  std::optional<LegitimateStratum> legit;
  std::optional<StaticQualification> static_qualification;

  static MetricSpec of(MetricKind kind);
  static MetricSpec conditional(LegitimateStratum legit);
  static MetricSpec eq_opp_static(StaticQualification q);

  /// Throws InvalidArgument on a parameter mismatch.
  void validate() const;
};

/// Runs one metric against group 0 for every other group. Ratio kinds
/// report the underlying parity verdict with min_ratio set to the measure.
FairnessVerdict evaluate(const AuditData& audit, const MetricSpec& spec,
                         const MetricOptions& opts = {});

// Problem-level entry points.

template <class Algorithm>
FairnessVerdict evaluate_multi_group(const Fdmp<Algorithm>& fdmp,
                                     const Algorithm& m, const MetricSpec& spec,
                                     const MetricOptions& opts = {}) {
  spec.validate();
  return evaluate(make_audit(fdmp, m, requires_qualification(spec.kind)), spec,
                  opts);
}

template <class Algorithm>
FairnessVerdict dem_par_welf(const Fdmp<Algorithm>& fdmp, const Algorithm& m,
                             const MetricOptions& opts = {}) {
  return dem_par_welf(make_audit(fdmp, m, false), opts);
}

template <class Algorithm>
FairnessVerdict eq_opp_cf_util(const Fdmp<Algorithm>& fdmp, const Algorithm& m,
                               const MetricOptions& opts = {}) {
  return eq_opp_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict equalized_odds_cf_util(const Fdmp<Algorithm>& fdmp,
                                       const Algorithm& m,
                                       const MetricOptions& opts = {}) {
  return equalized_odds_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict predictive_parity_cf_util(const Fdmp<Algorithm>& fdmp,
                                          const Algorithm& m,
                                          const MetricOptions& opts = {}) {
  return predictive_parity_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict conditional_dem_par(const Fdmp<Algorithm>& fdmp,
                                    const Algorithm& m,
                                    const EventPredicate& legit,
                                    std::string_view legit_label = "legit",
                                    const MetricOptions& opts = {}) {
  return conditional_dem_par(make_audit(fdmp, m, false), legit, legit_label,
                             opts);
}

template <class Algorithm>
FairnessVerdict predictive_equality_cf_util(const Fdmp<Algorithm>& fdmp,
                                            const Algorithm& m,
                                            const MetricOptions& opts = {}) {
  return predictive_equality_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict conditional_use_accuracy_cf_util(
    const Fdmp<Algorithm>& fdmp, const Algorithm& m,
    const MetricOptions& opts = {}) {
  return conditional_use_accuracy_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict overall_accuracy_cf_util(const Fdmp<Algorithm>& fdmp,
                                         const Algorithm& m,
                                         const MetricOptions& opts = {}) {
  return overall_accuracy_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict treatment_equality_cf_util(const Fdmp<Algorithm>& fdmp,
                                           const Algorithm& m,
                                           const MetricOptions& opts = {}) {
  return treatment_equality_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict test_fairness_cf_util(const Fdmp<Algorithm>& fdmp,
                                      const Algorithm& m,
                                      const MetricOptions& opts = {}) {
  return test_fairness_cf_util(make_audit(fdmp, m, true), opts);
}

template <class Algorithm>
FairnessVerdict expected_welfare_parity(const Fdmp<Algorithm>& fdmp,
                                        const Algorithm& m,
                                        const MetricOptions& opts = {}) {
  return expected_welfare_parity(make_audit(fdmp, m, false), opts);
}

template <class Algorithm>
FairnessVerdict distribution_parity(const Fdmp<Algorithm>& fdmp,
                                    const Algorithm& m,
                                    const MetricOptions& opts = {}) {
  return distribution_parity(make_audit(fdmp, m, false), opts);
}

template <class Algorithm>
RatioMeasure dem_par_clf_ratio(const Fdmp<Algorithm>& fdmp,
                               const Algorithm& m) {
  return dem_par_clf_ratio(make_audit(fdmp, m, false));
}

template <class Algorithm>
RatioMeasure eq_opp_clf_ratio(const Fdmp<Algorithm>& fdmp, const Algorithm& m) {
  return eq_opp_clf_ratio(make_audit(fdmp, m, true));
}

template <class Algorithm>
RatioMeasure dem_par_welf_ratio(const Fdmp<Algorithm>& fdmp,
                                const Algorithm& m) {
  return dem_par_welf_ratio(make_audit(fdmp, m, false));
}

}  // namespace cufair
