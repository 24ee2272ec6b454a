#pragma once

// Supervised classification problems as fairness decision-making problems,
// prediction-influenced outcomes through principal strata, and the
// classic classification parity baselines.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cufair/core.hpp"
#include "cufair/metrics.hpp"

namespace cufair {

/// Loss of predicting yhat when the target is y; y, yhat in {0, 1}.
using OutcomeFn = std::function<double(int y, int yhat)>;

double zero_one_loss(int y, int yhat);

/// Credit payoff: 0 when correct, 1 for rejecting a good risk (y=1, yhat=0),
/// 5 for granting a bad risk (y=0, yhat=1).
double german_credit_cost(int y, int yhat);

struct LabeledExample {
  std::vector<double> features;
  int y = 0;
  GroupId group;
  double weight = 1.0;
};

/// Supervised learning classification problem (X, Z, Y, L). Examples with
/// equal features and group share one classifier input.
class Slcp {
 public:
  Slcp(std::vector<LabeledExample> examples, std::size_t group_count,
       OutcomeFn loss = zero_one_loss);

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::size_t group_count() const { return group_count_; }
  double loss(int y, int yhat) const { return loss_(y, yhat); }
  const OutcomeFn& loss_fn() const { return loss_; }

  /// Number of distinct (features, group) inputs.
  std::size_t input_count() const { return inputs_.size(); }
  /// Input index of example i.
  std::size_t input_of(std::size_t i) const { return input_of_[i]; }
  /// Example index of the first occurrence of input k.
  std::size_t input_representative(std::size_t k) const { return inputs_[k]; }

 private:
  std::vector<LabeledExample> examples_;
  std::size_t group_count_;
  OutcomeFn loss_;
  std::vector<std::size_t> inputs_;
  std::vector<std::size_t> input_of_;
};

/// A classifier yhat(x, z).
using Classifier = std::function<int(std::span<const double>, GroupId)>;

/// A classifier written out as one decision per distinct input; the
/// algorithm type of classification problems.
using ClassifierTable = std::vector<std::uint8_t>;

ClassifierTable tabulate(const Slcp& slcp, const Classifier& clf);

struct ClassificationOptions {
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  // Throw SupportTooLarge instead of falling back to per-individual
  // qualification when 2^inputs exceeds the cap.
  bool strict_enumeration = false;
};

/// Classification problem with welfare and cost given per (y, yhat).
/// The decision space is every classifier over the distinct inputs.
Fdmp<ClassifierTable> classification_fdmp(
    const Slcp& slcp, OutcomeFn welfare, OutcomeFn cost, Thresholds thresholds,
    const ClassificationOptions& opts = {});

/// Standard instantiation: W = yhat, C = the problem's loss, tau = 1,
/// rho = 0. With zero-one loss, Gamma = 1 iff y = 1.
Fdmp<ClassifierTable> slcp_to_fdmp(const Slcp& slcp,
                                   const ClassificationOptions& opts = {});

/// Credit instantiation: C = german_credit_cost, W = -C. With tau = -1,
/// W >= tau means the applicant did not default.
Fdmp<ClassifierTable> german_credit_fdmp(const Slcp& slcp, double tau = -1.0,
                                         double rho = 0.0,
                                         const ClassificationOptions& opts = {});

/// P(yhat=1 | Z) evaluated directly on the labeled examples.
FairnessVerdict classic_dem_par(const Slcp& slcp, const Classifier& clf,
                                const MetricOptions& opts = {});
/// P(yhat=1 | Y=1, Z) evaluated directly on the labeled examples.
FairnessVerdict classic_eq_opp(const Slcp& slcp, const Classifier& clf,
                               const MetricOptions& opts = {});

// ---------------------------------------------------------------------------
// Principal strata of a binary decision that influences the outcome.

enum class Stratum : std::uint8_t { Dangerous, Backlash, Preventable, Safe };

enum class Detention : std::uint8_t { Detain = 0, Release = 1 };

inline constexpr std::array<Stratum, 4> kAllStrata{
    Stratum::Dangerous, Stratum::Backlash, Stratum::Preventable, Stratum::Safe};

struct PrincipalStratum {
  Stratum label;
  bool recidivate_if_detained;
  bool recidivate_if_released;
};

const PrincipalStratum& principal_stratum(Stratum s);
/// The unique stratum with the given potential outcomes.
Stratum stratum_of(bool recidivate_if_detained, bool recidivate_if_released);

std::string_view to_string(Stratum s);
std::string_view to_string(Detention d);
/// Throws InvalidArgument on an unknown name (case-insensitive).
Stratum parse_stratum(std::string_view name);
Detention parse_detention(std::string_view name);

struct StrataOutcome {
  int observed_y;  // 1 iff the individual does not recidivate
  double welfare;  // 1 iff released
  double cost;     // 1 iff the individual recidivates
};

StrataOutcome strata_outcome(Stratum stratum, Detention decision);

struct StrataCell {
  Stratum stratum;
  GroupId group;
  Detention decision;

  friend auto operator<=>(const StrataCell&, const StrataCell&) = default;
};

/// Counts per (stratum, group, decision).
class StrataPopulation {
 public:
  /// Throws InvalidModel on negative counts or a zero total. Group count
  /// defaults to max(2, largest group id + 1).
  explicit StrataPopulation(std::map<StrataCell, double> counts,
                            std::size_t group_count = 0);

  const std::map<StrataCell, double>& counts() const { return counts_; }
  double count(const StrataCell& cell) const;
  std::size_t group_count() const { return group_count_; }
  double total() const;

 private:
  std::map<StrataCell, double> counts_;
  std::size_t group_count_;
};

/// Released-or-detained counts of 1,000 inmates from the self-fulfilling
/// prophecy illustration.
StrataPopulation recidivism_example();

/// Decision per population entry; the algorithm type of strata problems.
using DecisionTable = std::vector<Detention>;

struct StrataFdmp {
  Fdmp<DecisionTable> fdmp;
  // The decisions recorded in the counts, one per population entry.
  DecisionTable recorded;
};

/// One population entry per non-empty cell, attributes "stratum" and
/// "recorded". W = 1 iff released, C = 1 iff the stratum recidivates
/// under the decision.
StrataFdmp strata_to_fdmp(const StrataPopulation& pop,
                          Thresholds thresholds = {1.0, 0.0},
                          std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// The counts as a classification problem with observed outcomes: features
/// are (stratum index, recorded decision), and the classifier returns the
/// recorded decision.
struct StrataSlcp {
  Slcp slcp;
  Classifier recorded;
};

StrataSlcp strata_to_slcp(const StrataPopulation& pop);

/// One demographic-parity clause per principal stratum.
FairnessVerdict principal_fairness(const StrataFdmp& strata,
                                   const DecisionTable& decisions,
                                   const MetricOptions& opts = {});
FairnessVerdict principal_fairness(const StrataPopulation& pop,
                                   const MetricOptions& opts = {});

}  // namespace cufair
