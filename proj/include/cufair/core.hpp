#pragma once

// Fairness decision-making problems over finite weighted populations.
//
// A problem binds a population of individuals to a space of decision
// algorithms, a welfare and a cost model, and two thresholds. Every
// probability is an exact weighted sum over the population support.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cufair/errors.hpp"

namespace cufair {

/// Protected group identifier. Group 0 is the reference group.
struct GroupId {
  std::uint32_t value = 0;

  constexpr GroupId() = default;
  constexpr explicit GroupId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(GroupId, GroupId) = default;
};

inline constexpr GroupId kReferenceGroup{0};

using AttributeValue = std::variant<double, std::string>;

/// Immutable named attribute record of an individual.
class Attributes {
 public:
  using Map = std::map<std::string, AttributeValue, std::less<>>;

  Attributes() = default;
  Attributes(std::initializer_list<Map::value_type> values) : values_(values) {}
  explicit Attributes(Map values) : values_(std::move(values)) {}

  const AttributeValue* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  /// Throws InvalidArgument when missing or not numeric.
  double number(std::string_view name) const;
  /// Throws InvalidArgument when missing or not text.
  const std::string& text(std::string_view name) const;
  const Map& items() const { return values_; }

  friend bool operator==(const Attributes&, const Attributes&) = default;

 private:
  Map values_;
};

/// An individual of a population: the role of (I, Z).
struct Individual {
  // Index into the owning environment's tables (example, entry, state, ...).
  std::size_t key = 0;
  GroupId group;
  Attributes attrs;
  std::string label;
};

/// Finite weighted support over individuals.
class Population {
 public:
  struct Entry {
    Individual individual;
    double weight = 1.0;
  };

  /// Throws InvalidModel unless weights are finite and non-negative, the
  /// total weight is positive, group_count >= 2 and every group id is below
  /// group_count.
  Population(std::vector<Entry> entries, std::size_t group_count);

  std::size_t size() const { return individuals_.size(); }
  std::size_t group_count() const { return group_count_; }
  const Individual& individual(std::size_t i) const { return individuals_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  GroupId group(std::size_t i) const { return individuals_[i].group; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<Individual>& individuals() const { return individuals_; }
  double total_weight() const { return total_; }

 private:
  std::vector<Individual> individuals_;
  std::vector<double> weights_;
  std::size_t group_count_;
  double total_;
};

/// Per-individual truth values of an event over a population.
using Mask = std::vector<std::uint8_t>;

/// Pure test over individuals, such as "W_m >= tau" or "Gamma = 1".
using EventPredicate = std::function<bool(const Individual&)>;

Mask evaluate_event(const Population& pop, const EventPredicate& event);
Mask group_mask(const Population& pop, GroupId group);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_not(const Mask& a);

/// Sum of weights where the mask holds, summed left to right.
double mass(const Population& pop, const Mask& mask);

/// P(event | cond) as an exact ratio of weighted sums.
/// Throws ZeroConditionMass when the conditioning set has zero weight.
double conditional_probability(const Population& pop, const Mask& event,
                               const Mask& cond);
double conditional_probability(const Population& pop,
                               const EventPredicate& event,
                               const EventPredicate& cond);

struct Thresholds {
  double tau = 0.0;  // minimum good welfare
  double rho = 0.0;  // maximum good cost
};

// Threshold comparisons absorb floating noise in expected utilities, such as
// 0.7 * 3 landing one ulp below 2.1.
inline constexpr double kThresholdSlack = 1e-12;

inline bool meets_welfare(double welfare, double tau) {
  return welfare >= tau - kThresholdSlack;
}
inline bool meets_cost(double cost, double rho) {
  return cost <= rho + kThresholdSlack;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;
inline constexpr std::uint64_t kUnboundedSize =
    std::numeric_limits<std::uint64_t>::max();

/// base^exponent, saturating at kUnboundedSize.
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exponent);

/// Finite, enumerable collection of decision algorithms (the role of M).
template <class Algorithm>
class DecisionSpace {
 public:
  // Return false from the visitor to stop the enumeration early.
  using Visitor = std::function<bool(const Algorithm&)>;
  using Enumerator = std::function<void(const Visitor&)>;
  using Membership = std::function<bool(const Algorithm&)>;

  DecisionSpace(std::uint64_t size, Enumerator enumerate, Membership contains,
                std::uint64_t enumeration_cap = kDefaultEnumerationCap)
      : size_(size),
        enumerate_(std::move(enumerate)),
        contains_(std::move(contains)),
        cap_(enumeration_cap) {
    if (size_ == 0) throw InvalidModel("decision space is empty");
  }

  /// Space holding exactly the listed algorithms.
  static DecisionSpace from_list(
      std::vector<Algorithm> algorithms,
      std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
    auto shared =
        std::make_shared<const std::vector<Algorithm>>(std::move(algorithms));
    return DecisionSpace(
        shared->size(),
        [shared](const Visitor& visit) {
          for (const auto& m : *shared) {
            if (!visit(m)) return;
          }
        },
        [shared](const Algorithm& m) {
          for (const auto& candidate : *shared) {
            if (candidate == m) return true;
          }
          return false;
        },
        enumeration_cap);
  }

  std::uint64_t size() const { return size_; }
  std::uint64_t enumeration_cap() const { return cap_; }
  bool enumerable() const { return size_ <= cap_; }
  bool contains(const Algorithm& m) const { return contains_(m); }

  /// Visits every algorithm. Throws EnumerationCapExceeded when the space is
  /// larger than the cap, or when the enumerator yields more than the cap.
  void for_each(const Visitor& visit) const {
    if (!enumerable()) {
      throw EnumerationCapExceeded(
          "decision space of size " +
          (size_ == kUnboundedSize ? std::string(">= 2^64")
                                   : std::to_string(size_)) +
          " exceeds enumeration cap " + std::to_string(cap_));
    }
    std::uint64_t yielded = 0;
    enumerate_([&](const Algorithm& m) {
      if (++yielded > cap_) {
        throw EnumerationCapExceeded("enumerator yielded more than " +
                                     std::to_string(cap_) + " algorithms");
      }
      return visit(m);
    });
  }

 private:
  std::uint64_t size_;
  Enumerator enumerate_;
  Membership contains_;
  std::uint64_t cap_;
};

/// Expected welfare W_m and expected cost C_m of an individual.
template <class Algorithm>
struct UtilityModel {
  std::function<double(const Individual&, const Algorithm&)> welfare;
  std::function<double(const Individual&, const Algorithm&)> cost;
};

/// Utilities of environments where an individual's outcome depends only on
/// the decision made for that individual (classification, detention). Over
/// such spaces qualification reduces exactly to a scan of the local
/// decisions, which stays available when the full space is too large to
/// enumerate.
struct LocalDecisions {
  std::size_t count = 0;
  std::function<double(const Individual&, std::size_t)> welfare;
  std::function<double(const Individual&, std::size_t)> cost;
};

/// Fairness decision-making problem (I, Z, M, W, C, tau, rho).
template <class Algorithm>
struct Fdmp {
  Population population;
  DecisionSpace<Algorithm> decisions;
  UtilityModel<Algorithm> utilities;
  Thresholds thresholds;
  std::optional<LocalDecisions> local;
};

namespace detail {
double checked_utility(double value, const char* what);
}  // namespace detail

template <class Algorithm>
double welfare_of(const Fdmp<Algorithm>& fdmp, const Algorithm& m,
                  const Individual& individual) {
  if (!fdmp.decisions.contains(m)) {
    throw UnknownAlgorithm("algorithm is not a member of the decision space");
  }
  return detail::checked_utility(fdmp.utilities.welfare(individual, m),
                                 "welfare");
}

template <class Algorithm>
double cost_of(const Fdmp<Algorithm>& fdmp, const Algorithm& m,
               const Individual& individual) {
  if (!fdmp.decisions.contains(m)) {
    throw UnknownAlgorithm("algorithm is not a member of the decision space");
  }
  return detail::checked_utility(fdmp.utilities.cost(individual, m), "cost");
}

/// Counterfactual qualification for every individual of the population:
/// Gamma = 1 iff some algorithm reaches welfare >= tau with cost <= rho.
///
/// Enumerates the decision space exhaustively. When the space exceeds its
/// cap and the problem declares local decisions, scans those instead;
/// otherwise throws EnumerationCapExceeded.
template <class Algorithm>
Mask qualification_mask(const Fdmp<Algorithm>& fdmp) {
  const auto& pop = fdmp.population;
  const auto [tau, rho] = fdmp.thresholds;
  Mask qualified(pop.size(), 0);

  if (!fdmp.decisions.enumerable() && fdmp.local) {
    const auto& local = *fdmp.local;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto& ind = pop.individual(i);
      for (std::size_t d = 0; d < local.count && !qualified[i]; ++d) {
        qualified[i] = meets_welfare(local.welfare(ind, d), tau) &&
                       meets_cost(local.cost(ind, d), rho);
      }
    }
    return qualified;
  }

  std::size_t remaining = pop.size();
  fdmp.decisions.for_each([&](const Algorithm& m) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (qualified[i]) continue;
      const auto& ind = pop.individual(i);
      const double w =
          detail::checked_utility(fdmp.utilities.welfare(ind, m), "welfare");
      if (!meets_welfare(w, tau)) continue;
      const double c =
          detail::checked_utility(fdmp.utilities.cost(ind, m), "cost");
      if (meets_cost(c, rho)) {
        qualified[i] = 1;
        --remaining;
      }
    }
    return remaining > 0;
  });
  return qualified;
}

/// Gamma for a single individual.
template <class Algorithm>
bool qualification(const Fdmp<Algorithm>& fdmp, const Individual& individual) {
  const auto [tau, rho] = fdmp.thresholds;
  if (!fdmp.decisions.enumerable() && fdmp.local) {
    for (std::size_t d = 0; d < fdmp.local->count; ++d) {
      if (meets_welfare(fdmp.local->welfare(individual, d), tau) &&
          meets_cost(fdmp.local->cost(individual, d), rho)) {
        return true;
      }
    }
    return false;
  }
  bool found = false;
  fdmp.decisions.for_each([&](const Algorithm& m) {
    const double w = detail::checked_utility(
        fdmp.utilities.welfare(individual, m), "welfare");
    const double c =
        detail::checked_utility(fdmp.utilities.cost(individual, m), "cost");
    found = meets_welfare(w, tau) && meets_cost(c, rho);
    return !found;
  });
  return found;
}

}  // namespace cufair
