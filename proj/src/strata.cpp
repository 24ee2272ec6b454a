#include <algorithm>
#include <cctype>
#include <memory>

#include <fmt/format.h>

#include "cufair/classification.hpp"

namespace cufair {

namespace {

constexpr std::array<PrincipalStratum, 4> kStrata{{
    {Stratum::Dangerous, true, true},
    {Stratum::Backlash, true, false},
    {Stratum::Preventable, false, true},
    {Stratum::Safe, false, false},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

const PrincipalStratum& principal_stratum(Stratum s) {
  return kStrata[static_cast<std::size_t>(s)];
}

Stratum stratum_of(bool recidivate_if_detained, bool recidivate_if_released) {
  for (const auto& p : kStrata) {
    if (p.recidivate_if_detained == recidivate_if_detained &&
        p.recidivate_if_released == recidivate_if_released) {
      return p.label;
    }
  }
  throw InvalidArgument("no stratum matches");  // unreachable
}

std::string_view to_string(Stratum s) {
  switch (s) {
    case Stratum::Dangerous:
      return "Dangerous";
    case Stratum::Backlash:
      return "Backlash";
    case Stratum::Preventable:
      return "Preventable";
    case Stratum::Safe:
      return "Safe";
  }
  return "?";
}

std::string_view to_string(Detention d) {
  return d == Detention::Release ? "release" : "detain";
}

Stratum parse_stratum(std::string_view name) {
  const std::string n = lower(name);
  for (Stratum s : kAllStrata) {
    if (lower(to_string(s)) == n) return s;
  }
  throw InvalidArgument(fmt::format("unknown stratum '{}'", name));
}

Detention parse_detention(std::string_view name) {
  const std::string n = lower(name);
  if (n == "detain" || n == "detained" || n == "0") return Detention::Detain;
  if (n == "release" || n == "released" || n == "1") return Detention::Release;
  throw InvalidArgument(fmt::format("unknown decision '{}'", name));
}

StrataOutcome strata_outcome(Stratum stratum, Detention decision) {
  const auto& p = principal_stratum(stratum);
  const bool released = decision == Detention::Release;
  const bool recidivates =
      released ? p.recidivate_if_released : p.recidivate_if_detained;
  return StrataOutcome{recidivates ? 0 : 1, released ? 1.0 : 0.0,
                       recidivates ? 1.0 : 0.0};
}

StrataPopulation::StrataPopulation(std::map<StrataCell, double> counts,
                                   std::size_t group_count)
    : counts_(std::move(counts)), group_count_(group_count) {
  std::size_t needed = 2;
  double total = 0.0;
  for (const auto& [cell, n] : counts_) {
    if (!(n >= 0.0)) throw InvalidModel("strata counts must be non-negative");
    needed = std::max<std::size_t>(needed, cell.group.value + 1);
    total += n;
  }
  if (!(total > 0.0)) throw InvalidModel("strata population is empty");
  if (group_count_ == 0) group_count_ = needed;
  if (group_count_ < needed) {
    throw InvalidModel("strata group id exceeds the declared group count");
  }
}

double StrataPopulation::count(const StrataCell& cell) const {
  auto it = counts_.find(cell);
  return it == counts_.end() ? 0.0 : it->second;
}

double StrataPopulation::total() const {
  double total = 0.0;
  for (const auto& [cell, n] : counts_) total += n;
  return total;
}

StrataPopulation recidivism_example() {
  using S = Stratum;
  using D = Detention;
  const GroupId minority{0};
  const GroupId majority{1};
  std::map<StrataCell, double> counts{
      {{S::Dangerous, minority, D::Detain}, 120},
      {{S::Dangerous, minority, D::Release}, 30},
      {{S::Backlash, minority, D::Detain}, 40},
      {{S::Backlash, minority, D::Release}, 20},
      {{S::Preventable, minority, D::Detain}, 80},
      {{S::Preventable, minority, D::Release}, 10},
      {{S::Safe, minority, D::Detain}, 40},
      {{S::Safe, minority, D::Release}, 160},
      {{S::Dangerous, majority, D::Detain}, 80},
      {{S::Dangerous, majority, D::Release}, 20},
      {{S::Backlash, majority, D::Detain}, 20},
      {{S::Backlash, majority, D::Release}, 20},
      {{S::Preventable, majority, D::Detain}, 80},
      {{S::Preventable, majority, D::Release}, 80},
      {{S::Safe, majority, D::Detain}, 40},
      {{S::Safe, majority, D::Release}, 160},
  };
  return StrataPopulation(std::move(counts), 2);
}

StrataFdmp strata_to_fdmp(const StrataPopulation& pop, Thresholds thresholds,
                          std::uint64_t enumeration_cap) {
  auto strata = std::make_shared<std::vector<Stratum>>();
  std::vector<Population::Entry> entries;
  DecisionTable recorded;
  for (const auto& [cell, n] : pop.counts()) {
    if (n <= 0.0) continue;
    const std::size_t key = entries.size();
    strata->push_back(cell.stratum);
    recorded.push_back(cell.decision);
    Attributes attrs{{"stratum", std::string(to_string(cell.stratum))},
                     {"recorded", std::string(to_string(cell.decision))}};
    entries.push_back(
        {Individual{key, cell.group, std::move(attrs),
                    fmt::format("{}/Z={}/{}", to_string(cell.stratum),
                                cell.group.value, to_string(cell.decision))},
         n});
  }
  const std::size_t n = entries.size();

  DecisionSpace<DecisionTable> space(
      saturating_pow(2, n),
      [n](const DecisionSpace<DecisionTable>::Visitor& visit) {
        DecisionTable table(n, Detention::Detain);
        const std::uint64_t count = std::uint64_t{1} << n;
        for (std::uint64_t bits = 0; bits < count; ++bits) {
          for (std::size_t k = 0; k < n; ++k) {
            table[k] = ((bits >> k) & 1U) ? Detention::Release
                                          : Detention::Detain;
          }
          if (!visit(table)) return;
        }
      },
      [n](const DecisionTable& table) { return table.size() == n; },
      enumeration_cap);

  UtilityModel<DecisionTable> utilities{
      [strata](const Individual& ind, const DecisionTable& m) {
        return strata_outcome((*strata)[ind.key], m[ind.key]).welfare;
      },
      [strata](const Individual& ind, const DecisionTable& m) {
        return strata_outcome((*strata)[ind.key], m[ind.key]).cost;
      }};

  LocalDecisions local{
      2,
      [strata](const Individual& ind, std::size_t d) {
        return strata_outcome((*strata)[ind.key], static_cast<Detention>(d))
            .welfare;
      },
      [strata](const Individual& ind, std::size_t d) {
        return strata_outcome((*strata)[ind.key], static_cast<Detention>(d))
            .cost;
      }};

  return StrataFdmp{
      Fdmp<DecisionTable>{Population(std::move(entries), pop.group_count()),
                          std::move(space), std::move(utilities), thresholds,
                          std::move(local)},
      std::move(recorded)};
}

StrataSlcp strata_to_slcp(const StrataPopulation& pop) {
  std::vector<LabeledExample> examples;
  for (const auto& [cell, n] : pop.counts()) {
    if (n <= 0.0) continue;
    const auto outcome = strata_outcome(cell.stratum, cell.decision);
    examples.push_back(LabeledExample{
        {static_cast<double>(cell.stratum), static_cast<double>(cell.decision)},
        outcome.observed_y,
        cell.group,
        n});
  }
  Classifier recorded = [](std::span<const double> x, GroupId) {
    return static_cast<int>(x[1]);
  };
  return StrataSlcp{Slcp(std::move(examples), pop.group_count()),
                    std::move(recorded)};
}

FairnessVerdict principal_fairness(const StrataFdmp& strata,
                                   const DecisionTable& decisions,
                                   const MetricOptions& opts) {
  const AuditData audit = make_audit(strata.fdmp, decisions, false);
  const auto& pop = audit.pop();
  const Mask released = welfare_event(audit);
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  for (Stratum s : kAllStrata) {
    const std::string name(to_string(s));
    const Mask in_stratum = evaluate_event(pop, [&](const Individual& ind) {
      return ind.attrs.text("stratum") == name;
    });
    clauses.push_back(compare_groups(fmt::format("P(W>=tau | {}, Z)", name),
                                     conditional_stats(pop, released, in_stratum),
                                     opts.epsilon, diagnostics));
  }
  return make_verdict("principal_fairness", std::move(clauses),
                      std::move(diagnostics), opts.epsilon);
}

FairnessVerdict principal_fairness(const StrataPopulation& pop,
                                   const MetricOptions& opts) {
  const StrataFdmp strata = strata_to_fdmp(pop);
  return principal_fairness(strata, strata.recorded, opts);
}

}  // namespace cufair
