#include "cufair/classification.hpp"

#include <map>
#include <memory>
#include <utility>

#include <fmt/format.h>

namespace cufair {

double zero_one_loss(int y, int yhat) { return y == yhat ? 0.0 : 1.0; }

double german_credit_cost(int y, int yhat) {
  if (yhat == y) return 0.0;
  return yhat == 0 ? 1.0 : 5.0;
}

Slcp::Slcp(std::vector<LabeledExample> examples, std::size_t group_count,
           OutcomeFn loss)
    : examples_(std::move(examples)),
      group_count_(group_count),
      loss_(std::move(loss)) {
  if (examples_.empty()) throw InvalidModel("classification problem is empty");
  if (!loss_) throw InvalidModel("classification problem needs a loss");
  std::map<std::pair<std::vector<double>, std::uint32_t>, std::size_t> seen;
  input_of_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& e = examples_[i];
    if (e.y != 0 && e.y != 1) {
      throw InvalidModel(fmt::format("example {}: target must be 0 or 1", i));
    }
    auto [it, inserted] =
        seen.try_emplace({e.features, e.group.value}, inputs_.size());
    if (inserted) inputs_.push_back(i);
    input_of_.push_back(it->second);
  }
}

ClassifierTable tabulate(const Slcp& slcp, const Classifier& clf) {
  ClassifierTable table(slcp.input_count());
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& e = slcp.examples()[slcp.input_representative(k)];
    const int yhat = clf(e.features, e.group);
    if (yhat != 0 && yhat != 1) {
      throw InvalidArgument("classifier output must be 0 or 1");
    }
    table[k] = static_cast<std::uint8_t>(yhat);
  }
  return table;
}

namespace {

Population example_population(const Slcp& slcp) {
  std::vector<Population::Entry> entries;
  entries.reserve(slcp.examples().size());
  for (std::size_t i = 0; i < slcp.examples().size(); ++i) {
    const auto& e = slcp.examples()[i];
    Attributes::Map attrs{{"y", static_cast<double>(e.y)}};
    for (std::size_t f = 0; f < e.features.size(); ++f) {
      attrs.emplace(fmt::format("x{}", f), e.features[f]);
    }
    entries.push_back({Individual{i, e.group, Attributes(std::move(attrs)),
                                  fmt::format("example {}", i)},
                       e.weight});
  }
  return Population(std::move(entries), slcp.group_count());
}

}  // namespace

Fdmp<ClassifierTable> classification_fdmp(const Slcp& slcp, OutcomeFn welfare,
                                          OutcomeFn cost, Thresholds thresholds,
                                          const ClassificationOptions& opts) {
  auto problem = std::make_shared<const Slcp>(slcp);
  const std::size_t inputs = problem->input_count();
  const std::uint64_t size = saturating_pow(2, inputs);
  if (opts.strict_enumeration && size > opts.enumeration_cap) {
    throw SupportTooLarge(fmt::format(
        "2^{} classifiers exceed the enumeration cap {}", inputs,
        opts.enumeration_cap));
  }

  DecisionSpace<ClassifierTable> space(
      size,
      [inputs](const DecisionSpace<ClassifierTable>::Visitor& visit) {
        // Only reached when 2^inputs fits under the cap.
        ClassifierTable table(inputs, 0);
        const std::uint64_t count = std::uint64_t{1} << inputs;
        for (std::uint64_t bits = 0; bits < count; ++bits) {
          for (std::size_t k = 0; k < inputs; ++k) {
            table[k] = static_cast<std::uint8_t>((bits >> k) & 1U);
          }
          if (!visit(table)) return;
        }
      },
      [inputs](const ClassifierTable& table) {
        if (table.size() != inputs) return false;
        for (auto d : table) {
          if (d > 1) return false;
        }
        return true;
      },
      opts.enumeration_cap);

  UtilityModel<ClassifierTable> utilities{
      [problem, welfare](const Individual& ind, const ClassifierTable& m) {
        const int y = problem->examples()[ind.key].y;
        return welfare(y, m[problem->input_of(ind.key)]);
      },
      [problem, cost](const Individual& ind, const ClassifierTable& m) {
        const int y = problem->examples()[ind.key].y;
        return cost(y, m[problem->input_of(ind.key)]);
      }};

  LocalDecisions local{
      2,
      [problem, welfare](const Individual& ind, std::size_t d) {
        return welfare(problem->examples()[ind.key].y, static_cast<int>(d));
      },
      [problem, cost](const Individual& ind, std::size_t d) {
        return cost(problem->examples()[ind.key].y, static_cast<int>(d));
      }};

  return Fdmp<ClassifierTable>{example_population(*problem), std::move(space),
                               std::move(utilities), thresholds,
                               std::move(local)};
}

Fdmp<ClassifierTable> slcp_to_fdmp(const Slcp& slcp,
                                   const ClassificationOptions& opts) {
  return classification_fdmp(
      slcp, [](int, int yhat) { return static_cast<double>(yhat); },
      slcp.loss_fn(), Thresholds{1.0, 0.0}, opts);
}

Fdmp<ClassifierTable> german_credit_fdmp(const Slcp& slcp, double tau,
                                         double rho,
                                         const ClassificationOptions& opts) {
  return classification_fdmp(
      slcp, [](int y, int yhat) { return -german_credit_cost(y, yhat); },
      german_credit_cost, Thresholds{tau, rho}, opts);
}

namespace {

FairnessVerdict classic_verdict(const Slcp& slcp, const Classifier& clf,
                                bool positives_only, const char* metric,
                                const char* label, const MetricOptions& opts) {
  const Population pop = example_population(slcp);
  const ClassifierTable table = tabulate(slcp, clf);
  Mask predicted(pop.size());
  Mask cond(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    predicted[i] = table[slcp.input_of(i)];
    cond[i] = (!positives_only || slcp.examples()[i].y == 1) ? 1 : 0;
  }
  std::vector<std::string> diagnostics;
  std::vector<Clause> clauses;
  clauses.push_back(compare_groups(label, conditional_stats(pop, predicted, cond),
                                   opts.epsilon, diagnostics));
  return make_verdict(metric, std::move(clauses), std::move(diagnostics),
                      opts.epsilon);
}

}  // namespace

FairnessVerdict classic_dem_par(const Slcp& slcp, const Classifier& clf,
                                const MetricOptions& opts) {
  return classic_verdict(slcp, clf, false, "dem_par_clf", "P(Yhat=1 | Z)",
                         opts);
}

FairnessVerdict classic_eq_opp(const Slcp& slcp, const Classifier& clf,
                               const MetricOptions& opts) {
  return classic_verdict(slcp, clf, true, "eq_opp_clf", "P(Yhat=1 | Y=1, Z)",
                         opts);
}

}  // namespace cufair
