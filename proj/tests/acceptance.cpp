// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cufair/classification.hpp"
#include "cufair/clustering.hpp"
#include "cufair/io.hpp"
#include "cufair/mdp.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace cufair;
namespace t = cufair::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure only.
  void check(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

bool near(const std::optional<double>& v, double expected, double tol) {
  return v && std::abs(*v - expected) <= tol;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// Everything a verdict reports except the wording of its labels.
bool same_numbers(const FairnessVerdict& a, const FairnessVerdict& b) {
  if (a.satisfied != b.satisfied || a.vacuous != b.vacuous ||
      a.max_abs_difference != b.max_abs_difference || a.min_ratio != b.min_ratio ||
      a.offending_groups != b.offending_groups ||
      a.clauses.size() != b.clauses.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.clauses.size(); ++k) {
    const auto& x = a.clauses[k];
    const auto& y = b.clauses[k];
    if (x.per_group != y.per_group || x.satisfied != y.satisfied ||
        x.vacuous != y.vacuous || x.max_abs_difference != y.max_abs_difference ||
        x.min_ratio != y.min_ratio) {
      return false;
    }
  }
  return true;
}

Outcome recidivism() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto pop = recidivism_example();
  const auto slcp = strata_to_slcp(pop);
  const auto observed = classic_eq_opp(slcp.slcp, slcp.recorded);
  const auto strata = strata_to_fdmp(pop);
  const auto cf = eq_opp_cf_util(strata.fdmp, strata.recorded);
  const auto pf = principal_fairness(strata, strata.recorded);
  const double elapsed = seconds_since(start);

  o.check(near(observed.per_group()[0].value, 0.6, 1e-9) &&
              near(observed.per_group()[1].value, 0.6, 1e-9) && observed.satisfied,
          "observed equal opportunity is not 3/5 vs 3/5");
  o.check(near(cf.per_group()[0].value, 0.6923076923076923, 1e-9) &&
              near(cf.per_group()[1].value, 0.75, 1e-9) && !cf.satisfied,
          "counterfactual equal opportunity is not .6923 vs .75");
  const auto& backlash = pf.clauses.at(1);
  o.check(backlash.label.find("Backlash") != std::string::npos &&
              near(backlash.per_group[0].value, 1.0 / 3.0, 1e-9) &&
              near(backlash.per_group[1].value, 0.5, 1e-9) && !backlash.satisfied,
          "Backlash clause is not 1/3 vs 1/2");
  o.check(elapsed < 1.0, fmt::format("took {:.3f}s", elapsed));
  if (o.pass) {
    o.detail = fmt::format("{:.4f}/{:.4f}, {:.4f}/{:.4f}, Backlash {:.4f}/{:.4f} in {:.3f}s",
                           *observed.per_group()[0].value, *observed.per_group()[1].value,
                           *cf.per_group()[0].value, *cf.per_group()[1].value,
                           *backlash.per_group[0].value, *backlash.per_group[1].value,
                           elapsed);
  }
  return o;
}

Outcome two_stage_loan() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto loan = two_stage_loan_scenario();
  const auto& mdp = loan.mdp;
  const auto w = evaluate_policy(mdp, loan.welfare, loan.fair);
  for (const char* z : {"z0", "z1"}) {
    const auto prime = mdp.index_of(fmt::format("prime/{}/t0", z));
    const auto sub = mdp.index_of(fmt::format("subprime/{}/t0", z));
    o.check(std::abs(w(static_cast<Eigen::Index>(prime)) - 2.5) <= 1e-12,
            "W fair prime != 2.5");
    o.check(std::abs(w(static_cast<Eigen::Index>(sub)) - 1.1) <= 1e-12,
            "W fair subprime != 1.1");
    o.check(std::abs(policy_cost(mdp, loan.fair, prime) + 4.5) <= 1e-12,
            "C fair prime != -4.5");
    o.check(std::abs(policy_cost(mdp, loan.fair, sub) + 4.1) <= 1e-12,
            "C fair subprime != -4.1");
  }
  const auto fdmp = mdp_to_fdmp(mdp, loan.welfare, loan.thresholds);
  o.check(fdmp.decisions.size() == 256, "policy space is not 256");
  const Mask gamma = qualification_mask(fdmp);
  o.check(std::all_of(gamma.begin(), gamma.end(), [](auto g) { return g == 1; }),
          "some initial state is not qualified");
  const auto dp = dem_par_welf(fdmp, loan.prime_only);
  const auto eo = eq_opp_cf_util(fdmp, loan.prime_only);
  for (const auto* v : {&dp, &eo}) {
    o.check(near(v->per_group()[0].value, 0.34, 1e-12) &&
                near(v->per_group()[1].value, 0.66, 1e-12) && !v->satisfied,
            v->metric + " is not .34 vs .66");
  }
  const auto st = eq_opp_mdp_static(mdp, loan.welfare, loan.prime_only, 2.0 / 3.0);
  o.check(near(st.per_group()[0].value, 2.5, 1e-12) &&
              near(st.per_group()[1].value, 2.5, 1e-12) && st.satisfied,
          "static baseline is not 2.5 vs 2.5");
  const double elapsed = seconds_since(start);
  o.check(elapsed < 5.0, fmt::format("took {:.3f}s", elapsed));
  if (o.pass) o.detail = fmt::format("all values reproduced in {:.3f}s", elapsed);
  return o;
}

Outcome reduction() {
  Outcome o;
  t::Rng rng(20240301);
  const int trials = 250;
  for (int trial = 0; trial < trials; ++trial) {
    const Slcp slcp = t::random_slcp(rng, 8);
    const Classifier clf = t::random_classifier(rng, slcp);
    const auto fdmp = slcp_to_fdmp(slcp);
    const ClassifierTable m = tabulate(slcp, clf);
    o.check(same_numbers(dem_par_welf(fdmp, m), classic_dem_par(slcp, clf)),
            fmt::format("demographic parity differs on trial {}", trial));
    o.check(same_numbers(eq_opp_cf_util(fdmp, m), classic_eq_opp(slcp, clf)),
            fmt::format("equal opportunity differs on trial {}", trial));
  }
  if (o.pass) o.detail = fmt::format("{} random problems identical", trials);
  return o;
}

Outcome gamma_oracle() {
  Outcome o;
  t::Rng rng(77);
  const int tables = 150;
  for (int trial = 0; trial < tables; ++trial) {
    const auto n = static_cast<std::size_t>(t::uniform_int(rng, 2, 10));
    const auto m = static_cast<std::size_t>(t::uniform_int(rng, 1, 16));
    const auto table = t::random_table_fdmp(rng, n, m);
    const Mask gamma = qualification_mask(table.fdmp);
    const auto oracle = t::brute_force_gamma(table.welfare, table.cost,
                                             table.fdmp.thresholds);
    for (std::size_t i = 0; i < n; ++i) {
      o.check(static_cast<int>(gamma[i]) == oracle[i],
              fmt::format("table problem {} individual {}", trial, i));
    }
  }
  const int mdps = 80;
  for (int trial = 0; trial < mdps; ++trial) {
    const auto mdp = t::random_mdp(rng, 3, 2);
    const auto welfare = t::random_contrib(rng, mdp);
    const Thresholds th{t::uniform_int(rng, -2, 2) * 0.5,
                        t::uniform_int(rng, -2, 2) * 0.5};
    const Mask gamma = qualification_mask(mdp_to_fdmp(mdp, welfare, th));
    const auto oracle = t::brute_force_mdp_gamma(mdp, welfare, th);
    o.check(gamma.size() == oracle.size(), "support size differs");
    for (std::size_t i = 0; i < std::min(gamma.size(), oracle.size()); ++i) {
      o.check(static_cast<int>(gamma[i]) == oracle[i],
              fmt::format("MDP {} start {}", trial, i));
    }
  }
  if (o.pass) o.detail = fmt::format("{} table problems, {} MDPs", tables, mdps);
  return o;
}

Outcome german_credit() {
  Outcome o;
  // Every (y, z, yhat) combination through the problem's utilities.
  std::vector<LabeledExample> examples;
  for (int y : {0, 1}) {
    for (std::uint32_t z : {0u, 1u}) examples.push_back({{0.0}, y, GroupId{z}, 1.0});
  }
  const Slcp slcp(examples, 2);
  const auto fdmp = german_credit_fdmp(slcp);
  int checked = 0;
  for (const auto& ind : fdmp.population.individuals()) {
    const int y = slcp.examples()[ind.key].y;
    for (std::uint8_t yhat : {0, 1}) {
      const double expected = y == yhat ? 0.0 : (yhat == 1 ? 5.0 : 1.0);
      const ClassifierTable m(slcp.input_count(), yhat);
      o.check(cost_of(fdmp, m, ind) == expected,
              fmt::format("cost(y={}, yhat={}) wrong", y, yhat));
      o.check(welfare_of(fdmp, m, ind) == -expected,
              fmt::format("welfare(y={}, yhat={}) wrong", y, yhat));
      ++checked;
    }
  }

  // Synthetic predictions: everyone granted, known default rates per group.
  t::Rng rng(5151);
  const auto dir = std::filesystem::temp_directory_path() / "cufair_acceptance";
  std::filesystem::create_directories(dir);
  int files = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n0 = t::uniform_int(rng, 10, 60);
    const int n1 = t::uniform_int(rng, 10, 60);
    const int d0 = t::uniform_int(rng, 0, n0 - 1);
    const int d1 = t::uniform_int(rng, 0, n1 - 1);
    std::string csv = "id,y,z,yhat\n";
    int id = 0;
    for (int i = 0; i < n0; ++i) csv += fmt::format("{},{},0,1\n", id++, i < d0 ? 0 : 1);
    for (int i = 0; i < n1; ++i) csv += fmt::format("{},{},1,1\n", id++, i < d1 ? 0 : 1);
    std::ofstream(dir / "predictions.csv") << csv;
    std::ofstream(dir / "credit.json")
        << R"({"id": "credit", "kind": "classification", "thresholds": {"tau": -1},
               "metrics": ["dem_par_welf_ratio"],
               "payload": {"welfare": "german_credit", "csv": "predictions.csv"}})";
    const auto report = run_audit(load_scenario(dir / "credit.json"));
    const double p0 = static_cast<double>(d0) / n0;
    const double p1 = static_cast<double>(d1) / n1;
    const double expected = std::min((1 - p0) / (1 - p1), (1 - p1) / (1 - p0));
    const auto& r = report.results.at(0);
    o.check(r.verdict && near(r.verdict->min_ratio, expected, 1e-9),
            fmt::format("ratio off for p0={:.4f}, p1={:.4f}", p0, p1));
    ++files;
  }
  std::filesystem::remove_all(dir);
  if (o.pass) {
    o.detail = fmt::format("{} payoff cells exact, {} prediction files within 1e-9",
                           checked, files);
  }
  return o;
}

// Population of `n` individuals with welfare drawn from `grid`. When
// `parity` is set, group 1 repeats group 0's welfare values at doubled
// weights, so both groups share one welfare distribution.
std::pair<Population, std::vector<double>> chain_instance(
    t::Rng& rng, bool parity, const std::vector<double>& grid) {
  std::vector<Population::Entry> entries;
  std::vector<double> welfare;
  const int n = t::uniform_int(rng, 1, 6);
  auto draw = [&] {
    return grid[static_cast<std::size_t>(
        t::uniform_int(rng, 0, static_cast<int>(grid.size()) - 1))];
  };
  for (int i = 0; i < n; ++i) {
    entries.push_back({Individual{entries.size(), GroupId{0}, {}, ""}, t::small_weight(rng)});
    welfare.push_back(draw());
  }
  if (parity) {
    for (int i = 0; i < n; ++i) {
      entries.push_back({Individual{entries.size(), GroupId{1}, {}, ""},
                         2.0 * entries[static_cast<std::size_t>(i)].weight});
      welfare.push_back(welfare[static_cast<std::size_t>(i)]);
    }
  } else {
    const int m = t::uniform_int(rng, 1, 6);
    for (int i = 0; i < m; ++i) {
      entries.push_back({Individual{entries.size(), GroupId{1}, {}, ""}, t::small_weight(rng)});
      welfare.push_back(draw());
    }
  }
  return {Population(std::move(entries), 2), std::move(welfare)};
}

Outcome implication_chain() {
  Outcome o;
  t::Rng rng(909);
  const std::vector<double> grid{-1.0, 0.0, 0.5, 1.0, 2.0};
  std::vector<double> sweep;
  for (int k = 0; k < 10; ++k) sweep.push_back(-1.5 + 0.4 * k);
  const int instances = 300;
  int parity_held = 0;
  for (int trial = 0; trial < instances; ++trial) {
    const auto [pop, welfare] = chain_instance(rng, trial % 2 == 0, grid);
    AuditData audit{&pop, welfare, std::nullopt, 0.0};
    if (!distribution_parity(audit).satisfied) {
      o.check(trial % 2 == 1, fmt::format("constructed parity failed on {}", trial));
      continue;
    }
    ++parity_held;
    o.check(expected_welfare_parity(audit).satisfied,
            fmt::format("expected welfare parity fails on {}", trial));
    for (double tau : sweep) {
      audit.tau = tau;
      o.check(dem_par_welf(audit).satisfied,
              fmt::format("dem_par_welf fails on {} at tau {}", trial, tau));
    }
  }
  o.check(parity_held >= 100, "too few instances satisfy distribution parity");
  if (o.pass) {
    o.detail = fmt::format("{} populations, {} with distribution parity, no counterexample",
                           instances, parity_held);
  }
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  t::Rng rng(4242);
  t::Rng sampler(99);
  const int mdps = 25;
  const std::size_t episodes = 100000;
  double worst = 0.0;
  for (int trial = 0; trial < mdps; ++trial) {
    const auto mdp = t::random_mdp(rng, 3, 2);
    const auto contrib = t::random_contrib(rng, mdp);
    Policy p(mdp.state_count());
    for (auto& a : p) {
      a = static_cast<std::size_t>(t::uniform_int(rng, 0, static_cast<int>(mdp.action_count()) - 1));
    }
    const double exact = expected_cumulative(mdp, contrib, p, 0);
    const auto mc = t::monte_carlo_value(mdp, contrib, p, 0, episodes, sampler);
    const double diff = std::abs(exact - mc.mean);
    if (mc.standard_error > 0) worst = std::max(worst, diff / mc.standard_error);
    o.check(diff <= 3.0 * mc.standard_error + 1e-9,
            fmt::format("MDP {}: exact {:.6f}, sampled {:.6f} +- {:.6f}", trial,
                        exact, mc.mean, mc.standard_error));
    const auto other = t::random_contrib(rng, mdp);
    const Eigen::VectorXd lhs = evaluate_policy(mdp, 1.5 * contrib + other, p);
    const Eigen::VectorXd rhs = 1.5 * evaluate_policy(mdp, contrib, p) + evaluate_policy(mdp, other, p);
    o.check((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9,
            fmt::format("linearity fails on MDP {}", trial));
  }
  if (o.pass) {
    o.detail = fmt::format("{} MDPs at {} episodes, worst deviation {:.2f} SE",
                           mdps, episodes, worst);
  }
  return o;
}

// Two-group rates computed straight from the population.
std::optional<double> direct_rate(const Population& pop, const std::vector<double>& w,
                                  double tau, std::uint32_t z, const Mask* gamma) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop.group(i).value != z || (gamma && !(*gamma)[i])) continue;
    den += pop.weight(i);
    if (w[i] >= tau - kThresholdSlack) num += pop.weight(i);
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

Outcome multi_group() {
  Outcome o;
  t::Rng rng(313);
  const int trials = 150;
  for (int trial = 0; trial < trials; ++trial) {
    const auto n = static_cast<std::size_t>(t::uniform_int(rng, 2, 9));
    const auto table = t::random_table_fdmp(rng, n, 4);
    const auto& fdmp = table.fdmp;
    const int m = t::uniform_int(rng, 0, 3);
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(table.welfare[i][static_cast<std::size_t>(m)]);
    Mask gamma;
    for (int g : t::brute_force_gamma(table.welfare, table.cost, fdmp.thresholds)) {
      gamma.push_back(static_cast<std::uint8_t>(g));
    }
    for (bool conditioned : {false, true}) {
      const auto spec = MetricSpec::of(conditioned ? MetricKind::EqOppCfUtil
                                                   : MetricKind::DemParWelf);
      const auto v = evaluate_multi_group(fdmp, m, spec);
      const Mask* g = conditioned ? &gamma : nullptr;
      const auto r0 = direct_rate(fdmp.population, w, fdmp.thresholds.tau, 0, g);
      const auto r1 = direct_rate(fdmp.population, w, fdmp.thresholds.tau, 1, g);
      const bool vacuous = !r0 || !r1;
      const bool satisfied = vacuous || std::abs(*r0 - *r1) <= kDefaultEpsilon;
      o.check(v.vacuous == vacuous && v.satisfied == satisfied,
              fmt::format("verdict differs on trial {}", trial));
      o.check(v.per_group()[0].value == r0 && v.per_group()[1].value == r1,
              fmt::format("rates differ on trial {}", trial));
    }
  }

  // Rates .5/.5/.7: only group 2 differs from the reference.
  std::vector<Population::Entry> entries;
  std::vector<double> welfare;
  const double pass[] = {5, 5, 7};
  for (std::uint32_t z = 0; z < 3; ++z) {
    entries.push_back({Individual{entries.size(), GroupId{z}, {}, ""}, pass[z]});
    welfare.push_back(1.0);
    entries.push_back({Individual{entries.size(), GroupId{z}, {}, ""}, 10 - pass[z]});
    welfare.push_back(0.0);
  }
  const Population pop(std::move(entries), 3);
  const auto v = dem_par_welf(AuditData{&pop, welfare, std::nullopt, 1.0});
  o.check(!v.satisfied && v.offending_groups == std::vector<GroupId>{GroupId{2}},
          "three-group counterexample not flagged on group 2");
  if (o.pass) {
    o.detail = fmt::format("{} two-group problems agree; .5/.5/.7 flags Z=2", trials);
  }
  return o;
}

// Own-group share of each individual's cluster, by counting.
std::vector<double> recount_balanced(const std::vector<std::uint32_t>& groups,
                                     const ClusterAssignment& j) {
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    int same = 0;
    int total = 0;
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (j[k] != j[i]) continue;
      ++total;
      if (groups[k] == groups[i]) ++same;
    }
    out.push_back(static_cast<double>(same) / total);
  }
  return out;
}

Outcome clustering() {
  Outcome o;
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 10.0, 11.0;
  const std::vector<std::uint32_t> ids{0, 0, 1, 1};
  const ClusteringProblem p(x, {GroupId{0}, GroupId{0}, GroupId{1}, GroupId{1}}, 2);
  struct Example {
    ClusterAssignment j;
    std::vector<double> welfare;
    double tau;
    bool satisfied;
  };
  const std::vector<Example> examples{
      {{0, 1, 0, 1}, {0.5, 0.5, 0.5, 0.5}, 0.5, true},
      {{0, 0, 1, 1}, {1, 1, 1, 1}, 1.0, true},
      {{0, 0, 0, 1}, {2.0 / 3, 2.0 / 3, 1.0 / 3, 1}, 0.6, false},
  };
  for (const auto& e : examples) {
    const auto recount = recount_balanced(ids, e.j);
    for (std::size_t i = 0; i < 4; ++i) {
      const double w = balanced_welfare(p, e.j, i);
      o.check(w == recount[i] && std::abs(w - e.welfare[i]) <= 1e-15,
              fmt::format("balanced welfare of individual {} wrong", i));
    }
    o.check(clustering_dem_par(p, e.j, BalancedWelfare{}, e.tau).satisfied == e.satisfied,
            "worked example verdict wrong");
  }
  const auto uneven = clustering_dem_par(p, {0, 0, 0, 1}, BalancedWelfare{}, 0.6);
  o.check(near(uneven.per_group()[0].value, 1.0, 0) &&
              near(uneven.per_group()[1].value, 0.5, 0),
          "uneven example is not 1 vs .5");

  t::Rng rng(64);
  const int instances = 100;
  for (int trial = 0; trial < instances; ++trial) {
    const auto n = static_cast<std::size_t>(t::uniform_int(rng, 2, 8));
    const auto k = static_cast<std::size_t>(t::uniform_int(rng, 1, 4));
    Eigen::MatrixXd f(static_cast<Eigen::Index>(n), 2);
    std::vector<GroupId> groups;
    std::vector<std::uint32_t> raw;
    ClusterAssignment j;
    for (std::size_t i = 0; i < n; ++i) {
      f(static_cast<Eigen::Index>(i), 0) = t::uniform_real(rng, -2, 2);
      f(static_cast<Eigen::Index>(i), 1) = t::uniform_real(rng, -2, 2);
      raw.push_back(i < 2 ? static_cast<std::uint32_t>(i)
                          : static_cast<std::uint32_t>(t::uniform_int(rng, 0, 1)));
      groups.emplace_back(raw.back());
      j.push_back(static_cast<std::size_t>(t::uniform_int(rng, 0, static_cast<int>(k) - 1)));
    }
    const ClusteringProblem q(f, groups, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ClusterAssignment relabeled;
    for (auto c : j) relabeled.push_back(perm[c]);
    const auto recount = recount_balanced(raw, j);
    for (std::size_t i = 0; i < n; ++i) {
      o.check(balanced_welfare(q, j, i) == recount[i], "balanced recount differs");
      o.check(balanced_welfare(q, j, i) == balanced_welfare(q, relabeled, i),
              fmt::format("balanced welfare changes under relabeling ({})", trial));
      o.check(representative_welfare(q, j, i) == representative_welfare(q, relabeled, i),
              fmt::format("representative welfare changes under relabeling ({})", trial));
    }
    const double tau = t::uniform_real(rng, -1.5, 1.0);
    o.check(clustering_dem_par(q, j, BalancedWelfare{}, tau) ==
                    clustering_dem_par(q, relabeled, BalancedWelfare{}, tau) &&
                clustering_dem_par(q, j, RepresentativeWelfare{}, tau) ==
                    clustering_dem_par(q, relabeled, RepresentativeWelfare{}, tau),
            fmt::format("verdict changes under relabeling ({})", trial));
  }
  if (o.pass) {
    o.detail = fmt::format("worked examples recounted, {} relabelings invariant", instances);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 recidivism worked example", recidivism},
      {"AC2 two-stage loan MDP", two_stage_loan},
      {"AC3 classification reduction", reduction},
      {"AC4 qualification oracle", gamma_oracle},
      {"AC5 credit cost and ratio", german_credit},
      {"AC6 metric implication chain", implication_chain},
      {"AC7 MDP Monte Carlo cross-check", monte_carlo},
      {"AC8 multi-group reduction", multi_group},
      {"AC9 clustering welfare", clustering},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << "\n";
    if (!o.pass) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/"
            << criteria.size() << " criteria passed\n";
  return failed;
}
