#include "cufair/mdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <utility>

#include <fmt/format.h>

namespace cufair {

namespace {

constexpr double kRowTolerance = 1e-12;

bool finite_nonnegative(double p) { return std::isfinite(p) && p >= 0.0; }

// Longest chain of steps through non-absorbing states, counting the state a
// trajectory starts in. Empty when the non-absorbing graph has a cycle.
std::optional<std::size_t> longest_path(
    const std::vector<MdpState>& states,
    const std::vector<Eigen::MatrixXd>& transitions) {
  const std::size_t n = states.size();
  std::vector<std::vector<std::size_t>> next(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    if (states[s].absorbing) continue;
    for (std::size_t t = 0; t < n; ++t) {
      if (states[t].absorbing) continue;
      for (const auto& p : transitions) {
        if (p(s, t) > 0.0) {
          next[s].push_back(t);
          ++indegree[t];
          break;
        }
      }
    }
  }
  // Kahn's order, tracking the longest chain ending in each state.
  std::vector<std::size_t> queue;
  std::vector<std::size_t> depth(n, 1);
  std::size_t live = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (states[s].absorbing) continue;
    ++live;
    if (indegree[s] == 0) queue.push_back(s);
  }
  std::size_t seen = 0;
  std::size_t longest = 0;
  while (!queue.empty()) {
    const std::size_t s = queue.back();
    queue.pop_back();
    ++seen;
    longest = std::max(longest, depth[s]);
    for (std::size_t t : next[s]) {
      depth[t] = std::max(depth[t], depth[s] + 1);
      if (--indegree[t] == 0) queue.push_back(t);
    }
  }
  if (seen != live) return std::nullopt;
  return longest;
}

void check_policy(const EpisodicMdp& mdp, const Policy& policy) {
  if (policy.size() != mdp.state_count()) {
    throw InvalidArgument(fmt::format("policy covers {} states, expected {}",
                                      policy.size(), mdp.state_count()));
  }
  for (std::size_t s = 0; s < policy.size(); ++s) {
    if (policy[s] >= mdp.action_count()) {
      throw InvalidArgument(
          fmt::format("policy action {} at state {} is out of range",
                      policy[s], mdp.state(s).id));
    }
  }
}

}  // namespace

EpisodicMdp::EpisodicMdp(std::vector<MdpState> states,
                         std::vector<std::string> actions,
                         std::vector<Eigen::MatrixXd> transitions,
                         StateActionTable reward, double gamma,
                         Eigen::VectorXd initial,
                         std::optional<std::size_t> horizon,
                         std::size_t group_count)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      transitions_(std::move(transitions)),
      reward_(std::move(reward)),
      gamma_(gamma),
      initial_(std::move(initial)),
      horizon_(horizon),
      group_count_(group_count) {
  const auto n = static_cast<Eigen::Index>(states_.size());
  const auto a = static_cast<Eigen::Index>(actions_.size());
  if (n == 0) throw InvalidModel("an MDP needs at least one state");
  if (a == 0) throw InvalidModel("an MDP needs at least one action");
  if (transitions_.size() != actions_.size()) {
    throw InvalidModel("one transition matrix per action is required");
  }
  if (reward_.rows() != n || reward_.cols() != a) {
    throw InvalidModel("reward table must be states x actions");
  }
  if (!reward_.allFinite()) throw InvalidModel("rewards must be finite");
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) {
    throw InvalidModel(fmt::format("discount {} is outside [0, 1]", gamma_));
  }
  if (horizon_ && *horizon_ == 0) {
    throw InvalidModel("horizon must be positive");
  }

  std::size_t needed = 2;
  for (const auto& s : states_) {
    needed = std::max<std::size_t>(needed, s.group.value + 1);
  }
  if (group_count_ == 0) group_count_ = needed;
  if (group_count_ < needed) {
    throw InvalidModel("state group id exceeds the declared group count");
  }

  for (std::size_t act = 0; act < transitions_.size(); ++act) {
    const auto& p = transitions_[act];
    if (p.rows() != n || p.cols() != n) {
      throw InvalidModel(
          fmt::format("transition matrix of '{}' must be states x states",
                      actions_[act]));
    }
    for (Eigen::Index s = 0; s < n; ++s) {
      double row = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) {
        if (!finite_nonnegative(p(s, t))) {
          throw InvalidModel("transition probabilities must be non-negative");
        }
        row += p(s, t);
        const auto& from = states_[static_cast<std::size_t>(s)];
        const auto& to = states_[static_cast<std::size_t>(t)];
        if (p(s, t) > 0.0 && !from.absorbing && !to.absorbing &&
            from.group != to.group) {
          throw InvalidModel(fmt::format(
              "transition {} -> {} changes the group", from.id, to.id));
        }
      }
      const bool absorbing = states_[static_cast<std::size_t>(s)].absorbing;
      if (absorbing && row == 0.0) continue;
      if (std::abs(row - 1.0) > kRowTolerance) {
        throw InvalidModel(fmt::format(
            "transition row of state '{}' under '{}' sums to {:.17g}",
            states_[static_cast<std::size_t>(s)].id, actions_[act], row));
      }
    }
  }

  if (initial_.size() != n) {
    throw InvalidModel("initial distribution must cover every state");
  }
  double mass = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!finite_nonnegative(initial_(s))) {
      throw InvalidModel("initial probabilities must be non-negative");
    }
    mass += initial_(s);
  }
  if (std::abs(mass - 1.0) > kRowTolerance) {
    throw InvalidModel(
        fmt::format("initial distribution sums to {:.17g}", mass));
  }

  absorption_bound_ = longest_path(states_, transitions_);
}

EpisodicMdp EpisodicMdp::from_triples(std::vector<MdpState> states,
                                      std::vector<std::string> actions,
                                      const std::vector<Transition>& transitions,
                                      StateActionTable reward, double gamma,
                                      Eigen::VectorXd initial,
                                      std::optional<std::size_t> horizon,
                                      std::size_t group_count) {
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<Eigen::MatrixXd> matrices(actions.size(),
                                        Eigen::MatrixXd::Zero(n, n));
  for (const auto& tr : transitions) {
    if (tr.state >= states.size() || tr.next >= states.size() ||
        tr.action >= actions.size()) {
      throw InvalidModel("transition refers to an unknown state or action");
    }
    matrices[tr.action](static_cast<Eigen::Index>(tr.state),
                        static_cast<Eigen::Index>(tr.next)) += tr.probability;
  }
  return EpisodicMdp(std::move(states), std::move(actions),
                     std::move(matrices), std::move(reward), gamma,
                     std::move(initial), horizon, group_count);
}

std::size_t EpisodicMdp::steps() const {
  if (horizon_) return *horizon_;
  if (absorption_bound_) return *absorption_bound_;
  throw HorizonUnbounded(
      "no horizon is set and some trajectories never reach absorption");
}

std::size_t EpisodicMdp::index_of(std::string_view id) const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (states_[s].id == id) return s;
  }
  throw InvalidArgument(fmt::format("unknown state '{}'", id));
}

std::size_t EpisodicMdp::action_index(std::string_view name) const {
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    if (actions_[a] == name) return a;
  }
  throw InvalidArgument(fmt::format("unknown action '{}'", name));
}

Eigen::VectorXd evaluate_policy(const EpisodicMdp& mdp,
                                const StateActionTable& contrib,
                                const Policy& policy) {
  check_policy(mdp, policy);
  const auto n = static_cast<Eigen::Index>(mdp.state_count());
  if (contrib.rows() != n ||
      contrib.cols() != static_cast<Eigen::Index>(mdp.action_count())) {
    throw InvalidArgument("contribution table must be states x actions");
  }
  const std::size_t steps = mdp.steps();

  // Row s of the policy's transition matrix, and its per-step contribution.
  Eigen::MatrixXd chain(n, n);
  Eigen::VectorXd step_value(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const std::size_t a = policy[static_cast<std::size_t>(s)];
    if (mdp.state(static_cast<std::size_t>(s)).absorbing) {
      chain.row(s).setZero();
      step_value(s) = 0.0;
    } else {
      chain.row(s) = mdp.transition(a).row(s);
      step_value(s) = contrib(s, static_cast<Eigen::Index>(a));
    }
  }

  Eigen::VectorXd value = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < steps; ++t) {
    value = step_value + mdp.gamma() * (chain * value);
  }
  return value;
}

double expected_cumulative(const EpisodicMdp& mdp,
                           const StateActionTable& contrib,
                           const Policy& policy, std::size_t start) {
  if (start >= mdp.state_count()) {
    throw InvalidArgument("start state out of range");
  }
  return evaluate_policy(mdp, contrib, policy)(
      static_cast<Eigen::Index>(start));
}

double policy_cost(const EpisodicMdp& mdp, const Policy& policy,
                   std::size_t start) {
  return -expected_cumulative(mdp, mdp.reward(), policy, start);
}

std::vector<Eigen::VectorXd> state_occupancy(const EpisodicMdp& mdp,
                                             const Policy& policy,
                                             std::size_t start) {
  check_policy(mdp, policy);
  if (start >= mdp.state_count()) {
    throw InvalidArgument("start state out of range");
  }
  const auto n = static_cast<Eigen::Index>(mdp.state_count());
  const std::size_t steps = mdp.steps();
  Eigen::MatrixXd chain(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    if (mdp.state(static_cast<std::size_t>(s)).absorbing) {
      chain.row(s).setZero();
      chain(s, s) = 1.0;
    } else {
      chain.row(s) = mdp.transition(policy[static_cast<std::size_t>(s)]).row(s);
    }
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(steps + 1);
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(n);
  dist(static_cast<Eigen::Index>(start)) = 1.0;
  out.push_back(dist);
  for (std::size_t t = 0; t < steps; ++t) {
    dist = chain.transpose() * dist;
    out.push_back(dist);
  }
  return out;
}

std::vector<std::size_t> decision_states(const EpisodicMdp& mdp) {
  const std::size_t n = mdp.state_count();
  const std::size_t steps = mdp.steps();
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::size_t> frontier;
  for (std::size_t s = 0; s < n; ++s) {
    if (mdp.initial()(static_cast<Eigen::Index>(s)) > 0.0 &&
        !mdp.state(s).absorbing) {
      reached[s] = 1;
      frontier.push_back(s);
    }
  }
  for (std::size_t t = 1; t < steps && !frontier.empty(); ++t) {
    std::vector<std::size_t> next;
    for (std::size_t s : frontier) {
      for (std::size_t a = 0; a < mdp.action_count(); ++a) {
        const auto& p = mdp.transition(a);
        for (std::size_t u = 0; u < n; ++u) {
          if (reached[u] || mdp.state(u).absorbing) continue;
          if (p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(u)) >
              0.0) {
            reached[u] = 1;
            next.push_back(u);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (reached[s]) out.push_back(s);
  }
  return out;
}

std::uint64_t policy_count(const EpisodicMdp& mdp) {
  return saturating_pow(mdp.action_count(), decision_states(mdp).size());
}

namespace {

// Odometer over the decision states; returns false from `visit` to stop.
template <class Visit>
void for_each_policy(const EpisodicMdp& mdp,
                     const std::vector<std::size_t>& decisions, Visit&& visit) {
  Policy policy(mdp.state_count(), 0);
  const std::size_t actions = mdp.action_count();
  while (true) {
    if (!visit(policy)) return;
    std::size_t k = decisions.size();
    while (k > 0) {
      --k;
      if (++policy[decisions[k]] < actions) break;
      policy[decisions[k]] = 0;
      if (k == 0) return;
    }
    if (decisions.empty()) return;
  }
}

}  // namespace

std::vector<Policy> enumerate_policies(const EpisodicMdp& mdp,
                                       std::uint64_t cap) {
  const auto decisions = decision_states(mdp);
  const std::uint64_t count =
      saturating_pow(mdp.action_count(), decisions.size());
  if (count > cap) {
    throw EnumerationCapExceeded(fmt::format(
        "{}^{} policies exceed the enumeration cap {}", mdp.action_count(),
        decisions.size(), cap));
  }
  std::vector<Policy> out;
  out.reserve(count);
  for_each_policy(mdp, decisions, [&](const Policy& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

Fdmp<Policy> mdp_to_fdmp(const EpisodicMdp& mdp,
                         const StateActionTable& welfare,
                         Thresholds thresholds, std::uint64_t cap) {
  auto model = std::make_shared<const EpisodicMdp>(mdp);
  auto contrib = std::make_shared<const StateActionTable>(welfare);
  if (welfare.rows() != static_cast<Eigen::Index>(mdp.state_count()) ||
      welfare.cols() != static_cast<Eigen::Index>(mdp.action_count())) {
    throw InvalidModel("welfare table must be states x actions");
  }

  std::vector<Population::Entry> entries;
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    const double mu = mdp.initial()(static_cast<Eigen::Index>(s));
    if (mu <= 0.0) continue;
    const auto& state = mdp.state(s);
    Attributes::Map attrs = state.attrs.items();
    attrs.insert_or_assign("state", state.id);
    entries.push_back(
        {Individual{s, state.group, Attributes(std::move(attrs)), state.id},
         mu});
  }

  const auto decisions =
      std::make_shared<const std::vector<std::size_t>>(decision_states(mdp));
  DecisionSpace<Policy> space(
      saturating_pow(mdp.action_count(), decisions->size()),
      [model, decisions](const DecisionSpace<Policy>::Visitor& visit) {
        for_each_policy(*model, *decisions, visit);
      },
      [model](const Policy& p) {
        if (p.size() != model->state_count()) return false;
        return std::all_of(p.begin(), p.end(), [&](std::size_t a) {
          return a < model->action_count();
        });
      },
      cap);

  UtilityModel<Policy> utilities{
      [model, contrib](const Individual& ind, const Policy& p) {
        return expected_cumulative(*model, *contrib, p, ind.key);
      },
      [model](const Individual& ind, const Policy& p) {
        return policy_cost(*model, p, ind.key);
      }};

  return Fdmp<Policy>{Population(std::move(entries), mdp.group_count()),
                      std::move(space), std::move(utilities), thresholds,
                      std::nullopt};
}

FairnessVerdict eq_opp_mdp_static(const EpisodicMdp& mdp,
                                  const StateActionTable& welfare,
                                  const Policy& policy, double alpha,
                                  const std::string& score_attribute,
                                  const MetricOptions& opts) {
  // Membership only; thresholds play no part in an expected-value comparison.
  const auto fdmp = mdp_to_fdmp(mdp, welfare, Thresholds{}, kUnboundedSize);
  const AuditData audit = make_audit(fdmp, policy, false);
  FairnessVerdict verdict = eq_opp_static(
      audit,
      [&](const Individual& ind) { return ind.attrs.number(score_attribute); },
      alpha, opts);
  verdict.metric = "eq_opp_mdp_static";
  return verdict;
}

TwoStageLoan two_stage_loan_scenario() {
  struct Applicant {
    const char* type;
    LoanOutcomes first;
    LoanOutcomes second;
  };
  const std::array<Applicant, 2> applicants{{
      {"prime", LoanOutcomes{0.7}, LoanOutcomes{0.8}},
      {"subprime", LoanOutcomes{0.6}, LoanOutcomes{0.7}},
  }};
  // Initial mass per (type, group): minorities are twice as likely to be
  // subprime, majorities twice as likely to be prime.
  const double mix[2][2] = {{0.17, 0.33}, {0.33, 0.17}};

  std::vector<MdpState> states;
  std::vector<EpisodicMdp::Transition> transitions;
  StateActionTable welfare = StateActionTable::Zero(8, 2);
  StateActionTable reward = StateActionTable::Zero(8, 2);
  Eigen::VectorXd initial = Eigen::VectorXd::Zero(8);
  Policy prime_only(8, kReject);
  Policy fair(8, kGrant);

  for (std::size_t type = 0; type < 2; ++type) {
    const auto& applicant = applicants[type];
    for (std::uint32_t z = 0; z < 2; ++z) {
      for (std::size_t step = 0; step < 2; ++step) {
        const std::size_t s = states.size();
        const auto& outcome = step == 0 ? applicant.first : applicant.second;
        states.push_back(MdpState{
            fmt::format("{}/z{}/t{}", applicant.type, z, step), GroupId{z},
            Attributes{{"type", std::string(applicant.type)},
                       {"step", static_cast<double>(step)},
                       {"p0", applicant.first.repay_probability}},
            false});
        const double p = outcome.repay_probability;
        const auto idx = static_cast<Eigen::Index>(s);
        welfare(idx, kGrant) =
            p * outcome.welfare_repaid + (1.0 - p) * outcome.welfare_defaulted;
        reward(idx, kGrant) =
            p * outcome.reward_repaid + (1.0 - p) * outcome.reward_defaulted;
        reward(idx, kReject) = 2.0;
        // Both actions lead to the second step; the second step loops and
        // is cut off by the horizon.
        const std::size_t next = step == 0 ? s + 1 : s;
        transitions.push_back({s, kReject, next, 1.0});
        transitions.push_back({s, kGrant, next, 1.0});
        if (step == 0) initial(idx) = mix[z][type];
        if (type == 0) prime_only[s] = kGrant;
        if (type == 1 && step == 0) fair[s] = kReject;
      }
    }
  }

  return TwoStageLoan{
      EpisodicMdp::from_triples(std::move(states), {"reject", "grant"},
                                transitions, std::move(reward), 1.0,
                                std::move(initial), 2, 2),
      std::move(welfare), Thresholds{1.0, -4.0}, std::move(prime_only),
      std::move(fair)};
}

}  // namespace cufair
