#pragma once

// Finite episodic Markov decision processes with per-step welfare
// contributions. Values are computed by exact backward induction over the
// unrolled horizon.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cufair/core.hpp"
#include "cufair/metrics.hpp"

namespace cufair {

struct MdpState {
  std::string id;
  GroupId group;
  Attributes attrs;
  // Terminal: contributes nothing and is never left once entered.
  bool absorbing = false;
};

/// Deterministic stationary policy: one action index per state.
using Policy = std::vector<std::size_t>;

/// Per (state, action) quantity such as a reward or a welfare contribution.
using StateActionTable = Eigen::MatrixXd;

class EpisodicMdp {
 public:
  struct Transition {
    std::size_t state;
    std::size_t action;
    std::size_t next;
    double probability;
  };

  /// `transitions[a]` is the S x S matrix of P(s' | s, a); `reward` is S x A.
  /// Throws InvalidModel when a non-absorbing row does not sum to 1 within
  /// 1e-12, gamma lies outside [0, 1], the initial distribution is invalid,
  /// the group changes along an edge between non-absorbing states, or the
  /// horizon is zero.
  EpisodicMdp(std::vector<MdpState> states, std::vector<std::string> actions,
              std::vector<Eigen::MatrixXd> transitions, StateActionTable reward,
              double gamma, Eigen::VectorXd initial,
              std::optional<std::size_t> horizon, std::size_t group_count = 0);

  /// Builds the transition matrices from (s, a, s', p) triples. Repeated
  /// triples accumulate.
  static EpisodicMdp from_triples(std::vector<MdpState> states,
                                  std::vector<std::string> actions,
                                  const std::vector<Transition>& transitions,
                                  StateActionTable reward, double gamma,
                                  Eigen::VectorXd initial,
                                  std::optional<std::size_t> horizon,
                                  std::size_t group_count = 0);

  std::size_t state_count() const { return states_.size(); }
  std::size_t action_count() const { return actions_.size(); }
  std::size_t group_count() const { return group_count_; }
  const std::vector<MdpState>& states() const { return states_; }
  const MdpState& state(std::size_t s) const { return states_[s]; }
  const std::vector<std::string>& actions() const { return actions_; }
  const Eigen::MatrixXd& transition(std::size_t action) const {
    return transitions_[action];
  }
  const StateActionTable& reward() const { return reward_; }
  double gamma() const { return gamma_; }
  const Eigen::VectorXd& initial() const { return initial_; }
  std::optional<std::size_t> horizon() const { return horizon_; }

  /// Number of steps after which every trajectory has been absorbed, when
  /// the graph between non-absorbing states is acyclic.
  std::optional<std::size_t> absorption_bound() const {
    return absorption_bound_;
  }

  /// Steps evaluated: the horizon when given, else the absorption bound.
  /// Throws HorizonUnbounded when neither exists.
  std::size_t steps() const;

  /// Throws InvalidArgument for an unknown id.
  std::size_t index_of(std::string_view id) const;
  std::size_t action_index(std::string_view name) const;

 private:
  std::vector<MdpState> states_;
  std::vector<std::string> actions_;
  std::vector<Eigen::MatrixXd> transitions_;
  StateActionTable reward_;
  double gamma_;
  Eigen::VectorXd initial_;
  std::optional<std::size_t> horizon_;
  std::optional<std::size_t> absorption_bound_;
  std::size_t group_count_;
};

/// Value of every start state: E[sum_t gamma^t contrib(s_t, pi(s_t))].
/// Throws InvalidArgument on a malformed policy or table shape.
Eigen::VectorXd evaluate_policy(const EpisodicMdp& mdp,
                                const StateActionTable& contrib,
                                const Policy& policy);

double expected_cumulative(const EpisodicMdp& mdp,
                           const StateActionTable& contrib,
                           const Policy& policy, std::size_t start);

/// Negative expected cumulative reward.
double policy_cost(const EpisodicMdp& mdp, const Policy& policy,
                   std::size_t start);

/// State distribution after each of the evaluated steps, starting from
/// `start`; entry t is the distribution at time t. Absorbed mass stays put.
std::vector<Eigen::VectorXd> state_occupancy(const EpisodicMdp& mdp,
                                             const Policy& policy,
                                             std::size_t start);

/// Non-absorbing states reachable from the initial support in fewer steps
/// than the evaluated horizon, in index order.
std::vector<std::size_t> decision_states(const EpisodicMdp& mdp);

/// Policies that differ only on decision states. Other states take action 0.
std::uint64_t policy_count(const EpisodicMdp& mdp);

/// Every deterministic stationary policy over the decision states, in
/// lexicographic order (last decision state varies fastest). Throws
/// EnumerationCapExceeded when there are more than `cap`.
std::vector<Policy> enumerate_policies(
    const EpisodicMdp& mdp, std::uint64_t cap = kDefaultEnumerationCap);

/// Population: the initial distribution's support; each individual carries
/// its state's attributes plus "state" (the state id). Welfare and cost are
/// the value of the policy from the individual's start state.
Fdmp<Policy> mdp_to_fdmp(const EpisodicMdp& mdp,
                         const StateActionTable& welfare,
                         Thresholds thresholds,
                         std::uint64_t cap = kDefaultEnumerationCap);

/// Compares E[W_pi | p0 >= alpha, Z] across groups, with p0 read from each
/// start state's numeric attribute `score_attribute`.
FairnessVerdict eq_opp_mdp_static(const EpisodicMdp& mdp,
                                  const StateActionTable& welfare,
                                  const Policy& policy, double alpha,
                                  const std::string& score_attribute = "p0",
                                  const MetricOptions& opts = {});

/// Repayment probability and per-outcome utilities of one grant decision.
struct LoanOutcomes {
  double repay_probability;
  double welfare_repaid = 2.0;
  double welfare_defaulted = -1.0;
  double reward_repaid = 3.0;
  double reward_defaulted = 0.0;
};

struct TwoStageLoan {
  EpisodicMdp mdp;
  StateActionTable welfare;
  Thresholds thresholds;
  Policy prime_only;  // grants prime applicants, rejects subprime ones
  Policy fair;        // rejects subprime applicants at the first step only
};

inline constexpr std::size_t kReject = 0;
inline constexpr std::size_t kGrant = 1;

/// Two applicant types over two groups and two steps: eight states, actions
/// reject/grant, gamma 1, horizon 2, tau 1, rho -4. State attributes: "type"
/// ("prime"/"subprime"), "step", and "p0", the first-step repayment
/// probability.
TwoStageLoan two_stage_loan_scenario();

}  // namespace cufair
