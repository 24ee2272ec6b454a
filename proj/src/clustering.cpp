#include "cufair/clustering.hpp"

#include <algorithm>
#include <memory>
#include <utility>

#include <fmt/format.h>

namespace cufair {

ClusteringProblem::ClusteringProblem(Eigen::MatrixXd features,
                                     std::vector<GroupId> groups, std::size_t k,
                                     std::size_t group_count)
    : features_(std::move(features)),
      groups_(std::move(groups)),
      k_(k),
      group_count_(group_count) {
  if (groups_.empty()) throw InvalidModel("clustering problem has no members");
  if (k_ == 0) throw InvalidModel("clustering needs at least one cluster");
  if (features_.rows() != static_cast<Eigen::Index>(groups_.size())) {
    throw InvalidModel("one feature row per individual is required");
  }
  if (!features_.allFinite()) throw InvalidModel("features must be finite");
  std::size_t needed = 2;
  for (GroupId g : groups_) needed = std::max<std::size_t>(needed, g.value + 1);
  if (group_count_ == 0) group_count_ = needed;
  if (group_count_ < needed) {
    throw InvalidModel("group id exceeds the declared group count");
  }
}

void ClusteringProblem::check(const ClusterAssignment& j) const {
  if (j.size() != size()) {
    throw InvalidArgument(fmt::format("assignment covers {} individuals, expected {}",
                                      j.size(), size()));
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] >= k_) {
      throw InvalidArgument(
          fmt::format("individual {} assigned to cluster {} of {}", i, j[i], k_));
    }
  }
}

Eigen::VectorXd centroid(const ClusteringProblem& problem,
                         const ClusterAssignment& j, std::size_t cluster) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(problem.features().cols());
  std::size_t members = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] != cluster) continue;
    sum += problem.features().row(static_cast<Eigen::Index>(i)).transpose();
    ++members;
  }
  if (members == 0) {
    throw InvalidArgument(fmt::format("cluster {} is empty", cluster));
  }
  return sum / static_cast<double>(members);
}

double negative_euclidean(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& summary) {
  return -(x - summary).norm();
}

double balanced_welfare(const ClusteringProblem& problem,
                        const ClusterAssignment& j, std::size_t i) {
  problem.check(j);
  std::size_t members = 0;
  std::size_t same_group = 0;
  for (std::size_t other = 0; other < j.size(); ++other) {
    if (j[other] != j[i]) continue;
    ++members;
    if (problem.group(other) == problem.group(i)) ++same_group;
  }
  return static_cast<double>(same_group) / static_cast<double>(members);
}

double representative_welfare(const ClusteringProblem& problem,
                              const ClusterAssignment& j, std::size_t i,
                              const RepresentativeWelfare& how) {
  problem.check(j);
  const Eigen::VectorXd x =
      problem.features().row(static_cast<Eigen::Index>(i)).transpose();
  return how.similarity(x, how.summary(problem, j, j[i]));
}

double cluster_welfare(const ClusteringProblem& problem,
                       const ClusterAssignment& j, std::size_t i,
                       const ClusterWelfare& welfare) {
  if (const auto* rep = std::get_if<RepresentativeWelfare>(&welfare)) {
    return representative_welfare(problem, j, i, *rep);
  }
  return balanced_welfare(problem, j, i);
}

double squared_centroid_distance(const ClusteringProblem& problem,
                                 const ClusterAssignment& j, std::size_t i) {
  problem.check(j);
  const Eigen::VectorXd x =
      problem.features().row(static_cast<Eigen::Index>(i)).transpose();
  return (x - centroid(problem, j, j[i])).squaredNorm();
}

Fdmp<ClusterAssignment> clustering_to_fdmp(const ClusteringProblem& problem,
                                           const ClusterWelfare& welfare,
                                           Thresholds thresholds,
                                           const ClusteringOptions& opts) {
  auto shared = std::make_shared<const ClusteringProblem>(problem);
  const std::size_t n = problem.size();
  const std::size_t k = problem.cluster_count();

  std::vector<Population::Entry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Attributes::Map attrs;
    for (Eigen::Index f = 0; f < problem.features().cols(); ++f) {
      attrs.emplace(fmt::format("x{}", f),
                    problem.features()(static_cast<Eigen::Index>(i), f));
    }
    entries.push_back({Individual{i, problem.group(i),
                                  Attributes(std::move(attrs)),
                                  fmt::format("member {}", i)},
                       1.0});
  }

  DecisionSpace<ClusterAssignment> space(
      saturating_pow(k, n),
      [n, k](const DecisionSpace<ClusterAssignment>::Visitor& visit) {
        ClusterAssignment j(n, 0);
        while (true) {
          if (!visit(j)) return;
          std::size_t pos = n;
          while (pos > 0) {
            --pos;
            if (++j[pos] < k) break;
            j[pos] = 0;
            if (pos == 0) return;
          }
        }
      },
      [n, k](const ClusterAssignment& j) {
        return j.size() == n &&
               std::all_of(j.begin(), j.end(),
                           [k](std::size_t c) { return c < k; });
      },
      opts.enumeration_cap);

  UtilityModel<ClusterAssignment> utilities{
      [shared, welfare](const Individual& ind, const ClusterAssignment& j) {
        return cluster_welfare(*shared, j, ind.key, welfare);
      },
      [shared, cost = opts.cost](const Individual& ind,
                                 const ClusterAssignment& j) {
        return cost(*shared, j, ind.key);
      }};

  return Fdmp<ClusterAssignment>{
      Population(std::move(entries), problem.group_count()), std::move(space),
      std::move(utilities), thresholds, std::nullopt};
}

FairnessVerdict clustering_dem_par(const ClusteringProblem& problem,
                                   const ClusterAssignment& j,
                                   const ClusterWelfare& welfare, double tau,
                                   const MetricOptions& opts) {
  problem.check(j);
  const auto fdmp = clustering_to_fdmp(
      problem, welfare, {tau, std::numeric_limits<double>::infinity()});
  return dem_par_welf(fdmp, j, opts);
}

}  // namespace cufair
