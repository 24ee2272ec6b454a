#pragma once

// Clustering problems as fairness decision-making problems. Welfare here is
// conjoined: an individual's welfare depends on who else shares the cluster.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cufair/core.hpp"
#include "cufair/metrics.hpp"

namespace cufair {

/// Cluster id per individual.
using ClusterAssignment = std::vector<std::size_t>;

class ClusteringProblem {
 public:
  /// One row of `features` per individual. Throws InvalidModel when there
  /// are no individuals, k is zero, or the groups do not match the rows.
  ClusteringProblem(Eigen::MatrixXd features, std::vector<GroupId> groups,
                    std::size_t k, std::size_t group_count = 0);

  std::size_t size() const { return groups_.size(); }
  std::size_t cluster_count() const { return k_; }
  std::size_t group_count() const { return group_count_; }
  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<GroupId>& groups() const { return groups_; }
  GroupId group(std::size_t i) const { return groups_[i]; }

  /// Throws InvalidArgument unless `j` has one id below k per individual.
  void check(const ClusterAssignment& j) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<GroupId> groups_;
  std::size_t k_;
  std::size_t group_count_;
};

/// Summary of one cluster, such as its centroid.
using ClusterSummary = std::function<Eigen::VectorXd(
    const ClusteringProblem&, const ClusterAssignment&, std::size_t cluster)>;
/// Similarity of an individual's features to a cluster summary.
using SimilarityFn =
    std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& summary)>;

/// Mean feature vector of the cluster's members; throws InvalidArgument for
/// an empty cluster.
Eigen::VectorXd centroid(const ClusteringProblem& problem,
                         const ClusterAssignment& j, std::size_t cluster);
double negative_euclidean(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& summary);

/// Share of i's cluster that belongs to i's group, i included.
struct BalancedWelfare {};

/// Similarity of i to the summary of its cluster.
struct RepresentativeWelfare {
  ClusterSummary summary = centroid;
  SimilarityFn similarity = negative_euclidean;
};

using ClusterWelfare = std::variant<BalancedWelfare, RepresentativeWelfare>;

double balanced_welfare(const ClusteringProblem& problem,
                        const ClusterAssignment& j, std::size_t i);
double representative_welfare(const ClusteringProblem& problem,
                              const ClusterAssignment& j, std::size_t i,
                              const RepresentativeWelfare& how = {});
double cluster_welfare(const ClusteringProblem& problem,
                       const ClusterAssignment& j, std::size_t i,
                       const ClusterWelfare& welfare);

/// Decision-maker cost of an assignment for individual i.
using ClusterCostFn = std::function<double(
    const ClusteringProblem&, const ClusterAssignment&, std::size_t i)>;

/// Squared distance from i to its cluster's centroid.
double squared_centroid_distance(const ClusteringProblem& problem,
                                 const ClusterAssignment& j, std::size_t i);

struct ClusteringOptions {
  ClusterCostFn cost = squared_centroid_distance;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Uniform population over the individuals, attributes "x0", "x1", ...;
/// decision space: all k^n assignments. Unless given, rho is +inf so that
/// qualification depends on welfare alone.
Fdmp<ClusterAssignment> clustering_to_fdmp(
    const ClusteringProblem& problem, const ClusterWelfare& welfare,
    Thresholds thresholds = {0.0, std::numeric_limits<double>::infinity()},
    const ClusteringOptions& opts = {});

/// P(W_J >= tau | Z) compared across groups.
FairnessVerdict clustering_dem_par(const ClusteringProblem& problem,
                                   const ClusterAssignment& j,
                                   const ClusterWelfare& welfare, double tau,
                                   const MetricOptions& opts = {});

}  // namespace cufair
