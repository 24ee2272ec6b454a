#include <numeric>

#include <gtest/gtest.h>

#include "cufair/clustering.hpp"
#include "support/generators.hpp"

namespace cufair {
namespace {

// A, B in group 0; C, D in group 1.
ClusteringProblem four_points() {
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 10.0, 11.0;
  return ClusteringProblem(x, {GroupId{0}, GroupId{0}, GroupId{1}, GroupId{1}}, 2);
}

TEST(Balanced, MixedPairs) {
  const auto p = four_points();
  const ClusterAssignment j{0, 1, 0, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(balanced_welfare(p, j, i), 0.5);
  const auto v = clustering_dem_par(p, j, BalancedWelfare{}, 0.5);
  EXPECT_TRUE(v.satisfied);
  EXPECT_DOUBLE_EQ(*v.per_group()[0].value, 1.0);
}

TEST(Balanced, Homogeneous) {
  const auto p = four_points();
  const ClusterAssignment j{0, 0, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(balanced_welfare(p, j, i), 1.0);
  for (double tau : {0.0, 0.3, 0.6, 1.0}) {
    EXPECT_TRUE(clustering_dem_par(p, j, BalancedWelfare{}, tau).satisfied);
  }
}

TEST(Balanced, Uneven) {
  const auto p = four_points();
  const ClusterAssignment j{0, 0, 0, 1};
  EXPECT_DOUBLE_EQ(balanced_welfare(p, j, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(balanced_welfare(p, j, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(balanced_welfare(p, j, 2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(balanced_welfare(p, j, 3), 1.0);
  const auto v = clustering_dem_par(p, j, BalancedWelfare{}, 0.6);
  EXPECT_FALSE(v.satisfied);
  EXPECT_DOUBLE_EQ(*v.per_group()[0].value, 1.0);
  EXPECT_DOUBLE_EQ(*v.per_group()[1].value, 0.5);
}

TEST(Balanced, Conjoined) {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 2.0;
  const ClusteringProblem p(x, {GroupId{0}, GroupId{0}, GroupId{1}}, 2);
  const double before = balanced_welfare(p, {0, 0, 0}, 0);
  const double after = balanced_welfare(p, {0, 0, 1}, 0);
  EXPECT_NE(before, after);
}

TEST(Representative, Examples) {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 2.0;
  const ClusteringProblem together(x, {GroupId{0}, GroupId{1}}, 1);
  EXPECT_DOUBLE_EQ(representative_welfare(together, {0, 0}, 0), -1.0);
  EXPECT_DOUBLE_EQ(representative_welfare(together, {0, 0}, 1), -1.0);
  const ClusteringProblem apart(x, {GroupId{0}, GroupId{1}}, 2);
  EXPECT_DOUBLE_EQ(representative_welfare(apart, {0, 1}, 0), 0.0);
  Eigen::MatrixXd y(3, 1);
  y << 0.0, 1.0, 2.0;
  const ClusteringProblem mid(y, {GroupId{0}, GroupId{1}, GroupId{0}}, 1);
  EXPECT_DOUBLE_EQ(representative_welfare(mid, {0, 0, 0}, 1), 0.0);
}

TEST(Representative, FlagsSeparatedGroups) {
  // Balanced welfare cannot see homogeneous clusters; distance to a shared
  // centroid can.
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 0.0, 3.0, 5.0;
  const ClusteringProblem p(x, {GroupId{0}, GroupId{0}, GroupId{1}, GroupId{1}}, 2);
  const ClusterAssignment j{0, 0, 1, 1};
  EXPECT_TRUE(clustering_dem_par(p, j, BalancedWelfare{}, 1.0).satisfied);
  EXPECT_FALSE(clustering_dem_par(p, j, RepresentativeWelfare{}, -0.5).satisfied);
}

TEST(Clustering, InvalidInput) {
  EXPECT_THROW(ClusteringProblem(Eigen::MatrixXd(0, 1), {}, 1), InvalidModel);
  EXPECT_THROW(ClusteringProblem(Eigen::MatrixXd::Zero(1, 1), {GroupId{0}}, 0),
               InvalidModel);
  const auto p = four_points();
  EXPECT_THROW(p.check({0, 1, 2, 0}), InvalidArgument);
  EXPECT_THROW(p.check({0, 1}), InvalidArgument);
  EXPECT_THROW(centroid(p, {0, 0, 0, 0}, 1), InvalidArgument);
}

TEST(Clustering, RelabelingInvariance) {
  testing::Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 2, 7));
    const auto k = static_cast<std::size_t>(testing::uniform_int(rng, 1, 4));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
    std::vector<GroupId> groups;
    ClusterAssignment j;
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(i), 0) = testing::uniform_int(rng, -3, 3);
      x(static_cast<Eigen::Index>(i), 1) = testing::uniform_int(rng, -3, 3);
      groups.emplace_back(static_cast<std::uint32_t>(i < 2 ? i : testing::uniform_int(rng, 0, 1)));
      j.push_back(static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(k) - 1)));
    }
    const ClusteringProblem p(x, groups, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ClusterAssignment relabeled;
    for (auto c : j) relabeled.push_back(perm[c]);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(balanced_welfare(p, j, i), balanced_welfare(p, relabeled, i));
      EXPECT_EQ(representative_welfare(p, j, i),
                representative_welfare(p, relabeled, i));
    }
    for (double tau : {0.5, -1.0}) {
      EXPECT_EQ(clustering_dem_par(p, j, BalancedWelfare{}, tau),
                clustering_dem_par(p, relabeled, BalancedWelfare{}, tau));
      EXPECT_EQ(clustering_dem_par(p, j, RepresentativeWelfare{}, tau),
                clustering_dem_par(p, relabeled, RepresentativeWelfare{}, tau));
    }
  }
}

TEST(Clustering, AdapterConsistency) {
  const auto p = four_points();
  const ClusterAssignment j{0, 0, 0, 1};
  auto fdmp = clustering_to_fdmp(p, BalancedWelfare{}, {0.6, 1e300});
  EXPECT_EQ(clustering_dem_par(p, j, BalancedWelfare{}, 0.6),
            dem_par_welf(fdmp, j));
  EXPECT_EQ(fdmp.decisions.size(), 16u);
  // Every individual can sit in a homogeneous cluster.
  const Mask gamma = qualification_mask(fdmp);
  for (auto g : gamma) EXPECT_EQ(g, 1);
}

TEST(Clustering, CostIsSquaredCentroidDistance) {
  const auto p = four_points();
  EXPECT_DOUBLE_EQ(squared_centroid_distance(p, {0, 0, 1, 1}, 0), 0.25);
  auto fdmp = clustering_to_fdmp(p, BalancedWelfare{}, {0.0, 0.0});
  // Only zero-cost placements qualify: a singleton cluster.
  EXPECT_EQ(cost_of(fdmp, ClusterAssignment{0, 1, 1, 1}, fdmp.population.individual(0)),
            0.0);
}

}  // namespace
}  // namespace cufair
