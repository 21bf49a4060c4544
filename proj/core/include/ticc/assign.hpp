#pragma once

#include "ticc/cluster.hpp"
#include "ticc/timeseries.hpp"

#include <span>
#include <vector>

namespace ticc {

/// nll(t, k) = -loglik(X_t | cluster k).
struct CostMatrix {
  Matrix nll;

  Index length() const noexcept { return nll.rows(); }
  Index clusters() const noexcept { return nll.cols(); }
};

struct AssignmentPath {
  std::vector<int> labels;
  Index num_switches = 0;

  AssignmentPath() = default;
  explicit AssignmentPath(std::vector<int> labels);

  Index length() const noexcept { return static_cast<Index>(labels.size()); }
  /// Number of points per label in [0, k).
  std::vector<Index> counts(int k) const;
  std::vector<Index> members(int cluster) const;

  bool operator==(const AssignmentPath& other) const { return labels == other.labels; }
};

Index count_switches(std::span<const int> labels);

/// Gaussian window log density
///   -1/2 (x-mu)^T Theta (x-mu) + 1/2 log det Theta - (nw/2) log(2 pi).
/// Throws Error(invalid_model) when Theta is not positive definite.
double log_likelihood(const Eigen::Ref<const Vector>& x, const BlockToeplitzMatrix& theta,
                      const Vector& mu);

/// Evaluates every (t, k) pair. Clusters are scored in parallel.
CostMatrix build_costs(const SubsequenceMatrix& subseq, std::span<const ClusterModel> clusters,
                       int threads = 1);

/// Exact minimizer of sum_t nll(t, label_t) + beta * #switches (Viterbi).
/// A cluster keeps its own predecessor only when that is strictly cheaper
/// than switching; switches come from the lowest-index cheapest state, and
/// the final label is the lowest-index minimum.
AssignmentPath assign_dp(const CostMatrix& costs, double beta);

/// sum_t nll(t, label_t) + beta * #switches.
double path_cost(const CostMatrix& costs, std::span<const int> labels, double beta);

}  // namespace ticc
