#pragma once

#include "ticc/toeplitz.hpp"

#include <span>
#include <vector>

namespace ticc {

struct MatchResult {
  /// permutation[estimated] = true cluster.
  std::vector<int> permutation;
  /// Indexed by true cluster; NaN for a pair absent from both labelings.
  std::vector<double> per_cluster_f1;
  double macro_f1 = 0.0;
  /// Pooled (accuracy-style) F1 under the same matching.
  double micro_f1 = 0.0;
};

/// Maximum-weight perfect matching on a square score matrix; returns
/// assignment[row] = column.
std::vector<int> hungarian_max(const Matrix& score);

/// Aligns estimated labels to true labels by the matching that maximizes
/// the summed per-cluster F1, then scores it.
MatchResult macro_f1(std::span<const int> predicted, std::span<const int> truth, int num_clusters);

/// F1 of one estimated edge support against the true one. Both empty -> 1.
double edge_f1(const BlockToeplitzMatrix& estimated, const BlockToeplitzMatrix& truth);

/// Mean edge_f1 over matched pairs (estimated[k] vs truth[matching[k]]).
double network_f1(std::span<const BlockToeplitzMatrix> estimated,
                  std::span<const BlockToeplitzMatrix> truth, std::span<const int> matching);

}  // namespace ticc
