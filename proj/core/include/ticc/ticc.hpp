#pragma once

#include "ticc/assign.hpp"
#include "ticc/glasso.hpp"
#include "ticc/model.hpp"
#include "ticc/timeseries.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

namespace ticc {

enum class InitMethod {
  /// K equal contiguous segments, labels shuffled by seed.
  contiguous,
  /// Balanced labels scattered uniformly at random.
  random,
};

std::string_view to_string(InitMethod method) noexcept;
InitMethod parse_init_method(std::string_view name);

struct TiccConfig {
  int num_clusters = 2;
  Index window = 1;
  /// Broadcast to every entry unless lambda_matrix is set.
  double lambda = 0.11;
  std::optional<Matrix> lambda_matrix;
  double beta = 400.0;
  int max_em_iters = 100;
  /// Switching-free (beta = 0) EM iterations run from the initial labels
  /// before the main loop; their assignment seeds the main loop. The
  /// objective trace covers the main loop only. 0 disables.
  int warmup_iters = 50;
  /// Penalty multiplier used during the warm-up.
  double warmup_lambda_scale = 0.25;
  std::uint64_t seed = 0;
  AdmmConfig admm;
  /// 0 selects 2 * window.
  Index min_cluster_size = 0;
  InitMethod init = InitMethod::contiguous;
  int threads = 1;

  void validate() const;
  Index effective_min_cluster_size() const noexcept;
  /// The (n*w) x (n*w) penalty matrix of the clustering objective.
  Matrix lambda_for(Index dim) const;
};

/// Called for every ADMM iteration of every cluster solve when set.
using FitTraceSink = std::function<void(int em_iter, int cluster, const AdmmTraceRow&)>;

AssignmentPath initialize(const SubsequenceMatrix& subseq, int num_clusters, std::uint64_t seed,
                          InitMethod method = InitMethod::contiguous);

/// Alternates exact DP assignment (E-step) with a Toeplitz graphical lasso
/// per cluster (M-step) until two consecutive E-steps agree or
/// max_em_iters is reached. With beta > 0 the main loop is seeded by a
/// beta = 0 warm-up run from the initial labels (see warmup_iters).
TiccModel fit(const TimeSeries& series, const TiccConfig& config,
              const FitTraceSink& trace = {});
TiccModel fit(const SubsequenceMatrix& subseq, const TiccConfig& config,
              const FitTraceSink& trace = {});

/// Moves the contiguous block of `min_cluster_size` points with the highest
/// summed cost under their current labels into `k_empty`. Returns the
/// assignment unchanged when `k_empty` already has members.
AssignmentPath handle_empty_cluster(const AssignmentPath& assignment, const CostMatrix& costs,
                                    int k_empty, Index min_cluster_size);

/// Number of free parameters of Theta counted by bic(): unique block
/// entries (A0 upper triangle with diagonal, A1..A(w-1) in full) above
/// support_threshold.
Index parameter_count(const BlockToeplitzMatrix& theta);

/// -2 * (log likelihood of every point under its assigned cluster)
///   + (sum of parameter counts) * log T.
double bic(const TiccModel& model, const SubsequenceMatrix& subseq);

}  // namespace ticc
