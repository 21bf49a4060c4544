#pragma once

#include "ticc/assign.hpp"
#include "ticc/cluster.hpp"

#include <span>
#include <string>
#include <vector>

namespace ticc {

/// Wall-clock seconds spent in each phase of a fit.
struct PhaseTimings {
  double cost_build = 0.0;
  double dp = 0.0;
  std::vector<double> admm;  // per cluster, summed over EM iterations
};

struct FitDiagnostics {
  bool degenerate_input = false;
  int glasso_nonconverged = 0;
  int empty_cluster_repairs = 0;
  /// Indices into objective_trace whose following E-step reseeded an empty
  /// cluster. A repair can raise the next trace value.
  std::vector<int> repaired_after;
  PhaseTimings timings;
  std::vector<std::string> warnings;
};

struct TiccModel {
  std::vector<ClusterModel> clusters;
  AssignmentPath assignment;
  int em_iters_run = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  FitDiagnostics diagnostics;

  int num_clusters() const noexcept { return static_cast<int>(clusters.size()); }
};

struct ObjectiveBreakdown {
  double sparsity = 0.0;
  double nll = 0.0;
  double switching = 0.0;
  double total = 0.0;
};

/// Full clustering objective at (clusters, assignment):
///   sum_k ||lambda o Theta_k||_1 + sum_t -loglik(X_t | k_t) + beta * #switches.
/// The first point never pays a switching penalty.
ObjectiveBreakdown objective(const SubsequenceMatrix& subseq,
                             std::span<const ClusterModel> clusters,
                             const AssignmentPath& assignment, const Matrix& lambda, double beta);

ObjectiveBreakdown objective(const SubsequenceMatrix& subseq, const TiccModel& model,
                             const Matrix& lambda, double beta);

/// Same, reusing a cost matrix already built for `clusters`.
ObjectiveBreakdown objective(const CostMatrix& costs, std::span<const ClusterModel> clusters,
                             const AssignmentPath& assignment, const Matrix& lambda, double beta);

}  // namespace ticc
