#include "ticc/model.hpp"

#include "ticc/error.hpp"

namespace ticc {

ObjectiveBreakdown objective(const SubsequenceMatrix& subseq,
                             std::span<const ClusterModel> clusters,
                             const AssignmentPath& assignment, const Matrix& lambda, double beta) {
  if (assignment.length() != subseq.length()) {
    throw Error(ErrorCode::dimension_mismatch, "assignment length differs from series length");
  }
  const Index d = subseq.dim();
  if (lambda.rows() != d || lambda.cols() != d) {
    throw Error(ErrorCode::dimension_mismatch, "lambda must be (n*w) x (n*w)");
  }

  return objective(build_costs(subseq, clusters), clusters, assignment, lambda, beta);
}

ObjectiveBreakdown objective(const CostMatrix& costs, std::span<const ClusterModel> clusters,
                             const AssignmentPath& assignment, const Matrix& lambda, double beta) {
  if (assignment.length() != costs.length() ||
      costs.clusters() != static_cast<Index>(clusters.size())) {
    throw Error(ErrorCode::dimension_mismatch, "cost matrix does not match the model");
  }
  ObjectiveBreakdown out;
  for (const ClusterModel& c : clusters) {
    if (lambda.rows() != c.theta.dim() || lambda.cols() != c.theta.dim()) {
      throw Error(ErrorCode::dimension_mismatch, "lambda must be (n*w) x (n*w)");
    }
    out.sparsity += lambda.cwiseProduct(c.theta.assemble().cwiseAbs()).sum();
  }
  for (Index t = 0; t < costs.length(); ++t) {
    const int label = assignment.labels[static_cast<std::size_t>(t)];
    if (label < 0 || label >= static_cast<int>(clusters.size())) {
      throw Error(ErrorCode::invalid_argument, "assignment label out of range");
    }
    out.nll += costs.nll(t, label);
  }
  out.switching = beta * static_cast<double>(count_switches(assignment.labels));
  out.total = out.sparsity + out.nll + out.switching;
  return out;
}

ObjectiveBreakdown objective(const SubsequenceMatrix& subseq, const TiccModel& model,
                             const Matrix& lambda, double beta) {
  return objective(subseq, model.clusters, model.assignment, lambda, beta);
}

}  // namespace ticc
