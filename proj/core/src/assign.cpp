#include "ticc/assign.hpp"

#include "ticc/error.hpp"
#include "ticc/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ticc {

namespace {

struct GaussianFactor {
  Matrix lower;  // Theta = L L^T
  double log_det = 0.0;
};

GaussianFactor factor(const BlockToeplitzMatrix& theta) {
  Eigen::LLT<Matrix> llt(theta.assemble());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::invalid_model, "precision matrix is not positive definite");
  }
  GaussianFactor f;
  f.lower = llt.matrixL();
  f.log_det = 2.0 * f.lower.diagonal().array().log().sum();
  return f;
}

double log_normalizer(Index dim) {
  return 0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

AssignmentPath::AssignmentPath(std::vector<int> labels_in)
    : labels(std::move(labels_in)), num_switches(count_switches(labels)) {}

std::vector<Index> AssignmentPath::counts(int k) const {
  std::vector<Index> out(static_cast<std::size_t>(k), 0);
  for (const int label : labels) {
    if (label < 0 || label >= k) throw Error(ErrorCode::invalid_argument, "label out of range");
    ++out[static_cast<std::size_t>(label)];
  }
  return out;
}

std::vector<Index> AssignmentPath::members(int cluster) const {
  std::vector<Index> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == cluster) out.push_back(static_cast<Index>(t));
  }
  return out;
}

Index count_switches(std::span<const int> labels) {
  Index switches = 0;
  for (std::size_t t = 1; t < labels.size(); ++t) {
    if (labels[t] != labels[t - 1]) ++switches;
  }
  return switches;
}

double log_likelihood(const Eigen::Ref<const Vector>& x, const BlockToeplitzMatrix& theta,
                      const Vector& mu) {
  const Index d = theta.dim();
  if (x.size() != d || mu.size() != d) {
    throw Error(ErrorCode::dimension_mismatch, "point and mean must have n * w entries");
  }
  const GaussianFactor f = factor(theta);
  const Vector centered = x - mu;
  const double quad = (f.lower.transpose() * centered).squaredNorm();
  return -0.5 * quad + 0.5 * f.log_det - log_normalizer(d);
}

CostMatrix build_costs(const SubsequenceMatrix& subseq, std::span<const ClusterModel> clusters,
                       int threads) {
  const Index T = subseq.length();
  const Index d = subseq.dim();
  CostMatrix costs{Matrix(T, static_cast<Index>(clusters.size()))};
  for (const ClusterModel& c : clusters) {
    if (c.theta.dim() != d || c.mu.size() != d) {
      throw Error(ErrorCode::dimension_mismatch, "cluster model does not match window size");
    }
  }
  parallel_for(clusters.size(), threads, [&](std::size_t k) {
    const ClusterModel& cluster = clusters[k];
    const GaussianFactor f = factor(cluster.theta);
    const Matrix projected = (subseq.rows().rowwise() - cluster.mu.transpose()) * f.lower;
    costs.nll.col(static_cast<Index>(k)) =
        (0.5 * projected.rowwise().squaredNorm()).array() - 0.5 * f.log_det + log_normalizer(d);
  });
  return costs;
}

AssignmentPath assign_dp(const CostMatrix& costs, double beta) {
  const Index T = costs.length();
  const Index K = costs.clusters();
  if (T == 0 || K == 0) throw Error(ErrorCode::empty_input, "cost matrix is empty");
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::invalid_argument, "beta must be finite and non-negative");
  }
  if (!costs.nll.allFinite()) throw Error(ErrorCode::invalid_argument, "costs must be finite");

  Vector prev = Vector::Zero(K);
  Vector curr(K);
  // back(t, k): label at t-1 on the best path that is in k at t.
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> back(T, K);
  for (Index t = 0; t < T; ++t) {
    Index best = 0;
    for (Index k = 1; k < K; ++k) {
      if (prev(k) < prev(best)) best = k;
    }
    const double switch_cost = prev(best) + beta;
    for (Index k = 0; k < K; ++k) {
      if (switch_cost > prev(k)) {
        curr(k) = prev(k) + costs.nll(t, k);
        back(t, k) = static_cast<int>(k);
      } else {
        curr(k) = switch_cost + costs.nll(t, k);
        back(t, k) = static_cast<int>(best);
      }
    }
    prev.swap(curr);
  }

  Index final_state = 0;
  for (Index k = 1; k < K; ++k) {
    if (prev(k) < prev(final_state)) final_state = k;
  }
  std::vector<int> labels(static_cast<std::size_t>(T));
  int state = static_cast<int>(final_state);
  for (Index t = T - 1; t >= 0; --t) {
    labels[static_cast<std::size_t>(t)] = state;
    state = back(t, state);
  }
  return AssignmentPath(std::move(labels));
}

double path_cost(const CostMatrix& costs, std::span<const int> labels, double beta) {
  if (static_cast<Index>(labels.size()) != costs.length()) {
    throw Error(ErrorCode::dimension_mismatch, "path length differs from cost matrix");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    total += costs.nll(static_cast<Index>(t), labels[t]);
  }
  return total + beta * static_cast<double>(count_switches(labels));
}

}  // namespace ticc
