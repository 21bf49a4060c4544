#include "ticc/metrics.hpp"

#include "ticc/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace ticc {

std::vector<int> hungarian_max(const Matrix& score) {
  const Index size = score.rows();
  if (score.cols() != size) throw Error(ErrorCode::dimension_mismatch, "score matrix must be square");
  if (size == 0) return {};
  // Shortest augmenting path with potentials on cost = -score, 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(size);
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = -score(static_cast<Index>(r - 1), static_cast<Index>(c - 1)) - u[r] - v[c];
        if (reduced < min_slack[c]) {
          min_slack[c] = reduced;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (std::size_t c = 1; c <= n; ++c) assignment[match[c] - 1] = static_cast<int>(c - 1);
  return assignment;
}

MatchResult macro_f1(std::span<const int> predicted, std::span<const int> truth, int num_clusters) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::dimension_mismatch, "predicted and true label sequences differ in length");
  }
  if (num_clusters < 1) throw Error(ErrorCode::invalid_argument, "K must be at least 1");
  const Index K = num_clusters;
  Matrix overlap = Matrix::Zero(K, K);
  Vector pred_size = Vector::Zero(K);
  Vector true_size = Vector::Zero(K);
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    const int a = predicted[t];
    const int b = truth[t];
    if (a < 0 || a >= num_clusters || b < 0 || b >= num_clusters) {
      throw Error(ErrorCode::invalid_argument, "label outside [0, K)");
    }
    overlap(a, b) += 1.0;
    pred_size(a) += 1.0;
    true_size(b) += 1.0;
  }

  // Pairs empty on both sides score 1 so the matching pairs them up; they
  // are excluded from the average below.
  Matrix f1(K, K);
  for (Index a = 0; a < K; ++a) {
    for (Index b = 0; b < K; ++b) {
      const double denom = pred_size(a) + true_size(b);
      f1(a, b) = denom > 0.0 ? 2.0 * overlap(a, b) / denom : 1.0;
    }
  }

  MatchResult result;
  result.permutation = hungarian_max(f1);
  result.per_cluster_f1.assign(static_cast<std::size_t>(K), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int included = 0;
  double matched = 0.0;
  for (Index a = 0; a < K; ++a) {
    const int b = result.permutation[static_cast<std::size_t>(a)];
    matched += overlap(a, b);
    if (pred_size(a) + true_size(b) == 0.0) continue;
    result.per_cluster_f1[static_cast<std::size_t>(b)] = f1(a, b);
    sum += f1(a, b);
    ++included;
  }
  result.macro_f1 = included > 0 ? sum / included : 1.0;
  result.micro_f1 = predicted.empty() ? 1.0 : matched / static_cast<double>(predicted.size());
  return result;
}

double edge_f1(const BlockToeplitzMatrix& estimated, const BlockToeplitzMatrix& truth) {
  if (estimated.n() != truth.n() || estimated.w() != truth.w()) {
    throw Error(ErrorCode::dimension_mismatch, "precision matrices differ in shape");
  }
  const std::vector<BlockEntry> est = support(estimated, /*include_diagonal=*/false);
  const std::vector<BlockEntry> ref = support(truth, /*include_diagonal=*/false);
  if (est.empty() && ref.empty()) return 1.0;
  std::vector<BlockEntry> common;
  std::set_intersection(est.begin(), est.end(), ref.begin(), ref.end(), std::back_inserter(common));
  return 2.0 * static_cast<double>(common.size()) / static_cast<double>(est.size() + ref.size());
}

double network_f1(std::span<const BlockToeplitzMatrix> estimated,
                  std::span<const BlockToeplitzMatrix> truth, std::span<const int> matching) {
  if (estimated.size() != truth.size() || matching.size() != estimated.size()) {
    throw Error(ErrorCode::dimension_mismatch, "estimated, true, and matching lists differ in size");
  }
  if (estimated.empty()) throw Error(ErrorCode::invalid_argument, "no clusters to compare");
  double sum = 0.0;
  for (std::size_t k = 0; k < estimated.size(); ++k) {
    const int target = matching[k];
    if (target < 0 || static_cast<std::size_t>(target) >= truth.size()) {
      throw Error(ErrorCode::invalid_argument, "matching refers to a missing cluster");
    }
    sum += edge_f1(estimated[k], truth[static_cast<std::size_t>(target)]);
  }
  return sum / static_cast<double>(estimated.size());
}

}  // namespace ticc
