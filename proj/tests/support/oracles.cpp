#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ticc::testing {

double sequential_path_cost(const Matrix& nll, const std::vector<int>& labels, double beta) {
  double cost = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (t > 0 && labels[t] != labels[t - 1]) cost += beta;
    cost += nll(static_cast<Eigen::Index>(t), labels[t]);
  }
  return cost;
}

namespace {

// Calls fn(labels) for every label sequence of the given length over K.
template <typename Fn>
void for_each_path(int length, int K, Fn&& fn) {
  std::vector<int> labels(static_cast<std::size_t>(length), 0);
  while (true) {
    fn(labels);
    int pos = length - 1;
    while (pos >= 0 && labels[static_cast<std::size_t>(pos)] == K - 1) {
      labels[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) return;
    ++labels[static_cast<std::size_t>(pos)];
  }
}

int lowest_argmin(const std::vector<double>& values) {
  return static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

EnumeratedPath enumerate_best_path(const Matrix& nll, double beta) {
  const int T = static_cast<int>(nll.rows());
  const int K = static_cast<int>(nll.cols());
  if (T == 0 || K == 0) throw std::invalid_argument("empty cost matrix");

  // best[t][k]: cheapest cost over every prefix of length t + 1 ending in k.
  std::vector<std::vector<double>> best(static_cast<std::size_t>(T),
                                        std::vector<double>(static_cast<std::size_t>(K),
                                                            std::numeric_limits<double>::infinity()));
  for (int len = 1; len <= T; ++len) {
    Matrix prefix = nll.topRows(len);
    for_each_path(len, K, [&](const std::vector<int>& labels) {
      const double c = sequential_path_cost(prefix, labels, beta);
      double& slot = best[static_cast<std::size_t>(len - 1)][static_cast<std::size_t>(labels.back())];
      slot = std::min(slot, c);
    });
  }

  EnumeratedPath out;
  out.labels.assign(static_cast<std::size_t>(T), 0);
  int state = lowest_argmin(best.back());
  out.cost = best.back()[static_cast<std::size_t>(state)];
  out.labels.back() = state;
  for (int t = T - 1; t >= 1; --t) {
    const auto& prev = best[static_cast<std::size_t>(t - 1)];
    const int cheapest = lowest_argmin(prev);
    const double stay = prev[static_cast<std::size_t>(state)];
    const double jump = prev[static_cast<std::size_t>(cheapest)] + beta;
    state = (jump > stay) ? state : cheapest;
    out.labels[static_cast<std::size_t>(t - 1)] = state;
  }
  return out;
}

std::vector<int> brute_force_max_matching(const Matrix& score) {
  const int K = static_cast<int>(score.rows());
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int r = 0; r < K; ++r) s += score(r, perm[static_cast<std::size_t>(r)]);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double reference_glasso_objective(const Matrix& theta, const Matrix& S, const Matrix& lambda) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (theta + theta.transpose()));
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double logdet = eig.eigenvalues().array().log().sum();
  return -logdet + (S * theta).trace() + lambda.cwiseProduct(theta.cwiseAbs()).sum();
}

namespace {

// One free parameter of a symmetric block-Toeplitz matrix and every dense
// position it occupies.
struct FreeEntry {
  std::vector<std::pair<int, int>> cells;
};

std::vector<FreeEntry> enumerate_free_entries(int n, int w) {
  std::vector<FreeEntry> entries;
  const int d = n * w;
  // Walk every dense cell and group by (block offset, row in block, col in
  // block) after folding the lower triangle onto the upper one.
  auto key = [&](int r, int c) {
    int br = r / n, bc = c / n, i = r % n, j = c % n;
    if (br > bc || (br == bc && i > j)) {
      std::swap(br, bc);
      std::swap(i, j);
    }
    const int m = bc - br;
    return (m * n + i) * n + j;
  };
  std::vector<int> slot(static_cast<std::size_t>(w * n * n), -1);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const int k = key(r, c);
      if (slot[static_cast<std::size_t>(k)] < 0) {
        slot[static_cast<std::size_t>(k)] = static_cast<int>(entries.size());
        entries.emplace_back();
      }
      entries[static_cast<std::size_t>(slot[static_cast<std::size_t>(k)])].cells.emplace_back(r, c);
    }
  }
  return entries;
}

Matrix build_dense(const std::vector<FreeEntry>& entries, const Eigen::VectorXd& params, int d) {
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t p = 0; p < entries.size(); ++p) {
    for (auto [r, c] : entries[p].cells) m(r, c) = params(static_cast<Eigen::Index>(p));
  }
  return m;
}

double smooth_part(const Matrix& theta, const Matrix& S) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Matrix L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  return -logdet + (S.cwiseProduct(theta)).sum();
}

}  // namespace

ProxGradResult toeplitz_glasso_prox_grad(const Matrix& S, const Matrix& lambda, int n, int w,
                                         int iterations) {
  const int d = n * w;
  const auto entries = enumerate_free_entries(n, w);
  const auto P = static_cast<Eigen::Index>(entries.size());

  Eigen::VectorXd weight(P);
  for (Eigen::Index p = 0; p < P; ++p) {
    double sum = 0.0;
    for (auto [r, c] : entries[static_cast<std::size_t>(p)].cells) sum += lambda(r, c);
    weight(p) = sum;
  }

  // Start at a scaled identity, which is feasible.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(P);
  Matrix start = Matrix::Identity(d, d) / std::max(1.0, S.diagonal().maxCoeff());
  for (Eigen::Index p = 0; p < P; ++p) {
    auto [r, c] = entries[static_cast<std::size_t>(p)].cells.front();
    x(p) = start(r, c);
  }

  auto soft = [](double v, double t) {
    return v > t ? v - t : (v < -t ? v + t : 0.0);
  };

  double step = 1.0;
  ProxGradResult out;
  for (int it = 0; it < iterations; ++it) {
    const Matrix theta = build_dense(entries, x, d);
    const double f = smooth_part(theta, S);
    const Matrix grad_dense = S - theta.inverse();
    Eigen::VectorXd grad(P);
    for (Eigen::Index p = 0; p < P; ++p) {
      double g = 0.0;
      for (auto [r, c] : entries[static_cast<std::size_t>(p)].cells) g += grad_dense(r, c);
      grad(p) = g;
    }

    step = std::min(step * 2.0, 1e3);
    Eigen::VectorXd next(P);
    while (true) {
      for (Eigen::Index p = 0; p < P; ++p) next(p) = soft(x(p) - step * grad(p), step * weight(p));
      const Eigen::VectorXd delta = next - x;
      const double f_next = smooth_part(build_dense(entries, next, d), S);
      if (std::isfinite(f_next) &&
          f_next <= f + grad.dot(delta) + delta.squaredNorm() / (2.0 * step)) {
        break;
      }
      step *= 0.5;
      if (step < 1e-300) break;
    }
    const bool stalled = (next - x).lpNorm<Eigen::Infinity>() == 0.0;
    x = next;
    out.iterations = it + 1;
    if (stalled) break;
  }
  out.theta = build_dense(entries, x, d);
  out.objective = reference_glasso_objective(out.theta, S, lambda);
  return out;
}

double reference_gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                                 const Matrix& theta) {
  const Matrix cov = theta.inverse();
  const auto d = static_cast<double>(x.size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double logdet_cov = eig.eigenvalues().array().log().sum();
  const Eigen::VectorXd diff = x - mu;
  const double quad = diff.dot(cov.ldlt().solve(diff));
  return -0.5 * quad - 0.5 * logdet_cov - 0.5 * d * std::log(2.0 * std::numbers::pi);
}

}  // namespace ticc::testing
