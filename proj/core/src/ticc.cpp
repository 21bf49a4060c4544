#include "ticc/ticc.hpp"

#include "ticc/error.hpp"
#include "ticc/parallel.hpp"
#include "ticc/random.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

namespace ticc {

namespace {

constexpr std::uint64_t kInitStream = 1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(InitMethod method) noexcept {
  return method == InitMethod::contiguous ? "contiguous" : "random";
}

InitMethod parse_init_method(std::string_view name) {
  if (name == "contiguous") return InitMethod::contiguous;
  if (name == "random") return InitMethod::random;
  throw Error(ErrorCode::invalid_argument,
              "unknown init method '" + std::string(name) + "' (expected contiguous or random)");
}

void TiccConfig::validate() const {
  if (num_clusters < 1) throw Error(ErrorCode::invalid_argument, "K must be at least 1");
  if (window < 1) throw Error(ErrorCode::invalid_argument, "window must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::invalid_argument, "lambda must be finite and non-negative");
  }
  if (lambda_matrix) {
    const Matrix& l = *lambda_matrix;
    if (l.rows() != l.cols() || !l.allFinite() || l.minCoeff() < 0.0 || l != l.transpose()) {
      throw Error(ErrorCode::invalid_argument,
                  "lambda matrix must be square, symmetric, finite and non-negative");
    }
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::invalid_argument, "beta must be finite and non-negative");
  }
  if (max_em_iters < 1) throw Error(ErrorCode::invalid_argument, "max_em_iters must be >= 1");
  if (warmup_iters < 0) throw Error(ErrorCode::invalid_argument, "warmup_iters must be >= 0");
  if (!(warmup_lambda_scale >= 0.0) || !std::isfinite(warmup_lambda_scale)) {
    throw Error(ErrorCode::invalid_argument, "warmup_lambda_scale must be finite and >= 0");
  }
  if (min_cluster_size < 0) {
    throw Error(ErrorCode::invalid_argument, "min_cluster_size must be non-negative");
  }
  if (threads < 1) throw Error(ErrorCode::invalid_argument, "threads must be >= 1");
  admm.validate();
}

Index TiccConfig::effective_min_cluster_size() const noexcept {
  return min_cluster_size > 0 ? min_cluster_size : 2 * window;
}

Matrix TiccConfig::lambda_for(Index dim) const {
  if (!lambda_matrix) return Matrix::Constant(dim, dim, lambda);
  if (lambda_matrix->rows() != dim) {
    std::ostringstream msg;
    msg << "lambda matrix is " << lambda_matrix->rows() << " x " << lambda_matrix->cols()
        << " but n * w = " << dim;
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
  return *lambda_matrix;
}

AssignmentPath initialize(const SubsequenceMatrix& subseq, int num_clusters, std::uint64_t seed,
                          InitMethod method) {
  const Index T = subseq.length();
  if (num_clusters < 1) throw Error(ErrorCode::invalid_argument, "K must be at least 1");
  if (T < num_clusters) {
    std::ostringstream msg;
    msg << "cannot initialize " << num_clusters << " clusters from " << T << " points";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  Rng rng(derive_seed(seed, kInitStream));
  std::vector<int> labels(static_cast<std::size_t>(T));
  if (method == InitMethod::contiguous) {
    std::vector<int> order(static_cast<std::size_t>(num_clusters));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (Index t = 0; t < T; ++t) {
      const Index segment = t * num_clusters / T;
      labels[static_cast<std::size_t>(t)] = order[static_cast<std::size_t>(segment)];
    }
  } else {
    for (Index t = 0; t < T; ++t) labels[static_cast<std::size_t>(t)] = static_cast<int>(t % num_clusters);
    rng.shuffle(labels);
  }
  return AssignmentPath(std::move(labels));
}

AssignmentPath handle_empty_cluster(const AssignmentPath& assignment, const CostMatrix& costs,
                                    int k_empty, Index min_cluster_size) {
  const Index T = assignment.length();
  const int K = static_cast<int>(costs.clusters());
  if (costs.length() != T) {
    throw Error(ErrorCode::dimension_mismatch, "cost matrix does not match assignment");
  }
  if (k_empty < 0 || k_empty >= K) throw Error(ErrorCode::invalid_argument, "cluster out of range");
  std::vector<Index> counts = assignment.counts(K);
  if (counts[static_cast<std::size_t>(k_empty)] > 0) return assignment;

  const Index block = std::max<Index>(min_cluster_size, 1);
  if (T < static_cast<Index>(K) * block) {
    std::ostringstream msg;
    msg << "cannot seed an empty cluster: T = " << T << " < K * min_cluster_size = "
        << static_cast<Index>(K) * block;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }

  const auto& labels = assignment.labels;
  auto current_cost = [&](Index t) { return costs.nll(t, labels[static_cast<std::size_t>(t)]); };

  std::vector<Index> in_window(static_cast<std::size_t>(K), 0);
  double window_cost = 0.0;
  for (Index t = 0; t < block; ++t) {
    window_cost += current_cost(t);
    ++in_window[static_cast<std::size_t>(labels[static_cast<std::size_t>(t)])];
  }
  auto feasible = [&] {
    for (int k = 0; k < K; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      if (k != k_empty && counts[ks] > 0 && counts[ks] == in_window[ks]) return false;
    }
    return true;
  };

  std::optional<Index> best_start;
  double best_cost = 0.0;
  for (Index start = 0;; ++start) {
    if (feasible() && (!best_start || window_cost > best_cost)) {
      best_start = start;
      best_cost = window_cost;
    }
    if (start + block >= T) break;
    window_cost += current_cost(start + block) - current_cost(start);
    ++in_window[static_cast<std::size_t>(labels[static_cast<std::size_t>(start + block)])];
    --in_window[static_cast<std::size_t>(labels[static_cast<std::size_t>(start)])];
  }
  if (!best_start) {
    throw Error(ErrorCode::invalid_argument,
                "no contiguous block can seed the empty cluster without emptying another");
  }

  std::vector<int> repaired = labels;
  for (Index t = *best_start; t < *best_start + block; ++t) {
    repaired[static_cast<std::size_t>(t)] = k_empty;
  }
  return AssignmentPath(std::move(repaired));
}

TiccModel fit(const TimeSeries& series, const TiccConfig& config, const FitTraceSink& trace) {
  config.validate();
  return fit(stack_windows(series, config.window), config, trace);
}

TiccModel fit(const SubsequenceMatrix& subseq, const TiccConfig& config,
              const FitTraceSink& trace) {
  config.validate();
  if (subseq.window() != config.window) {
    throw Error(ErrorCode::dimension_mismatch, "subsequence window differs from config window");
  }
  const int K = config.num_clusters;
  const Index T = subseq.length();
  const Index n = subseq.sensor_dim();
  const Index w = subseq.window();
  const Index min_size = config.effective_min_cluster_size();
  if (T < static_cast<Index>(K) * min_size) {
    std::ostringstream msg;
    msg << "need at least K * min_cluster_size = " << static_cast<Index>(K) * min_size
        << " points, got " << T;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }

  const Matrix lambda = config.lambda_for(subseq.dim());
  const ToeplitzGlassoSolver solver(config.admm);

  TiccModel model;
  model.diagnostics.timings.admm.assign(static_cast<std::size_t>(K), 0.0);
  if ((subseq.rows().rowwise() - subseq.row(0)).cwiseAbs().maxCoeff() == 0.0) {
    model.diagnostics.degenerate_input = true;
    model.diagnostics.warnings.emplace_back("input series is constant");
  }

  std::vector<std::optional<AdmmState>> warm(static_cast<std::size_t>(K));
  std::vector<int> nonconverged(static_cast<std::size_t>(K), 0);
  std::mutex trace_mutex;

  auto m_step = [&](const AssignmentPath& path, int em_iter, double lambda_scale) {
    std::vector<std::optional<ClusterModel>> fitted(static_cast<std::size_t>(K));
    parallel_for(static_cast<std::size_t>(K), config.threads, [&](std::size_t k) {
      const auto start = Clock::now();
      const std::vector<Index> members = path.members(static_cast<int>(k));
      const EmpiricalStats stats = empirical_stats(subseq, members);
      // The per-point cost carries a factor 1/2 on (tr(S Theta) - log det Theta),
      // so the matching glasso weight is 2 * lambda / |P|.
      const GlassoProblem problem{
          stats.cov, lambda * (2.0 * lambda_scale / static_cast<double>(stats.count)), n, w};
      AdmmTraceSink sink;
      if (trace) {
        sink = [&, k](const AdmmTraceRow& row) {
          std::lock_guard lock(trace_mutex);
          trace(em_iter, static_cast<int>(k), row);
        };
      }
      GlassoResult result = solver.solve(problem, warm[k] ? &*warm[k] : nullptr, sink);
      if (!result.converged) ++nonconverged[k];
      warm[k] = std::move(result.state);
      fitted[k] = ClusterModel{std::move(result.theta), stats.mean, stats.count};
      model.diagnostics.timings.admm[k] += seconds_since(start);
    });
    std::vector<ClusterModel> clusters;
    clusters.reserve(static_cast<std::size_t>(K));
    for (auto& c : fitted) clusters.push_back(std::move(*c));
    return clusters;
  };

  auto timed_costs = [&](const std::vector<ClusterModel>& clusters) {
    const auto start = Clock::now();
    CostMatrix costs = build_costs(subseq, clusters, config.threads);
    model.diagnostics.timings.cost_build += seconds_since(start);
    return costs;
  };

  struct Phase {
    AssignmentPath labels;
    std::vector<ClusterModel> clusters;
    int iterations = 0;
    bool stationary = false;
  };
  // One EM run from `labels`: M-step, cost build, DP E-step, empty-cluster
  // repair. Stops when two consecutive E-steps agree. `record` appends the
  // objective after every M-step to the model trace.
  auto run_em = [&](AssignmentPath labels, double beta, double lambda_scale, int max_iters,
                    int iter_offset, bool record) {
    Phase phase;
    std::optional<AssignmentPath> previous_estep;
    for (int iter = 1; iter <= max_iters; ++iter) {
      phase.clusters = m_step(labels, iter_offset + iter, lambda_scale);
      const CostMatrix costs = timed_costs(phase.clusters);
      if (record) {
        model.objective_trace.push_back(
            objective(costs, phase.clusters, labels, lambda, config.beta).total);
      }

      const auto dp_start = Clock::now();
      AssignmentPath next = assign_dp(costs, beta);
      model.diagnostics.timings.dp += seconds_since(dp_start);
      std::vector<Index> counts = next.counts(K);
      bool repaired = false;
      for (int k = 0; k < K; ++k) {
        if (counts[static_cast<std::size_t>(k)] == 0) {
          next = handle_empty_cluster(next, costs, k, min_size);
          counts = next.counts(K);
          ++model.diagnostics.empty_cluster_repairs;
          repaired = true;
        }
      }
      if (repaired && record) {
        model.diagnostics.repaired_after.push_back(static_cast<int>(model.objective_trace.size()) - 1);
      }

      phase.iterations = iter;
      if (previous_estep && *previous_estep == next) {
        phase.stationary = true;
        break;
      }
      previous_estep = next;
      labels = std::move(next);
    }
    phase.labels = std::move(labels);
    return phase;
  };

  AssignmentPath labels = initialize(subseq, K, config.seed, config.init);
  int offset = 0;
  if (config.warmup_iters > 0 && config.beta > 0.0 && K > 1) {
    Phase warmup = run_em(std::move(labels), 0.0, config.warmup_lambda_scale,
                           config.warmup_iters, 0, false);
    labels = std::move(warmup.labels);
    offset = warmup.iterations;
  }
  Phase main = run_em(std::move(labels), config.beta, 1.0, config.max_em_iters, offset, true);
  model.em_iters_run = main.iterations;
  model.converged = main.stationary;
  labels = std::move(main.labels);
  std::vector<ClusterModel> clusters = std::move(main.clusters);

  if (!model.converged) {
    // Refit so the returned parameters belong to the returned assignment.
    clusters = m_step(labels, offset + model.em_iters_run + 1, 1.0);
    const CostMatrix costs = timed_costs(clusters);
    model.objective_trace.push_back(objective(costs, clusters, labels, lambda, config.beta).total);
    model.diagnostics.warnings.emplace_back("EM reached max_em_iters without a stationary assignment");
  }

  model.clusters = std::move(clusters);
  model.assignment = std::move(labels);
  model.diagnostics.glasso_nonconverged = std::accumulate(nonconverged.begin(), nonconverged.end(), 0);
  if (model.diagnostics.glasso_nonconverged > 0) {
    model.diagnostics.warnings.push_back(std::to_string(model.diagnostics.glasso_nonconverged) +
                                         " graphical lasso solve(s) hit max_iter");
  }
  if (model.diagnostics.empty_cluster_repairs > 0) {
    model.diagnostics.warnings.push_back(std::to_string(model.diagnostics.empty_cluster_repairs) +
                                         " empty cluster(s) reseeded");
  }
  return model;
}

Index parameter_count(const BlockToeplitzMatrix& theta) {
  return static_cast<Index>(support(theta, /*include_diagonal=*/true).size());
}

double bic(const TiccModel& model, const SubsequenceMatrix& subseq) {
  const CostMatrix costs = build_costs(subseq, model.clusters);
  if (model.assignment.length() != costs.length()) {
    throw Error(ErrorCode::dimension_mismatch, "model assignment does not match the series");
  }
  double nll = 0.0;
  for (Index t = 0; t < costs.length(); ++t) {
    nll += costs.nll(t, model.assignment.labels[static_cast<std::size_t>(t)]);
  }
  Index params = 0;
  for (const ClusterModel& c : model.clusters) params += parameter_count(c.theta);
  return 2.0 * nll + static_cast<double>(params) * std::log(static_cast<double>(costs.length()));
}

}  // namespace ticc
