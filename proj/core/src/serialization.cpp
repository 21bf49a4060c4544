#include "ticc/serialization.hpp"

#include "ticc/error.hpp"

#include <cmath>
#include <fstream>

namespace ticc {

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::parse_error, "expected a non-empty matrix");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(ErrorCode::parse_error, "matrix rows have unequal length");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

// JSON has no NaN; unscored clusters are written as null.
json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

template <typename F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

void to_json(json& j, const BlockToeplitzMatrix& theta) {
  json blocks = json::array();
  for (const Matrix& b : theta.blocks()) blocks.push_back(matrix_to_json(b));
  j = json{{"n", theta.n()}, {"w", theta.w()}, {"blocks", std::move(blocks)}};
}

BlockToeplitzMatrix toeplitz_from_json(const json& j) {
  return parse_guard("block-Toeplitz matrix", [&] {
    const auto n = j.at("n").get<Index>();
    const auto w = j.at("w").get<Index>();
    const json& blocks = j.at("blocks");
    if (static_cast<Index>(blocks.size()) != w) {
      throw Error(ErrorCode::parse_error, "block count does not match w");
    }
    std::vector<Matrix> parsed;
    for (const json& b : blocks) {
      Matrix m = matrix_from_json(b);
      if (m.rows() != n || m.cols() != n) {
        throw Error(ErrorCode::parse_error, "block shape does not match n");
      }
      parsed.push_back(std::move(m));
    }
    return BlockToeplitzMatrix(std::move(parsed));
  });
}

void to_json(json& j, const AdmmConfig& config) {
  j = json{{"rho", config.rho},
           {"eps_abs", config.eps_abs},
           {"eps_rel", config.eps_rel},
           {"max_iter", config.max_iter}};
}

void from_json(const json& j, AdmmConfig& config) {
  config.rho = j.value("rho", config.rho);
  config.eps_abs = j.value("eps_abs", config.eps_abs);
  config.eps_rel = j.value("eps_rel", config.eps_rel);
  config.max_iter = j.value("max_iter", config.max_iter);
}

void to_json(json& j, const TiccConfig& config) {
  j = json{{"K", config.num_clusters},
           {"w", config.window},
           {"lambda", config.lambda},
           {"beta", config.beta},
           {"max_em_iters", config.max_em_iters},
           {"warmup_iters", config.warmup_iters},
           {"warmup_lambda_scale", config.warmup_lambda_scale},
           {"seed", config.seed},
           {"admm", config.admm},
           {"min_cluster_size", config.effective_min_cluster_size()},
           {"init", std::string(to_string(config.init))},
           {"threads", config.threads}};
  if (config.lambda_matrix) j["lambda_matrix"] = matrix_to_json(*config.lambda_matrix);
}

void from_json(const json& j, TiccConfig& config) {
  parse_guard("config", [&] {
    config.num_clusters = j.at("K").get<int>();
    config.window = j.at("w").get<Index>();
    config.lambda = j.value("lambda", config.lambda);
    config.beta = j.value("beta", config.beta);
    config.max_em_iters = j.value("max_em_iters", config.max_em_iters);
    config.warmup_iters = j.value("warmup_iters", config.warmup_iters);
    config.warmup_lambda_scale = j.value("warmup_lambda_scale", config.warmup_lambda_scale);
    config.seed = j.value("seed", config.seed);
    if (j.contains("admm")) config.admm = j.at("admm").get<AdmmConfig>();
    config.min_cluster_size = j.value("min_cluster_size", config.min_cluster_size);
    if (j.contains("init")) config.init = parse_init_method(j.at("init").get<std::string>());
    config.threads = j.value("threads", config.threads);
    if (j.contains("lambda_matrix")) config.lambda_matrix = matrix_from_json(j.at("lambda_matrix"));
    return 0;
  });
}

json model_to_json(const TiccModel& model, const TiccConfig& config) {
  json clusters = json::array();
  for (const ClusterModel& c : model.clusters) {
    clusters.push_back({{"mu", vector_to_json(c.mu)}, {"count", c.count}, {"theta", c.theta}});
  }
  return json{{"config", config},
              {"clusters", std::move(clusters)},
              {"assignment", model.assignment.labels},
              {"objective_trace", model.objective_trace},
              {"converged", model.converged},
              {"em_iters_run", model.em_iters_run},
              {"warnings", model.diagnostics.warnings}};
}

TiccModel model_from_json(const json& j, TiccConfig* config) {
  return parse_guard("model", [&] {
    TiccModel model;
    for (const json& c : j.at("clusters")) {
      model.clusters.push_back(ClusterModel{toeplitz_from_json(c.at("theta")),
                                            vector_from_json(c.at("mu")),
                                            c.at("count").get<Index>()});
    }
    model.assignment = AssignmentPath(j.at("assignment").get<std::vector<int>>());
    model.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    model.converged = j.at("converged").get<bool>();
    model.em_iters_run = j.value("em_iters_run", 0);
    model.diagnostics.warnings = j.value("warnings", std::vector<std::string>{});
    if (config != nullptr) *config = j.at("config").get<TiccConfig>();
    return model;
  });
}

void to_json(json& j, const MatchResult& result) {
  json per_cluster = json::array();
  for (const double f : result.per_cluster_f1) per_cluster.push_back(nullable(f));
  j = json{{"macro_f1", result.macro_f1},
           {"micro_f1", result.micro_f1},
           {"per_cluster_f1", std::move(per_cluster)},
           {"matching", result.permutation}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, "'" + path.string() + "': " + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failure on '" + path.string() + "'");
}

}  // namespace ticc
