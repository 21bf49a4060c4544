#include "ticc/error.hpp"
#include "ticc/serialization.hpp"

#include "error_helpers.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ticc {
namespace {

using testing::code_of;

BlockToeplitzMatrix sample_theta() {
  return BlockToeplitzMatrix({Matrix{{2.0, 0.25}, {0.25, 3.0}}, Matrix{{0.1, -0.2}, {0.0, 0.3}}});
}

TEST(Serialization, ToeplitzRoundTripIsExact) {
  const BlockToeplitzMatrix t = sample_theta();
  const json j = t;
  EXPECT_EQ(j.at("n"), 2);
  EXPECT_EQ(j.at("w"), 2);
  EXPECT_EQ(toeplitz_from_json(j), t);
  EXPECT_EQ(toeplitz_from_json(json::parse(j.dump())), t);
}

TEST(Serialization, ToeplitzRejectsMalformed) {
  json j = sample_theta();
  j["w"] = 3;
  EXPECT_EQ(code_of([&] { toeplitz_from_json(j); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { toeplitz_from_json(json{{"n", 1}}); }), ErrorCode::parse_error);
  json ragged = sample_theta();
  ragged["blocks"][0][1] = json::array({1.0});
  EXPECT_EQ(code_of([&] { toeplitz_from_json(ragged); }), ErrorCode::parse_error);
}

TEST(Serialization, ConfigRoundTrip) {
  TiccConfig c;
  c.num_clusters = 4;
  c.window = 3;
  c.lambda = 0.2;
  c.beta = 12.5;
  c.seed = 99;
  c.admm.rho = 2.0;
  c.init = InitMethod::random;
  c.threads = 2;
  const TiccConfig back = json(c).get<TiccConfig>();
  EXPECT_EQ(back.num_clusters, 4);
  EXPECT_EQ(back.window, 3);
  EXPECT_EQ(back.lambda, 0.2);
  EXPECT_EQ(back.beta, 12.5);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.admm.rho, 2.0);
  EXPECT_EQ(back.init, InitMethod::random);
  EXPECT_EQ(back.threads, 2);
  EXPECT_EQ(back.min_cluster_size, 6);
}

TEST(Serialization, ModelRoundTripThroughFile) {
  TiccModel m;
  m.clusters.push_back({sample_theta(), Vector::LinSpaced(4, -1.0, 1.0), 3});
  m.clusters.push_back({BlockToeplitzMatrix::identity(2, 2), Vector::Zero(4), 2});
  m.assignment = AssignmentPath({0, 0, 1, 1, 0});
  m.objective_trace = {10.5, 9.25, 9.0};
  m.converged = true;
  m.em_iters_run = 3;
  TiccConfig c;
  c.num_clusters = 2;
  c.window = 2;

  testing::TempDir dir;
  write_json(model_to_json(m, c), dir / "model.json");
  TiccConfig c2;
  const TiccModel back = model_from_json(read_json(dir / "model.json"), &c2);
  ASSERT_EQ(back.num_clusters(), 2);
  EXPECT_EQ(back.clusters[0].theta, m.clusters[0].theta);
  EXPECT_EQ(back.clusters[0].mu, m.clusters[0].mu);
  EXPECT_EQ(back.clusters[1].count, 2);
  EXPECT_EQ(back.assignment.labels, m.assignment.labels);
  EXPECT_EQ(back.assignment.num_switches, 2);
  EXPECT_EQ(back.objective_trace, m.objective_trace);
  EXPECT_TRUE(back.converged);
  EXPECT_EQ(back.em_iters_run, 3);
  EXPECT_EQ(c2.num_clusters, 2);
  EXPECT_EQ(c2.window, 2);
}

TEST(Serialization, MatchResultWritesNullForExcludedClusters) {
  MatchResult r;
  r.permutation = {1, 0};
  r.per_cluster_f1 = {0.5, std::nan("")};
  r.macro_f1 = 0.5;
  r.micro_f1 = 0.6;
  const json j = r;
  EXPECT_TRUE(j.at("per_cluster_f1")[1].is_null());
  EXPECT_EQ(j.at("matching"), json::array({1, 0}));
}

TEST(Serialization, FileErrors) {
  testing::TempDir dir;
  EXPECT_EQ(code_of([&] { read_json(dir / "missing.json"); }), ErrorCode::io_error);
  const auto bad = dir.write("bad.json", "{ not json");
  EXPECT_EQ(code_of([&] { read_json(bad); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { write_json(json::object(), dir / "no" / "such" / "dir.json"); }),
            ErrorCode::io_error);
}

}  // namespace
}  // namespace ticc
