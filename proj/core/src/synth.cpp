#include "ticc/synth.hpp"

#include "ticc/error.hpp"
#include "ticc/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ticc {

namespace {

constexpr std::uint64_t kSeriesStream = 2;
constexpr std::uint64_t kThetaStreamBase = 100;

double edge_weight(Rng& rng) {
  const double magnitude = rng.uniform(0.25, 1.0);
  return rng.bernoulli(0.5) ? -magnitude : magnitude;
}

// Conditional law of the newest observation given `history` earlier ones,
// taken from the trailing (history + 1) blocks of the window covariance.
struct ConditionalSampler {
  Matrix gain;   // n x (history * n)
  Matrix noise;  // lower Cholesky factor of the conditional covariance
};

std::vector<ConditionalSampler> conditional_samplers(const BlockToeplitzMatrix& theta) {
  const Index n = theta.n();
  const Index w = theta.w();
  const Matrix precision = theta.assemble();
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::invalid_model, "generator precision matrix is not positive definite");
  }
  const Matrix sigma = llt.solve(Matrix::Identity(n * w, n * w));

  std::vector<ConditionalSampler> samplers;
  for (Index history = 0; history < w; ++history) {
    const Index offset = (w - 1 - history) * n;
    const Index past = history * n;
    const Matrix s11 = sigma.block(offset, offset, past, past);
    const Matrix s21 = sigma.block(offset + past, offset, n, past);
    const Matrix s22 = sigma.block(offset + past, offset + past, n, n);

    ConditionalSampler sampler;
    Matrix cond = s22;
    if (history > 0) {
      Eigen::LLT<Matrix> past_llt(s11);
      if (past_llt.info() != Eigen::Success) {
        throw Error(ErrorCode::numerical_failure, "singular history covariance");
      }
      sampler.gain = past_llt.solve(s21.transpose()).transpose();
      cond -= sampler.gain * s21.transpose();
    } else {
      sampler.gain = Matrix(n, 0);
    }
    cond = (0.5 * (cond + cond.transpose())).eval();
    Eigen::LLT<Matrix> cond_llt(cond);
    if (cond_llt.info() != Eigen::Success) {
      throw Error(ErrorCode::numerical_failure, "conditional covariance is not positive definite");
    }
    sampler.noise = cond_llt.matrixL();
    samplers.push_back(std::move(sampler));
  }
  return samplers;
}

const std::array<Preset, 4>& preset_table() {
  static const std::array<Preset, 4> table{{
      {"1,2,1", {0, 1, 0}, 2},
      {"1,2,3,2,1", {0, 1, 2, 1, 0}, 3},
      {"1,2,3,4,1,2,3,4", {0, 1, 2, 3, 0, 1, 2, 3}, 4},
      {"1,2,2,1,3,3,3,1", {0, 1, 1, 0, 2, 2, 2, 0}, 3},
  }};
  return table;
}

}  // namespace

BlockToeplitzMatrix random_toeplitz_precision(Index n, Index w, double p_edge,
                                              std::uint64_t seed) {
  if (n < 1 || w < 1) throw Error(ErrorCode::invalid_argument, "n and w must be positive");
  if (!(p_edge >= 0.0 && p_edge <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "edge probability must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Matrix> blocks(static_cast<std::size_t>(w), Matrix::Zero(n, n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p_edge)) {
        const double v = edge_weight(rng);
        blocks[0](i, j) = v;
        blocks[0](j, i) = v;
      }
    }
  }
  for (Index m = 1; m < w; ++m) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (rng.bernoulli(p_edge)) blocks[static_cast<std::size_t>(m)](i, j) = edge_weight(rng);
      }
    }
  }

  const Matrix g = BlockToeplitzMatrix(blocks).assemble();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  blocks[0].diagonal().array() += 0.1 + std::abs(smallest);
  return BlockToeplitzMatrix(std::move(blocks));
}

GroundTruth generate_sequence(std::span<const Segment> segments,
                              std::span<const BlockToeplitzMatrix> thetas, std::uint64_t seed) {
  if (segments.empty()) throw Error(ErrorCode::invalid_argument, "segment list is empty");
  if (thetas.empty()) throw Error(ErrorCode::invalid_argument, "no cluster models given");
  const Index n = thetas.front().n();
  const Index w = thetas.front().w();
  for (const BlockToeplitzMatrix& t : thetas) {
    if (t.n() != n || t.w() != w) {
      throw Error(ErrorCode::dimension_mismatch, "all cluster models must share n and w");
    }
  }
  Index total = 0;
  for (const Segment& s : segments) {
    if (s.length < 1) throw Error(ErrorCode::invalid_argument, "segment lengths must be >= 1");
    if (s.cluster < 0 || s.cluster >= static_cast<int>(thetas.size())) {
      std::ostringstream msg;
      msg << "segment refers to cluster " << s.cluster << " but only " << thetas.size()
          << " models were given";
      throw Error(ErrorCode::invalid_argument, msg.str());
    }
    total += s.length;
  }

  std::vector<std::vector<ConditionalSampler>> samplers;
  samplers.reserve(thetas.size());
  for (const BlockToeplitzMatrix& t : thetas) samplers.push_back(conditional_samplers(t));

  Rng rng(seed);
  Matrix data(total, n);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Vector noise(n);
  Vector past;
  Index t = 0;
  for (const Segment& s : segments) {
    for (Index step = 0; step < s.length; ++step, ++t) {
      const Index history = std::min(t, w - 1);
      const ConditionalSampler& sampler =
          samplers[static_cast<std::size_t>(s.cluster)][static_cast<std::size_t>(history)];
      for (Index c = 0; c < n; ++c) noise(c) = rng.normal();
      Vector x = sampler.noise * noise;
      if (history > 0) {
        past.resize(history * n);
        for (Index h = 0; h < history; ++h) {
          past.segment(h * n, n) = data.row(t - history + h).transpose();
        }
        x += sampler.gain * past;
      }
      data.row(t) = x.transpose();
      labels.push_back(s.cluster);
    }
  }

  return GroundTruth{std::vector<BlockToeplitzMatrix>(thetas.begin(), thetas.end()),
                     std::move(labels), TimeSeries(std::move(data)),
                     std::vector<Segment>(segments.begin(), segments.end())};
}

std::span<const Preset> presets() { return preset_table(); }

const Preset& find_preset(std::string_view name) {
  for (const Preset& p : preset_table()) {
    if (p.name == name) return p;
  }
  std::ostringstream msg;
  msg << "unknown preset '" << name << "'; valid presets:";
  for (const Preset& p : preset_table()) msg << " \"" << p.name << '"';
  throw Error(ErrorCode::unknown_preset, msg.str());
}

std::vector<Segment> preset_segments(const Preset& preset, Index samples_per_segment) {
  const Index length = samples_per_segment > 0 ? samples_per_segment : 100 * preset.num_clusters;
  std::vector<Segment> segments;
  for (const int cluster : preset.order) segments.push_back({cluster, length});
  return segments;
}

GroundTruth generate_segments(std::span<const Segment> segments, Index n, Index w, double p_edge,
                              std::uint64_t seed) {
  int num_clusters = 0;
  for (const Segment& s : segments) num_clusters = std::max(num_clusters, s.cluster + 1);
  std::vector<BlockToeplitzMatrix> thetas;
  for (int k = 0; k < num_clusters; ++k) {
    thetas.push_back(random_toeplitz_precision(
        n, w, p_edge, derive_seed(seed, kThetaStreamBase + static_cast<std::uint64_t>(k))));
  }
  return generate_sequence(segments, thetas, derive_seed(seed, kSeriesStream));
}

GroundTruth generate_preset(const Preset& preset, Index n, Index w, double p_edge,
                            std::uint64_t seed, Index samples_per_segment) {
  const std::vector<Segment> segments = preset_segments(preset, samples_per_segment);
  return generate_segments(segments, n, w, p_edge, seed);
}

}  // namespace ticc
