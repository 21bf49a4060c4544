#pragma once

#include "ticc/timeseries.hpp"
#include "ticc/toeplitz.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ticc {

struct Segment {
  int cluster = 0;
  Index length = 0;
  bool operator==(const Segment&) const = default;
};

struct GroundTruth {
  std::vector<BlockToeplitzMatrix> thetas;
  std::vector<int> labels;
  TimeSeries series;
  std::vector<Segment> segments;
};

/// Random sparse precision matrix:
///  1. A0 upper-triangle entries and every entry of A1..A(w-1) are edges
///     independently with probability p_edge;
///  2. edge weights are uniform on [-1, -0.25] U [0.25, 1] (A0 mirrored);
///  3. the assembled matrix G is shifted by (0.1 + |lambda_min(G)|) I.
/// The result has smallest eigenvalue 0.1.
BlockToeplitzMatrix random_toeplitz_precision(Index n, Index w, double p_edge,
                                              std::uint64_t seed);

/// Draws each x_t from the conditional Gaussian of the newest observation
/// given the previous w-1 under N(0, Theta_k^{-1}) of the active segment's
/// cluster. History carries across segment boundaries; the first w-1
/// samples condition on however much history exists.
GroundTruth generate_sequence(std::span<const Segment> segments,
                              std::span<const BlockToeplitzMatrix> thetas, std::uint64_t seed);

struct Preset {
  std::string_view name;
  std::vector<int> order;  // 0-based cluster ids
  int num_clusters = 0;
};

std::span<const Preset> presets();
/// Throws Error(unknown_preset) listing the valid names.
const Preset& find_preset(std::string_view name);

/// samples_per_segment == 0 selects 100 * K.
std::vector<Segment> preset_segments(const Preset& preset, Index samples_per_segment = 0);

/// Thetas and the series are drawn from independent streams of `seed`.
GroundTruth generate_preset(const Preset& preset, Index n, Index w, double p_edge,
                            std::uint64_t seed, Index samples_per_segment = 0);

/// Same, for an explicit segment list; K is one past the largest id.
GroundTruth generate_segments(std::span<const Segment> segments, Index n, Index w,
                              double p_edge, std::uint64_t seed);

}  // namespace ticc
