#pragma once

#include "ticc/timeseries.hpp"

#include <memory>
#include <span>
#include <vector>

namespace ticc {

/// Symmetric block-Toeplitz matrix of w blocks, each n x n.
///
/// Block m sits on the m-th block super-diagonal of the assembled
/// (n*w) x (n*w) matrix; its transpose fills the m-th sub-diagonal:
///
///   [ A0    A1    A2  ... ]
///   [ A1^T  A0    A1  ... ]
///   [ A2^T  A1^T  A0  ... ]
///
/// A0 is symmetrized on construction.
class BlockToeplitzMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-10;

  /// Throws if blocks is empty, blocks are not all n x n, or A0 deviates
  /// from symmetry by more than kSymmetryTolerance.
  explicit BlockToeplitzMatrix(std::vector<Matrix> blocks);

  /// n x n identity on the diagonal, zero elsewhere.
  static BlockToeplitzMatrix identity(Index n, Index w);

  Index n() const noexcept { return blocks_.front().rows(); }
  Index w() const noexcept { return static_cast<Index>(blocks_.size()); }
  Index dim() const noexcept { return n() * w(); }

  const Matrix& block(Index m) const { return blocks_.at(static_cast<std::size_t>(m)); }
  const std::vector<Matrix>& blocks() const noexcept { return blocks_; }

  Matrix assemble() const;

  bool operator==(const BlockToeplitzMatrix& other) const;

 private:
  std::vector<Matrix> blocks_;
};

struct Position {
  Index row = 0;
  Index col = 0;
  bool operator==(const Position&) const = default;
};

/// Every assembled-matrix position that shares the value of entry (i, j) of
/// block m. For m == 0 only i <= j is represented.
struct OccurrenceSet {
  Index block = 0;
  Index i = 0;
  Index j = 0;
  std::vector<Position> positions;

  Index count() const noexcept { return static_cast<Index>(positions.size()); }
};

/// All (w-1)n^2 + n(n+1)/2 occurrence sets, ordered by block, then row-major
/// (i, j). Together they partition the (n*w)^2 index grid.
std::vector<OccurrenceSet> occurrence_sets(Index n, Index w);

/// Process-wide cached copy of occurrence_sets(n, w).
std::shared_ptr<const std::vector<OccurrenceSet>> shared_occurrence_sets(Index n, Index w);

/// Frobenius projection onto symmetric block-Toeplitz matrices: every block
/// entry is the mean of `m` over its occurrence set.
BlockToeplitzMatrix nearest_toeplitz(const Matrix& m, Index n, Index w);

/// Reads the blocks of a matrix that is already exactly block Toeplitz
/// (first block row). Does not check the structure.
BlockToeplitzMatrix toeplitz_from_dense(const Matrix& m, Index n, Index w);

/// Relative magnitude below which a block entry counts as numerically zero:
/// 1e-3 * max |entry| over every entry except the diagonal of A0.
inline constexpr double kSupportRelativeThreshold = 1e-3;
double support_threshold(const BlockToeplitzMatrix& theta);

/// A unique free parameter of a block-Toeplitz matrix.
struct BlockEntry {
  Index block = 0;
  Index i = 0;
  Index j = 0;
  auto operator<=>(const BlockEntry&) const = default;
};

/// Unique entries above support_threshold: the upper triangle of A0
/// (diagonal included when include_diagonal) and every entry of A1..A(w-1).
std::vector<BlockEntry> support(const BlockToeplitzMatrix& theta, bool include_diagonal);

}  // namespace ticc
