#include "ticc/toeplitz.hpp"

#include "ticc/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace ticc {

BlockToeplitzMatrix::BlockToeplitzMatrix(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) {
    throw Error(ErrorCode::invalid_argument, "block-Toeplitz matrix needs at least one block");
  }
  const Index n = blocks_.front().rows();
  if (n < 1) throw Error(ErrorCode::invalid_argument, "blocks must be non-empty");
  for (const Matrix& b : blocks_) {
    if (b.rows() != n || b.cols() != n) {
      throw Error(ErrorCode::dimension_mismatch, "every block must be n x n");
    }
  }
  Matrix& a0 = blocks_.front();
  const double asymmetry = (a0 - a0.transpose()).cwiseAbs().maxCoeff();
  if (!(asymmetry <= kSymmetryTolerance)) {
    std::ostringstream msg;
    msg << "diagonal block is not symmetric (max deviation " << asymmetry << ")";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  a0 = (0.5 * (a0 + a0.transpose())).eval();
}

BlockToeplitzMatrix BlockToeplitzMatrix::identity(Index n, Index w) {
  std::vector<Matrix> blocks(static_cast<std::size_t>(w), Matrix::Zero(n, n));
  blocks.front().setIdentity();
  return BlockToeplitzMatrix(std::move(blocks));
}

Matrix BlockToeplitzMatrix::assemble() const {
  const Index bn = n();
  const Index bw = w();
  Matrix out(bn * bw, bn * bw);
  for (Index r = 0; r < bw; ++r) {
    for (Index c = 0; c < bw; ++c) {
      if (c >= r) {
        out.block(r * bn, c * bn, bn, bn) = block(c - r);
      } else {
        out.block(r * bn, c * bn, bn, bn) = block(r - c).transpose();
      }
    }
  }
  return out;
}

bool BlockToeplitzMatrix::operator==(const BlockToeplitzMatrix& other) const {
  if (w() != other.w() || n() != other.n()) return false;
  for (std::size_t m = 0; m < blocks_.size(); ++m) {
    if (blocks_[m] != other.blocks_[m]) return false;
  }
  return true;
}

std::vector<OccurrenceSet> occurrence_sets(Index n, Index w) {
  if (n < 1 || w < 1) throw Error(ErrorCode::invalid_argument, "n and w must be positive");
  std::vector<OccurrenceSet> sets;
  sets.reserve(static_cast<std::size_t>((w - 1) * n * n + n * (n + 1) / 2));
  for (Index m = 0; m < w; ++m) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = (m == 0 ? i : 0); j < n; ++j) {
        OccurrenceSet set{m, i, j, {}};
        const bool diagonal = (m == 0 && i == j);
        set.positions.reserve(static_cast<std::size_t>(diagonal ? w : 2 * (w - m)));
        for (Index r = 0; r + m < w; ++r) {
          const Position upper{r * n + i, (r + m) * n + j};
          set.positions.push_back(upper);
          if (!diagonal) set.positions.push_back({upper.col, upper.row});
        }
        sets.push_back(std::move(set));
      }
    }
  }
  return sets;
}

std::shared_ptr<const std::vector<OccurrenceSet>> shared_occurrence_sets(Index n, Index w) {
  static std::mutex mutex;
  static std::map<std::pair<Index, Index>, std::shared_ptr<const std::vector<OccurrenceSet>>>
      cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, w}];
  if (!slot) slot = std::make_shared<const std::vector<OccurrenceSet>>(occurrence_sets(n, w));
  return slot;
}

BlockToeplitzMatrix nearest_toeplitz(const Matrix& m, Index n, Index w) {
  if (n < 1 || w < 1 || m.rows() != n * w || m.cols() != n * w) {
    throw Error(ErrorCode::dimension_mismatch, "matrix is not (n*w) x (n*w)");
  }
  std::vector<Matrix> blocks(static_cast<std::size_t>(w), Matrix::Zero(n, n));
  for (const OccurrenceSet& set : *shared_occurrence_sets(n, w)) {
    double sum = 0.0;
    for (const Position& p : set.positions) sum += m(p.row, p.col);
    const double mean = sum / static_cast<double>(set.count());
    Matrix& block = blocks[static_cast<std::size_t>(set.block)];
    block(set.i, set.j) = mean;
    if (set.block == 0) block(set.j, set.i) = mean;
  }
  return BlockToeplitzMatrix(std::move(blocks));
}

BlockToeplitzMatrix toeplitz_from_dense(const Matrix& m, Index n, Index w) {
  if (n < 1 || w < 1 || m.rows() != n * w || m.cols() != n * w) {
    throw Error(ErrorCode::dimension_mismatch, "matrix is not (n*w) x (n*w)");
  }
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(w));
  for (Index b = 0; b < w; ++b) blocks.emplace_back(m.block(0, b * n, n, n));
  return BlockToeplitzMatrix(std::move(blocks));
}

double support_threshold(const BlockToeplitzMatrix& theta) {
  double largest = 0.0;
  for (Index m = 0; m < theta.w(); ++m) {
    const Matrix& b = theta.block(m);
    for (Index i = 0; i < theta.n(); ++i) {
      for (Index j = 0; j < theta.n(); ++j) {
        if (m == 0 && i == j) continue;
        largest = std::max(largest, std::abs(b(i, j)));
      }
    }
  }
  return kSupportRelativeThreshold * largest;
}

std::vector<BlockEntry> support(const BlockToeplitzMatrix& theta, bool include_diagonal) {
  const double threshold = support_threshold(theta);
  std::vector<BlockEntry> entries;
  for (Index m = 0; m < theta.w(); ++m) {
    const Matrix& b = theta.block(m);
    for (Index i = 0; i < theta.n(); ++i) {
      for (Index j = (m == 0 ? i : 0); j < theta.n(); ++j) {
        if (m == 0 && i == j && !include_diagonal) continue;
        if (std::abs(b(i, j)) > threshold) entries.push_back({m, i, j});
      }
    }
  }
  return entries;
}

}  // namespace ticc
