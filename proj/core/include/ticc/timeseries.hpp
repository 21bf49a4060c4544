#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <span>

namespace ticc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// T sequential observations of an n-dimensional signal, one per row.
class TimeSeries {
 public:
  /// Throws Error(invalid_argument) on an empty matrix or non-finite entry.
  explicit TimeSeries(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Index length() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }

  /// Observation x_t (0-based).
  auto row(Index t) const { return data_.row(t); }

 private:
  Matrix data_;
};

/// Row t holds the window [x_{t-w+1}, ..., x_t] flattened oldest-first, so
/// the last n entries are always x_t. Windows reaching before the start of
/// the series are left-padded with copies of x_0.
class SubsequenceMatrix {
 public:
  SubsequenceMatrix(Matrix rows, Index sensor_dim, Index window);

  const Matrix& rows() const noexcept { return rows_; }
  Index length() const noexcept { return rows_.rows(); }
  Index window() const noexcept { return window_; }
  Index sensor_dim() const noexcept { return sensor_dim_; }
  /// n * w
  Index dim() const noexcept { return rows_.cols(); }

  auto row(Index t) const { return rows_.row(t); }

 private:
  Matrix rows_;
  Index sensor_dim_;
  Index window_;
};

/// Maximum-likelihood (biased) mean and covariance of a set of windows.
struct EmpiricalStats {
  Vector mean;
  Matrix cov;
  Index count = 0;
};

/// Parses comma-separated decimal values, one observation per line.
/// Errors carry the 1-based line (and column, for bad cells) of the problem.
TimeSeries load_csv(const std::filesystem::path& path, bool has_header = false);

/// Writes shortest round-trip decimal representations; reloading with
/// load_csv reproduces the series bit-exactly.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

SubsequenceMatrix stack_windows(const TimeSeries& series, Index window);

EmpiricalStats empirical_stats(const SubsequenceMatrix& subseq,
                               std::span<const Index> members);

}  // namespace ticc
