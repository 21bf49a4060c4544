#include "ticc/timeseries.hpp"

#include "ticc/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace ticc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc{} || end != cell.data() + cell.size()) {
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": cannot parse '" << cell
        << "' as a number";
    throw Error(ErrorCode::parse_error, msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "line " << line << ", column " << column << ": non-finite value '" << cell << "'";
    throw Error(ErrorCode::parse_error, msg.str());
  }
  return value;
}

}  // namespace

TimeSeries::TimeSeries(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorCode::empty_input, "time series must have at least one row and column");
  }
  if (!data_.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "time series contains non-finite values");
  }
}

SubsequenceMatrix::SubsequenceMatrix(Matrix rows, Index sensor_dim, Index window)
    : rows_(std::move(rows)), sensor_dim_(sensor_dim), window_(window) {
  if (sensor_dim_ < 1 || window_ < 1 || rows_.cols() != sensor_dim_ * window_) {
    throw Error(ErrorCode::dimension_mismatch, "subsequence rows must have n * w columns");
  }
}

TimeSeries load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");

  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (trim(line).empty()) continue;

    std::size_t column = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_cell(rest.substr(0, comma), line_no, column + 1));
      ++column;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      columns = column;
    } else if (column != columns) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << columns << " columns, found " << column;
      throw Error(ErrorCode::ragged_rows, msg.str());
    }
    ++rows;
  }
  if (in.bad()) throw Error(ErrorCode::io_error, "read failure on '" + path.string() + "'");
  if (rows == 0) throw Error(ErrorCode::empty_input, "'" + path.string() + "' has no data rows");

  Matrix data(static_cast<Index>(rows), static_cast<Index>(columns));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      data(static_cast<Index>(r), static_cast<Index>(c)) = values[r * columns + c];
    }
  }
  return TimeSeries(std::move(data));
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  std::array<char, 64> buf{};
  const Matrix& data = series.data();
  for (Index t = 0; t < data.rows(); ++t) {
    for (Index c = 0; c < data.cols(); ++c) {
      if (c > 0) out << ',';
      const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), data(t, c));
      out.write(buf.data(), result.ptr - buf.data());
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::io_error, "write failure on '" + path.string() + "'");
}

SubsequenceMatrix stack_windows(const TimeSeries& series, Index window) {
  const Index T = series.length();
  const Index n = series.dim();
  if (window < 1 || window > T) {
    std::ostringstream msg;
    msg << "window size " << window << " outside [1, " << T << "]";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  Matrix rows(T, n * window);
  for (Index t = 0; t < T; ++t) {
    for (Index slot = 0; slot < window; ++slot) {
      // slot w-1 is the newest observation.
      const Index source = std::max<Index>(t - (window - 1 - slot), 0);
      rows.block(t, slot * n, 1, n) = series.row(source);
    }
  }
  return SubsequenceMatrix(std::move(rows), n, window);
}

EmpiricalStats empirical_stats(const SubsequenceMatrix& subseq, std::span<const Index> members) {
  if (members.empty()) {
    throw Error(ErrorCode::empty_input, "empirical_stats needs at least one member");
  }
  const Index d = subseq.dim();
  EmpiricalStats stats;
  stats.count = static_cast<Index>(members.size());
  stats.mean = Vector::Zero(d);
  for (const Index t : members) {
    if (t < 0 || t >= subseq.length()) {
      throw Error(ErrorCode::invalid_argument, "member index out of range");
    }
    stats.mean += subseq.row(t).transpose();
  }
  stats.mean /= static_cast<double>(stats.count);

  Matrix centered(stats.count, d);
  for (Index r = 0; r < stats.count; ++r) {
    centered.row(r) = subseq.row(members[static_cast<std::size_t>(r)]) - stats.mean.transpose();
  }
  stats.cov = Matrix::Zero(d, d);
  stats.cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  stats.cov.triangularView<Eigen::StrictlyUpper>() =
      stats.cov.triangularView<Eigen::StrictlyLower>().transpose();
  stats.cov /= static_cast<double>(stats.count);
  return stats;
}

}  // namespace ticc
