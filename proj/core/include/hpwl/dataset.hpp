#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hpwl {

/// A tabular dataset: rows are samples, columns are features.
/// Entries are guaranteed finite after loading; labels, when present,
/// are integer class codes of length rows().
struct DataMatrix {
  Eigen::MatrixXd values;
  std::optional<Eigen::VectorXi> labels;
  std::optional<std::vector<std::string>> feature_names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// A disjoint train/test partition of row indices.
struct Split {
  std::vector<Eigen::Index> train_indices;
  std::vector<Eigen::Index> test_indices;
  std::uint64_t seed = 0;
};

/// Column-wise centering/scaling transform fitted on one matrix and
/// applicable to another (train statistics applied to a test half).
/// Zero-variance columns are mapped to all-zero columns.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd inv_scale;  // 0 for zero-variance columns

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Loads a comma-delimited UTF-8 text file. When `label_column` is set it is
/// resolved against the header (if any) or parsed as a 0-based column index;
/// that column is extracted as integer labels and removed from the features.
/// Throws LoadError on malformed content (naming the offending row/column)
/// and ConfigError when the label column cannot be resolved.
DataMatrix load_csv(const std::filesystem::path& path, bool has_header,
                    const std::optional<std::string>& label_column = std::nullopt);

/// Centers every column to mean 0 and scales non-constant columns to unit
/// standard deviation (population convention, divisor n). Constant columns
/// become all-zero. Idempotent up to floating-point tolerance.
DataMatrix standardize(const DataMatrix& x);

/// Deterministic 50/50 split: ceil(n/2) training rows, the rest test.
Split split_half(const DataMatrix& x, std::uint64_t seed);

}  // namespace hpwl
