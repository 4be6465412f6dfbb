#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace edwsvr {

// Dense regression dataset: n rows of d features plus an n-vector of targets.
// All entries are finite; loaders enforce this at the door.
struct Dataset {
  Eigen::MatrixXd features;                // n x d
  Eigen::VectorXd targets;                 // n
  std::vector<std::string> feature_names;  // empty, or exactly d labels
  std::string target_name = "target";

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  // Throws std::invalid_argument on shape/finiteness violations.
  void validate() const;
};

enum class DataFormat { csv, sparse };

// CSV: first row is the header, comma-separated, decimal-point reals.
// Sparse: "<target> <index>:<value> ...", 1-based ascending indices; the
// feature count is the largest index seen in the file. target_column is
// ignored for sparse input.
//
// target_column selects by header name first; if no header matches and the
// string is a nonnegative integer it is taken as a 0-based column index.
Dataset load_dataset(const std::string& path, DataFormat format,
                     const std::string& target_column);

// Mirrors the reader: save then load reproduces every value bit-exactly.
void save_dataset(const Dataset& data, const std::string& path, DataFormat format);

// Row selection in the given order; indices must lie in [0, n).
Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace edwsvr
