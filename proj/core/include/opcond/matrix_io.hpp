#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <filesystem>

namespace opcond {

/// Binary dense format: 8-byte little-endian dimension n, then n*n little-endian doubles, row-major.
/// @throws Error(io) on failure.
void write_dense_binary(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
/// @throws Error(io) on failure or truncated data, Error(shape_mismatch) for non-square input on write.
Eigen::MatrixXd read_dense_binary(const std::filesystem::path& path);

/// Coordinate text format: "rows cols nnz" header, then one "row col value" line per entry (0-based).
void write_coordinate(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
void write_coordinate(const std::filesystem::path& path, const Eigen::SparseMatrix<double>& matrix);
void write_coordinate(const std::filesystem::path& path, const Eigen::VectorXd& diagonal_entries);
Eigen::MatrixXd read_coordinate(const std::filesystem::path& path);

}  // namespace opcond
