#include "opcond/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "opcond/error.hpp"

namespace opcond {

namespace {

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&value, b, sizeof(T));
    return value;
  }
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_dense_binary(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::shape_mismatch, "binary format stores square matrices");
  std::ofstream out = open_out(path, std::ios::binary);
  const auto n = to_little(static_cast<std::uint64_t>(matrix.rows()));
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const double v = to_little(matrix(i, j));
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

Eigen::MatrixXd read_dense_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in) throw Error(ErrorCode::io, "missing dimension header in " + path.string());
  n = to_little(n);
  const auto size = std::filesystem::file_size(path);
  if (size != sizeof(n) + n * n * sizeof(double)) throw Error(ErrorCode::io, "truncated matrix file " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(i, j) = to_little(v);
    }
  return m;
}

void write_coordinate(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out = open_out(path, std::ios::out);
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.size() << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << i << ' ' << j << ' ' << format_double(matrix(i, j)) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

void write_coordinate(const std::filesystem::path& path, const Eigen::SparseMatrix<double>& matrix) {
  std::ofstream out = open_out(path, std::ios::out);
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

void write_coordinate(const std::filesystem::path& path, const Eigen::VectorXd& diagonal_entries) {
  std::ofstream out = open_out(path, std::ios::out);
  const Eigen::Index n = diagonal_entries.size();
  out << n << ' ' << n << ' ' << n << '\n';
  for (Eigen::Index i = 0; i < n; ++i) out << i << ' ' << i << ' ' << format_double(diagonal_entries[i]) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

Eigen::MatrixXd read_coordinate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  long rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0) throw Error(ErrorCode::io, "bad coordinate header");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double v;
    if (!(in >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols)
      throw Error(ErrorCode::io, "bad coordinate entry " + std::to_string(k));
    m(i, j) += v;
  }
  return m;
}

}  // namespace opcond
