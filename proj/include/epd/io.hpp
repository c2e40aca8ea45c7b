#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "epd/types.hpp"

namespace epd {

namespace detail {

inline void require_stream(const std::ios& stream, const std::string& path, const char* action) {
  if (!stream) throw std::runtime_error(std::string(action) + " failed: " + path);
}

}  // namespace detail

/// Writes a dense matrix in MatrixMarket array format (column-major values).
template <typename Scalar>
void save_matrix(const std::string& path, const DenseMatrix<Scalar>& a) {
  std::ofstream out(path);
  detail::require_stream(out, path, "open for write");
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  out << std::scientific << std::setprecision(16);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) out << a(i, j) << "\n";
  detail::require_stream(out, path, "write");
}

/// Reads a dense matrix written by save_matrix (MatrixMarket array format).
template <typename Scalar = double>
DenseMatrix<Scalar> load_matrix(const std::string& path) {
  std::ifstream in(path);
  detail::require_stream(in, path, "open for read");
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("not a MatrixMarket file: " + path);
  if (line.find("array") == std::string::npos)
    throw std::runtime_error("expected array format: " + path);
  do {
    if (!std::getline(in, line)) throw std::runtime_error("missing size line: " + path);
  } while (!line.empty() && line[0] == '%');
  std::istringstream dims(line);
  Index rows = 0, cols = 0;
  if (!(dims >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("bad size line: " + path);
  DenseMatrix<Scalar> a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      if (!(in >> a(i, j))) throw std::runtime_error("truncated matrix data: " + path);
  return a;
}

/// Writes a vector as one value per line.
template <typename Scalar>
void save_vector(const std::string& path, const DenseVector<Scalar>& x) {
  std::ofstream out(path);
  detail::require_stream(out, path, "open for write");
  out << std::scientific << std::setprecision(16);
  for (Index i = 0; i < x.size(); ++i) out << x[i] << "\n";
  detail::require_stream(out, path, "write");
}

/// Reads a vector written by save_vector (one value per line).
template <typename Scalar = double>
DenseVector<Scalar> load_vector(const std::string& path) {
  std::ifstream in(path);
  detail::require_stream(in, path, "open for read");
  std::vector<Scalar> values;
  Scalar value;
  while (in >> value) values.push_back(value);
  if (!in.eof() && in.fail()) throw std::runtime_error("bad vector data: " + path);
  DenseVector<Scalar> x(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) x[static_cast<Index>(i)] = values[i];
  return x;
}

}  // namespace epd
