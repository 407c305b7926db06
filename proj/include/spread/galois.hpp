#pragma once

// Arithmetic over GF(2^w) for 2 <= w <= 16, Cauchy matrices, and exact
// linear solves in the row-vector convention x * A = b.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spread {

using Symbol = std::uint16_t;

class FieldError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GaloisField {
 public:
  static constexpr unsigned kMinWidth = 2;
  static constexpr unsigned kMaxWidth = 16;

  explicit GaloisField(unsigned width = 16);

  // Shared instance per width. Tables are built once on first use.
  static const GaloisField& instance(unsigned width);

  unsigned width() const { return width_; }
  std::uint32_t order() const { return std::uint32_t{1} << width_; }
  std::uint32_t polynomial() const { return polynomial_; }

  Symbol add(Symbol a, Symbol b) const { return a ^ b; }
  Symbol sub(Symbol a, Symbol b) const { return a ^ b; }

  Symbol mul(Symbol a, Symbol b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  // Throws FieldError for a == 0.
  Symbol inv(Symbol a) const;
  Symbol div(Symbol a, Symbol b) const;

  bool contains(std::uint32_t value) const { return value < order(); }

 private:
  unsigned width_;
  std::uint32_t polynomial_;
  std::vector<std::uint32_t> log_;
  std::vector<Symbol> exp_;  // doubled so log sums need no reduction
};

// Dense row-major matrix over a GaloisField.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  Symbol& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  Symbol operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Symbol> entries() const { return entries_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Symbol> entries_;
};

// Entry (i, j) = 1 / (xs[i] + ys[j]). All generators must be pairwise distinct.
Matrix cauchy_matrix(const GaloisField& gf, std::span<const Symbol> xs, std::span<const Symbol> ys);

// Default generators x_i = i and y_j = rows + j. Needs rows + cols <= 2^w.
Matrix cauchy_matrix(const GaloisField& gf, std::size_t rows, std::size_t cols);

Matrix submatrix(const Matrix& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

// Row vector times matrix.
std::vector<Symbol> multiply(const GaloisField& gf, std::span<const Symbol> x, const Matrix& a);

// Returns x with x * A = b. A must be square; throws SingularMatrixError when it is not invertible.
std::vector<Symbol> solve_linear(const GaloisField& gf, const Matrix& a, std::span<const Symbol> b);

}  // namespace spread
