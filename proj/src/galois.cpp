#include "spread/galois.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <utility>

namespace spread {

namespace {

// Primitive polynomials, indexed by width. Width 8 uses x^8+x^4+x^3+x^2+1.
constexpr std::array<std::uint32_t, 17> kPrimitive = {
    0,      0,      0x7,    0xB,    0x13,   0x25,   0x43,   0x89,    0x11D,
    0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
};

}  // namespace

GaloisField::GaloisField(unsigned width) : width_(width) {
  if (width < kMinWidth || width > kMaxWidth) {
    throw ConfigError("field width must be in [2, 16], got " + std::to_string(width));
  }
  polynomial_ = kPrimitive[width];
  const std::uint32_t n = order();
  log_.assign(n, 0);
  exp_.assign(2 * n, 0);

  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < n - 1; ++i) {
    if (i > 0 && x == 1) {
      throw ConfigError("reduction polynomial is not primitive for width " + std::to_string(width));
    }
    exp_[i] = static_cast<Symbol>(x);
    log_[x] = i;
    x <<= 1;
    if (x & n) x ^= polynomial_;
  }
  for (std::uint32_t i = n - 1; i < 2 * n; ++i) {
    exp_[i] = exp_[i - (n - 1)];
  }
}

const GaloisField& GaloisField::instance(unsigned width) {
  if (width < kMinWidth || width > kMaxWidth) {
    throw ConfigError("field width must be in [2, 16], got " + std::to_string(width));
  }
  static std::array<std::once_flag, kMaxWidth + 1> once;
  static std::array<std::unique_ptr<GaloisField>, kMaxWidth + 1> fields;
  std::call_once(once[width], [width] { fields[width] = std::make_unique<GaloisField>(width); });
  return *fields[width];
}

Symbol GaloisField::inv(Symbol a) const {
  if (a == 0) throw FieldError("inverse of zero");
  return exp_[(order() - 1) - log_[a]];
}

Symbol GaloisField::div(Symbol a, Symbol b) const {
  if (b == 0) throw FieldError("division by zero");
  if (a == 0) return 0;
  return exp_[log_[a] + (order() - 1) - log_[b]];
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix cauchy_matrix(const GaloisField& gf, std::span<const Symbol> xs, std::span<const Symbol> ys) {
  std::vector<bool> used(gf.order(), false);
  auto claim = [&](Symbol v) {
    if (!gf.contains(v)) throw ConfigError("Cauchy generator outside the field");
    if (used[v]) throw ConfigError("Cauchy generators must be pairwise distinct");
    used[v] = true;
  };
  for (Symbol x : xs) claim(x);
  for (Symbol y : ys) claim(y);

  Matrix a(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      a(i, j) = gf.inv(gf.add(xs[i], ys[j]));
    }
  }
  return a;
}

Matrix cauchy_matrix(const GaloisField& gf, std::size_t rows, std::size_t cols) {
  if (rows + cols > gf.order()) {
    throw ConfigError("GF(2^" + std::to_string(gf.width()) + ") has too few elements for a " +
                      std::to_string(rows) + "x" + std::to_string(cols) + " Cauchy matrix");
  }
  std::vector<Symbol> xs(rows);
  std::vector<Symbol> ys(cols);
  for (std::size_t i = 0; i < rows; ++i) xs[i] = static_cast<Symbol>(i);
  for (std::size_t j = 0; j < cols; ++j) ys[j] = static_cast<Symbol>(rows + j);
  return cauchy_matrix(gf, xs, ys);
}

Matrix submatrix(const Matrix& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(i, j) = a(rows[i], cols[j]);
    }
  }
  return out;
}

std::vector<Symbol> multiply(const GaloisField& gf, std::span<const Symbol> x, const Matrix& a) {
  if (x.size() != a.rows()) throw std::invalid_argument("vector length does not match matrix rows");
  std::vector<Symbol> out(a.cols(), 0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (x[r] == 0) continue;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      out[c] ^= gf.mul(x[r], a(r, c));
    }
  }
  return out;
}

std::vector<Symbol> solve_linear(const GaloisField& gf, const Matrix& a, std::span<const Symbol> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("solve_linear needs a square matrix");
  if (b.size() != n) throw std::invalid_argument("right-hand side length does not match matrix");

  // x * A = b is A^T x^T = b^T. Eliminate on the augmented transpose.
  std::vector<std::vector<Symbol>> rows(n, std::vector<Symbol>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = a(j, i);
    rows[i][n] = b[i];
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && rows[pivot][col] == 0) ++pivot;
    if (pivot == n) throw SingularMatrixError("matrix is singular");
    std::swap(rows[col], rows[pivot]);

    const Symbol scale = gf.inv(rows[col][col]);
    for (auto& v : rows[col]) v = gf.mul(v, scale);

    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || rows[r][col] == 0) continue;
      const Symbol factor = rows[r][col];
      for (std::size_t c = col; c <= n; ++c) {
        rows[r][c] ^= gf.mul(factor, rows[col][c]);
      }
    }
  }

  std::vector<Symbol> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rows[i][n];
  return x;
}

}  // namespace spread
