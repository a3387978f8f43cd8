#pragma once

// Exact integer and rational matrix algebra.
//
// Vector convention used throughout the library: coordinates are column
// vectors, a Gram matrix G defines (x, y) = x^T G y, and an integer matrix g is
// an isometry iff g^T G g = G. Sublattice bases are stored as rows of
// ambient coordinates.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "enrinv/errors.hpp"

namespace enrinv {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int numer(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int denom(const Rat& r) { return boost::multiprecision::denominator(r); }

/// Floor division for a positive divisor.
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Representative of a modulo m in [0, m).
inline Int mod_floor(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

inline Int floor(const Rat& r) { return floor_div(numer(r), denom(r)); }
inline Int ceil(const Rat& r) { return -floor(-r); }

/// Representative of r modulo m in [0, m).
inline Rat mod_floor(const Rat& r, const Int& m) { return r - Rat(m * floor(r / Rat(m))); }

inline bool is_integral(const Rat& r) { return denom(r) == 1; }

inline long long to_ll(const Int& v) { return v.convert_to<long long>(); }

inline std::string to_string(const Int& v) { return v.str(); }
inline std::string to_string(const Rat& v) {
  return denom(v) == 1 ? numer(v).str() : numer(v).str() + "/" + denom(v).str();
}

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) fail(ErrorKind::InvalidArgument, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) fail(ErrorKind::InvalidArgument, "row length mismatch");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& v) { return v == 0; });
  }

  Matrix scaled(const T& s) const {
    Matrix m = *this;
    for (auto& v : m.data_) v *= s;
    return m;
  }

  /// Rows [r0, r0 + nr) and columns [c0, c0 + nc).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  Matrix select_rows(const std::vector<std::size_t>& idx) const {
    Matrix m(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(idx[i], j);
    return m;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  /// row[dst] += f * row[src]
  void add_row(std::size_t dst, std::size_t src, const T& f) {
    if (f == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += f * (*this)(src, j);
  }
  /// col[dst] += f * col[src]
  void add_col(std::size_t dst, std::size_t src, const T& f) {
    if (f == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += f * (*this)(i, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) fail(ErrorKind::InvalidArgument, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(ErrorKind::InvalidArgument, "shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(ErrorKind::InvalidArgument, "shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << "[";
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << to_string(m(i, j));
      os << "]";
    }
    return os << "]";
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMat = Matrix<Int>;
using RatMat = Matrix<Rat>;

inline RatMat to_rat(const IntMat& m) {
  RatMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

/// The integer matrix equal to m, or nothing if some entry is fractional.
inline std::optional<IntMat> to_int(const RatMat& m) {
  IntMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integral(m(i, j))) return std::nullopt;
      r(i, j) = numer(m(i, j));
    }
  return r;
}

template <class T>
Matrix<T> vstack(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) fail(ErrorKind::InvalidArgument, "vstack column mismatch");
  Matrix<T> m(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, j) = b(i, j);
  return m;
}

template <class T>
Matrix<T> block_diag(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, a.cols() + j) = b(i, j);
  return m;
}

/// Row vector times matrix.
template <class T>
std::vector<T> row_times(const std::vector<T>& x, const Matrix<T>& m) {
  std::vector<T> y(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += x[i] * m(i, j);
  }
  return y;
}

/// Matrix times column vector.
template <class T>
std::vector<T> times_col(const Matrix<T>& m, const std::vector<T>& x) {
  std::vector<T> y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

// ---------------------------------------------------------------------------
// Determinant, rank, inverse

/// Fraction-free (Bareiss) determinant.
inline Int determinant(const IntMat& m) {
  if (!m.is_square()) fail(ErrorKind::InvalidArgument, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMat a = m;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

inline std::size_t rank(const RatMat& m) {
  RatMat a = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(r, p);
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      Rat f = a(i, c) / a(r, c);
      a.add_row(i, r, -f);
    }
    ++r;
  }
  return r;
}

inline std::size_t rank(const IntMat& m) { return rank(to_rat(m)); }

inline RatMat inverse(const RatMat& m) {
  if (!m.is_square()) fail(ErrorKind::InvalidArgument, "inverse of non-square matrix");
  const std::size_t n = m.rows();
  RatMat a = m;
  RatMat inv = RatMat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) fail(ErrorKind::DegenerateForm, "singular matrix");
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    Rat piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rat f = -a(i, c);
      a.add_row(i, c, f);
      inv.add_row(i, c, f);
    }
  }
  return inv;
}

inline RatMat inverse(const IntMat& m) { return inverse(to_rat(m)); }

// ---------------------------------------------------------------------------
// Smith and Hermite normal forms

struct SmithForm {
  IntMat D;  ///< diagonal, d1 | d2 | ..., nonnegative
  IntMat U;  ///< unimodular, rows x rows
  IntMat V;  ///< unimodular, cols x cols
  std::size_t rank = 0;

  /// Nonzero diagonal entries.
  std::vector<Int> diagonal() const {
    std::vector<Int> d;
    for (std::size_t i = 0; i < rank; ++i) d.push_back(D(i, i));
    return d;
  }
};

/// U * M * V = D. The transforms are not canonical beyond the divisibility chain.
inline SmithForm smith_normal_form(const IntMat& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMat a = m;
  IntMat u = IntMat::identity(rows);
  IntMat v = IntMat::identity(cols);
  const std::size_t lim = std::min(rows, cols);
  std::size_t t = 0;
  for (; t < lim; ++t) {
    bool any = false;
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pi = rows, pj = cols;
      Int best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (a(i, j) == 0) continue;
          Int av = abs(a(i, j));
          if (pi == rows || av < best) {
            best = av;
            pi = i;
            pj = j;
          }
        }
      if (pi == rows) break;
      any = true;
      a.swap_rows(t, pi);
      u.swap_rows(t, pi);
      a.swap_cols(t, pj);
      v.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        Int q = a(i, t) / a(t, t);
        a.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        Int q = a(t, j) / a(t, t);
        a.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a(i, j) % a(t, t) != 0) {
            a.add_row(t, i, 1);
            u.add_row(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (!any) break;
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
  }
  return SmithForm{std::move(a), std::move(u), std::move(v), t};
}

/// Row-style Hermite normal form of the row lattice of m: nonzero rows only,
/// positive pivots, entries above each pivot reduced into [0, pivot).
inline IntMat hermite_normal_form(const IntMat& m) {
  IntMat a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    for (;;) {
      std::size_t p = rows;
      for (std::size_t i = r; i < rows; ++i)
        if (a(i, c) != 0 && (p == rows || abs(a(i, c)) < abs(a(p, c)))) p = i;
      if (p == rows) break;
      a.swap_rows(r, p);
      bool done = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (a(i, c) == 0) continue;
        Int q = a(i, c) / a(r, c);
        a.add_row(i, r, -q);
        if (a(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (r < rows && a(r, c) != 0) {
      if (a(r, c) < 0) a.negate_row(r);
      for (std::size_t i = 0; i < r; ++i) {
        Int q = floor_div(a(i, c), a(r, c));
        a.add_row(i, r, -q);
      }
      ++r;
    }
  }
  return a.block(0, 0, r, cols);
}

// ---------------------------------------------------------------------------
// Lattice-flavoured integer linear algebra

/// Number of positive and negative eigenvalues of a nondegenerate symmetric
/// matrix, by exact congruence diagonalization over the rationals.
inline std::pair<std::size_t, std::size_t> signature(const IntMat& g) {
  if (!g.is_symmetric()) fail(ErrorKind::InvalidArgument, "signature of non-symmetric matrix");
  if (determinant(g) == 0) fail(ErrorKind::DegenerateForm, "signature of a degenerate form");
  RatMat a = to_rat(g);
  const std::size_t n = a.rows();
  std::size_t pos = 0, neg = 0;
  auto swap_sym = [&a](std::size_t i, std::size_t j) {
    a.swap_rows(i, j);
    a.swap_cols(i, j);
  };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a(p, p) == 0) ++p;
    if (p == n) {
      // all remaining diagonal entries vanish: x_i -> x_i + x_j makes a_ii = 2 a_ij
      bool moved = false;
      for (std::size_t i = k; i < n && !moved; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (i != j && a(i, j) != 0) {
            a.add_row(i, j, 1);
            a.add_col(i, j, 1);
            p = i;
            moved = true;
            break;
          }
      if (!moved) fail(ErrorKind::DegenerateForm, "signature of a degenerate form");
    }
    swap_sym(k, p);
    const Rat piv = a(k, k);
    (piv > 0 ? pos : neg) += 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      const Rat f = a(i, k) / piv;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) = a(k, i) = 0;
  }
  return {pos, neg};
}

/// Basis (rows) of the saturation Q B ∩ Z^n of the row lattice of b.
inline IntMat saturate(const IntMat& b, std::size_t ambient_rank) {
  if (b.cols() != ambient_rank) fail(ErrorKind::InvalidArgument, "saturate: column count mismatch");
  const std::size_t k = b.rows();
  if (k == 0) return IntMat(0, ambient_rank);
  if (rank(b) != k) fail(ErrorKind::DependentRows, "saturate: rows are linearly dependent");
  // U B V = D  =>  B = U^-1 D V^-1, so the first k rows of V^-1 span Q B ∩ Z^n.
  SmithForm s = smith_normal_form(b);
  auto vinv = to_int(inverse(s.V));
  if (!vinv) fail(ErrorKind::InvalidArgument, "saturate: non-unimodular transform");
  return hermite_normal_form(vinv->block(0, 0, k, ambient_rank));
}

/// Basis (rows) of the integer left kernel {x : x M = 0}.
inline IntMat kernel_basis(const IntMat& m) {
  SmithForm s = smith_normal_form(m);
  const std::size_t n = m.rows();
  if (s.rank == n) return IntMat(0, n);
  return hermite_normal_form(s.U.block(s.rank, 0, n - s.rank, n));
}

/// Integer solution x of x B = y for a square nonsingular B, if one exists.
inline std::optional<std::vector<Int>> solve_row(const RatMat& binv, const std::vector<Int>& y) {
  std::vector<Rat> yr(y.begin(), y.end());
  std::vector<Rat> x = row_times(yr, binv);
  std::vector<Int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!is_integral(x[i])) return std::nullopt;
    out[i] = numer(x[i]);
  }
  return out;
}

}  // namespace enrinv
