#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <vector>

#include "advbound/errors.hpp"

namespace advbound {

// Dense row-major matrix of doubles.  All matrices in this library are small
// (|S| <= a few hundred), so everything is kept simple and contiguous.
// Symmetric matrices are built by writing both (x,y) and (y,x) from the same
// value, so symmetry holds exactly, not just within rounding.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  DenseMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw input_error("ragged initializer list");
      for (double v : row) data_.push_back(v);
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool is_square() const noexcept { return rows_ == cols_; }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r + 1; c < cols_; ++c)
        if ((*this)(r, c) != (*this)(c, r)) return false;
    return true;
  }

  bool is_nonnegative() const {
    for (double v : data_)
      if (!(v >= 0.0)) return false;
    return true;
  }

  bool is_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool is_zero() const {
    for (double v : data_)
      if (v != 0.0) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  DenseMatrix transposed() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
  }

  DenseMatrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend DenseMatrix operator*(DenseMatrix m, double s) { return m *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix m) { return m *= s; }

  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "matrix sum");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i)
      out.data_[i] += b.data_[i];
    return out;
  }

  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "matrix difference");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i)
      out.data_[i] -= b.data_[i];
    return out;
  }

  // Plain-text dump: one row per line, single-space separated, 17 significant
  // digits (round-trips a double exactly).
  void dump(std::ostream& os) const {
    char buf[64];
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", (*this)(r, c));
        os << (c ? " " : "") << buf;
      }
      os << '\n';
    }
  }

 private:
  static void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                                 const char* op) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw input_error(std::string(op) + ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Hadamard (entrywise) product.
inline DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw input_error("hadamard product: shape mismatch");
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

// Ordinary matrix product.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw input_error("matrix product: shape mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double ark = a(r, k);
      if (ark == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

// Scalar product A.B = sum_{x,y} A[x,y] B[x,y].
inline double scalar_product(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw input_error("scalar product: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    s += a.data()[i] * b.data()[i];
  return s;
}

// l2 norm of row x.
inline double row_norm(const DenseMatrix& m, std::size_t x) {
  double s = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) s += m(x, c) * m(x, c);
  return std::sqrt(s);
}

// l2 norm of column y.
inline double col_norm(const DenseMatrix& m, std::size_t y) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, y) * m(r, y);
  return std::sqrt(s);
}

// max_x r_x(M)
inline double max_row_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    best = std::max(best, row_norm(m, r));
  return best;
}

// max_y c_y(M)
inline double max_col_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c)
    best = std::max(best, col_norm(m, c));
  return best;
}

inline std::vector<double> matvec(const DenseMatrix& m,
                                  const std::vector<double>& v) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& v) {
  return std::sqrt(dot(v, v));
}

}  // namespace advbound
