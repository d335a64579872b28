// Exact dense linear algebra.
//
// QMat: matrices over the Gaussian rationals with fraction-free-free (plain
// exact pivoting) Gauss elimination: rank, nullspace, solve, inverse.
// GMat: matrices over the Grassmann algebra whose inverse (when the scalar
// body is invertible) is obtained from the body inverse and a terminating
// Neumann series in the nilpotent remainder.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "sugra/grassmann.hpp"
#include "sugra/rational.hpp"

namespace sugra {

class QMat {
 public:
  QMat() = default;
  QMat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

  static QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = grat(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  GaussianRational& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  const GaussianRational& operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

  QMat transpose() const {
    QMat t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend QMat operator*(const QMat& a, const QMat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("QMat: dimension mismatch in product");
    QMat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  friend QMat operator+(QMat a, const QMat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("QMat: dimension mismatch in sum");
    for (size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend QMat operator-(QMat a, const QMat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("QMat: dimension mismatch in difference");
    for (size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend QMat operator*(const GaussianRational& s, QMat a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }
  friend bool operator==(const QMat& a, const QMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

  // Reduced row echelon form; returns pivot columns.
  std::vector<int> rref() {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
      int pr = -1;
      for (int i = r; i < rows_; ++i) {
        if (!(*this)(i, c).is_zero()) {
          pr = i;
          break;
        }
      }
      if (pr == -1) continue;
      if (pr != r)
        for (int j = 0; j < cols_; ++j) std::swap((*this)(pr, j), (*this)(r, j));
      GaussianRational inv = (*this)(r, c).inverse();
      for (int j = 0; j < cols_; ++j) (*this)(r, j) *= inv;
      for (int i = 0; i < rows_; ++i) {
        if (i == r || (*this)(i, c).is_zero()) continue;
        GaussianRational f = (*this)(i, c);
        for (int j = 0; j < cols_; ++j) (*this)(i, j) -= f * (*this)(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  int rank() const {
    QMat copy = *this;
    return int(copy.rref().size());
  }

  // Basis of the right kernel, one column vector per basis element.
  std::vector<std::vector<GaussianRational>> nullspace() const {
    QMat m = *this;
    std::vector<int> pivots = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<GaussianRational>> basis;
    for (int c = 0; c < cols_; ++c) {
      if (is_pivot[c]) continue;
      std::vector<GaussianRational> v(cols_);
      v[c] = grat(1);
      for (size_t r = 0; r < pivots.size(); ++r) {
        // Row r of the rref reads x_{pivots[r]} + sum(free) = 0.
        v[pivots[r]] = -m(int(r), c);
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  std::optional<QMat> inverse() const {
    if (rows_ != cols_) return std::nullopt;
    QMat aug(rows_, 2 * cols_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
      aug(r, cols_ + r) = grat(1);
    }
    if (int(aug.rref().size()) != rows_) return std::nullopt;
    QMat inv(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) inv(r, c) = aug(r, cols_ + c);
    return inv;
  }

  // Solves A x = b exactly; empty optional when inconsistent.  When the
  // kernel is nontrivial returns one particular solution.
  std::optional<std::vector<GaussianRational>> solve(const std::vector<GaussianRational>& b) const {
    if (int(b.size()) != rows_) throw std::invalid_argument("QMat::solve: size mismatch");
    QMat aug(rows_, cols_ + 1);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
      aug(r, cols_) = b[r];
    }
    std::vector<int> pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;  // row (0..0 | 1)
    std::vector<GaussianRational> x(cols_);
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(int(r), cols_);
    return x;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<GaussianRational> data_;
};

class GMat {
 public:
  GMat() = default;
  GMat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}

  static GMat identity(int n) {
    GMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Grassmann(grat(1));
    return m;
  }
  static GMat lift(const QMat& q) {
    GMat m(q.rows(), q.cols());
    for (int r = 0; r < q.rows(); ++r)
      for (int c = 0; c < q.cols(); ++c) m(r, c) = Grassmann(q(r, c));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Grassmann& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  const Grassmann& operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

  QMat body() const {
    QMat q(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) q(r, c) = (*this)(r, c).body();
    return q;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

  friend GMat operator*(const GMat& a, const GMat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("GMat: dimension mismatch in product");
    GMat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) {
          if (b(k, j).is_zero()) continue;
          r(i, j) += a(i, k) * b(k, j);
        }
      }
    return r;
  }
  friend GMat operator-(GMat a, const GMat& b) {
    for (size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  // Inverse for matrices with entries of even parity (so entries commute)
  // and invertible body.  A = B + S with S nilpotent entrywise:
  // A^{-1} = (sum_k (-B^{-1} S)^k) B^{-1}, a finite sum.
  std::optional<GMat> inverse() const {
    if (rows_ != cols_) return std::nullopt;
    std::optional<QMat> binv_q = body().inverse();
    if (!binv_q) return std::nullopt;
    GMat binv = lift(*binv_q);
    GMat s = *this - lift(body());
    GMat n = binv * s;  // entrywise nilpotent
    // (I + N)^{-1} = I - N + N^2 - ... (finite).
    GMat acc = identity(rows_);
    GMat pow = identity(rows_);
    int sign = -1;
    while (true) {
      pow = pow * n;
      if (pow.is_zero()) break;
      for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) {
          if (sign > 0)
            acc(r, c) += pow(r, c);
          else
            acc(r, c) -= pow(r, c);
        }
      sign = -sign;
    }
    return acc * binv;
  }

  // Solves A x = y for column vector y (entries even-parity, invertible body).
  std::vector<Grassmann> solve(const std::vector<Grassmann>& y) const {
    std::optional<GMat> inv = inverse();
    if (!inv) throw std::domain_error("GMat::solve: body not invertible");
    if (int(y.size()) != rows_) throw std::invalid_argument("GMat::solve: size mismatch");
    std::vector<Grassmann> x(cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) x[r] += (*inv)(r, c) * y[c];
    return x;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Grassmann> data_;
};

}  // namespace sugra
