#pragma once

#include <cassert>
#include <vector>

#include "gl2ode/number.hpp"

namespace gl2ode {

/// Dense matrix over an exact field (Rational, Q3) or over Float.
template <class K>
class Mat {
 public:
  Mat() : r_(0), c_(0) {}
  Mat(std::size_t r, std::size_t c) : r_(r), c_(c), v_(r * c, K()) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = K(1);
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }

  K &operator()(std::size_t i, std::size_t j) {
    assert(i < r_ && j < c_);
    return v_[i * c_ + j];
  }
  const K &operator()(std::size_t i, std::size_t j) const {
    assert(i < r_ && j < c_);
    return v_[i * c_ + j];
  }

  friend Mat operator*(const Mat &a, const Mat &b) {
    assert(a.c_ == b.r_);
    Mat out(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const K &aik = a(i, k);
        if (aik == K(0)) continue;
        for (std::size_t j = 0; j < b.c_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }
  friend Mat operator+(const Mat &a, const Mat &b) {
    assert(a.r_ == b.r_ && a.c_ == b.c_);
    Mat out = a;
    for (std::size_t i = 0; i < out.v_.size(); ++i) out.v_[i] += b.v_[i];
    return out;
  }
  friend Mat operator-(const Mat &a, const Mat &b) {
    assert(a.r_ == b.r_ && a.c_ == b.c_);
    Mat out = a;
    for (std::size_t i = 0; i < out.v_.size(); ++i) out.v_[i] -= b.v_[i];
    return out;
  }
  friend Mat operator*(const K &s, const Mat &a) {
    Mat out = a;
    for (auto &x : out.v_) x *= s;
    return out;
  }
  friend bool operator==(const Mat &a, const Mat &b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.v_ == b.v_;
  }

  Mat transposed() const {
    Mat out(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  bool is_zero() const {
    for (const K &x : v_)
      if (!(x == K(0))) return false;
    return true;
  }

  /// Commutator [A, B] = AB - BA.
  friend Mat bracket(const Mat &a, const Mat &b) { return a * b - b * a; }

 private:
  std::size_t r_, c_;
  std::vector<K> v_;
};

/// Reduced row echelon form in place; returns pivot column indices.
template <class K>
std::vector<std::size_t> rref(Mat<K> &m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col) == K(0)) ++p;
    if (p == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    K inv = K(1) / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row) continue;
      K f = m(i, col);
      if (f == K(0)) continue;
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class K>
std::size_t rank(Mat<K> m) {
  return rref(m).size();
}

/// Basis of the right nullspace, one column vector per basis element.
template <class K>
std::vector<std::vector<K>> nullspace(Mat<K> m) {
  std::vector<std::size_t> pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<K>> basis;
  for (std::size_t fc = 0; fc < m.cols(); ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<K> v(m.cols(), K(0));
    v[fc] = K(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = K(0) - m(r, fc);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves A x = b exactly.  Returns false if inconsistent; x gets one solution
/// (free variables set to zero).
template <class K>
bool solve(const Mat<K> &a, const std::vector<K> &b, std::vector<K> &x) {
  assert(a.rows() == b.size());
  Mat<K> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  std::vector<std::size_t> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return false;  // 0 = 1 row
  x.assign(a.cols(), K(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, a.cols());
  return true;
}

template <class K>
K det(Mat<K> m) {
  assert(m.rows() == m.cols());
  K d(1);
  for (std::size_t col = 0; col < m.cols(); ++col) {
    std::size_t p = col;
    while (p < m.rows() && m(p, col) == K(0)) ++p;
    if (p == m.rows()) return K(0);
    if (p != col) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(col, j));
      d = K(0) - d;
    }
    d *= m(col, col);
    K inv = K(1) / m(col, col);
    for (std::size_t i = col + 1; i < m.rows(); ++i) {
      K f = m(i, col) * inv;
      if (f == K(0)) continue;
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(col, j);
    }
  }
  return d;
}

template <class K>
Mat<K> inverse(const Mat<K> &a) {
  assert(a.rows() == a.cols());
  std::size_t n = a.rows();
  Mat<K> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = K(1);
  }
  auto pivots = rref(aug);
  if (pivots.size() != n) throw std::runtime_error("inverse: singular matrix");
  Mat<K> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
  return out;
}

// ---------------------------------------------------------------------------
// Float pivoting needs magnitude comparisons; provide a least-squares solver.
// ---------------------------------------------------------------------------

struct LsqResult {
  std::vector<Float> x;
  Float residual;   // max |A x - b|
  Float condition;  // crude estimate from the QR diagonal
};

/// Least squares via modified Gram-Schmidt QR at working precision.
inline LsqResult least_squares(const Mat<Float> &a, const std::vector<Float> &b) {
  std::size_t m = a.rows(), n = a.cols();
  assert(b.size() == m);
  std::vector<std::vector<Float>> q(n, std::vector<Float>(m));
  Mat<Float> r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) q[j][i] = a(i, j);
    for (std::size_t k = 0; k < j; ++k) {
      Float dot = 0;
      for (std::size_t i = 0; i < m; ++i) dot += q[k][i] * q[j][i];
      r(k, j) = dot;
      for (std::size_t i = 0; i < m; ++i) q[j][i] -= dot * q[k][i];
    }
    Float nrm = 0;
    for (std::size_t i = 0; i < m; ++i) nrm += q[j][i] * q[j][i];
    nrm = boost::multiprecision::sqrt(nrm);
    r(j, j) = nrm;
    if (nrm == 0) throw std::runtime_error("least_squares: rank-deficient design");
    for (std::size_t i = 0; i < m; ++i) q[j][i] /= nrm;
  }
  LsqResult out;
  out.x.assign(n, Float(0));
  // x = R^{-1} Q^T b
  std::vector<Float> qtb(n, Float(0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) qtb[j] += q[j][i] * b[i];
  for (std::size_t j = n; j-- > 0;) {
    Float s = qtb[j];
    for (std::size_t k = j + 1; k < n; ++k) s -= r(j, k) * out.x[k];
    out.x[j] = s / r(j, j);
  }
  Float dmin = boost::multiprecision::abs(r(0, 0)), dmax = dmin;
  for (std::size_t j = 1; j < n; ++j) {
    Float d = boost::multiprecision::abs(r(j, j));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  out.condition = dmin == 0 ? Float("1e300") : Float(dmax / dmin);
  out.residual = 0;
  for (std::size_t i = 0; i < m; ++i) {
    Float s = -b[i];
    for (std::size_t j = 0; j < n; ++j) s += a(i, j) * out.x[j];
    out.residual = std::max(out.residual, Float(boost::multiprecision::abs(s)));
  }
  return out;
}

}  // namespace gl2ode
