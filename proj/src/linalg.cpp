#include "isodeform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::linalg {

Mat::Mat(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw DimensionError("linalg: negative matrix size");
}

Mat::Mat(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols)
    throw DimensionError(fmt::format("linalg: {} entries for a {}x{} matrix", data_.size(), rows, cols));
  for (double x : data_)
    if (!std::isfinite(x)) throw NumericalError("linalg: non-finite matrix entry");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  const int n = static_cast<int>(d.size());
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::column(std::span<const double> v) {
  return Mat(static_cast<int>(v.size()), 1, std::vector<double>(v.begin(), v.end()));
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<double> Mat::col(int c) const {
  std::vector<double> v(rows_);
  for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

double Mat::max_abs() const { return linalg::max_abs(data_); }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols_ != b.rows_)
    throw DimensionError(fmt::format("linalg: product of {}x{} and {}x{}", a.rows_, a.cols_, b.rows_, b.cols_));
  Mat c(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Mat operator+(const Mat& a, const Mat& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("linalg: sum of mismatched matrices");
  Mat c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("linalg: difference of mismatched matrices");
  Mat c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
  return c;
}

Mat operator*(double s, const Mat& a) {
  Mat c = a;
  for (auto& x : c.data_) x *= s;
  return c;
}

std::vector<double> operator*(const Mat& a, std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.cols_) throw DimensionError("linalg: matrix-vector size mismatch");
  std::vector<double> y(a.rows_, 0.0);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
  return y;
}

namespace {

struct Lu {
  Mat lu;
  std::vector<int> perm;
  int sign = 1;
};

Lu factor(const Mat& a, bool strict = true) {
  if (a.rows() != a.cols()) throw DimensionError("linalg: LU of a non-square matrix");
  const int n = a.rows();
  Lu f{a, std::vector<int>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const double scale = a.max_abs();
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(p, k))) p = i;
    if (!strict && f.lu(p, k) == 0.0) {
      f.sign = 0;
      return f;
    }
    if (strict && !(std::abs(f.lu(p, k)) > 1e-12 * scale))
      throw NumericalError(fmt::format("linalg: matrix singular to tolerance (pivot {:.3e}, scale {:.3e})",
                                       f.lu(p, k), scale));
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
      std::swap(f.perm[k], f.perm[p]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = m;
      for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  return f;
}

}  // namespace

Mat solve(const Mat& a, const Mat& b) {
  if (b.rows() != a.rows()) throw DimensionError("linalg: right-hand side row count mismatch");
  const Lu f = factor(a);
  const int n = a.rows();
  Mat x(n, b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
      double s = b(f.perm[i], c);
      for (int j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x(j, c);
      x(i, c) = s / f.lu(i, i);
    }
  }
  return x;
}

std::vector<double> solve(const Mat& a, std::span<const double> b) { return solve(a, Mat::column(b)).col(0); }

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

double determinant(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionError("linalg: determinant of a non-square matrix");
  if (a.rows() == 0) return 1.0;
  const Lu f = factor(a, false);
  if (f.sign == 0) return 0.0;
  double det = f.sign;
  for (int i = 0; i < a.rows(); ++i) det *= f.lu(i, i);
  return det;
}

SvdResult svd_rank_kernel(const Mat& a_in, double tol) {
  const int m0 = a_in.rows(), n = a_in.cols();
  // Wide matrices are padded with zero rows so V is a complete basis.
  const int m = std::max(m0, n);
  Mat u(m, n);
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < n; ++j) u(i, j) = a_in(i, j);
  Mat v = Mat::identity(n);

  constexpr double kConvergence = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (int i = 0; i < m; ++i) {
          alpha += u(i, p) * u(i, p);
          beta += u(i, q) * u(i, q);
          gamma += u(i, p) * u(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kConvergence * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int i = 0; i < m; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (int i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += u(i, j) * u(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return sigma[x] > sigma[y]; });

  SvdResult r;
  const int k = std::min(m0, n);
  const double sigma_max = n > 0 ? sigma[order[0]] : 0.0;
  r.u = Mat(m0, k);
  r.v = Mat(n, n);
  for (int jj = 0; jj < n; ++jj) {
    const int j = order[jj];
    for (int i = 0; i < n; ++i) r.v(i, jj) = v(i, j);
    if (jj < k) {
      r.singular_values.push_back(sigma[j]);
      if (sigma[j] > 0)
        for (int i = 0; i < m0; ++i) r.u(i, jj) = u(i, j) / sigma[j];
    }
    if (sigma_max > 0 && sigma[j] > tol * sigma_max) ++r.rank;
  }
  r.kernel = Mat(n, n - r.rank);
  for (int jj = r.rank; jj < n; ++jj)
    for (int i = 0; i < n; ++i) r.kernel(i, jj - r.rank) = r.v(i, jj);
  return r;
}

std::vector<double> generalized_cross(const Mat& j) {
  const int n = j.cols();
  if (j.rows() != n + 1)
    throw DimensionError(fmt::format("linalg: generalized cross needs an (n+1)xn matrix, got {}x{}", j.rows(), n));
  std::vector<double> v(n + 1);
  Mat minor(n, n);
  for (int k = 0; k <= n; ++k) {
    for (int r = 0, rr = 0; r <= n; ++r) {
      if (r == k) continue;
      for (int c = 0; c < n; ++c) minor(rr, c) = j(r, c);
      ++rr;
    }
    v[k] = (k % 2 == 0 ? 1.0 : -1.0) * determinant(minor);
  }
  double column_scale = 1.0;
  for (int c = 0; c < n; ++c) column_scale *= norm(j.col(c));
  const double len = norm(v);
  if (!(len > 1e-12 * column_scale)) throw HypothesisError("degenerate Jacobian: immersion fails at this point");
  for (auto& x : v) x /= len;
  return v;
}

double largest_principal_angle(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw DimensionError("linalg: principal angle between different ambient spaces");
  if (a.cols() != b.cols()) return std::acos(0.0);
  if (a.cols() == 0) return 0.0;
  // sin of the largest angle = ||(I - a a^T) b||_2
  const Mat residual = b - a * (a.transposed() * b);
  const auto s = svd_rank_kernel(residual, 0.0);
  return std::asin(std::min(1.0, s.singular_values.empty() ? 0.0 : s.singular_values.front()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("linalg: dot of mismatched vectors");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace isodeform::linalg
