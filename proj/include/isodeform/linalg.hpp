#pragma once

// Small dense real linear algebra for coordinate matrices (dimension <= ~8).

#include <span>
#include <vector>

namespace isodeform::linalg {

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0);
  /// Row-major entries; throws DimensionError on a size mismatch and
  /// NumericalError on non-finite input.
  Mat(int rows, int cols, std::vector<double> entries);

  static Mat identity(int n);
  static Mat diagonal(std::span<const double> d);
  static Mat column(std::span<const double> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> data() const { return data_; }

  Mat transposed() const;
  std::vector<double> col(int c) const;
  double max_abs() const;

  friend Mat operator*(const Mat& a, const Mat& b);
  friend Mat operator+(const Mat& a, const Mat& b);
  friend Mat operator-(const Mat& a, const Mat& b);
  friend Mat operator*(double s, const Mat& a);
  friend std::vector<double> operator*(const Mat& a, std::span<const double> x);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Solves A X = B by LU with partial pivoting. Throws NumericalError when a
/// pivot falls below 1e-12 * max|A|.
Mat solve(const Mat& a, const Mat& b);
std::vector<double> solve(const Mat& a, std::span<const double> b);
Mat inverse(const Mat& a);
double determinant(const Mat& a);

struct SvdResult {
  std::vector<double> singular_values;  // descending
  Mat u;                                // rows x k, k = min(rows, cols)
  Mat v;                                // cols x cols
  int rank = 0;
  /// Orthonormal basis of the numerical null space, one vector per column.
  Mat kernel;
};

/// One-sided Jacobi SVD. rank = #{sigma_i > tol * sigma_max}; zero matrices
/// have rank 0 and a full kernel.
SvdResult svd_rank_kernel(const Mat& a, double tol = 1e-9);

/// Unit vector orthogonal to the n columns of the (n+1) x n matrix J, with
/// v_k = (-1)^(k+1) det(J without row k) before normalization (1-based k).
/// Throws HypothesisError for a rank-deficient J.
std::vector<double> generalized_cross(const Mat& j);

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns.
double largest_principal_angle(const Mat& a, const Mat& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double max_abs(std::span<const double> a);

}  // namespace isodeform::linalg
