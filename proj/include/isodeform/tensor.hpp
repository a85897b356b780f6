#pragma once

// Dense coordinate arrays of fixed rank, used for Christoffel symbols,
// curvature and covariant derivatives, either as plain values or as jets.

#include <cstddef>
#include <vector>

#include "isodeform/jet.hpp"
#include "isodeform/linalg.hpp"

namespace isodeform {

template <class T>
class Array2 {
 public:
  Array2() = default;
  Array2(int rows, int cols, const T& fill) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2, const T& fill) : d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0) * d1 * d2, fill) {}
  Tensor3(int n, const T& fill) : Tensor3(n, n, n, fill) {}
  T& operator()(int a, int b, int c) { return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c]; }
  const T& operator()(int a, int b, int c) const { return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c]; }
  bool empty() const { return data_.empty(); }

 private:
  int d1_ = 0, d2_ = 0;
  std::vector<T> data_;
};

template <class T>
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int n, const T& fill) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, fill) {}
  T& operator()(int a, int b, int c, int d) { return data_[((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d]; }
  const T& operator()(int a, int b, int c, int d) const {
    return data_[((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d];
  }
  bool empty() const { return data_.empty(); }

 private:
  int n_ = 0;
  std::vector<T> data_;
};

using JetMatrix = Array2<jet::JetScalar>;
using JetTensor3 = Tensor3<jet::JetScalar>;
using JetTensor4 = Tensor4<jet::JetScalar>;

/// Matrix operations over jets. Operands of different orders are combined
/// at the lower order.
namespace jetmat {

JetMatrix zeros(int rows, int cols, int n_vars, int order);
JetMatrix identity(int n, int n_vars, int order);
JetMatrix product(const JetMatrix& a, const JetMatrix& b);
JetMatrix sum(const JetMatrix& a, const JetMatrix& b, double b_scale = 1.0);
JetMatrix scaled(const JetMatrix& a, double s);
JetMatrix scaled(const JetMatrix& a, const jet::JetScalar& s);
JetMatrix truncated(const JetMatrix& a, int order);
JetMatrix partial(const JetMatrix& a, int var);
/// Gauss-Jordan with pivoting on the values; throws NumericalError when
/// singular to 1e-12 relative.
JetMatrix inverse(const JetMatrix& a);
/// Division-free cofactor expansion.
jet::JetScalar determinant(const JetMatrix& a);
int min_order(const JetMatrix& a);
linalg::Mat values(const JetMatrix& a);

}  // namespace jetmat

}  // namespace isodeform
