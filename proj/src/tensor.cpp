#include "isodeform/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <map>

#include "isodeform/error.hpp"

namespace isodeform::jetmat {

using jet::JetScalar;

JetMatrix zeros(int rows, int cols, int n_vars, int order) {
  return JetMatrix(rows, cols, JetScalar(n_vars, order));
}

JetMatrix identity(int n, int n_vars, int order) {
  JetMatrix m = zeros(n, n, n_vars, order);
  for (int i = 0; i < n; ++i) m(i, i) = JetScalar::constant(1.0, n_vars, order);
  return m;
}

int min_order(const JetMatrix& a) {
  int k = jet::kMaxOrder;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) k = std::min(k, a(r, c).order());
  return k;
}

JetMatrix truncated(const JetMatrix& a, int order) {
  JetMatrix out = a;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c).order() != order) out(r, c) = a(r, c).truncated(order);
  return out;
}

JetMatrix product(const JetMatrix& a_in, const JetMatrix& b_in) {
  if (a_in.cols() != b_in.rows()) throw DimensionError("jetmat: product shape mismatch");
  const int k = std::min(min_order(a_in), min_order(b_in));
  const JetMatrix a = truncated(a_in, k), b = truncated(b_in, k);
  const int n_vars = a(0, 0).n_vars();
  JetMatrix c = zeros(a.rows(), b.cols(), n_vars, k);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int l = 0; l < a.cols(); ++l) c(i, j) += a(i, l) * b(l, j);
  return c;
}

JetMatrix sum(const JetMatrix& a_in, const JetMatrix& b_in, double b_scale) {
  if (a_in.rows() != b_in.rows() || a_in.cols() != b_in.cols()) throw DimensionError("jetmat: sum shape mismatch");
  const int k = std::min(min_order(a_in), min_order(b_in));
  JetMatrix a = truncated(a_in, k);
  const JetMatrix b = truncated(b_in, k);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) += b(i, j) * b_scale;
  return a;
}

JetMatrix scaled(const JetMatrix& a, double s) {
  JetMatrix out = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) *= s;
  return out;
}

JetMatrix scaled(const JetMatrix& a_in, const JetScalar& s_in) {
  const int k = std::min(min_order(a_in), s_in.order());
  JetMatrix a = truncated(a_in, k);
  const JetScalar s = s_in.truncated(k);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = a(i, j) * s;
  return a;
}

JetMatrix partial(const JetMatrix& a, int var) {
  const int k = min_order(a);
  JetMatrix out = zeros(a.rows(), a.cols(), a(0, 0).n_vars(), k - 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).truncated(k).partial(var);
  return out;
}

JetMatrix inverse(const JetMatrix& a_in) {
  if (a_in.rows() != a_in.cols()) throw DimensionError("jetmat: inverse of a non-square matrix");
  const int n = a_in.rows();
  const int k = min_order(a_in);
  JetMatrix a = truncated(a_in, k);
  const int n_vars = a(0, 0).n_vars();
  JetMatrix inv = identity(n, n_vars, k);
  double scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j).value()));
  for (int col = 0; col < n; ++col) {
    int p = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col).value()) > std::abs(a(p, col).value())) p = r;
    if (!(std::abs(a(p, col).value()) > 1e-12 * scale)) throw NumericalError("jetmat: singular matrix");
    if (p != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(p, j), a(col, j));
        std::swap(inv(p, j), inv(col, j));
      }
    const JetScalar pivot_inv = 1.0 / a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * pivot_inv;
      inv(col, j) = inv(col, j) * pivot_inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const JetScalar factor = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= factor * a(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

JetScalar determinant(const JetMatrix& a_in) {
  if (a_in.rows() != a_in.cols()) throw DimensionError("jetmat: determinant of a non-square matrix");
  const int n = a_in.rows();
  const int k = min_order(a_in);
  const JetMatrix a = truncated(a_in, k);
  const int n_vars = a(0, 0).n_vars();
  // minors[mask] = determinant of the trailing rows restricted to the columns
  // in mask, built bottom-up so each row expands over already known minors.
  std::map<unsigned, JetScalar> minors;
  minors.emplace(0u, JetScalar::constant(1.0, n_vars, k));
  for (int row = n - 1; row >= 0; --row) {
    const int width = n - row;
    std::map<unsigned, JetScalar> next;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != width) continue;
      JetScalar acc(n_vars, k);
      int position = 0;
      for (int c = 0; c < n; ++c) {
        if (!(mask & (1u << c))) continue;
        const JetScalar term = a(row, c) * minors.at(mask & ~(1u << c));
        if (position % 2 == 0) acc += term; else acc -= term;
        ++position;
      }
      next.emplace(mask, std::move(acc));
    }
    minors = std::move(next);
  }
  return minors.at((1u << n) - 1);
}

linalg::Mat values(const JetMatrix& a) {
  linalg::Mat m(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).value();
  return m;
}

}  // namespace isodeform::jetmat
