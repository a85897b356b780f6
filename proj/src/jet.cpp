#include "isodeform/jet.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include <fmt/format.h>

#include "isodeform/error.hpp"

namespace isodeform::jet {

// Monomial bookkeeping shared by all jets with the same (n_vars, order).
class MonomialTable {
 public:
  struct Product {
    std::uint16_t lhs, rhs, out;
  };

  MonomialTable(int n, int order) : n_(n), order_(order) {
    degree_start_.push_back(0);
    for (int d = 0; d <= order; ++d) {
      std::vector<std::uint8_t> current(n, 0);
      append_degree(d, 0, d, current);
      degree_start_.push_back(static_cast<int>(size()));
    }
    std::size_t radix_pow = 1;
    for (int i = 0; i < n; ++i) radix_pow *= static_cast<std::size_t>(order + 1);
    lookup_.assign(radix_pow, -1);
    factorial_.resize(size());
    for (std::size_t m = 0; m < size(); ++m) {
      lookup_[encode(exponents(m))] = static_cast<int>(m);
      double fact = 1.0;
      for (int i = 0; i < n; ++i)
        for (int k = 2; k <= exponents(m)[i]; ++k) fact *= k;
      factorial_[m] = fact;
    }
    std::vector<std::uint8_t> sum(n);
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t b = 0; b < size(); ++b) {
        if (degree(a) + degree(b) > order) continue;
        for (int i = 0; i < n; ++i) sum[i] = exponents(a)[i] + exponents(b)[i];
        products_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                             static_cast<std::uint16_t>(lookup_[encode(sum)])});
      }
    }
  }

  int n_vars() const { return n_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size() / static_cast<std::size_t>(n_); }
  std::span<const std::uint8_t> exponents(std::size_t m) const {
    return {exps_.data() + m * n_, static_cast<std::size_t>(n_)};
  }
  int degree(std::size_t m) const {
    int d = 0;
    for (auto e : exponents(m)) d += e;
    return d;
  }
  double factorial(std::size_t m) const { return factorial_[m]; }
  const std::vector<Product>& products() const { return products_; }

  // Index of the monomial with these exponents, or -1 when its degree
  // exceeds the order.
  int index_of(std::span<const std::uint8_t> e) const {
    int d = 0;
    for (auto x : e) d += x;
    if (d > order_) return -1;
    return lookup_[encode(e)];
  }

 private:
  void append_degree(int remaining, int var, int degree, std::vector<std::uint8_t>& current) {
    if (var == n_ - 1) {
      current[var] = static_cast<std::uint8_t>(remaining);
      exps_.insert(exps_.end(), current.begin(), current.end());
      current[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[var] = static_cast<std::uint8_t>(e);
      append_degree(remaining - e, var + 1, degree, current);
    }
    current[var] = 0;
  }

  std::size_t encode(std::span<const std::uint8_t> e) const {
    std::size_t code = 0;
    for (int i = n_ - 1; i >= 0; --i) code = code * (order_ + 1) + e[i];
    return code;
  }

  int n_;
  int order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_start_;
  std::vector<int> lookup_;
  std::vector<double> factorial_;
  std::vector<Product> products_;
};

namespace {

const MonomialTable* table_for(int n, int order) {
  if (n < 1 || n > kMaxVars)
    throw DimensionError(fmt::format("jet: n_vars={} outside [1, {}]", n, kMaxVars));
  if (order < 0 || order > kMaxOrder)
    throw DimensionError(fmt::format("jet: order={} outside [0, {}]", order, kMaxOrder));
  static std::array<std::array<std::once_flag, kMaxOrder + 1>, kMaxVars + 1> once;
  static std::array<std::array<std::unique_ptr<MonomialTable>, kMaxOrder + 1>, kMaxVars + 1> tables;
  std::call_once(once[n][order], [&] { tables[n][order] = std::make_unique<MonomialTable>(n, order); });
  return tables[n][order].get();
}

std::vector<std::uint8_t> exponents_from_indices(std::span<const int> indices, int n) {
  std::vector<std::uint8_t> e(n, 0);
  for (int i : indices) {
    if (i < 0 || i >= n)
      throw DimensionError(fmt::format("jet: derivative index {} outside [0, {})", i, n));
    ++e[i];
  }
  return e;
}

}  // namespace

JetScalar::JetScalar(const MonomialTable* table, int order)
    : table_(table), order_(order), coeffs_(table->size(), 0.0) {}

JetScalar::JetScalar(int n_vars, int order) : JetScalar(table_for(n_vars, order), order) {}

JetScalar JetScalar::variable(int index, double at, int n_vars, int order) {
  if (index < 0 || index >= n_vars)
    throw DimensionError(fmt::format("jet: variable index {} outside [0, {})", index, n_vars));
  JetScalar j(n_vars, order);
  j.coeffs_[0] = at;
  if (order >= 1) {
    std::vector<std::uint8_t> e(n_vars, 0);
    e[index] = 1;
    j.coeffs_[j.table_->index_of(e)] = 1.0;
  }
  return j;
}

JetScalar JetScalar::constant(double c, int n_vars, int order) {
  JetScalar j(n_vars, order);
  j.coeffs_[0] = c;
  return j;
}

int JetScalar::n_vars() const { return table_->n_vars(); }

double JetScalar::derivative(std::span<const int> indices) const {
  if (static_cast<int>(indices.size()) > order_)
    throw DimensionError(
        fmt::format("jet: derivative of order {} requested from a jet of order {}", indices.size(), order_));
  auto e = exponents_from_indices(indices, n_vars());
  const int m = table_->index_of(e);
  return coeffs_[m] * table_->factorial(m);
}

double JetScalar::d1(int i) const { return derivative({i}); }
double JetScalar::d2(int i, int j) const { return derivative({i, j}); }
double JetScalar::d3(int i, int j, int k) const { return derivative({i, j, k}); }
double JetScalar::d4(int i, int j, int k, int l) const { return derivative({i, j, k, l}); }

JetScalar JetScalar::partial(int i) const {
  const int n = n_vars();
  if (i < 0 || i >= n) throw DimensionError(fmt::format("jet: partial index {} outside [0, {})", i, n));
  if (order_ == 0) throw DimensionError("jet: cannot differentiate an order-0 jet");
  JetScalar out(n, order_ - 1);
  std::vector<std::uint8_t> e(n);
  for (std::size_t m = 0; m < out.size(); ++m) {
    auto src = out.table_->exponents(m);
    std::copy(src.begin(), src.end(), e.begin());
    ++e[i];
    out.coeffs_[m] = coeffs_[table_->index_of(e)] * e[i];
  }
  return out;
}

JetScalar JetScalar::truncated(int order) const {
  if (order > order_)
    throw DimensionError(fmt::format("jet: cannot raise order {} to {}", order_, order));
  JetScalar out(n_vars(), order);
  std::copy_n(coeffs_.begin(), out.size(), out.coeffs_.begin());
  return out;
}

void JetScalar::check_compatible(const JetScalar& rhs, const char* op) const {
  if (table_ != rhs.table_)
    throw DimensionError(fmt::format("jet: {} of mismatched jets (n={}, K={}) and (n={}, K={})", op,
                                     n_vars(), order_, rhs.n_vars(), rhs.order_));
}

JetScalar& JetScalar::operator+=(const JetScalar& rhs) {
  check_compatible(rhs, "add");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += rhs.coeffs_[m];
  return *this;
}

JetScalar& JetScalar::operator-=(const JetScalar& rhs) {
  check_compatible(rhs, "sub");
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= rhs.coeffs_[m];
  return *this;
}

JetScalar& JetScalar::operator*=(const JetScalar& rhs) { return *this = *this * rhs; }
JetScalar& JetScalar::operator/=(const JetScalar& rhs) { return *this = *this / rhs; }

JetScalar& JetScalar::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}
JetScalar& JetScalar::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}
JetScalar& JetScalar::operator*=(double rhs) {
  for (auto& c : coeffs_) c *= rhs;
  return *this;
}
JetScalar& JetScalar::operator/=(double rhs) {
  if (std::abs(rhs) <= kDivisionGuard) throw DomainError("jet: division by (near-)zero constant", rhs);
  for (auto& c : coeffs_) c /= rhs;
  return *this;
}

JetScalar JetScalar::operator-() const {
  JetScalar out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

JetScalar operator*(const JetScalar& a, const JetScalar& b) {
  a.check_compatible(b, "mul");
  JetScalar out(a.table_, a.order_);
  const double* x = a.coeffs_.data();
  const double* y = b.coeffs_.data();
  double* z = out.coeffs_.data();
  for (const auto& p : a.table_->products()) z[p.out] += x[p.lhs] * y[p.rhs];
  return out;
}

JetScalar compose(const JetScalar& a, std::span<const double> series) {
  if (static_cast<int>(series.size()) < a.order_ + 1)
    throw DimensionError("jet: composition series shorter than the jet order");
  JetScalar delta = a;
  delta.coeffs_[0] = 0.0;
  JetScalar out = JetScalar(a.table_, a.order_);
  out.coeffs_[0] = series[a.order_];
  for (int k = a.order_ - 1; k >= 0; --k) {
    out = out * delta;
    out.coeffs_[0] += series[k];
  }
  return out;
}

namespace {

JetScalar reciprocal(const JetScalar& b) {
  const double b0 = b.value();
  if (!(std::abs(b0) > kDivisionGuard)) throw DomainError("jet: division by (near-)zero value", b0);
  std::array<double, kMaxOrder + 1> series{};
  double p = 1.0 / b0;
  for (int k = 0; k <= b.order(); ++k) {
    series[k] = p;
    p *= -1.0 / b0;
  }
  return compose(b, series);
}

}  // namespace

JetScalar operator/(const JetScalar& a, const JetScalar& b) {
  a.check_compatible(b, "div");
  return a * reciprocal(b);
}

JetScalar operator/(double a, const JetScalar& b) { return reciprocal(b) * a; }

JetScalar sin(const JetScalar& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const std::array<double, 4> cycle{s, c, -s, -c};
  std::array<double, kMaxOrder + 1> series{};
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 1) fact *= k;
    series[k] = cycle[k % 4] / fact;
  }
  return compose(a, series);
}

JetScalar cos(const JetScalar& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const std::array<double, 4> cycle{c, -s, -c, s};
  std::array<double, kMaxOrder + 1> series{};
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 1) fact *= k;
    series[k] = cycle[k % 4] / fact;
  }
  return compose(a, series);
}

JetScalar exp(const JetScalar& a) {
  const double e = std::exp(a.value());
  std::array<double, kMaxOrder + 1> series{};
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 1) fact *= k;
    series[k] = e / fact;
  }
  return compose(a, series);
}

JetScalar log(const JetScalar& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError(fmt::format("log of non-positive value {}", x), x);
  std::array<double, kMaxOrder + 1> series{};
  series[0] = std::log(x);
  // d^k/dx^k log x / k! = (-1)^(k-1) / (k x^k)
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p /= x;
    series[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
  }
  return compose(a, series);
}

namespace {

JetScalar real_power(const JetScalar& a, double r) {
  const double x = a.value();
  std::array<double, kMaxOrder + 1> series{};
  // binomial(r, k) * x^(r - k)
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    series[k] = binom * std::pow(x, r - k);
    binom *= (r - k) / (k + 1);
  }
  return compose(a, series);
}

}  // namespace

JetScalar sqrt(const JetScalar& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError(fmt::format("sqrt of non-positive value {}", x), x);
  return real_power(a, 0.5);
}

JetScalar pow(const JetScalar& a, int k) {
  if (k < 0) return 1.0 / pow(a, -k);
  JetScalar out = JetScalar::constant(1.0, a.n_vars(), a.order());
  JetScalar base = a;
  while (k > 0) {
    if (k & 1) out = out * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return out;
}

JetScalar pow(const JetScalar& a, double r) {
  if (r == std::floor(r) && std::abs(r) <= 1024.0) return pow(a, static_cast<int>(r));
  const double x = a.value();
  if (!(x > 0.0))
    throw DomainError(fmt::format("non-integer power {} of non-positive value {}", r, x), x);
  return real_power(a, r);
}

JetScalar mul_common(const JetScalar& a, const JetScalar& b) {
  if (a.order() == b.order()) return a * b;
  return a.order() < b.order() ? a * b.truncated(a.order()) : a.truncated(b.order()) * b;
}

JetScalar add_common(const JetScalar& a, const JetScalar& b) {
  if (a.order() == b.order()) return a + b;
  return a.order() < b.order() ? a + b.truncated(a.order()) : a.truncated(b.order()) + b;
}

}  // namespace isodeform::jet
