#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A JetScalar of order K in n variables stores the Taylor coefficients c_a of
// every monomial u^a with |a| <= K, so partial derivatives are recovered as
// d^a f = a! c_a. Storing one coefficient per monomial makes the derivative
// tensors symmetric by construction: d2(i, j) and d2(j, i) read the same slot.
//
// Monomials are ordered by total degree first, so the jet truncated to order
// K' < K is a prefix of the coefficient array.

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace isodeform::jet {

inline constexpr int kMaxVars = 8;
inline constexpr int kMaxOrder = 4;

/// Guard used by division: |denominator value| must exceed this.
inline constexpr double kDivisionGuard = 1e-300;

class MonomialTable;

class JetScalar {
 public:
  /// Zero jet.
  JetScalar(int n_vars, int order);

  /// Seeds coordinate `index` (0-based) at value `at`.
  static JetScalar variable(int index, double at, int n_vars, int order);
  static JetScalar constant(double c, int n_vars, int order);

  int n_vars() const;
  int order() const { return order_; }
  std::size_t size() const { return coeffs_.size(); }

  double value() const { return coeffs_[0]; }
  double d1(int i) const;
  double d2(int i, int j) const;
  double d3(int i, int j, int k) const;
  double d4(int i, int j, int k, int l) const;
  /// Mixed partial derivative with respect to the listed (0-based) variables;
  /// the number of entries is the derivative order.
  double derivative(std::span<const int> indices) const;
  double derivative(std::initializer_list<int> indices) const {
    return derivative(std::span<const int>(indices.begin(), indices.size()));
  }

  /// Jet of the partial derivative d/du_i, one order lower.
  JetScalar partial(int i) const;
  /// Same point, fewer orders.
  JetScalar truncated(int order) const;

  /// Raw Taylor coefficients in graded monomial order.
  std::span<const double> coefficients() const { return coeffs_; }

  JetScalar& operator+=(const JetScalar& rhs);
  JetScalar& operator-=(const JetScalar& rhs);
  JetScalar& operator*=(const JetScalar& rhs);
  JetScalar& operator/=(const JetScalar& rhs);
  JetScalar& operator+=(double rhs);
  JetScalar& operator-=(double rhs);
  JetScalar& operator*=(double rhs);
  JetScalar& operator/=(double rhs);

  JetScalar operator-() const;

  friend JetScalar operator+(JetScalar a, const JetScalar& b) { return a += b; }
  friend JetScalar operator-(JetScalar a, const JetScalar& b) { return a -= b; }
  friend JetScalar operator*(const JetScalar& a, const JetScalar& b);
  friend JetScalar operator/(const JetScalar& a, const JetScalar& b);
  friend JetScalar operator+(JetScalar a, double b) { return a += b; }
  friend JetScalar operator-(JetScalar a, double b) { return a -= b; }
  friend JetScalar operator*(JetScalar a, double b) { return a *= b; }
  friend JetScalar operator/(JetScalar a, double b) { return a /= b; }
  friend JetScalar operator+(double a, JetScalar b) { return b += a; }
  friend JetScalar operator-(double a, const JetScalar& b) { return -b + a; }
  friend JetScalar operator*(double a, JetScalar b) { return b *= a; }
  friend JetScalar operator/(double a, const JetScalar& b);

  /// f(a) for a scalar function with Taylor coefficients
  /// series[k] = f^(k)(a.value()) / k!, k = 0..order.
  friend JetScalar compose(const JetScalar& a, std::span<const double> series);

 private:
  JetScalar(const MonomialTable* table, int order);
  void check_compatible(const JetScalar& rhs, const char* op) const;

  const MonomialTable* table_;
  int order_;
  std::vector<double> coeffs_;
};

JetScalar sin(const JetScalar& a);
JetScalar cos(const JetScalar& a);
JetScalar exp(const JetScalar& a);
JetScalar log(const JetScalar& a);
JetScalar sqrt(const JetScalar& a);
/// Real power; a non-integer exponent requires a positive base.
JetScalar pow(const JetScalar& a, double r);
/// Integer power by repeated multiplication; negative powers divide.
JetScalar pow(const JetScalar& a, int k);

/// Multiplies and adds jets of different orders by truncating to the lower one.
JetScalar mul_common(const JetScalar& a, const JetScalar& b);
JetScalar add_common(const JetScalar& a, const JetScalar& b);

}  // namespace isodeform::jet
