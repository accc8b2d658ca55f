#pragma once

#include <initializer_list>
#include <vector>

#include "toda/rational.hpp"

namespace toda {

/// Dense univariate polynomial with exact rational coefficients,
/// coefficient of x^j at index j. The zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<BigRational> coeffs);
  explicit Polynomial(std::vector<BigRational> coeffs);
  static Polynomial constant(const BigRational& c);
  /// c * x^k
  static Polynomial monomial(const BigRational& c, int k);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Coefficient of x^k; zero outside the stored range.
  BigRational coeff(int k) const;
  const std::vector<BigRational>& coeffs() const { return coeffs_; }

  BigRational operator()(const BigRational& x) const;
  double evaluate(double x) const;

  /// p(x + a)
  Polynomial shifted(const BigRational& a) const;
  /// p(-x)
  Polynomial reflected() const;
  Polynomial derivative() const;
  /// Antiderivative vanishing at 0.
  Polynomial antiderivative() const;
  /// Exact integral over [a, b].
  BigRational integral(const BigRational& a, const BigRational& b) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const BigRational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, const BigRational& c) { return a *= c; }
  friend Polynomial operator*(const BigRational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator-(Polynomial a) { return a *= BigRational(-1); }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void trim();
  std::vector<BigRational> coeffs_;
};

}  // namespace toda
