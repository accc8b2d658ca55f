#pragma once

#include <map>
#include <vector>

#include "toda/mp_real.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Finite Laurent polynomial sum_{p >= low} c_p z^p with rational
/// coefficients. Canonical form has non-zero first and last coefficients.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  /// c z^p
  static LaurentPoly monomial(const BigRational& c, int p);

  bool is_zero() const { return coeffs_.empty(); }
  /// Lowest and highest powers with non-zero coefficients (undefined when zero).
  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  BigRational coeff(int p) const;
  const std::vector<BigRational>& coeffs() const { return coeffs_; }

  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly& operator-=(const LaurentPoly& o);
  LaurentPoly& operator*=(const BigRational& c);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.coeffs_ == b.coeffs_ && (a.coeffs_.empty() || a.low_ == b.low_);
  }

  /// z^s * this
  LaurentPoly shifted(int s) const;
  LaurentPoly derivative() const;
  MpReal evaluate(const MpReal& z) const;

 private:
  void add_scaled(const LaurentPoly& o, int sign);
  void trim();
  int low_ = 0;
  std::vector<BigRational> coeffs_;
};

/// Exact function sum_k e^{-k z} L_k(z), L_k Laurent polynomials. Closed
/// under addition, multiplication and d/dz; equality is coefficient-wise
/// (the exponentials are linearly independent over Laurent polynomials).
class ExpLaurentFn {
 public:
  using Terms = std::map<int, LaurentPoly>;

  ExpLaurentFn() = default;
  explicit ExpLaurentFn(Terms terms);
  static ExpLaurentFn constant(const BigRational& c);
  /// c e^{-k z} z^p
  static ExpLaurentFn term(const BigRational& c, int k, int p);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Lowest z power over all exponential sectors (0 for the zero function).
  int lowest_power() const;
  int highest_power() const;

  ExpLaurentFn& operator+=(const ExpLaurentFn& o);
  ExpLaurentFn& operator-=(const ExpLaurentFn& o);
  ExpLaurentFn& operator*=(const BigRational& c);
  friend ExpLaurentFn operator+(ExpLaurentFn a, const ExpLaurentFn& b) { return a += b; }
  friend ExpLaurentFn operator-(ExpLaurentFn a, const ExpLaurentFn& b) { return a -= b; }
  friend ExpLaurentFn operator*(ExpLaurentFn a, const BigRational& c) { return a *= c; }
  friend ExpLaurentFn operator*(const ExpLaurentFn& a, const ExpLaurentFn& b);
  friend bool operator==(const ExpLaurentFn& a, const ExpLaurentFn& b) {
    return a.terms_ == b.terms_;
  }

  /// z^s * this
  ExpLaurentFn shifted(int s) const;
  ExpLaurentFn derivative() const;

  /// Taylor coefficients a_0..a_order of the expansion at z = 0. Throws
  /// ShapeError if the principal part does not cancel.
  std::vector<BigRational> series_at_zero(int order) const;

  /// Direct summation in MPFR at the precision of `z`.
  MpReal evaluate_direct(const MpReal& z) const;

 private:
  void add_scaled(const ExpLaurentFn& o, int sign);
  Terms terms_;
};

}  // namespace toda
