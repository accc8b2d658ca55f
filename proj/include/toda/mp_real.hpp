#pragma once

#include <mpfr.h>

#include <string>

#include "toda/rational.hpp"

namespace toda {

/// Owning wrapper around an MPFR variable. Binary operations produce a
/// result at the larger of the two operand precisions, rounded to nearest.
class MpReal {
 public:
  explicit MpReal(long bits = 53);
  MpReal(double v, long bits);
  MpReal(const MpReal& other);
  MpReal(MpReal&& other) noexcept;
  MpReal& operator=(const MpReal& other);
  MpReal& operator=(MpReal&& other) noexcept;
  ~MpReal();

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }

  MpReal& set(const BigRational& q);
  MpReal& set(double d);
  MpReal& set(long i);

  double to_double() const;
  std::string to_string(int digits) const;
  /// Copy rounded to `bits` of precision.
  MpReal rounded(long bits) const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  /// Binary exponent; only meaningful for finite non-zero values.
  long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }

  MpReal& operator+=(const MpReal& o);
  MpReal& operator-=(const MpReal& o);
  MpReal& operator*=(const MpReal& o);
  MpReal& operator/=(const MpReal& o);

  friend MpReal operator+(MpReal a, const MpReal& b) { return a += b; }
  friend MpReal operator-(MpReal a, const MpReal& b) { return a -= b; }
  friend MpReal operator*(MpReal a, const MpReal& b) { return a *= b; }
  friend MpReal operator/(MpReal a, const MpReal& b) { return a /= b; }
  friend MpReal operator-(MpReal a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend bool operator==(const MpReal& a, const MpReal& b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend bool operator<(const MpReal& a, const MpReal& b) {
    return mpfr_less_p(a.v_, b.v_) != 0;
  }

  friend MpReal exp(const MpReal& x);
  friend MpReal log(const MpReal& x);
  friend MpReal abs(const MpReal& x);
  /// x^k for a non-negative integer k.
  friend MpReal pow(const MpReal& x, unsigned long k);

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

/// Working precision in bits for extended-precision evaluations: the value
/// of TODA_TRANSPORT_PRECISION when set to an integer >= 53, else `fallback`.
long extended_precision_bits(long fallback = 128);

}  // namespace toda
