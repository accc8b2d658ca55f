#include "toda/rational.hpp"

#include <mpfr.h>

#include <cctype>
#include <vector>

#include "toda/error.hpp"
#include "toda/mp_real.hpp"

namespace toda {

BigRational make_rational(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

BigInt factorial(int n) {
  if (n < 0) throw DomainError("factorial of a negative integer");
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

std::string to_string(const BigRational& q) { return q.get_str(10); }

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  auto valid_int = [](std::string_view t, bool allow_sign) {
    if (t.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (t[0] == '-' || t[0] == '+')) ++i;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num, true) || !valid_int(den, false))
    throw DomainError("malformed rational literal '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  BigInt n(num, 10), d(den, 10);
  if (d == 0) throw DomainError("rational literal with zero denominator");
  BigRational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_decimal(const BigRational& q, int digits) {
  // bits for `digits` decimal digits plus guard bits
  MpReal x(static_cast<long>(digits * 3.33) + 16);
  x.set(q);
  return x.to_string(digits);
}

double to_double(const BigRational& q) {
  MpReal x(64);
  x.set(q);
  return x.to_double();
}

BigRational pow(const BigRational& q, int e) {
  if (e < 0) {
    if (q == 0) throw DomainError("zero to a negative power");
    BigRational inv = 1 / q;
    return pow(inv, -e);
  }
  BigRational r = 1, base = q;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

bool is_integer(const BigRational& q) { return q.get_den() == 1; }

}  // namespace toda
