#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace toda {

/// Exact rational backed by GMP; every arithmetic result is canonical
/// (reduced, positive denominator).
using BigRational = mpq_class;
using BigInt = mpz_class;

BigRational make_rational(long num, long den = 1);

BigInt factorial(int n);
BigInt binomial(int n, int k);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const BigRational& q);
/// Accepts "p/q", "p" and leading sign; throws DomainError on malformed input.
BigRational parse_rational(std::string_view text);

/// Decimal rendering with `digits` significant digits.
std::string to_decimal(const BigRational& q, int digits = 20);

double to_double(const BigRational& q);

/// q^e for integer e (negative e requires q != 0).
BigRational pow(const BigRational& q, int e);

bool is_integer(const BigRational& q);

}  // namespace toda
