#include "toda/mp_real.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace toda {

MpReal::MpReal(long bits) {
  mpfr_init2(v_, std::max<long>(bits, MPFR_PREC_MIN));
  mpfr_set_zero(v_, 1);
}

MpReal::MpReal(double v, long bits) : MpReal(bits) { set(v); }

MpReal::MpReal(const MpReal& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

MpReal::MpReal(MpReal&& other) noexcept {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_swap(v_, other.v_);
}

MpReal& MpReal::operator=(const MpReal& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

MpReal& MpReal::operator=(MpReal&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

MpReal::~MpReal() { mpfr_clear(v_); }

MpReal& MpReal::set(const BigRational& q) {
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  return *this;
}

MpReal& MpReal::set(double d) {
  mpfr_set_d(v_, d, MPFR_RNDN);
  return *this;
}

MpReal& MpReal::set(long i) {
  mpfr_set_si(v_, i, MPFR_RNDN);
  return *this;
}

double MpReal::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string MpReal::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  std::string fmt = "%." + std::to_string(std::max(digits, 1)) + "Rg";
  mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), v_);
  return std::string(buf.data());
}

MpReal MpReal::rounded(long bits) const {
  MpReal r(bits);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

namespace {
mpfr_prec_t wider(mpfr_srcptr a, mpfr_srcptr b) {
  return std::max(mpfr_get_prec(a), mpfr_get_prec(b));
}
}  // namespace

MpReal& MpReal::operator+=(const MpReal& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, wider(v_, o.v_), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

MpReal& MpReal::operator-=(const MpReal& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, wider(v_, o.v_), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

MpReal& MpReal::operator*=(const MpReal& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, wider(v_, o.v_), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

MpReal& MpReal::operator/=(const MpReal& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, wider(v_, o.v_), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

MpReal exp(const MpReal& x) {
  MpReal r(x.precision());
  mpfr_exp(r.v_, x.v_, MPFR_RNDN);
  return r;
}

MpReal log(const MpReal& x) {
  MpReal r(x.precision());
  mpfr_log(r.v_, x.v_, MPFR_RNDN);
  return r;
}

MpReal abs(const MpReal& x) {
  MpReal r(x.precision());
  mpfr_abs(r.v_, x.v_, MPFR_RNDN);
  return r;
}

MpReal pow(const MpReal& x, unsigned long k) {
  MpReal r(x.precision());
  mpfr_pow_ui(r.v_, x.v_, k, MPFR_RNDN);
  return r;
}

long extended_precision_bits(long fallback) {
  if (const char* env = std::getenv("TODA_TRANSPORT_PRECISION")) {
    char* end = nullptr;
    long bits = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && bits >= 53) return bits;
  }
  return fallback;
}

}  // namespace toda
