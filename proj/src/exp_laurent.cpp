#include "toda/exp_laurent.hpp"

#include <algorithm>

#include "toda/error.hpp"

namespace toda {

LaurentPoly LaurentPoly::monomial(const BigRational& c, int p) {
  LaurentPoly r;
  if (c != 0) {
    r.low_ = p;
    r.coeffs_.push_back(c);
  }
  return r;
}

BigRational LaurentPoly::coeff(int p) const {
  if (coeffs_.empty() || p < low_ || p > high()) return 0;
  return coeffs_[static_cast<std::size_t>(p - low_)];
}

void LaurentPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  std::size_t lead = 0;
  while (lead < coeffs_.size() && coeffs_[lead] == 0) ++lead;
  if (lead > 0) {
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(lead));
    low_ += static_cast<int>(lead);
  }
  if (coeffs_.empty()) low_ = 0;
}

void LaurentPoly::add_scaled(const LaurentPoly& o, int sign) {
  if (o.is_zero()) return;
  if (is_zero()) {
    *this = o;
    if (sign < 0)
      for (auto& c : coeffs_) c = -c;
    return;
  }
  const int lo = std::min(low_, o.low_);
  const int hi = std::max(high(), o.high());
  std::vector<BigRational> v(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    v[static_cast<std::size_t>(low_ - lo) + i] = coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) {
    auto& slot = v[static_cast<std::size_t>(o.low_ - lo) + i];
    if (sign > 0)
      slot += o.coeffs_[i];
    else
      slot -= o.coeffs_[i];
  }
  low_ = lo;
  coeffs_ = std::move(v);
  trim();
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  add_scaled(o, +1);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
  add_scaled(o, -1);
  return *this;
}

LaurentPoly& LaurentPoly::operator*=(const BigRational& c) {
  if (c == 0) {
    coeffs_.clear();
    low_ = 0;
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r;
  if (a.is_zero() || b.is_zero()) return r;
  r.low_ = a.low_ + b.low_;
  r.coeffs_.resize(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      if (b.coeffs_[j] == 0) continue;
      r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  r.trim();
  return r;
}

LaurentPoly LaurentPoly::shifted(int s) const {
  LaurentPoly r = *this;
  if (!r.is_zero()) r.low_ += s;
  return r;
}

LaurentPoly LaurentPoly::derivative() const {
  LaurentPoly r;
  if (is_zero()) return r;
  r.low_ = low_ - 1;
  r.coeffs_.resize(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    r.coeffs_[i] = coeffs_[i] * (low_ + static_cast<long>(i));
  r.trim();
  return r;
}

MpReal LaurentPoly::evaluate(const MpReal& z) const {
  const long bits = z.precision();
  MpReal acc(bits);
  if (is_zero()) return acc;
  MpReal c(bits);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= z;
    acc += c.set(*it);
  }
  // acc = sum c_i z^i; multiply by z^low
  if (low_ > 0) acc *= pow(z, static_cast<unsigned long>(low_));
  if (low_ < 0) acc /= pow(z, static_cast<unsigned long>(-low_));
  return acc;
}

ExpLaurentFn::ExpLaurentFn(Terms terms) : terms_(std::move(terms)) {
  std::erase_if(terms_, [](const auto& kv) { return kv.second.is_zero(); });
}

ExpLaurentFn ExpLaurentFn::constant(const BigRational& c) { return term(c, 0, 0); }

ExpLaurentFn ExpLaurentFn::term(const BigRational& c, int k, int p) {
  Terms t;
  if (c != 0) t.emplace(k, LaurentPoly::monomial(c, p));
  return ExpLaurentFn(std::move(t));
}

int ExpLaurentFn::lowest_power() const {
  int lo = 0;
  bool first = true;
  for (const auto& [k, poly] : terms_) {
    lo = first ? poly.low() : std::min(lo, poly.low());
    first = false;
  }
  return lo;
}

int ExpLaurentFn::highest_power() const {
  int hi = 0;
  bool first = true;
  for (const auto& [k, poly] : terms_) {
    hi = first ? poly.high() : std::max(hi, poly.high());
    first = false;
  }
  return hi;
}

void ExpLaurentFn::add_scaled(const ExpLaurentFn& o, int sign) {
  for (const auto& [k, poly] : o.terms_) {
    auto& slot = terms_[k];
    if (sign > 0)
      slot += poly;
    else
      slot -= poly;
    if (slot.is_zero()) terms_.erase(k);
  }
}

ExpLaurentFn& ExpLaurentFn::operator+=(const ExpLaurentFn& o) {
  add_scaled(o, +1);
  return *this;
}

ExpLaurentFn& ExpLaurentFn::operator-=(const ExpLaurentFn& o) {
  add_scaled(o, -1);
  return *this;
}

ExpLaurentFn& ExpLaurentFn::operator*=(const BigRational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, poly] : terms_) poly *= c;
  return *this;
}

ExpLaurentFn operator*(const ExpLaurentFn& a, const ExpLaurentFn& b) {
  ExpLaurentFn::Terms out;
  for (const auto& [ka, pa] : a.terms_)
    for (const auto& [kb, pb] : b.terms_) out[ka + kb] += pa * pb;
  return ExpLaurentFn(std::move(out));
}

ExpLaurentFn ExpLaurentFn::shifted(int s) const {
  Terms out;
  for (const auto& [k, poly] : terms_) out.emplace(k, poly.shifted(s));
  return ExpLaurentFn(std::move(out));
}

ExpLaurentFn ExpLaurentFn::derivative() const {
  // d/dz [e^{-kz} L(z)] = e^{-kz} (L'(z) - k L(z))
  Terms out;
  for (const auto& [k, poly] : terms_) {
    LaurentPoly d = poly.derivative();
    LaurentPoly scaled = poly;
    scaled *= BigRational(k);
    d -= scaled;
    out.emplace(k, std::move(d));
  }
  return ExpLaurentFn(std::move(out));
}

std::vector<BigRational> ExpLaurentFn::series_at_zero(int order) const {
  std::vector<BigRational> result(static_cast<std::size_t>(std::max(order, -1) + 1));
  if (terms_.empty()) return result;
  const int lo = std::min(lowest_power(), 0);
  const int span = order - lo;
  // [z^m] e^{-kz} z^q = (-k)^{m-q} / (m-q)!
  for (int m = lo; m <= order; ++m) {
    BigRational acc = 0;
    for (const auto& [k, poly] : terms_) {
      BigRational kpow = 1;  // (-k)^j / j!, advanced incrementally below
      const int qmax = std::min(poly.high(), m);
      // walk j = m - q from m - qmax upward as q goes down
      int j0 = m - qmax;
      for (int j = 0; j < j0; ++j) kpow = kpow * (-k) / (j + 1);
      for (int q = qmax, j = j0; q >= poly.low(); --q, ++j) {
        if (j > span) break;
        acc += poly.coeff(q) * kpow;
        kpow = kpow * (-k) / (j + 1);
      }
    }
    if (m < 0) {
      if (acc != 0) throw ShapeError("principal part at z=0 does not cancel");
    } else {
      result[static_cast<std::size_t>(m)] = acc;
    }
  }
  return result;
}

MpReal ExpLaurentFn::evaluate_direct(const MpReal& z) const {
  const long bits = z.precision();
  MpReal acc(bits), kz(bits);
  for (const auto& [k, poly] : terms_) {
    MpReal part = poly.evaluate(z);
    if (k != 0) {
      kz.set(static_cast<long>(k));
      part *= exp(-(kz * z));
    }
    acc += part;
  }
  return acc;
}

}  // namespace toda
