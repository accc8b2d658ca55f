#include "toda/polynomial.hpp"

#include <algorithm>

namespace toda {

Polynomial::Polynomial(std::initializer_list<BigRational> coeffs) : coeffs_(coeffs) {
  trim();
}

Polynomial::Polynomial(std::vector<BigRational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

Polynomial Polynomial::constant(const BigRational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(const BigRational& c, int k) {
  std::vector<BigRational> v(static_cast<std::size_t>(k) + 1);
  v[static_cast<std::size_t>(k)] = c;
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigRational Polynomial::coeff(int k) const {
  if (k < 0 || k > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(k)];
}

BigRational Polynomial::operator()(const BigRational& x) const {
  BigRational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * x + it->get_d();
  return acc;
}

Polynomial Polynomial::shifted(const BigRational& a) const {
  // Horner in the ring: p(x+a) = (...(c_d (x+a) + c_{d-1})(x+a) + ...)
  Polynomial result;
  const Polynomial lin({a, BigRational(1)});
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    result *= lin;
    result += Polynomial::constant(*it);
  }
  return result;
}

Polynomial Polynomial::reflected() const {
  std::vector<BigRational> v = coeffs_;
  for (std::size_t k = 1; k < v.size(); k += 2) v[k] = -v[k];
  return Polynomial(std::move(v));
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<BigRational> v(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    v[k - 1] = coeffs_[k] * static_cast<long>(k);
  return Polynomial(std::move(v));
}

Polynomial Polynomial::antiderivative() const {
  if (coeffs_.empty()) return {};
  std::vector<BigRational> v(coeffs_.size() + 1);
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    v[k + 1] = coeffs_[k] / static_cast<long>(k + 1);
  return Polynomial(std::move(v));
}

BigRational Polynomial::integral(const BigRational& a, const BigRational& b) const {
  Polynomial anti = antiderivative();
  return anti(b) - anti(a);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<BigRational> v(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) v[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(v);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const BigRational& c) {
  if (c == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

}  // namespace toda
