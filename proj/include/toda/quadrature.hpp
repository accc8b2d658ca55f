#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "toda/error.hpp"

namespace toda {

/// Gauss-Legendre rule on [-1, 1], nodes from Newton iteration in long double.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);
  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<long double>& nodes() const { return nodes_; }
  const std::vector<long double>& weights() const { return weights_; }

  template <class F>
  auto integrate(F&& f, long double a, long double b) const -> decltype(f(a)) {
    using T = decltype(f(a));
    const long double mid = 0.5L * (a + b), half = 0.5L * (b - a);
    T acc = T(0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += static_cast<T>(weights_[i]) * f(mid + half * nodes_[i]);
    return acc * static_cast<T>(half);
  }

 private:
  std::vector<long double> nodes_;
  std::vector<long double> weights_;
};

/// Shared 20-point rule.
const GaussLegendre& default_rule();

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  int max_depth = 30;
};

namespace detail {

template <class F, class T>
T adaptive_step(F& f, long double a, long double b, T whole, const QuadratureOptions& opt, int depth, T scale) {
  const GaussLegendre& rule = default_rule();
  const long double mid = 0.5L * (a + b);
  const T left = rule.integrate(f, a, mid);
  const T right = rule.integrate(f, mid, b);
  const T both = left + right;
  using std::abs;
  const T tol = std::max(static_cast<T>(opt.rel_tol) * abs(scale), static_cast<T>(opt.abs_tol));
  if (abs(both - whole) <= tol) return both;
  if (depth >= opt.max_depth)
    throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(static_cast<double>(a)) +
                         ", " + std::to_string(static_cast<double>(b)) + "]");
  return adaptive_step(f, a, mid, left, opt, depth + 1, scale) + adaptive_step(f, mid, b, right, opt, depth + 1, scale);
}

}  // namespace detail

/// Adaptive Gauss-Legendre with interval bisection: an interval is accepted
/// when the 20-point estimate and the sum over its halves agree to rel_tol
/// relative to the whole-range estimate.
template <class F>
auto integrate_adaptive(F&& f, long double a, long double b, const QuadratureOptions& opt = {})
    -> decltype(f(a)) {
  using T = decltype(f(a));
  const T whole = default_rule().integrate(f, a, b);
  using std::abs;
  T scale = whole;
  // a crude magnitude guard for integrands whose total nearly cancels
  if (abs(scale) == T(0)) scale = T(1);
  return detail::adaptive_step(f, a, b, whole, opt, 0, scale);
}

}  // namespace toda
