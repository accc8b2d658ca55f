#pragma once

#include <vector>

#include "toda/ensemble.hpp"
#include "toda/exp_laurent.hpp"
#include "toda/mp_real.hpp"
#include "toda/polynomial.hpp"

namespace toda {

/// mu_m(z) = int_0^1 T^{nu+m} e^{-zT} dT in closed form.
ExpLaurentFn moment_fn(int m, int nu);

/// Conductance MGF <exp(-zG)> for ideal leads as an exact Hankel
/// determinant of moment functions. Integer nu only.
ExpLaurentFn mgf_hankel(const LeadConfig& cfg);

/// Residual F_n F_n'' - (F_n')^2 - var * F_{n-1} F_{n+1}; `var` defaults to
/// the conductance variance of `cfg`.
ExpLaurentFn toda_residual(const LeadConfig& cfg, const BigRational& var);
ExpLaurentFn toda_residual(const LeadConfig& cfg);
bool toda_check(const LeadConfig& cfg);
bool toda_check(const LeadConfig& cfg, const BigRational& var);

/// Exact conductance density on (0, n). On (k, k+1) it equals
/// sum_{j<=k} h_j(g - j); equivalently sum_k sgn(g-k) pi_k(g-k).
struct PiecewisePolyDensity {
  int n = 0;
  int nu = 0;
  std::vector<Polynomial> heaviside;  // h_0 .. h_n
  std::vector<Polynomial> sgn;        // pi_0 .. pi_n

  double operator()(double g) const;
  BigRational operator()(const BigRational& g) const;
  /// int_0^n density, exact.
  BigRational total_mass() const;
  /// sum_k pi_k(g - k) as a polynomial in g; zero for a consistent density.
  Polynomial closure_residual() const;
};

/// Inverse Laplace transform of an MGF of shape z^{-p} sum_k e^{-kz} Q_k(z).
PiecewisePolyDensity density_from_mgf(const ExpLaurentFn& mgf, const LeadConfig& cfg);

/// Numerical evaluation with a cached Taylor expansion for |z| < 0.5.
class MgfEvaluator {
 public:
  MgfEvaluator(ExpLaurentFn fn, long bits);
  /// Value at z, correctly rounded to the evaluator's precision.
  MpReal operator()(double z) const;
  double value(double z) const { return (*this)(z).to_double(); }
  const std::vector<BigRational>& taylor() const { return taylor_; }

 private:
  ExpLaurentFn fn_;
  long bits_;
  std::vector<BigRational> taylor_;
};

MpReal eval_mgf(const ExpLaurentFn& mgf, double z, long bits);

/// Taylor coefficients of log F at 0 up to z^order (F(0) must be 1).
std::vector<BigRational> log_series(const ExpLaurentFn& mgf, int order);

/// kappa_1..kappa_L of G read off the exact log-MGF (index 0 unused).
std::vector<BigRational> cumulants_from_mgf(const ExpLaurentFn& mgf, int L);

}  // namespace toda
