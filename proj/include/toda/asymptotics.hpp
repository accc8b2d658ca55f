#pragma once

#include <vector>

#include "toda/cumulants.hpp"
#include "toda/ensemble.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Coefficients of the 1/(4n) expansion of chi_l = (-1)^l kappa_l / Gamma(l):
/// delta chi_l = a_l/(4n)^l + b_l/(4n)^{l+1} + c_l/(4n)^{l+2} + ...
BigRational asym_a(int l, const BigRational& nu);
BigRational asym_b(int l, const BigRational& nu);
BigRational asym_c(int l, const BigRational& nu);

/// Large-n expansion of kappa_l(G) at fixed nu; `with_c` adds the
/// (4n)^{-(l+2)} correction.
BigRational kappa_asymptotic_exact(int l, int n, const BigRational& nu, bool with_c = true);
double kappa_asymptotic(int l, const LeadConfig& cfg, bool with_c = true);

/// chi_0..chi_L from exact cumulants (chi_0 = n(n+nu)).
std::vector<BigRational> chi_sequence(const CumulantSeq& seq);

/// Residuals of the chi-form recurrence at l = 0..chi.size()-2 (chi_{-1}
/// and the empty sum are zero at l = 0).
std::vector<BigRational> chi_recurrence_residuals(const LeadConfig& cfg, const std::vector<BigRational>& chi);

/// Gaussian part plus leading non-Gaussian correction of <<G^l P^m>> for
/// symmetric leads. Throws DomainError unless nu = 0.
double joint_asymptotic(int l, int m, int n, double f, const BigRational& nu = 0);

/// Large-n noise-power cumulants for symmetric leads, noise power in units
/// theta G0 (4^l times the joint-table <<P^l>>).
double noise_power_asymptotic(int l, int n, double f, const BigRational& nu = 0);

/// Local log-log slopes -log(e_{i+1}/e_i)/log(n_{i+1}/n_i). An exact zero
/// error yields +infinity.
std::vector<double> convergence_orders(const std::vector<int>& ns, const std::vector<double>& errors);

/// Least-squares slope of -log e against log n over the whole sweep.
double fitted_order(const std::vector<int>& ns, const std::vector<double>& errors);

}  // namespace toda
