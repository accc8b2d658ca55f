#pragma once

#include <optional>

#include "toda/rational.hpp"

namespace toda {

/// Channel configuration of a two-lead cavity. `n` is the number of
/// non-trivial transmission eigenvalues and `nu` the lead asymmetry.
/// Effective configurations (used by the shot-noise factorization) carry a
/// rational `nu` and no physical channel counts.
struct LeadConfig {
  int n = 0;
  BigRational nu = 0;
  std::optional<int> n_left;
  std::optional<int> n_right;

  /// 2n + nu, the parameter that enters every recurrence.
  BigRational width() const { return 2 * BigRational(n) + nu; }
  /// n (n + nu)
  BigRational n_times_n_plus_nu() const { return BigRational(n) * (n + nu); }
  bool integer_nu() const { return is_integer(nu); }
  /// nu as an int; throws DomainError when nu is not an integer.
  int nu_int() const;
};

/// Physical configuration from channel counts; throws ConfigError for a
/// zero or negative count.
LeadConfig lead_config(int n_left, int n_right);

/// Effective configuration: n >= 0, nu >= -1/2 and n + nu > 0 unless n = 0.
LeadConfig effective_config(int n, const BigRational& nu);

/// Thermodynamic crossover factor f = eta coth(eta) - 1. The shot-noise
/// limit eta -> infinity is a tag, never a floating infinity.
struct ThermoFactor {
  double eta = 0.0;
  double f = 0.0;
  bool shot_limit = false;
};

ThermoFactor thermo_factor(double eta);
ThermoFactor thermo_shot_limit();

/// c_{n,nu} = prod_{j<n} (j+1)! (j+nu)! j! / (j+nu+n)!, the integral of
/// prod T^nu |Vandermonde(T)|^2 over [0,1]^n; the transmission-eigenvalue
/// density divides by it. Integer nu >= 0 only.
BigRational normalization_c(int n, int nu);

/// var_{n,nu}(G) = n^2 (n+nu)^2 / ((2n+nu)^2 ((2n+nu)^2 - 1)).
BigRational conductance_variance(const LeadConfig& cfg);

}  // namespace toda
