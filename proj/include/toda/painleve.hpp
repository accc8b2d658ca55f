#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "toda/cumulants.hpp"
#include "toda/ensemble.hpp"
#include "toda/mp_real.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Taylor expansion of the sigma function at z = 0:
/// sigma(z) = n(n+nu) + sum_{l>=1} (-1)^l kappa_l z^l / (l-1)!.
struct SigmaSeries {
  LeadConfig cfg;
  std::vector<BigRational> coefficients;  // z^0 .. z^order

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  /// k-th derivative of the truncated series at z.
  double value(double z, int derivative = 0) const;
  MpReal value(const MpReal& z, int derivative = 0) const;
  /// int_0^z (sigma(t) - n(n+nu)) / t dt of the truncated series.
  double log_mgf(double z) const;
  /// Size of the last retained term at z, a proxy for the truncation error.
  double truncation_estimate(double z) const;
};

SigmaSeries sigma_series(const LeadConfig& cfg, int order, SingularPolicy policy = SingularPolicy::Raise);

/// (z s'')^2 - [s - z s' + 2 s'^2 + (2n+nu) s']^2 + 4 s'^2 (s'+n)(s'+n+nu)
double jmo_residual(const LeadConfig& cfg, double z, double s, double s1, double s2);
MpReal jmo_residual(const LeadConfig& cfg, const MpReal& z, const MpReal& s, const MpReal& s1, const MpReal& s2);

/// s''' from the Chazy-class third-order equation.
double chazy_rhs(const LeadConfig& cfg, double z, double s, double s1, double s2);

struct ChazyOptions {
  int seed_order = 40;
  /// Move the start of the numerical trajectory forward from z0 to the
  /// largest point where the seed series is still accurate to 0.01 tol.
  /// Solutions analytic at 0 form a one-parameter family differing at
  /// order z^{2n+nu+1}, so errors made near z0 grow like (z/z0)^{2n+nu+1}.
  bool auto_handoff = true;
  SingularPolicy policy = SingularPolicy::SymbolicFallback;
  double max_step_fraction = 0.1;  // h <= fraction * z
  long max_steps = 2'000'000;
  /// Integration stops when |JMO| / (1 + s^2 + (z s'')^2) exceeds this.
  double residual_limit = 1e-4;
};

/// Trajectory of sigma on [z0, z1] with quintic Hermite dense output; the
/// seed series covers [0, z0).
class SigmaSolution {
 public:
  const LeadConfig& cfg() const { return seed_.cfg; }
  const SigmaSeries& seed() const { return seed_; }
  double tol() const { return tol_; }
  /// Start of the numerical trajectory (the handoff point).
  double z0() const { return grid_.front(); }
  double z1() const { return grid_.back(); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& sigma() const { return s_; }
  const std::vector<double>& dsigma() const { return s1_; }
  const std::vector<double>& d2sigma() const { return s2_; }
  bool trivial() const { return trivial_; }

  double sigma_at(double z) const;
  double dsigma_at(double z) const;
  double d2sigma_at(double z) const;
  /// sup over grid points of |JMO residual|.
  double jmo_sup() const;

 private:
  friend SigmaSolution integrate_chazy(const LeadConfig&, double, double, double, const ChazyOptions&);
  friend double log_mgf_from_sigma(const SigmaSolution&, double);
  std::size_t locate(double z) const;

  SigmaSeries seed_;
  double tol_ = 0;
  bool trivial_ = false;
  std::vector<double> grid_, s_, s1_, s2_, s3_;
  std::vector<double> log_at_grid_;  // log F at grid points
};

/// Integrates the explicit third-order equation from z0 to z1 with an
/// embedded Dormand-Prince 5(4) pair. Throws NumericalError on step-size
/// underflow, a non-finite state or a residual blow-up.
SigmaSolution integrate_chazy(const LeadConfig& cfg, double z0, double z1, double tol,
                              const ChazyOptions& opt = {});

/// log F(z) = int_0^z (sigma(t) - n(n+nu)) / t dt.
double log_mgf_from_sigma(const SigmaSolution& sol, double z);

/// log of <exp(z P_shot)> for symmetric leads (nu = 0) from the two
/// half-integer sigma functions.
class ShotMgfSymmetric {
 public:
  ShotMgfSymmetric(int n, double z_max, double tol = 1e-12, double z0 = 0.05);
  double log_mgf(double z) const;
  int n() const { return n_; }

 private:
  int n_;
  std::vector<SigmaSolution> parts_;
};

double shot_mgf_symmetric(int n, double z);

/// Rows z, sigma, dsigma, jmo_residual.
void write_sigma_csv(const SigmaSolution& sol, std::ostream& out);

}  // namespace toda
