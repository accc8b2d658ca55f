#pragma once

#include <map>
#include <utility>
#include <vector>

#include "toda/ensemble.hpp"
#include "toda/polynomial.hpp"
#include "toda/rational.hpp"

namespace toda {

/// Conductance cumulants kappa_1..kappa_L (index 0 is unused and zero).
struct CumulantSeq {
  LeadConfig cfg;
  std::vector<BigRational> values;

  int order() const { return static_cast<int>(values.size()) - 1; }
  const BigRational& operator[](int l) const { return values.at(static_cast<std::size_t>(l)); }
};

/// What to do when the recurrence coefficient (2n+nu)^2 - l^2 vanishes.
enum class SingularPolicy {
  Raise,             // throw SingularOrderError naming l
  SymbolicFallback,  // take kappa_{l+1} from the exact log-MGF and continue
};

/// Orders l in [2, L-1] at which kappa_{l+1} cannot be solved for.
std::vector<int> singular_orders(const LeadConfig& cfg, int L);

CumulantSeq conductance_cumulants(const LeadConfig& cfg, int L,
                                  SingularPolicy policy = SingularPolicy::Raise);

/// Left-hand side of the cumulant recurrence at order l (zero when the
/// sequence satisfies it). Needs kappa up to l+1.
BigRational cumulant_recurrence_residual(const CumulantSeq& seq, int l);

BigRational kappa1_closed(const LeadConfig& cfg);
BigRational kappa2_closed(const LeadConfig& cfg);
/// -2 nu^2 kappa_1^2 / (m (m^2-1)(m^2-4)), m = 2n + nu.
BigRational kappa3_closed(const LeadConfig& cfg);
/// The often-quoted form -nu^2 kappa_1^2 / (2n+nu); agrees only at nu = 0.
BigRational kappa3_quoted(const LeadConfig& cfg);

/// Polynomial in the thermodynamic factor f.
using FEtaPoly = Polynomial;

/// Joint cumulants <<G^l P^m>> as polynomials in f.
struct JointCumulantTable {
  LeadConfig cfg;
  int lmax = 0;
  int mmax = 0;
  std::map<std::pair<int, int>, FEtaPoly> entries;

  const FEtaPoly& at(int l, int m) const;
  bool contains(int l, int m) const { return entries.count({l, m}) != 0; }
  double evaluate(int l, int m, double f) const { return at(l, m).evaluate(f); }
};

/// Conductance order the joint recurrence needs for an (lmax, mmax) table.
inline int joint_boundary_order(int lmax, int mmax) { return lmax + 2 * mmax; }

/// Builds the table from given conductance cumulants; throws DepthError if
/// `boundary` is too short.
JointCumulantTable joint_cumulants(const CumulantSeq& boundary, int lmax, int mmax);
JointCumulantTable joint_cumulants(const LeadConfig& cfg, int lmax, int mmax,
                                   SingularPolicy policy = SingularPolicy::SymbolicFallback);

/// Zero-temperature joint cumulants <<G^l P_shot^m>>: the f^m coefficient.
std::map<std::pair<int, int>, BigRational> shot_limit(const JointCumulantTable& table);

/// Residual of the zero-temperature joint recurrence at (l, m); all the
/// entries it touches must be present.
BigRational shot_recurrence_residual(const std::map<std::pair<int, int>, BigRational>& shot,
                                     const LeadConfig& cfg, int l, int m);

/// kappa_1..kappa_L of P_shot for symmetric leads via the half-integer
/// factorization (index 0 unused).
std::vector<BigRational> shot_cumulants_symmetric(int n, int L);

/// Closed low-order joint cumulants; `seq` must reach order l+4.
struct NoisePowerClosedForms {
  int l = 0;
  FEtaPoly kappa_l1;    // <<G^l P>>
  FEtaPoly kappa_l2;    // <<G^l P^2>>
  BigRational shot_l1;  // <<G^l P_shot>>
  BigRational shot_l2;  // <<G^l P_shot^2>>
};
NoisePowerClosedForms noise_power_closed_forms(const CumulantSeq& seq, int l);

/// Mean noise power for channel counts (units 4 theta G0), as polynomial in f.
FEtaPoly mean_noise_power(int n_left, int n_right);

/// Closed forms for the first three shot-noise cumulants, symmetric leads.
BigRational shot_kappa1_closed(int n);
BigRational shot_kappa2_closed(int n);
/// n^3 (4n^4 - 13n^2 + 6) / (4 (4n^2-1)^3 (4n^2-9)(4n^2-25))
BigRational shot_kappa3_closed(int n);
/// The often-quoted n^2(16n^6-24n^4+9n^2+1)/(128(4n^2-1)^4); wrong for every n.
BigRational shot_kappa3_quoted(int n);

}  // namespace toda
