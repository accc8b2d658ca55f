#pragma once

#include <Eigen/Dense>

#include <vector>

#include "toda/rational.hpp"

namespace toda {

/// Cavity with a tunnel-coupled left lead (N_L channels, reflection
/// amplitude gamma per channel) and an ideal right lead.
struct TunnelConfig {
  int n_left = 1;
  int n_right = 1;
  double gamma2 = 0.0;  // gamma^2; the tunnel probability is 1 - gamma^2

  double tunnel_probability() const { return 1.0 - gamma2; }
};

/// Throws ConfigError unless 1 <= N_L <= N_R and 0 <= gamma2 < 1.
TunnelConfig tunnel_config(int n_left, int n_right, double gamma2);

/// c(N_L, N_R), the gamma-independent JPDF prefactor.
BigRational tunnel_prefactor(int n_left, int n_right);

/// N_L! c(N_L, N_R) prod_k (k-1)! (N_R!/(N_R+k-1)!)^2: the prefactor of the
/// mixed-derivative determinant, without the (1-gamma^2) power.
BigRational mixed_determinant_prefactor(int n_left, int n_right);

/// Joint density of the reflection eigenvalues over (0,1)^{N_L}.
double jpdf_reflection(const std::vector<double>& R, const TunnelConfig& cfg);

/// Integral of the joint density over (0,1)^{N_L} by nested adaptive
/// quadrature (N_L <= 2).
double reflection_jpdf_mass(const TunnelConfig& cfg);

/// One-point density of the reflection eigenvalues (N_L <= 2).
double reflection_density(const TunnelConfig& cfg, double R);

/// Determinant by partial-pivot LU; warns above condition 1e10.
double determinant(const Eigen::MatrixXd& m, double* condition = nullptr);

/// Conductance MGF <exp(-zG)> with G = N_L - sum R_j, from the Andreief
/// determinant of one-dimensional entry integrals.
double mgf_nonideal(const TunnelConfig& cfg, double z);

/// u_n(gamma2, z): det of d_z^{j-1} d_{gamma2}^{k-1} M_11, with the
/// derivatives taken under the integral sign. u_0 = 1.
double u_sequence(const TunnelConfig& cfg, int n, double z, double gamma2);

/// The MGF rebuilt from u_{N_L} and its separable prefactor.
double mgf_from_u(const TunnelConfig& cfg, double z);

struct Toda2DFrame {
  int n = 0;
  double z = 0, gamma2 = 0, h = 0;
  double u_prev = 0, u = 0, u_next = 0;
  double mixed_log_derivative = 0;  // d_z d_{gamma2} log u_n, 4-point stencil
  double residual = 0;              // |mixed - u_prev u_next / u^2|
};

/// Two-dimensional Toda check for u_n at (z, gamma2); n defaults to N_L.
Toda2DFrame toda2d_frame(const TunnelConfig& cfg, double z, double gamma2, double h, int n = 0);
double toda2d_check(const TunnelConfig& cfg, double z, double gamma2, double h);

}  // namespace toda
