#include "toda/nonideal.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "toda/diagnostics.hpp"
#include "toda/error.hpp"
#include "toda/hypergeometric.hpp"
#include "toda/quadrature.hpp"

namespace toda {

namespace {

double coupling_power(const TunnelConfig& cfg, double gamma2) {
  return std::pow(1.0 - gamma2, cfg.n_left * (cfg.n_left + cfg.n_right));
}

// the density without domain checks, for use inside quadrature
double jpdf_unchecked(const std::vector<long double>& R, const TunnelConfig& cfg) {
  const int nl = cfg.n_left, nr = cfg.n_right;
  long double vdm = 1, weight = 1;
  for (int j = 0; j < nl; ++j) {
    for (int k = j + 1; k < nl; ++k) vdm *= R[static_cast<std::size_t>(k)] - R[static_cast<std::size_t>(j)];
    weight *= std::pow(1 - R[static_cast<std::size_t>(j)], nr - nl);
  }
  Eigen::MatrixXd a(nl, nl);
  for (int j = 0; j < nl; ++j)
    for (int k = 1; k <= nl; ++k) {
      const long double r = R[static_cast<std::size_t>(j)];
      a(j, k - 1) = static_cast<double>(std::pow(r, k - 1) * gauss_2f1_transport(nr, k, cfg.gamma2 * r));
    }
  return to_double(tunnel_prefactor(nl, nr)) * coupling_power(cfg, cfg.gamma2) * static_cast<double>(vdm * weight) *
         a.determinant();
}

// int_0^1 e^{zR} (1-R)^{N_R-N_L} R^p 2F1(N_R+k, N_R+k; k; gamma2 R) dR
double entry_integral(const TunnelConfig& cfg, double z, double gamma2, int power, int k, int row, int col) {
  const int nl = cfg.n_left, nr = cfg.n_right;
  auto integrand = [&](long double r) {
    return std::exp(z * r) * std::pow(1 - r, nr - nl) * std::pow(r, power) * gauss_2f1_transport(nr, k, gamma2 * r);
  };
  try {
    return static_cast<double>(integrate_adaptive(integrand, 0.0L, 1.0L));
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "entry (" << row << "," << col << ") quadrature failed: " << e.what();
    throw NumericalError(msg.str());
  }
}

void check_gamma2(double gamma2) {
  if (!(gamma2 >= 0 && gamma2 < 1)) throw DomainError("gamma^2 must lie in [0, 1)");
}

}  // namespace

TunnelConfig tunnel_config(int n_left, int n_right, double gamma2) {
  if (n_left < 1 || n_right < 1)
    throw ConfigError("channel counts must be positive, got N_L=" + std::to_string(n_left) +
                      ", N_R=" + std::to_string(n_right));
  if (n_right < n_left) throw ConfigError("the tunnel-coupled lead must have N_L <= N_R");
  if (!(gamma2 >= 0 && gamma2 < 1)) throw ConfigError("gamma^2 must lie in [0, 1)");
  return TunnelConfig{n_left, n_right, gamma2};
}

BigRational tunnel_prefactor(int n_left, int n_right) {
  BigRational c = BigRational(factorial(n_left) * factorial(n_right)) / factorial(n_left + n_right);
  for (int j = 1; j <= n_left; ++j) {
    const BigInt fj = factorial(j);
    c /= BigRational(fj * fj);
    c *= BigRational(factorial(n_right + j)) / factorial(n_right - j);
  }
  return c;
}

BigRational mixed_determinant_prefactor(int n_left, int n_right) {
  BigRational c = BigRational(factorial(n_left)) * tunnel_prefactor(n_left, n_right);
  for (int k = 1; k <= n_left; ++k) {
    const BigRational ratio = BigRational(factorial(n_right)) / factorial(n_right + k - 1);
    c *= BigRational(factorial(k - 1)) * ratio * ratio;
  }
  return c;
}

double jpdf_reflection(const std::vector<double>& R, const TunnelConfig& cfg) {
  if (static_cast<int>(R.size()) != cfg.n_left)
    throw DomainError("expected " + std::to_string(cfg.n_left) + " reflection eigenvalues");
  std::vector<long double> r;
  for (double x : R) {
    if (!(x > 0 && x < 1)) throw DomainError("reflection eigenvalues must lie strictly inside (0, 1)");
    r.push_back(x);
  }
  const double p = jpdf_unchecked(r, cfg);
  if (!std::isfinite(p)) throw NumericalError("non-finite reflection density");
  return p;
}

double reflection_jpdf_mass(const TunnelConfig& cfg) {
  if (cfg.n_left == 1)
    return static_cast<double>(integrate_adaptive(
        [&](long double r) { return static_cast<long double>(jpdf_unchecked({r}, cfg)); }, 0.0L,
        1.0L));
  if (cfg.n_left != 2) throw DomainError("joint density mass is implemented for N_L <= 2");
  return static_cast<double>(integrate_adaptive(
      [&](long double r) { return static_cast<long double>(reflection_density(cfg, static_cast<double>(r))); }, 0.0L,
      1.0L));
}

double reflection_density(const TunnelConfig& cfg, double R) {
  if (!(R > 0 && R < 1)) throw DomainError("reflection eigenvalue must lie strictly inside (0, 1)");
  if (cfg.n_left == 1) return jpdf_reflection({R}, cfg);
  if (cfg.n_left != 2) throw DomainError("one-point reflection density is implemented for N_L <= 2");
  return static_cast<double>(integrate_adaptive(
      [&](long double r2) { return static_cast<long double>(jpdf_unchecked({R, r2}, cfg)); }, 0.0L, 1.0L));
}

double determinant(const Eigen::MatrixXd& m, double* condition) {
  if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
  if (m.rows() == 0) {
    if (condition) *condition = 1;
    return 1;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rc = lu.rcond();
  const double cond = rc > 0 ? 1 / rc : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (cond > 1e10) {
    std::ostringstream msg;
    msg << "determinant of an ill-conditioned " << m.rows() << "x" << m.rows() << " matrix (condition ~ " << cond
        << ")";
    warn(msg.str());
  }
  const double d = lu.determinant();
  if (!std::isfinite(d)) throw NumericalError("non-finite determinant");
  return d;
}

double mgf_nonideal(const TunnelConfig& cfg, double z) {
  if (!std::isfinite(z)) throw DomainError("mgf_nonideal needs a finite z");
  check_gamma2(cfg.gamma2);
  const int nl = cfg.n_left;
  Eigen::MatrixXd m(nl, nl);
  for (int j = 1; j <= nl; ++j)
    for (int k = 1; k <= nl; ++k) m(j - 1, k - 1) = entry_integral(cfg, z, cfg.gamma2, j + k - 2, k, j, k);
  return to_double(BigRational(factorial(nl)) * tunnel_prefactor(nl, cfg.n_right)) *
         coupling_power(cfg, cfg.gamma2) * std::exp(-nl * z) * determinant(m);
}

double u_sequence(const TunnelConfig& cfg, int n, double z, double gamma2) {
  if (n < 0) throw DomainError("u_n needs n >= 0");
  check_gamma2(gamma2);
  if (n == 0) return 1.0;
  const int nr = cfg.n_right;
  Eigen::MatrixXd m(n, n);
  for (int k = 1; k <= n; ++k) {
    // d^{k-1}/d(gamma2)^{k-1} of 2F1(N_R+1, N_R+1; 1; gamma2 R)
    const BigRational rising = BigRational(factorial(nr + k - 1)) / factorial(nr);
    const double coeff = to_double(rising * rising / factorial(k - 1));
    for (int j = 1; j <= n; ++j) m(j - 1, k - 1) = coeff * entry_integral(cfg, z, gamma2, j + k - 2, k, j, k);
  }
  return determinant(m);
}

double mgf_from_u(const TunnelConfig& cfg, double z) {
  return to_double(mixed_determinant_prefactor(cfg.n_left, cfg.n_right)) * coupling_power(cfg, cfg.gamma2) *
         std::exp(-cfg.n_left * z) * u_sequence(cfg, cfg.n_left, z, cfg.gamma2);
}

Toda2DFrame toda2d_frame(const TunnelConfig& cfg, double z, double gamma2, double h, int n) {
  if (n == 0) n = cfg.n_left;
  if (n < 1) throw DomainError("2D Toda check needs n >= 1");
  if (!(h > 0)) throw DomainError("stencil step must be positive");
  if (!(gamma2 - h >= 0 && gamma2 + h < 1)) throw DomainError("stencil leaves the gamma^2 domain [0, 1)");
  Toda2DFrame f;
  f.n = n;
  f.z = z;
  f.gamma2 = gamma2;
  f.h = h;
  auto log_u = [&](double zz, double gg) {
    const double u = u_sequence(cfg, n, zz, gg);
    if (!(u > 0)) {
      std::ostringstream msg;
      msg << "u_" << n << " = " << u << " <= 0 at (z=" << zz << ", gamma2=" << gg << "); log undefined";
      throw DomainError(msg.str());
    }
    return std::log(u);
  };
  f.mixed_log_derivative =
      (log_u(z + h, gamma2 + h) - log_u(z + h, gamma2 - h) - log_u(z - h, gamma2 + h) + log_u(z - h, gamma2 - h)) /
      (4 * h * h);
  f.u_prev = u_sequence(cfg, n - 1, z, gamma2);
  f.u = u_sequence(cfg, n, z, gamma2);
  f.u_next = u_sequence(cfg, n + 1, z, gamma2);
  f.residual = std::abs(f.mixed_log_derivative - f.u_prev * f.u_next / (f.u * f.u));
  return f;
}

double toda2d_check(const TunnelConfig& cfg, double z, double gamma2, double h) {
  return toda2d_frame(cfg, z, gamma2, h).residual;
}

}  // namespace toda
