#include "toda/painleve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "toda/error.hpp"
#include "toda/quadrature.hpp"

namespace toda {

namespace {

// Quintic Hermite interpolant on [0, h] from value, first and second
// derivative at both ends; `which` selects p, p' or p''.
double hermite5(double h, double t, double y0, double d0, double s0, double y1, double d1, double s1, int which) {
  const double u = t / h;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  if (which == 0) {
    const double h0 = 1 - 10 * u3 + 15 * u4 - 6 * u5;
    const double h1 = u - 6 * u3 + 8 * u4 - 3 * u5;
    const double h2 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5);
    const double h3 = 0.5 * (u3 - 2 * u4 + u5);
    const double h4 = -4 * u3 + 7 * u4 - 3 * u5;
    const double h5 = 10 * u3 - 15 * u4 + 6 * u5;
    return y0 * h0 + h * d0 * h1 + h * h * s0 * h2 + h * h * s1 * h3 + h * d1 * h4 + y1 * h5;
  }
  // derivative with respect to t
  const double h0 = (-30 * u2 + 60 * u3 - 30 * u4) / h;
  const double h1 = (1 - 18 * u2 + 32 * u3 - 15 * u4) / h;
  const double h2 = 0.5 * (2 * u - 9 * u2 + 12 * u3 - 5 * u4) / h;
  const double h3 = 0.5 * (3 * u2 - 8 * u3 + 5 * u4) / h;
  const double h4 = (-12 * u2 + 28 * u3 - 15 * u4) / h;
  const double h5 = (30 * u2 - 60 * u3 + 30 * u4) / h;
  return y0 * h0 + h * d0 * h1 + h * h * s0 * h2 + h * h * s1 * h3 + h * d1 * h4 + y1 * h5;
}

// Cubic Hermite from value and derivative at both ends.
double hermite3(double h, double t, double y0, double d0, double y1, double d1) {
  const double u = t / h;
  const double u2 = u * u, u3 = u2 * u;
  return y0 * (2 * u3 - 3 * u2 + 1) + h * d0 * (u3 - 2 * u2 + u) + y1 * (-2 * u3 + 3 * u2) + h * d1 * (u3 - u2);
}

const GaussLegendre& step_rule() {
  static const GaussLegendre rule(8);
  return rule;
}

using State = std::array<double, 3>;

}  // namespace

double SigmaSeries::value(double z, int derivative) const {
  double acc = 0;
  for (int j = order(); j >= derivative; --j) {
    double falling = 1;
    for (int i = 0; i < derivative; ++i) falling *= j - i;
    acc = acc * z + to_double(coefficients[static_cast<std::size_t>(j)]) * falling;
  }
  return acc;
}

MpReal SigmaSeries::value(const MpReal& z, int derivative) const {
  MpReal acc(z.precision());
  acc.set(0L);
  for (int j = order(); j >= derivative; --j) {
    BigRational c = coefficients[static_cast<std::size_t>(j)];
    for (int i = 0; i < derivative; ++i) c *= j - i;
    MpReal term(z.precision());
    term.set(c);
    acc = acc * z + term;
  }
  return acc;
}

double SigmaSeries::log_mgf(double z) const {
  double acc = 0;
  for (int l = order(); l >= 1; --l) acc = acc * z + to_double(coefficients[static_cast<std::size_t>(l)]) / l;
  return acc * z;
}

double SigmaSeries::truncation_estimate(double z) const {
  // the last few terms, since isolated coefficients can vanish
  double est = 0;
  for (int j = std::max(1, order() - 2); j <= order(); ++j)
    est = std::max(est, std::abs(to_double(coefficients[static_cast<std::size_t>(j)])) * std::pow(std::abs(z), j));
  return est;
}

SigmaSeries sigma_series(const LeadConfig& cfg, int order, SingularPolicy policy) {
  if (order < 1) throw DomainError("sigma series order must be at least 1");
  SigmaSeries out{cfg, std::vector<BigRational>(static_cast<std::size_t>(order) + 1, BigRational(0))};
  out.coefficients[0] = cfg.n_times_n_plus_nu();
  if (cfg.n == 0) return out;
  const CumulantSeq seq = conductance_cumulants(cfg, order, policy);
  for (int l = 1; l <= order; ++l) {
    BigRational c = seq[l] / factorial(l - 1);
    if (l % 2 == 1) c = -c;
    out.coefficients[static_cast<std::size_t>(l)] = c;
  }
  return out;
}

double jmo_residual(const LeadConfig& cfg, double z, double s, double s1, double s2) {
  const double n = cfg.n, nu = to_double(cfg.nu), w = 2 * n + nu;
  const double a = z * s2;
  const double b = s - z * s1 + 2 * s1 * s1 + w * s1;
  return a * a - b * b + 4 * s1 * s1 * (s1 + n) * (s1 + n + nu);
}

MpReal jmo_residual(const LeadConfig& cfg, const MpReal& z, const MpReal& s, const MpReal& s1, const MpReal& s2) {
  const long bits = z.precision();
  MpReal n(bits), nu(bits), w(bits), two(bits), four(bits);
  n.set(static_cast<long>(cfg.n));
  nu.set(cfg.nu);
  w.set(cfg.width());
  two.set(2L);
  four.set(4L);
  const MpReal a = z * s2;
  const MpReal b = s - z * s1 + two * s1 * s1 + w * s1;
  return a * a - b * b + four * s1 * s1 * (s1 + n) * (s1 + n + nu);
}

double chazy_rhs(const LeadConfig& cfg, double z, double s, double s1, double s2) {
  const double nu = to_double(cfg.nu), w = to_double(cfg.width());
  const double num = -z * s2 - 6 * z * s1 * s1 + 4 * s * s1 + (z * z - 2 * w * z + nu * nu) * s1 + (w - z) * s;
  return num / (z * z);
}

std::size_t SigmaSolution::locate(double z) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), z);
  std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, grid_.size() - 2);
}

double SigmaSolution::sigma_at(double z) const {
  if (z < z0()) return seed_.value(z);
  if (z > z1() * (1 + 1e-14)) throw DomainError("sigma requested beyond the integrated range");
  if (trivial_) return 0;
  const std::size_t i = locate(z);
  return hermite5(grid_[i + 1] - grid_[i], z - grid_[i], s_[i], s1_[i], s2_[i], s_[i + 1], s1_[i + 1], s2_[i + 1], 0);
}

double SigmaSolution::dsigma_at(double z) const {
  if (z < z0()) return seed_.value(z, 1);
  if (z > z1() * (1 + 1e-14)) throw DomainError("sigma requested beyond the integrated range");
  if (trivial_) return 0;
  const std::size_t i = locate(z);
  return hermite5(grid_[i + 1] - grid_[i], z - grid_[i], s1_[i], s2_[i], s3_[i], s1_[i + 1], s2_[i + 1], s3_[i + 1],
                  0);
}

double SigmaSolution::d2sigma_at(double z) const {
  if (z < z0()) return seed_.value(z, 2);
  if (z > z1() * (1 + 1e-14)) throw DomainError("sigma requested beyond the integrated range");
  if (trivial_) return 0;
  const std::size_t i = locate(z);
  return hermite3(grid_[i + 1] - grid_[i], z - grid_[i], s2_[i], s3_[i], s2_[i + 1], s3_[i + 1]);
}

double SigmaSolution::jmo_sup() const {
  double sup = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    sup = std::max(sup, std::abs(jmo_residual(cfg(), grid_[i], s_[i], s1_[i], s2_[i])));
  return sup;
}

SigmaSolution integrate_chazy(const LeadConfig& cfg, double z0, double z1, double tol, const ChazyOptions& opt) {
  if (!(z0 > 0 && z1 > z0)) throw DomainError("integrate_chazy needs 0 < z0 < z1");
  if (opt.seed_order < 6) throw DomainError("seed order must be at least 6");
  if (!(tol >= 1e-13 && tol <= 1e-6)) throw DomainError("tolerance must lie in [1e-13, 1e-6]");

  SigmaSolution sol;
  sol.seed_ = sigma_series(cfg, opt.seed_order, opt.policy);
  sol.tol_ = tol;
  if (cfg.n == 0) {
    sol.trivial_ = true;
    sol.grid_ = {z0, z1};
    sol.s_ = sol.s1_ = sol.s2_ = sol.s3_ = sol.log_at_grid_ = {0.0, 0.0};
    return sol;
  }

  if (opt.auto_handoff) {
    const double ratio = 1.02;
    while (z0 * ratio * ratio < z1 &&
           sol.seed_.truncation_estimate(z0 * ratio) <= 0.01 * tol * std::max(1.0, std::abs(sol.seed_.value(z0 * ratio))))
      z0 *= ratio;
  }

  auto rhs = [&](double z, const State& y) { return State{y[1], y[2], chazy_rhs(cfg, z, y[0], y[1], y[2])}; };

  State y{sol.seed_.value(z0), sol.seed_.value(z0, 1), sol.seed_.value(z0, 2)};
  State k1 = rhs(z0, y);
  const double p = to_double(cfg.n_times_n_plus_nu());
  auto push = [&](double z, const State& s, double s3) {
    sol.grid_.push_back(z);
    sol.s_.push_back(s[0]);
    sol.s1_.push_back(s[1]);
    sol.s2_.push_back(s[2]);
    sol.s3_.push_back(s3);
  };
  push(z0, y, k1[2]);
  sol.log_at_grid_.push_back(sol.seed_.log_mgf(z0));

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  double z = z0;
  double h = std::min(0.01 * z0, opt.max_step_fraction * z0);
  long steps = 0;
  while (z < z1) {
    if (++steps > opt.max_steps) throw NumericalError("Chazy integration exceeded the step budget at z = " + std::to_string(z));
    h = std::min({h, opt.max_step_fraction * z, z1 - z});
    if (h < 1e-12 * z) {
      std::ostringstream msg;
      msg << "step size underflow at z = " << z << "; raise z0";
      throw NumericalError(msg.str());
    }
    auto combo = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (auto [c, k] : terms)
        for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
      return out;
    };
    const State k2 = rhs(z + c2 * h, combo({{a21, &k1}}));
    const State k3 = rhs(z + c3 * h, combo({{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(z + c4 * h, combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(z + c5 * h, combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(z + h, combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State ynew = combo({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(z + h, ynew);
    double err = 0;
    bool finite = true;
    for (int i = 0; i < 3; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol * std::max(1.0, std::max(std::abs(y[i]), std::abs(ynew[i])));
      err = std::max(err, std::abs(e) / sc);
      finite = finite && std::isfinite(ynew[i]) && std::isfinite(k7[i]);
    }
    if (!finite) {
      if (h < 1e-6 * z) {
        std::ostringstream msg;
        msg << "non-finite sigma state; last good z = " << z;
        throw NumericalError(msg.str());
      }
      h *= 0.25;
      continue;
    }
    if (err <= 1.0) {
      const double zprev = z;
      const std::size_t i = sol.grid_.size() - 1;
      z = (z1 - z - h < 1e-14 * z1) ? z1 : z + h;
      push(z, ynew, k7[2]);
      const double hs = z - zprev;
      auto integrand = [&](long double t) {
        const double tt = static_cast<double>(t);
        const double s = hermite5(hs, tt - zprev, sol.s_[i], sol.s1_[i], sol.s2_[i], sol.s_[i + 1], sol.s1_[i + 1],
                                  sol.s2_[i + 1], 0);
        return (s - p) / tt;
      };
      sol.log_at_grid_.push_back(sol.log_at_grid_.back() + step_rule().integrate(integrand, zprev, z));
      const double res = jmo_residual(cfg, z, ynew[0], ynew[1], ynew[2]);
      const double scale = 1 + ynew[0] * ynew[0] + std::pow(z * ynew[2], 2) + std::pow(ynew[1], 4);
      if (std::abs(res) / scale > opt.residual_limit) {
        std::ostringstream msg;
        msg << "JMO residual " << res << " exceeded the monitor limit; last good z = " << zprev;
        throw NumericalError(msg.str());
      }
      y = ynew;
      k1 = k7;
    }
    const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
  }
  return sol;
}

double log_mgf_from_sigma(const SigmaSolution& sol, double z) {
  if (z < 0) throw DomainError("log_mgf_from_sigma needs z >= 0");
  if (z <= sol.z0()) return sol.trivial_ ? 0.0 : sol.seed_.log_mgf(z);
  if (z > sol.z1() * (1 + 1e-14)) throw DomainError("log_mgf_from_sigma: z beyond the integrated range");
  if (sol.trivial_) return 0.0;
  const std::size_t i = sol.locate(z);
  const double p = to_double(sol.cfg().n_times_n_plus_nu());
  const double lo = sol.grid_[i];
  if (z == lo) return sol.log_at_grid_[i];
  auto integrand = [&](long double t) {
    const double tt = static_cast<double>(t);
    return (sol.sigma_at(tt) - p) / tt;
  };
  return sol.log_at_grid_[i] + step_rule().integrate(integrand, lo, z);
}

ShotMgfSymmetric::ShotMgfSymmetric(int n, double z_max, double tol, double z0) : n_(n) {
  if (n < 1) throw DomainError("shot-noise MGF needs n >= 1");
  const double reach = std::max(z_max / 4, 2 * z0);
  parts_.push_back(integrate_chazy(effective_config(n / 2, BigRational(1, 2)), z0, reach, tol));
  parts_.push_back(integrate_chazy(effective_config((n + 1) / 2, BigRational(-1, 2)), z0, reach, tol));
}

double ShotMgfSymmetric::log_mgf(double z) const {
  double acc = n_ * z / 4;
  for (const SigmaSolution& part : parts_) acc += log_mgf_from_sigma(part, z / 4);
  return acc;
}

double shot_mgf_symmetric(int n, double z) { return ShotMgfSymmetric(n, z).log_mgf(z); }

void write_sigma_csv(const SigmaSolution& sol, std::ostream& out) {
  out << "z,sigma,dsigma,jmo_residual\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < sol.grid().size(); ++i)
    out << sol.grid()[i] << ',' << sol.sigma()[i] << ',' << sol.dsigma()[i] << ','
        << jmo_residual(sol.cfg(), sol.grid()[i], sol.sigma()[i], sol.dsigma()[i], sol.d2sigma()[i]) << '\n';
  out.precision(old);
}

}  // namespace toda
