#include "toda/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "toda/error.hpp"

namespace toda {

namespace {

BigRational sign(int l) { return (l % 2 == 0) ? 1 : -1; }

void require_symmetric(const BigRational& nu) {
  if (nu != 0) throw DomainError("joint large-n expansion is available for nu = 0 only");
}

}  // namespace

BigRational asym_a(int l, const BigRational& nu) {
  return make_rational(1, 8) * (1 + sign(l) * (1 - 4 * nu * nu));
}

BigRational asym_b(int l, const BigRational& nu) { return -2 * nu * l * asym_a(l, nu); }

BigRational asym_c(int l, const BigRational& nu) {
  const BigRational nu2 = nu * nu;
  const BigRational lq = l;
  const BigRational first = 12 * nu2 * (2 * lq + 3) + 3 * (3 * lq * lq - 4);
  const BigRational second = (1 - 4 * nu2) * (4 * nu2 * (lq + 1) * (lq - 7) - 3 * (3 * lq * lq - 4));
  return lq / 96 * (first - sign(l) * second);
}

BigRational kappa_asymptotic_exact(int l, int n, const BigRational& nu, bool with_c) {
  if (l < 1 || n < 1) throw DomainError("kappa_asymptotic needs l >= 1 and n >= 1");
  const BigRational x = BigRational(1) / (4 * n);
  const BigRational gamma_l(factorial(l - 1));
  BigRational v = 0;
  if (l == 1) v += (2 * BigRational(n) + nu) / 4;
  if (l == 2) v += make_rational(1, 16);
  BigRational delta_chi = asym_a(l, nu) * pow(x, l) + asym_b(l, nu) * pow(x, l + 1);
  if (with_c) delta_chi += asym_c(l, nu) * pow(x, l + 2);
  return v + sign(l) * gamma_l * delta_chi;
}

double kappa_asymptotic(int l, const LeadConfig& cfg, bool with_c) {
  return to_double(kappa_asymptotic_exact(l, cfg.n, cfg.nu, with_c));
}

std::vector<BigRational> chi_sequence(const CumulantSeq& seq) {
  std::vector<BigRational> chi(static_cast<std::size_t>(seq.order() + 1));
  chi[0] = seq.cfg.n_times_n_plus_nu();
  for (int l = 1; l <= seq.order(); ++l)
    chi[static_cast<std::size_t>(l)] = sign(l) * seq[l] / BigRational(factorial(l - 1));
  return chi;
}

std::vector<BigRational> chi_recurrence_residuals(const LeadConfig& cfg, const std::vector<BigRational>& chi) {
  const BigRational w = cfg.width();
  auto at = [&](int i) { return i < 0 ? BigRational(0) : chi[static_cast<std::size_t>(i)]; };
  std::vector<BigRational> out;
  for (int l = 0; l + 1 < static_cast<int>(chi.size()); ++l) {
    BigRational r = BigRational(l + 1) * (l * l - w * w) * at(l + 1) + w * (2 * l - 1) * at(l) -
                    BigRational(l - 2) * at(l - 1);
    BigRational sum = 0;
    for (int j = 0; j < l; ++j) sum += BigRational((l - j) * (3 * j + 1)) * at(j + 1) * at(l - j);
    out.push_back(r + 2 * sum);
  }
  return out;
}

double joint_asymptotic(int l, int m, int n, double f, const BigRational& nu) {
  require_symmetric(nu);
  if (l < 0 || m < 0 || l + m == 0 || n < 1) throw DomainError("joint_asymptotic needs l + m > 0, n >= 1");
  double v = 0.0;
  if (l == 1 && m == 0) v += n / 2.0;
  if (l == 0 && m == 1) v += n / 2.0 * (1.0 + f / 4.0);
  if ((l == 1 && m == 1) || (l == 2 && m == 0)) v += 1.0 / 16.0;
  if (l == 0 && m == 2) v += (1.0 + f * f / 8.0) / 16.0;
  const double fact = std::tgamma(l + m);
  const double bracket = std::pow(f / 2.0 + 1.0, m) + ((l % 2 == 0) ? 1.0 : -1.0) * std::pow(f / 2.0 - 1.0, m);
  return v + fact / (8.0 * std::pow(4.0 * n, l + m)) * bracket;
}

double noise_power_asymptotic(int l, int n, double f, const BigRational& nu) {
  require_symmetric(nu);
  if (l < 1 || n < 1) throw DomainError("noise_power_asymptotic needs l >= 1, n >= 1");
  double v = 0.0;
  if (l == 1) v += 2.0 * n * (1.0 + f / 4.0);
  if (l == 2) v += 1.0 + f * f / 8.0;
  const double bracket = std::pow(f / 2.0 - 1.0, l) + std::pow(f / 2.0 + 1.0, l);
  return v + std::tgamma(l) / (8.0 * std::pow(n, l)) * bracket;
}

std::vector<double> convergence_orders(const std::vector<int>& ns, const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    if (errors[i + 1] == 0.0) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    out.push_back(-std::log(errors[i + 1] / errors[i]) / std::log(static_cast<double>(ns[i + 1]) / ns[i]));
  }
  return out;
}

double fitted_order(const std::vector<int>& ns, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (errors[i] == 0.0) return std::numeric_limits<double>::infinity();
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = -std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  if (k < 2) throw DomainError("need at least two points for an order fit");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace toda
