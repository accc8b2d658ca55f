#include "toda/ensemble.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "toda/error.hpp"

namespace toda {

int LeadConfig::nu_int() const {
  if (!integer_nu()) throw DomainError("asymmetry parameter " + to_string(nu) + " is not an integer");
  return static_cast<int>(nu.get_num().get_si());
}

LeadConfig lead_config(int n_left, int n_right) {
  if (n_left < 1 || n_right < 1)
    throw ConfigError("channel counts must be positive, got N_L=" + std::to_string(n_left) +
                      ", N_R=" + std::to_string(n_right));
  LeadConfig cfg;
  cfg.n = std::min(n_left, n_right);
  cfg.nu = std::abs(n_left - n_right);
  cfg.n_left = n_left;
  cfg.n_right = n_right;
  return cfg;
}

LeadConfig effective_config(int n, const BigRational& nu) {
  if (n < 0) throw ConfigError("negative channel index n=" + std::to_string(n));
  if (nu < make_rational(-1, 2))
    throw ConfigError("asymmetry parameter below -1/2: " + to_string(nu));
  if (n > 0 && n + nu <= 0) throw ConfigError("n + nu must be positive");
  LeadConfig cfg;
  cfg.n = n;
  cfg.nu = nu;
  return cfg;
}

ThermoFactor thermo_factor(double eta) {
  if (std::isnan(eta) || eta < 0.0) throw DomainError("eta must be non-negative");
  if (std::isinf(eta)) return thermo_shot_limit();
  ThermoFactor t;
  t.eta = eta;
  if (eta < 1e-4) {
    const double e2 = eta * eta;
    t.f = e2 / 3.0 - e2 * e2 / 45.0 + 2.0 * e2 * e2 * e2 / 945.0;
  } else if (eta < 1.0) {
    // eta coth eta - 1 = sum_{k>=1} 4^k B_{2k} eta^{2k} / (2k)!
    const double e2 = eta * eta;
    double term = 1.0, acc = 0.0;
    for (int k = 1; k <= 24; ++k) {
      term *= 4.0 * e2 / ((2.0 * k - 1.0) * (2.0 * k));
      acc += boost::math::bernoulli_b2n<double>(k) * term;
    }
    t.f = acc;
  } else {
    t.f = eta / std::tanh(eta) - 1.0;
  }
  return t;
}

ThermoFactor thermo_shot_limit() {
  ThermoFactor t;
  t.eta = std::numeric_limits<double>::max();
  t.f = 0.0;
  t.shot_limit = true;
  return t;
}

BigRational normalization_c(int n, int nu) {
  if (n < 0 || nu < 0) throw DomainError("normalization_c needs n >= 0 and integer nu >= 0");
  BigRational c = 1;
  for (int j = 0; j < n; ++j) {
    BigRational term(factorial(j + 1) * factorial(j + nu) * factorial(j),
                     factorial(j + nu + n));
    term.canonicalize();
    c *= term;
  }
  return c;
}

BigRational conductance_variance(const LeadConfig& cfg) {
  const BigRational m = cfg.width();
  const BigRational nn = cfg.n_times_n_plus_nu();
  return nn * nn / (m * m * (m * m - 1));
}

}  // namespace toda
