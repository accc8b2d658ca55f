#include <cmath>

#include "doctest.h"
#include "toda/asymptotics.hpp"
#include "toda/cumulants.hpp"

using namespace toda;

namespace {

const std::vector<int> kSweep{8, 16, 32, 64};

double exact_error(int l, int n, int nu, bool with_c) {
  auto seq = conductance_cumulants(effective_config(n, nu), l + 1);
  return std::abs(to_double(seq[l] - kappa_asymptotic_exact(l, n, nu, with_c)));
}

}  // namespace

TEST_CASE("a, b sequences") {
  for (int nu = 0; nu <= 3; ++nu) {
    const BigRational v = nu;
    CHECK(asym_a(1, v) == v * v / 2);
    CHECK(asym_a(2, v) == (1 - 2 * v * v) / 4);
    for (int l = 2; l <= 12; ++l) {
      CHECK(asym_a(l + 1, v) == asym_a(l - 1, v));
      CHECK(asym_b(l + 1, v) == asym_b(l - 1, v) - 4 * v * asym_a(l + 1, v));
    }
    for (int l = 1; l <= 12; ++l) {
      CHECK(asym_b(l, v) == -2 * v * l * asym_a(l, v));
      CHECK(asym_b(l, v) == -BigRational(l) * v / 4 * (1 + ((l % 2) ? -1 : 1) * (1 - 4 * v * v)));
    }
  }
  for (int l = 1; l <= 12; ++l) CHECK(asym_a(l, 0) == make_rational(1 + ((l % 2) ? -1 : 1), 8));
}

TEST_CASE("chi recurrence holds exactly") {
  for (int n = 1; n <= 4; ++n)
    for (int nu = 0; nu <= 2; ++nu) {
      auto cfg = effective_config(n, nu);
      auto chi = chi_sequence(conductance_cumulants(cfg, 8, SingularPolicy::SymbolicFallback));
      CHECK(chi[0] == cfg.n_times_n_plus_nu());
      CHECK(chi[1] == -cfg.n_times_n_plus_nu() / cfg.width());
      for (const auto& r : chi_recurrence_residuals(cfg, chi)) CHECK(r == 0);
    }
  auto cfg = lead_config(1, 1);
  auto chi = chi_sequence(conductance_cumulants(cfg, 5, SingularPolicy::SymbolicFallback));
  chi[2] += make_rational(1, 1000000);
  auto res = chi_recurrence_residuals(cfg, chi);
  CHECK(res[1] != 0);
}

TEST_CASE("first cumulant expansion") {
  // exact kappa_1 at n=10, nu=0 is exactly the leading term
  CHECK(conductance_cumulants(lead_config(10, 10), 1)[1] == 5);
  CHECK(kappa_asymptotic(1, lead_config(10, 10)) == doctest::Approx(5.0));
  CHECK(asym_a(3, 0) == 0);
  CHECK(asym_c(3, 0) == 0);
  CHECK(kappa_asymptotic_exact(3, 20, 0) == 0);
}

TEST_CASE("measured convergence order with the c-term is at least l+3") {
  for (int nu = 0; nu <= 2; ++nu)
    for (int l = 1; l <= 4; ++l) {
      CAPTURE(nu);
      CAPTURE(l);
      std::vector<double> errs;
      for (int n : kSweep) errs.push_back(exact_error(l, n, nu, true));
      const double order = fitted_order(kSweep, errs);
      CHECK(order >= l + 3 - 0.3);
      // without the c-term the remainder is only O(n^-(l+2))
      std::vector<double> coarse;
      for (int n : kSweep) coarse.push_back(exact_error(l, n, nu, false));
      const double coarse_order = fitted_order(kSweep, coarse);
      if (std::isfinite(coarse_order)) CHECK(coarse_order < l + 2.5);
    }
}

TEST_CASE("joint expansion reduces to the conductance expansion at f=0") {
  for (int l = 1; l <= 6; ++l)
    for (int n : {5, 9, 40}) CHECK(joint_asymptotic(l, 0, n, 0.0) == doctest::Approx(kappa_asymptotic(l, lead_config(n, n), false)).epsilon(1e-13));
  CHECK(joint_asymptotic(1, 0, 10, 0.0) == doctest::Approx(5.0));
  CHECK(joint_asymptotic(0, 1, 10, 2.0) == doctest::Approx(5.0 * 1.5 + 1.0 / 8.0 / 40.0 * 2.0 * 2.0 / 2.0 * 1.0).epsilon(1e-12));
  CHECK_THROWS(joint_asymptotic(1, 1, 10, 0.5, 1));
}

TEST_CASE("joint expansion error for (2,2) is o(n^-(l+m))") {
  const double f = 0.75;
  std::vector<double> scaled;
  for (int n : kSweep) {
    auto t = joint_cumulants(lead_config(n, n), 2, 2);
    double exact = t.evaluate(2, 2, f);
    scaled.push_back(std::abs(exact - joint_asymptotic(2, 2, n, f)) * std::pow(n, 4));
  }
  for (std::size_t i = 0; i + 1 < scaled.size(); ++i) CHECK(scaled[i + 1] < 0.6 * scaled[i]);
}

TEST_CASE("noise power expansion against the exact joint table") {
  for (double f : {0.0, 0.313, 1.0, 4.0}) {
    auto t = joint_cumulants(lead_config(32, 32), 0, 3);
    for (int l = 1; l <= 2; ++l) {
      CAPTURE(f);
      CAPTURE(l);
      const double exact = std::pow(4.0, l) * t.evaluate(0, l, f);
      CHECK(std::abs(exact - noise_power_asymptotic(l, 32, f)) / std::abs(exact) < 1e-3);
    }
  }
  // l = 3: the whole cumulant is O(n^-3) and the expansion's relative
  // error decays like n^-2
  for (double f : {0.313, 1.0, 4.0}) {
    std::vector<double> rel;
    for (int n : kSweep) {
      auto t = joint_cumulants(lead_config(n, n), 0, 3);
      const double exact = 64.0 * t.evaluate(0, 3, f);
      rel.push_back(std::abs(exact - noise_power_asymptotic(3, n, f)) / std::abs(exact));
    }
    CHECK(fitted_order(kSweep, rel) == doctest::Approx(2.0).epsilon(0.05));
  }
  auto t0 = joint_cumulants(lead_config(32, 32), 0, 3);
  CHECK(t0.evaluate(0, 3, 0.0) == 0.0);
  CHECK(noise_power_asymptotic(3, 32, 0.0) == 0.0);
  // at n=20, l=1 the relative error is already below 1e-3
  auto t = joint_cumulants(lead_config(20, 20), 0, 1);
  const double f = thermo_factor(1.0).f;
  CHECK(std::abs(4 * t.evaluate(0, 1, f) - noise_power_asymptotic(1, 20, f)) / (4 * t.evaluate(0, 1, f)) < 1e-3);
}

TEST_CASE("order utilities") {
  std::vector<int> ns{10, 20, 40};
  std::vector<double> e{1e-2, 1.25e-3, 1.5625e-4};
  auto o = convergence_orders(ns, e);
  CHECK(o[0] == doctest::Approx(3.0));
  CHECK(fitted_order(ns, e) == doctest::Approx(3.0));
  CHECK(std::isinf(convergence_orders({1, 2}, {1.0, 0.0})[0]));
}
