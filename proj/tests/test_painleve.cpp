#include "doctest.h"

#include <cmath>
#include <sstream>

#include "toda/cumulants.hpp"
#include "toda/error.hpp"
#include "toda/painleve.hpp"
#include "toda/quadrature.hpp"
#include "toda/symbolic_mgf.hpp"

using namespace toda;

namespace {

BigRational q(long a, long b = 1) { return make_rational(a, b); }

// sigma = n(n+nu) + z d/dz log F from the exact MGF
double exact_sigma(const LeadConfig& cfg, double z) {
  const ExpLaurentFn f = mgf_hankel(cfg);
  const ExpLaurentFn df = f.derivative();
  const long bits = 160;
  return to_double(cfg.n_times_n_plus_nu()) + z * eval_mgf(df, z, bits).to_double() / eval_mgf(f, z, bits).to_double();
}

}  // namespace

TEST_CASE("sigma series coefficients") {
  const SigmaSeries s = sigma_series(lead_config(1, 1), 6, SingularPolicy::SymbolicFallback);
  CHECK(s.coefficients[0] == 1);
  CHECK(s.coefficients[1] == q(-1, 2));
  CHECK(s.coefficients[2] == q(1, 12));
  CHECK(s.coefficients[3] == 0);
  const SigmaSeries t = sigma_series(lead_config(2, 3), 4);
  CHECK(t.coefficients[0] == 6);
  CHECK(t.coefficients[1] == q(-6, 5));
  for (int n = 1; n <= 4; ++n)
    for (int nu = 0; nu <= 2; ++nu) {
      const LeadConfig cfg = lead_config(n, n + nu);
      const SigmaSeries u = sigma_series(cfg, 8, SingularPolicy::SymbolicFallback);
      CHECK(u.coefficients[0] == cfg.n_times_n_plus_nu());
      CHECK(u.coefficients[1] == -cfg.n_times_n_plus_nu() / cfg.width());
    }
}

TEST_CASE("sigma series refuses the singular order without fallback") {
  CHECK_THROWS_AS(sigma_series(lead_config(1, 1), 12), SingularOrderError);
  CHECK_NOTHROW(sigma_series(lead_config(1, 1), 12, SingularPolicy::SymbolicFallback));
  CHECK_THROWS_AS(sigma_series(lead_config(1, 1), 0), DomainError);
}

TEST_CASE("sigma series derivatives and log integral") {
  const SigmaSeries s = sigma_series(lead_config(2, 3), 20, SingularPolicy::SymbolicFallback);
  const double z = 0.3, h = 1e-5;
  CHECK(std::abs((s.value(z + h) - s.value(z - h)) / (2 * h) - s.value(z, 1)) < 1e-8);
  CHECK(std::abs((s.value(z + h, 1) - s.value(z - h, 1)) / (2 * h) - s.value(z, 2)) < 1e-8);
  const ExpLaurentFn f = mgf_hankel(lead_config(2, 3));
  CHECK(std::abs(s.log_mgf(z) - std::log(eval_mgf(f, z, 128).to_double())) < 1e-14);
  CHECK(s.log_mgf(0.0) == 0.0);
}

TEST_CASE("JMO residual vanishes on the seed series") {
  const LeadConfig c10 = lead_config(1, 1);
  const SigmaSeries s = sigma_series(c10, 12, SingularPolicy::SymbolicFallback);
  const double z = 0.01;
  CHECK(std::abs(jmo_residual(c10, z, s.value(z), s.value(z, 1), s.value(z, 2))) < 1e-10);
  for (int n = 1; n <= 3; ++n)
    for (int nu = 0; nu <= 2; ++nu) {
      const LeadConfig cfg = lead_config(n, n + nu);
      const double p = to_double(cfg.n_times_n_plus_nu());
      // the bare constant fails; the two-term boundary expansion does not
      CHECK(std::abs(jmo_residual(cfg, 1e-6, p, 0, 0) + p * p) < 1e-9);
      const double slope = -p / to_double(cfg.width());
      const double zz = 1e-6;
      CHECK(std::abs(jmo_residual(cfg, zz, p + slope * zz, slope, 0)) < 1e-10);
    }
  const double z2 = 0.5;
  const double r = jmo_residual(c10, z2, s.value(z2) + 1e-3, s.value(z2, 1), s.value(z2, 2));
  CHECK(std::abs(r) > 1e-5);
}

TEST_CASE("extended-precision JMO audit of the seed") {
  const LeadConfig cfg = lead_config(2, 3);
  const SigmaSeries s = sigma_series(cfg, 40, SingularPolicy::SymbolicFallback);
  const long bits = 200;
  MpReal z(bits);
  z.set(BigRational(1, 100));
  const MpReal r = jmo_residual(cfg, z, s.value(z), s.value(z, 1), s.value(z, 2));
  CHECK(std::abs(r.to_double()) < 1e-40);
}

TEST_CASE("Chazy integration agrees with the exact sigma") {
  const LeadConfig cfg = lead_config(1, 1);
  const SigmaSolution sol = integrate_chazy(cfg, 0.1, 5, 1e-12);
  // sigma = z / (e^z - 1) for n = 1, nu = 0
  CHECK(std::abs(sol.sigma_at(1.0) - 1 / (std::exp(1.0) - 1)) < 1e-8);
  CHECK(std::abs(sol.sigma_at(1.0) - exact_sigma(cfg, 1.0)) < 1e-8);
  CHECK(sol.sigma().front() == doctest::Approx(sol.seed().value(sol.z0())).epsilon(1e-15));
  CHECK(sol.dsigma().front() == doctest::Approx(sol.seed().value(sol.z0(), 1)).epsilon(1e-15));
  for (const auto& [n, nu] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 0}})
    for (double z : {0.7, 2.0, 4.5, 7.0}) {
      const LeadConfig c = lead_config(n, n + nu);
      const SigmaSolution sn = integrate_chazy(c, 0.05, 8, 1e-12);
      CHECK(std::abs(sn.sigma_at(z) - exact_sigma(c, z)) < 1e-9 * exact_sigma(c, z));
    }
}

TEST_CASE("seed point is honoured without handoff") {
  ChazyOptions opt;
  opt.auto_handoff = false;
  opt.seed_order = 12;
  const LeadConfig cfg = lead_config(1, 1);
  const SigmaSolution sol = integrate_chazy(cfg, 0.1, 5, 1e-12, opt);
  CHECK(sol.z0() == 0.1);
  CHECK(sol.sigma().front() == sol.seed().value(0.1));
  CHECK(std::abs(sol.sigma_at(1.0) - 1 / (std::exp(1.0) - 1)) < 1e-8);
}

TEST_CASE("small seed points amplify errors along the free mode") {
  // errors injected near z0 grow like (z/z0)^{2n+nu+1}
  ChazyOptions opt;
  opt.auto_handoff = false;
  opt.seed_order = 12;
  const LeadConfig cfg = lead_config(3, 5);
  const SigmaSolution raw = integrate_chazy(cfg, 0.05, 3, 1e-12, opt);
  const SigmaSolution handed = integrate_chazy(cfg, 0.05, 3, 1e-12);
  const double exact = exact_sigma(cfg, 3.0);
  CHECK(std::abs(raw.sigma_at(3.0) - exact) > 1e-4);
  CHECK(std::abs(handed.sigma_at(3.0) - exact) < 1e-9);
  CHECK(handed.z0() > 0.05);
}

TEST_CASE("halving the seed point leaves sigma(1) unchanged") {
  for (const auto& [n, nu] : {std::pair{1, 0}, std::pair{2, 1}, std::pair{3, 2}}) {
    const LeadConfig cfg = lead_config(n, n + nu);
    const double a = integrate_chazy(cfg, 0.1, 5, 1e-12).sigma_at(1.0);
    const double b = integrate_chazy(cfg, 0.05, 5, 1e-12).sigma_at(1.0);
    CHECK(std::abs(a - b) < 1e-9);
  }
  ChazyOptions opt;
  opt.auto_handoff = false;
  const LeadConfig cfg = lead_config(1, 1);
  const double a = integrate_chazy(cfg, 0.1, 5, 1e-12, opt).sigma_at(1.0);
  const double b = integrate_chazy(cfg, 0.05, 5, 1e-12, opt).sigma_at(1.0);
  CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("JMO residual along trajectories") {
  const SigmaSolution big = integrate_chazy(lead_config(3, 5), 0.05, 10, 1e-12);
  CHECK(big.jmo_sup() < 1e-6);
  for (double tol : {1e-10, 1e-12})
    for (int n = 1; n <= 4; ++n)
      for (int nu = 0; nu <= 2; ++nu) {
        const SigmaSolution sol = integrate_chazy(lead_config(n, n + nu), 0.05, 6, tol);
        CHECK(sol.jmo_sup() < 100 * tol);
      }
}

TEST_CASE("dense output derivative converges at second order") {
  const SigmaSolution sol = integrate_chazy(lead_config(2, 3), 0.05, 6, 1e-12);
  const double z = 3.0;
  std::vector<double> errs;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const double fd = (sol.sigma_at(z + h) - sol.sigma_at(z - h)) / (2 * h);
    errs.push_back(std::abs(fd - sol.dsigma_at(z)));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
  CHECK(std::abs(sol.d2sigma_at(z) - (sol.dsigma_at(z + 1e-4) - sol.dsigma_at(z - 1e-4)) / 2e-4) < 1e-6);
}

TEST_CASE("log-MGF reconstruction") {
  const LeadConfig c10 = lead_config(1, 1);
  const SigmaSolution s10 = integrate_chazy(c10, 0.1, 5, 1e-12);
  CHECK(log_mgf_from_sigma(s10, 0.0) == 0.0);
  CHECK(std::abs(log_mgf_from_sigma(s10, 1.0) - std::log(1 - std::exp(-1.0))) < 1e-10);
  CHECK(std::abs(log_mgf_from_sigma(s10, 1.0) - (-0.45867515)) < 1e-8);
  const LeadConfig c20 = lead_config(2, 2);
  const SigmaSolution s20 = integrate_chazy(c20, 0.05, 5, 1e-12);
  const double exact = std::log(eval_mgf(mgf_hankel(c20), 2.0, 128).to_double());
  CHECK(std::abs(log_mgf_from_sigma(s20, 2.0) - exact) < 1e-7 * std::abs(exact));
  CHECK_THROWS_AS(log_mgf_from_sigma(s20, 5.5), DomainError);
  CHECK_THROWS_AS(log_mgf_from_sigma(s20, -1.0), DomainError);
  for (const auto& [n, nu] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}, std::pair{3, 2}}) {
    const LeadConfig cfg = lead_config(n, n + nu);
    const SigmaSolution sol = integrate_chazy(cfg, 0.05, 5, 1e-12);
    const MgfEvaluator ev(mgf_hankel(cfg), 128);
    double worst = 0;
    for (double z = 0.1; z <= 5.0 + 1e-9; z += 0.1) {
      const double ex = std::log(ev.value(z));
      worst = std::max(worst, std::abs(log_mgf_from_sigma(sol, z) - ex) / std::abs(ex));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("integrator argument checks and failures") {
  const LeadConfig cfg = lead_config(1, 2);
  CHECK_THROWS_AS(integrate_chazy(cfg, 0.0, 1, 1e-10), DomainError);
  CHECK_THROWS_AS(integrate_chazy(cfg, 2.0, 1, 1e-10), DomainError);
  CHECK_THROWS_AS(integrate_chazy(cfg, 0.1, 1, 1e-3), DomainError);
  CHECK_THROWS_AS(integrate_chazy(cfg, 0.1, 1, 1e-15), DomainError);
  ChazyOptions low;
  low.seed_order = 5;
  CHECK_THROWS_AS(integrate_chazy(cfg, 0.1, 1, 1e-10, low), DomainError);
  ChazyOptions tiny;
  tiny.auto_handoff = false;
  tiny.max_step_fraction = 1e-14;
  try {
    integrate_chazy(cfg, 0.1, 1, 1e-10, tiny);
    FAIL("expected a step-size failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("raise z0") != std::string::npos);
  }
  const SigmaSolution sol = integrate_chazy(cfg, 0.1, 1, 1e-10);
  CHECK_THROWS_AS(sol.sigma_at(1.5), DomainError);
}

TEST_CASE("empty effective configuration is trivial") {
  const SigmaSolution sol = integrate_chazy(effective_config(0, q(1, 2)), 0.05, 3, 1e-12);
  CHECK(sol.trivial());
  CHECK(sol.sigma_at(2.0) == 0);
  CHECK(log_mgf_from_sigma(sol, 2.5) == 0);
}

TEST_CASE("half-integer sigma functions") {
  // (1, -1/2) and (1, +1/2) seeds satisfy JMO along the trajectory
  for (const BigRational& nu : {q(-1, 2), q(1, 2)}) {
    const LeadConfig cfg = effective_config(1, nu);
    const SigmaSolution sol = integrate_chazy(cfg, 0.05, 4, 1e-12);
    CHECK(sol.jmo_sup() < 1e-10);
    CHECK(sol.sigma_at(1e-4) == doctest::Approx(to_double(cfg.n_times_n_plus_nu())).epsilon(1e-3));
  }
}

TEST_CASE("symmetric shot-noise MGF") {
  CHECK(shot_mgf_symmetric(3, 0.0) == 0.0);
  // small-z series: kappa_1 z + kappa_2 z^2 / 2
  for (int n = 1; n <= 4; ++n) {
    const auto k = shot_cumulants_symmetric(n, 3);
    const ShotMgfSymmetric mgf(n, 1.0);
    const double z = 1e-2;
    const double series = to_double(k[1]) * z + to_double(k[2]) * z * z / 2 + to_double(k[3]) * z * z * z / 6;
    CHECK(std::abs(mgf.log_mgf(z) - series) < 1e-12);
  }
  const auto k1 = shot_cumulants_symmetric(1, 2);
  CHECK(k1[1] == q(1, 6));
  CHECK(k1[2] == q(1, 180));
  // n = 2: two-dimensional quadrature over the eigenvalue density (T1-T2)^2
  const double z = 1.0;
  auto weight = [](long double a, long double b) { return (a - b) * (a - b); };
  auto inner = [&](long double a, bool with_exp) {
    return integrate_adaptive(
        [&](long double b) {
          const long double w = weight(a, b);
          return with_exp ? w * std::exp(z * (a * (1 - a) + b * (1 - b))) : w;
        },
        0.0L, 1.0L);
  };
  const long double num = integrate_adaptive([&](long double a) { return inner(a, true); }, 0.0L, 1.0L);
  const long double den = integrate_adaptive([&](long double a) { return inner(a, false); }, 0.0L, 1.0L);
  const double oracle = std::log(static_cast<double>(num / den));
  CHECK(std::abs(shot_mgf_symmetric(2, z) - oracle) < 1e-7);
}

TEST_CASE("CSV trajectory dump") {
  const SigmaSolution sol = integrate_chazy(lead_config(1, 2), 0.1, 2, 1e-10);
  std::ostringstream out;
  write_sigma_csv(sol, out);
  const std::string text = out.str();
  CHECK(text.rfind("z,sigma,dsigma,jmo_residual\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == sol.grid().size() + 1);
}
