#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <sstream>

#include "toda/cumulants.hpp"
#include "toda/error.hpp"
#include "toda/montecarlo.hpp"
#include "toda/nonideal.hpp"
#include "toda/quadrature.hpp"
#include "toda/symbolic_mgf.hpp"

using namespace toda;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1) / v.size());
}

}  // namespace

TEST_CASE("Haar unitaries: unitarity and low moments") {
  Rng rng = make_stream(11, 0);
  std::complex<double> mean1 = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) mean1 += sample_haar_unitary(1, rng)(0, 0);
  CHECK(std::abs(mean1 / static_cast<double>(draws)) < 0.02);

  const int N = 3, samples = 20000;
  std::vector<std::vector<double>> re(9), abs2(9);
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::MatrixXcd U = sample_haar_unitary(N, rng);
    worst = std::max(worst, (U * U.adjoint() - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        re[static_cast<std::size_t>(i * N + j)].push_back(U(i, j).real());
        abs2[static_cast<std::size_t>(i * N + j)].push_back(std::norm(U(i, j)));
      }
  }
  CHECK(worst < 1e-12);
  for (int e = 0; e < 9; ++e) {
    CHECK(std::abs(mean_of(re[static_cast<std::size_t>(e)])) < 5 / std::sqrt(double(samples)));
    const auto& a = abs2[static_cast<std::size_t>(e)];
    CHECK(std::abs(mean_of(a) - 1.0 / N) < 5 * se_of(a));
  }
}

TEST_CASE("sample decomposition invariants") {
  Rng rng = make_stream(3, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const ScatteringSample s = make_sample(sample_haar_unitary(5, rng), 2, 3);
    CHECK(s.unitarity_defect < 1e-10);
    REQUIRE(s.transmission.size() == 2);
    REQUIRE(s.reflection.size() == 2);
    const Eigen::MatrixXcd t = s.S.topRightCorner(2, 3);
    CHECK(std::abs(s.transmission[0] + s.transmission[1] - t.squaredNorm()) < 1e-10);
    for (int j = 0; j < 2; ++j) {
      CHECK(s.transmission[static_cast<std::size_t>(j)] >= 0);
      CHECK(s.transmission[static_cast<std::size_t>(j)] <= 1);
      CHECK(std::abs(s.reflection[static_cast<std::size_t>(j)] - (1 - s.transmission[static_cast<std::size_t>(1 - j)])) <
            1e-10);
    }
    const Observables a = observables(s, thermo_factor(1.0));
    const Observables b = observables_from_block(t, thermo_factor(1.0));
    CHECK(std::abs(a.G - b.G) < 1e-12);
    CHECK(std::abs(a.P_shot - b.P_shot) < 1e-12);
    CHECK(std::abs(a.P - b.P) < 1e-12);
  }
  // wide left lead: only min(N_L, N_R) transmission eigenvalues
  const ScatteringSample wide = make_sample(sample_haar_unitary(4, rng), 3, 1);
  CHECK(wide.transmission.size() == 1);
  CHECK(wide.reflection.size() == 3);
}

TEST_CASE("observables of fixed transmission sets") {
  const ThermoFactor shot = thermo_shot_limit();
  const Observables open = observables({1.0, 1.0, 1.0}, shot);
  CHECK(open.G == 3);
  CHECK(open.P_shot == 0);
  const Observables half = observables({0.5, 0.5}, thermo_factor(2.0));
  CHECK(half.P_shot == 0.5);
  CHECK(half.P == doctest::Approx(1.0 + thermo_factor(2.0).f * 0.5));
  const Observables eq = observables({0.3, 0.8}, thermo_factor(0.0));
  CHECK(eq.P == eq.G);
}

TEST_CASE("k-statistics are unbiased") {
  // exact expectation over all 2^7 Bernoulli(0.3) samples of size 7
  const double p = 0.3, q = 1 - p, pq = p * q;
  const double kappa[7] = {0,
                           p,
                           pq,
                           pq * (1 - 2 * p),
                           pq * (1 - 6 * pq),
                           pq * (1 - 2 * p) * (1 - 12 * pq),
                           pq * (1 - 30 * pq + 120 * pq * pq)};
  for (int r = 1; r <= 6; ++r) {
    double expectation = 0;
    for (int mask = 0; mask < 128; ++mask) {
      std::vector<double> v;
      double w = 1;
      for (int b = 0; b < 7; ++b) {
        const int x = (mask >> b) & 1;
        v.push_back(x);
        w *= x ? p : q;
      }
      expectation += w * k_statistic(v, r);
    }
    CHECK(std::abs(expectation - kappa[r]) < 1e-13);
  }
  const std::vector<double> v{1.5, -0.2, 3.1, 0.7, 2.2, -1.0};
  double s1 = 0, s2 = 0;
  for (double x : v) {
    s1 += x;
    s2 += x * x;
  }
  const double n = 6;
  CHECK(std::abs(k_statistic(v, 2) - (n * s2 - s1 * s1) / (n * (n - 1))) < 1e-13);
  CHECK_THROWS_AS(k_statistic(v, 7), DomainError);
}

TEST_CASE("cumulant estimates and their errors") {
  std::vector<double> few(25, 1.0);
  CHECK_THROWS_AS(estimate_cumulants(few, 3), DomainError);
  Rng rng = make_stream(5, 5);
  std::vector<double> u;
  for (int i = 0; i < 2000; ++i) u.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
  const auto est = estimate_cumulants(u, 8);
  CHECK(est.size() == 6);
  for (const auto& e : est) {
    CHECK(e.std_error > 0);
    CHECK(e.n_samples == 2000);
  }
  // uniform law: kappa_2 = 1/12, kappa_4 = -1/120
  CHECK(std::abs(est[1].estimate - 1.0 / 12) < 5 * est[1].std_error);
  CHECK(std::abs(est[3].estimate + 1.0 / 120) < 5 * est[3].std_error);
}

TEST_CASE("CUE cumulants match the exact engine") {
  SamplingPlan plan;
  plan.samples = 200000;
  plan.seed = 2024;
  plan.thermo = thermo_shot_limit();
  for (const auto& [nl, nr] : {std::pair{1, 1}, std::pair{2, 3}}) {
    plan.cfg = tunnel_config(nl, nr, 0.0);
    const SampleRun run = run_sampling(plan);
    const auto g = estimate_cumulants(run.G, 3);
    const CumulantSeq exact = conductance_cumulants(lead_config(nl, nr), 3, SingularPolicy::SymbolicFallback);
    for (int l = 1; l <= 3; ++l)
      CHECK(std::abs(g[static_cast<std::size_t>(l - 1)].estimate - to_double(exact[l])) <
            5 * g[static_cast<std::size_t>(l - 1)].std_error);
  }
  plan.cfg = tunnel_config(1, 1, 0.0);
  const auto shot = estimate_cumulants(run_sampling(plan).P_shot, 2);
  CHECK(std::abs(shot[0].estimate - 1.0 / 6) < 5 * shot[0].std_error);
  CHECK(std::abs(shot[1].estimate - 1.0 / 180) < 5 * shot[1].std_error);
}

TEST_CASE("transmission eigenvalues for one channel per lead are uniform") {
  SamplingPlan plan;
  plan.cfg = tunnel_config(1, 1, 0.0);
  plan.samples = 100000;
  plan.seed = 99;
  plan.keep_eigenvalues = true;
  const SampleRun run = run_sampling(plan);
  const double d = ks_statistic(run.transmission, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks_pvalue(d, plan.samples) > 0.001);
  // a wrong law is rejected
  const double bad = ks_statistic(run.transmission, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(ks_pvalue(bad, plan.samples) < 1e-6);
}

TEST_CASE("sampling is deterministic in seed and independent of workers") {
  SamplingPlan plan;
  plan.cfg = tunnel_config(2, 3, 0.0);
  plan.samples = 10000;
  plan.chunk_size = 512;
  plan.seed = 17;
  plan.thermo = thermo_factor(1.5);
  plan.workers = 1;
  const SampleRun a = run_sampling(plan);
  plan.workers = 3;
  const SampleRun b = run_sampling(plan);
  CHECK(a.G == b.G);
  CHECK(a.P == b.P);
  CHECK(std::memcmp(a.P_shot.data(), b.P_shot.data(), a.P_shot.size() * sizeof(double)) == 0);
  plan.seed = 18;
  const SampleRun c = run_sampling(plan);
  CHECK(a.G != c.G);
  const auto ea = estimate_cumulants(a.G, 4), eb = estimate_cumulants(b.G, 4);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].estimate == eb[i].estimate);
    CHECK(ea[i].std_error == eb[i].std_error);
  }
}

TEST_CASE("Heidelberg model: unitarity, mean S and ideal limit") {
  Rng rng = make_stream(8, 0);
  const double gamma2 = 0.5;
  std::vector<double> s00;
  for (int i = 0; i < 200; ++i) {
    const ScatteringSample s = heidelberg_smatrix(60, tunnel_config(1, 1, gamma2), rng);
    CHECK(s.unitarity_defect < 1e-10);
    s00.push_back(s.S(0, 0).real());
  }
  CHECK(std::abs(mean_of(s00) - std::sqrt(gamma2)) < 5 * se_of(s00) + 0.03);
  CHECK_THROWS_AS(heidelberg_smatrix(15, tunnel_config(1, 1, 0.0), rng), DomainError);

  SamplingPlan plan;
  plan.ensemble = Ensemble::Heidelberg;
  plan.cfg = tunnel_config(1, 1, 0.0);
  plan.matrix_size = 100;
  plan.samples = 600;
  plan.seed = 4;
  plan.chunk_size = 64;
  const SampleRun run = run_sampling(plan);
  CHECK(run.max_unitarity_defect < 1e-10);
  const auto g = estimate_cumulants(run.G, 2);
  CHECK(std::abs(g[0].estimate - 0.5) < 5 * g[0].std_error + 0.02);
  CHECK(std::abs(g[1].estimate - 1.0 / 12) < 5 * g[1].std_error + 0.01);
}

TEST_CASE("Poisson-kernel sampler reproduces the reflection density") {
  const TunnelConfig cfg = tunnel_config(1, 2, 0.5);
  SamplingPlan plan;
  plan.ensemble = Ensemble::PoissonKernel;
  plan.cfg = cfg;
  plan.samples = 100000;
  plan.seed = 321;
  plan.keep_eigenvalues = true;
  const SampleRun run = run_sampling(plan);
  CHECK(run.max_unitarity_defect < 1e-10);
  const int bins = 20;
  std::vector<long> observed(bins, 0);
  for (double r : run.reflection) ++observed[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>(r * bins)))];
  std::vector<double> expected;
  for (int b = 0; b < bins; ++b) {
    const double mass = static_cast<double>(integrate_adaptive(
        [&](long double r) { return static_cast<long double>(jpdf_reflection({static_cast<double>(r)}, cfg)); },
        static_cast<long double>(b) / bins, static_cast<long double>(b + 1) / bins));
    expected.push_back(mass * plan.samples);
  }
  CHECK(chi_squared_pvalue(observed, expected) > 0.001);
  // the ideal-lead density is rejected
  const TunnelConfig ideal = tunnel_config(1, 2, 0.0);
  std::vector<double> wrong;
  for (int b = 0; b < bins; ++b)
    wrong.push_back(plan.samples * static_cast<double>(integrate_adaptive(
                                       [&](long double r) {
                                         return static_cast<long double>(
                                             jpdf_reflection({static_cast<double>(r)}, ideal));
                                       },
                                       static_cast<long double>(b) / bins, static_cast<long double>(b + 1) / bins)));
  CHECK(chi_squared_pvalue(observed, wrong) < 1e-6);
}

TEST_CASE("joint MGF by quadrature") {
  const ThermoFactor th = thermo_factor(1.0);
  for (int n = 1; n <= 3; ++n)
    for (int nu = 0; nu <= 2; ++nu) {
      const LeadConfig cfg = lead_config(n, n + nu);
      CHECK(std::abs(jmgf_quadrature(cfg, th, 0, 0) - 1) < 1e-12);
      for (double z : {0.7, 3.0}) {
        const double ref = eval_mgf(mgf_hankel(cfg), z, 128).to_double();
        CHECK(std::abs(jmgf_quadrature(cfg, th, z, 0) - ref) < 1e-10);
      }
    }
  CHECK_THROWS_AS(jmgf_quadrature(lead_config(1, 1), thermo_shot_limit(), 0.1, 0.1), DomainError);
  // mixed derivative of log F gives the (G, P) covariance with a plus sign
  const LeadConfig c10 = lead_config(1, 1);
  const double h = 1e-3;
  auto logf = [&](double z, double w) { return std::log(jmgf_quadrature(c10, th, z, w)); };
  const double mixed = (logf(h, h) - logf(h, -h) - logf(-h, h) + logf(-h, -h)) / (4 * h * h);
  const JointCumulantTable table = joint_cumulants(c10, 1, 1);
  const double k11 = table.evaluate(1, 1, th.f);
  CHECK(std::abs(mixed - k11) < 1e-5);
  CHECK(k11 > 0);
}

TEST_CASE("joint Toda identity on quadrature values") {
  const ThermoFactor th = thermo_factor(1.0);
  const LeadConfig cfg = lead_config(1, 1);
  std::vector<double> res;
  for (double h : {4e-2, 2e-2, 1e-2}) res.push_back(toda_joint_check(cfg, th, 0.5, 0.3, h));
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double order = std::log2(res[i - 1] / res[i]);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }
  CHECK(toda_joint_check(lead_config(2, 3), th, 0.5, 0.0, 1e-3) < 1e-6);
  const double var = to_double(conductance_variance(cfg));
  const double perturbed = toda_joint_check(cfg, th, 0.5, 0.3, 1e-2, 1.01 * var);
  CHECK(perturbed > 100 * res.back());
}

TEST_CASE("statistical helpers") {
  CHECK(ks_pvalue(0.0, 100) == 1.0);
  CHECK(ks_pvalue(0.5, 1000) < 1e-10);
  CHECK(std::abs(chi_squared_pvalue({50, 50}, {50.0, 50.0}) - 1.0) < 1e-12);
  CHECK_THROWS_AS(chi_squared_pvalue({1}, {1.0}), DomainError);
}

TEST_CASE("raw sample dump is little-endian binary64") {
  std::ostringstream out;
  write_raw_samples({1.0, -2.5}, out);
  const std::string bytes = out.str();
  REQUIRE(bytes.size() == 16);
  // 1.0 = 0x3FF0000000000000
  CHECK(static_cast<unsigned char>(bytes[7]) == 0x3F);
  CHECK(static_cast<unsigned char>(bytes[6]) == 0xF0);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x00);
  double back;
  std::memcpy(&back, bytes.data() + 8, 8);
  CHECK(back == -2.5);
}
