#include "toda/montecarlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "toda/error.hpp"
#include "toda/quadrature.hpp"

namespace toda {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::complex<double> complex_gaussian(Rng& rng, double variance) {
  boost::random::normal_distribution<double> normal(0.0, std::sqrt(variance / 2));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

double unitarity_defect(const Eigen::MatrixXcd& S) {
  const Eigen::MatrixXcd d = S * S.adjoint() - Eigen::MatrixXcd::Identity(S.rows(), S.cols());
  return d.cwiseAbs().maxCoeff();
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  if (h.rows() == 0) return {};
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double& x : ev) x = std::clamp(x, 0.0, 1.0);
  return ev;
}

// k-statistics as polynomials in power sums: k_r = sum_terms w / (n)_k prod S_j^{e_j}
struct PowerSumTerm {
  int blocks = 0;
  double weight = 0;
  std::array<int, 7> exps{};
};

void set_partitions(int n, std::vector<int>& labels, int next, int used,
                    const std::function<void(const std::vector<int>&, int)>& visit) {
  if (next == n) {
    visit(labels, used);
    return;
  }
  for (int b = 0; b <= used; ++b) {
    labels[static_cast<std::size_t>(next)] = b;
    set_partitions(n, labels, next + 1, std::max(used, b + 1), visit);
  }
}

void for_each_partition(int n, const std::function<void(const std::vector<int>&, int)>& visit) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  if (n == 0) {
    visit(labels, 0);
    return;
  }
  labels[0] = 0;
  set_partitions(n, labels, 1, 1, visit);
}

double signed_factorial(int size) {
  // (-1)^{size-1} (size-1)!
  double f = 1;
  for (int i = 2; i < size; ++i) f *= i;
  return (size % 2 == 1) ? f : -f;
}

std::vector<PowerSumTerm> build_k_statistic(int r) {
  std::map<std::pair<int, std::array<int, 7>>, double> acc;
  for_each_partition(r, [&](const std::vector<int>& labels, int k) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    const double outer = signed_factorial(k);
    // distinct-index sum [b_1 .. b_k] by Moebius inversion over partitions of the k blocks
    for_each_partition(k, [&](const std::vector<int>& merge, int m) {
      std::vector<int> merged_size(static_cast<std::size_t>(m), 0), power(static_cast<std::size_t>(m), 0);
      for (int j = 0; j < k; ++j) {
        ++merged_size[static_cast<std::size_t>(merge[static_cast<std::size_t>(j)])];
        power[static_cast<std::size_t>(merge[static_cast<std::size_t>(j)])] += sizes[static_cast<std::size_t>(j)];
      }
      double mu = 1;
      std::array<int, 7> exps{};
      for (int c = 0; c < m; ++c) {
        mu *= signed_factorial(merged_size[static_cast<std::size_t>(c)]);
        ++exps[static_cast<std::size_t>(power[static_cast<std::size_t>(c)])];
      }
      acc[{k, exps}] += outer * mu;
    });
  });
  std::vector<PowerSumTerm> terms;
  for (const auto& [key, w] : acc)
    if (w != 0) terms.push_back({key.first, w, key.second});
  return terms;
}

const std::vector<PowerSumTerm>& k_statistic_terms(int r) {
  static const std::array<std::vector<PowerSumTerm>, 7> table = [] {
    std::array<std::vector<PowerSumTerm>, 7> t;
    for (int r = 1; r <= 6; ++r) t[static_cast<std::size_t>(r)] = build_k_statistic(r);
    return t;
  }();
  return table.at(static_cast<std::size_t>(r));
}

long double evaluate_terms(const std::vector<PowerSumTerm>& terms, const std::array<long double, 7>& S, long n) {
  std::array<long double, 7> falling{};
  falling[0] = 1;
  for (int k = 1; k <= 6; ++k) falling[static_cast<std::size_t>(k)] = falling[static_cast<std::size_t>(k - 1)] * (n - k + 1);
  long double total = 0;
  for (const PowerSumTerm& t : terms) {
    long double prod = t.weight;
    for (int j = 1; j <= 6; ++j)
      for (int e = 0; e < t.exps[static_cast<std::size_t>(j)]; ++e) prod *= S[static_cast<std::size_t>(j)];
    total += prod / falling[static_cast<std::size_t>(t.blocks)];
  }
  return total;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL)));
}

Eigen::MatrixXcd sample_haar_unitary(int N, Rng& rng) {
  if (N < 1) throw DomainError("unitary size must be positive");
  Eigen::MatrixXcd z(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) z(i, j) = complex_gaussian(rng, 1.0);
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < N; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0) ? d / a : 1.0;
  }
  return q;
}

ScatteringSample make_sample(Eigen::MatrixXcd S, int n_left, int n_right) {
  if (S.rows() != n_left + n_right || S.cols() != S.rows()) throw DomainError("scattering matrix has the wrong size");
  ScatteringSample out;
  out.n_left = n_left;
  out.n_right = n_right;
  const Eigen::MatrixXcd r = S.topLeftCorner(n_left, n_left);
  const Eigen::MatrixXcd t = S.topRightCorner(n_left, n_right);
  std::vector<double> tev = hermitian_eigenvalues(t * t.adjoint());
  const int n = std::min(n_left, n_right);
  out.transmission.assign(tev.end() - n, tev.end());
  out.reflection = hermitian_eigenvalues(r * r.adjoint());
  out.unitarity_defect = unitarity_defect(S);
  out.S = std::move(S);
  return out;
}

Observables observables(const std::vector<double>& transmission, const ThermoFactor& thermo) {
  Observables o;
  for (double T : transmission) {
    o.G += T;
    o.P_shot += T * (1 - T);
  }
  o.P = thermo.shot_limit ? o.P_shot : o.G + thermo.f * o.P_shot;
  return o;
}

Observables observables(const ScatteringSample& sample, const ThermoFactor& thermo) {
  return observables(sample.transmission, thermo);
}

Observables observables_from_block(const Eigen::MatrixXcd& t, const ThermoFactor& thermo) {
  Observables o;
  o.G = t.squaredNorm();
  const Eigen::MatrixXcd tt = t * t.adjoint();
  o.P_shot = o.G - tt.squaredNorm();
  o.P = thermo.shot_limit ? o.P_shot : o.G + thermo.f * o.P_shot;
  return o;
}

double k_statistic(const std::vector<double>& values, int r) {
  if (r < 1 || r > 6) throw DomainError("k-statistics are implemented for orders 1..6");
  const long n = static_cast<long>(values.size());
  if (n < r) throw DomainError("k-statistic of order r needs at least r samples");
  long double mean = 0;
  for (double x : values) mean += x;
  mean /= n;
  if (r == 1) return static_cast<double>(mean);
  std::array<long double, 7> S{};
  for (double x : values) {
    const long double y = x - mean;
    long double p = 1;
    for (int j = 1; j <= 6; ++j) S[static_cast<std::size_t>(j)] += (p *= y);
  }
  return static_cast<double>(evaluate_terms(k_statistic_terms(r), S, n));
}

std::vector<CumulantEstimate> estimate_cumulants(const std::vector<double>& values, int Lmax) {
  if (Lmax < 1) throw DomainError("Lmax must be positive");
  const long n = static_cast<long>(values.size());
  if (n < 10L * Lmax || n < 10)
    throw DomainError("insufficient samples: " + std::to_string(n) + " < 10*Lmax = " + std::to_string(10L * Lmax));
  const int L = std::min(Lmax, 6);
  long double mean = 0;
  for (double x : values) mean += x;
  mean /= n;
  std::array<long double, 7> S{};
  for (double x : values) {
    const long double y = x - mean;
    long double p = 1;
    for (int j = 1; j <= 6; ++j) S[static_cast<std::size_t>(j)] += (p *= y);
  }
  std::vector<CumulantEstimate> out;
  for (int r = 1; r <= L; ++r) {
    const auto& terms = k_statistic_terms(r);
    CumulantEstimate e;
    e.order = r;
    e.n_samples = n;
    if (r == 1) {
      e.estimate = static_cast<double>(mean);
      e.std_error = std::sqrt(static_cast<double>(S[2] / (n - 1) / n));
    } else {
      e.estimate = static_cast<double>(evaluate_terms(terms, S, n));
      // delete-one jackknife on the power sums
      long double sum = 0, sum2 = 0;
      for (double x : values) {
        const long double y = x - mean;
        std::array<long double, 7> Si = S;
        long double p = 1;
        for (int j = 1; j <= 6; ++j) Si[static_cast<std::size_t>(j)] -= (p *= y);
        const long double ki = evaluate_terms(terms, Si, n - 1);
        sum += ki;
        sum2 += ki * ki;
      }
      const long double jm = sum / n;
      const long double var = (sum2 / n - jm * jm) * (n - 1);
      e.std_error = std::sqrt(static_cast<double>(std::max(var, 0.0L)));
    }
    out.push_back(e);
  }
  return out;
}

ScatteringSample heidelberg_smatrix(int M, const TunnelConfig& cfg, Rng& rng) {
  const int nl = cfg.n_left, nr = cfg.n_right, N = nl + nr;
  if (M < 10 * N) throw DomainError("Heidelberg model needs M >= 10 (N_L + N_R)");
  if (!(cfg.gamma2 >= 0 && cfg.gamma2 < 1)) throw DomainError("gamma^2 must lie in [0, 1)");
  // semicircle of radius 2: Delta at the band centre is pi / M, so M Delta = pi
  const double m_delta = std::numbers::pi;
  const double gamma = std::sqrt(cfg.gamma2);
  const double w_left = (1 - gamma) / (1 + gamma);
  boost::random::normal_distribution<double> diag(0.0, std::sqrt(1.0 / M));
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::MatrixXcd A(M, M);
    for (int i = 0; i < M; ++i) {
      A(i, i) = -diag(rng);
      for (int j = i + 1; j < M; ++j) {
        const std::complex<double> h = complex_gaussian(rng, 1.0 / M);
        A(i, j) = -h;
        A(j, i) = -std::conj(h);
      }
    }
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(M, N);
    for (int c = 0; c < N; ++c) {
      const double w = c < nl ? w_left : 1.0;
      W(c, c) = std::sqrt(w * m_delta) / std::numbers::pi;
    }
    A += std::complex<double>(0, std::numbers::pi) * W * W.adjoint();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::MatrixXcd X = lu.solve(W);
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(N, N) - std::complex<double>(0, 2 * std::numbers::pi) * W.adjoint() * X;
    if (!S.allFinite()) continue;
    ScatteringSample out = make_sample(std::move(S), nl, nr);
    if (out.unitarity_defect < 1e-10) return out;
  }
  throw NumericalError("Heidelberg linear solve failed repeatedly");
}

ScatteringSample poisson_kernel_sample(const TunnelConfig& cfg, Rng& rng) {
  const int nl = cfg.n_left, nr = cfg.n_right, N = nl + nr;
  const double gamma = std::sqrt(cfg.gamma2);
  Eigen::MatrixXcd s0 = Eigen::MatrixXcd::Zero(N, N), t0 = Eigen::MatrixXcd::Identity(N, N);
  for (int c = 0; c < nl; ++c) {
    s0(c, c) = gamma;
    t0(c, c) = std::sqrt(1 - cfg.gamma2);
  }
  const Eigen::MatrixXcd U = sample_haar_unitary(N, rng);
  const Eigen::MatrixXcd inner = (Eigen::MatrixXcd::Identity(N, N) + s0 * U).partialPivLu().solve(t0);
  return make_sample(s0 + t0 * U * inner, nl, nr);
}

SampleRun run_sampling(const SamplingPlan& plan) {
  if (plan.samples < 1) throw DomainError("sample count must be positive");
  if (plan.workers < 1) throw DomainError("worker count must be positive");
  if (plan.chunk_size < 1) throw DomainError("chunk size must be positive");
  const int nl = plan.cfg.n_left, nr = plan.cfg.n_right, N = nl + nr, n = std::min(nl, nr);
  const long total = plan.samples;
  const long chunks = (total + plan.chunk_size - 1) / plan.chunk_size;
  SampleRun run;
  run.G.assign(static_cast<std::size_t>(total), 0);
  run.P_shot.assign(static_cast<std::size_t>(total), 0);
  run.P.assign(static_cast<std::size_t>(total), 0);
  if (plan.keep_eigenvalues) {
    run.reflection.assign(static_cast<std::size_t>(total * nl), 0);
    run.transmission.assign(static_cast<std::size_t>(total * n), 0);
  }
  std::vector<double> chunk_defect(static_cast<std::size_t>(chunks), 0);
  std::atomic<long> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;

  auto work = [&] {
    try {
      for (long c = next++; c < chunks; c = next++) {
        Rng rng = make_stream(plan.seed, static_cast<std::uint64_t>(c));
        const long lo = c * plan.chunk_size, hi = std::min(total, lo + plan.chunk_size);
        double defect = 0;
        for (long i = lo; i < hi; ++i) {
          Observables o;
          const auto idx = static_cast<std::size_t>(i);
          if (plan.ensemble == Ensemble::Cue && !plan.keep_eigenvalues) {
            const Eigen::MatrixXcd U = sample_haar_unitary(N, rng);
            o = observables_from_block(U.topRightCorner(nl, nr), plan.thermo);
          } else {
            ScatteringSample s;
            switch (plan.ensemble) {
              case Ensemble::Cue: s = make_sample(sample_haar_unitary(N, rng), nl, nr); break;
              case Ensemble::Heidelberg: s = heidelberg_smatrix(plan.matrix_size, plan.cfg, rng); break;
              case Ensemble::PoissonKernel: s = poisson_kernel_sample(plan.cfg, rng); break;
            }
            defect = std::max(defect, s.unitarity_defect);
            o = observables(s, plan.thermo);
            if (plan.keep_eigenvalues) {
              std::copy(s.reflection.begin(), s.reflection.end(), run.reflection.begin() + i * nl);
              std::copy(s.transmission.begin(), s.transmission.end(), run.transmission.begin() + i * n);
            }
          }
          run.G[idx] = o.G;
          run.P_shot[idx] = o.P_shot;
          run.P[idx] = o.P;
        }
        chunk_defect[static_cast<std::size_t>(c)] = defect;
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < plan.workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  for (double d : chunk_defect) run.max_unitarity_defect = std::max(run.max_unitarity_defect, d);
  return run;
}

void write_raw_samples(const std::vector<double>& values, std::ostream& out) {
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
  }
}

double jmgf_quadrature(const LeadConfig& cfg, const ThermoFactor& thermo, double z, double w) {
  if (thermo.shot_limit) throw DomainError("the joint MGF needs a finite eta");
  const int n = cfg.n, nu = cfg.nu_int();
  if (n < 0 || n > 6) throw DomainError("jmgf_quadrature is limited to small n");
  if (n == 0) return 1.0;
  const double f = thermo.f;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      auto integrand = [&](long double T) {
        return std::pow(T, nu + j + k) * std::exp(-(z + w) * T - w * f * T * (1 - T));
      };
      try {
        m(j, k) = static_cast<double>(integrate_adaptive(integrand, 0.0L, 1.0L));
      } catch (const NumericalError& e) {
        throw NumericalError("joint MGF entry (" + std::to_string(j) + "," + std::to_string(k) + "): " + e.what());
      }
    }
  return to_double(BigRational(factorial(n)) / normalization_c(n, nu)) * determinant(m);
}

double toda_joint_check(const LeadConfig& cfg, const ThermoFactor& thermo, double z, double w, double h,
                        std::optional<double> variance) {
  if (cfg.n < 1) throw DomainError("joint Toda check needs n >= 1");
  if (!(h > 0)) throw DomainError("difference step must be positive");
  const double var = variance ? *variance : to_double(conductance_variance(cfg));
  const double f0 = jmgf_quadrature(cfg, thermo, z, w);
  const double fp = jmgf_quadrature(cfg, thermo, z + h, w);
  const double fm = jmgf_quadrature(cfg, thermo, z - h, w);
  const double d1 = (fp - fm) / (2 * h), d2 = (fp - 2 * f0 + fm) / (h * h);
  const double lower = jmgf_quadrature(effective_config(cfg.n - 1, cfg.nu), thermo, z, w);
  const double upper = jmgf_quadrature(effective_config(cfg.n + 1, cfg.nu), thermo, z, w);
  return std::abs(f0 * d2 - d1 * d1 - var * lower * upper);
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_pvalue(double statistic, long n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 0.2) return 1.0;
  double q = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2 : -2) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

double chi_squared_pvalue(const std::vector<long>& observed, const std::vector<double>& expected, int fitted) {
  if (observed.size() != expected.size() || observed.size() < 2) throw DomainError("chi-squared needs matching bins");
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0)) throw DomainError("chi-squared expected counts must be positive");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  const int dof = static_cast<int>(observed.size()) - 1 - fitted;
  if (dof < 1) throw DomainError("chi-squared has no degrees of freedom left");
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

}  // namespace toda
