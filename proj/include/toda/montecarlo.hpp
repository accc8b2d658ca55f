#pragma once

#include <Eigen/Dense>
#include <boost/random/mersenne_twister.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "toda/ensemble.hpp"
#include "toda/nonideal.hpp"

namespace toda {

using Rng = boost::random::mt19937_64;

/// Independent generator for (seed, stream id); streams never overlap in
/// practice because the two are mixed through splitmix64 before seeding.
Rng make_stream(std::uint64_t seed, std::uint64_t stream_id);

/// Haar-distributed unitary: complex Gaussian matrix, QR, and the diagonal
/// phase correction Q diag(R_ii / |R_ii|).
Eigen::MatrixXcd sample_haar_unitary(int N, Rng& rng);

struct ScatteringSample {
  Eigen::MatrixXcd S;
  int n_left = 0;
  int n_right = 0;
  std::vector<double> transmission;  // eigenvalues of t t^dagger, ascending
  std::vector<double> reflection;    // eigenvalues of r r^dagger, ascending
  double unitarity_defect = 0;       // max-abs entry of S S^dagger - 1
};

/// Splits S into blocks r (N_L x N_L) and t (N_L x N_R) and diagonalizes.
ScatteringSample make_sample(Eigen::MatrixXcd S, int n_left, int n_right);

struct Observables {
  double G = 0;
  double P_shot = 0;
  double P = 0;  // G + f P_shot; equals P_shot under the shot-limit tag
};

Observables observables(const std::vector<double>& transmission, const ThermoFactor& thermo);
Observables observables(const ScatteringSample& sample, const ThermoFactor& thermo);
/// From the transmission block alone: G = |t|_F^2, sum T^2 = |t t^dagger|_F^2.
Observables observables_from_block(const Eigen::MatrixXcd& t, const ThermoFactor& thermo);

struct CumulantEstimate {
  int order = 0;
  double estimate = 0;
  double std_error = 0;
  long n_samples = 0;
};

/// Unbiased k-statistics of orders 1..min(Lmax, 6) with delete-one jackknife
/// standard errors. Needs at least 10 Lmax samples.
std::vector<CumulantEstimate> estimate_cumulants(const std::vector<double>& values, int Lmax);

/// k-statistic of order r (1..6) for the given sample.
double k_statistic(const std::vector<double>& values, int r);

/// Hamiltonian model at the band centre: M x M GUE with E|H_ij|^2 = 1/M,
/// coupling columns scaled so that pi^2 W^dagger W / (M Delta) = w, with
/// w = (1 - gamma)/(1 + gamma) on the left lead and w = 1 on the right.
ScatteringSample heidelberg_smatrix(int M, const TunnelConfig& cfg, Rng& rng);

/// Direct draw from the Poisson kernel with mean S0 = diag(gamma 1_{N_L}, 0):
/// S = S0 + t0 U (1 + S0 U)^{-1} t0 for a Haar unitary U.
ScatteringSample poisson_kernel_sample(const TunnelConfig& cfg, Rng& rng);

enum class Ensemble { Cue, Heidelberg, PoissonKernel };

struct SamplingPlan {
  Ensemble ensemble = Ensemble::Cue;
  TunnelConfig cfg;  // gamma2 ignored for CUE
  int matrix_size = 400;  // Heidelberg only
  ThermoFactor thermo;
  long samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  long chunk_size = 4096;
  bool keep_eigenvalues = false;
};

struct SampleRun {
  std::vector<double> G, P_shot, P;
  std::vector<double> reflection;    // N_L values per sample when kept
  std::vector<double> transmission;  // n values per sample when kept
  double max_unitarity_defect = 0;
};

/// Chunk c of the plan draws from make_stream(seed, c); results are laid out
/// by chunk, so the output is independent of the worker count.
SampleRun run_sampling(const SamplingPlan& plan);

/// Raw little-endian IEEE-754 doubles.
void write_raw_samples(const std::vector<double>& values, std::ostream& out);

/// Joint MGF <exp(-zG - wP)> by Andreief reduction and adaptive quadrature
/// (n <= 4, integer nu, finite eta).
double jmgf_quadrature(const LeadConfig& cfg, const ThermoFactor& thermo, double z, double w);

/// |F F'' - F'^2 - var F_{n-1} F_{n+1}| in z at fixed w, central differences.
double toda_joint_check(const LeadConfig& cfg, const ThermoFactor& thermo, double z, double w, double h,
                        std::optional<double> variance = std::nullopt);

/// One-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_pvalue(double statistic, long n);

/// Pearson chi-squared p-value; `expected` are counts, dof = bins - 1 - fitted.
double chi_squared_pvalue(const std::vector<long>& observed, const std::vector<double>& expected, int fitted = 0);

}  // namespace toda
