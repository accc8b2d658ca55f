#include "toda/hypergeometric.hpp"

#include <cmath>
#include <string>

#include "toda/error.hpp"

namespace toda {

namespace {

void check_args(int n_right, int k, long double x) {
  if (!(x < 1.0L)) throw DomainError("2F1 transport form needs x < 1, got " + std::to_string(static_cast<double>(x)));
  if (k < 1 || n_right < 0) throw DomainError("2F1 transport form needs k >= 1 and N_R >= 0");
}

// sum_j [(-N)_j]^2 / ((k)_j j!) x^j and its derivative
void terminating_poly(int n_right, int k, long double x, long double& value, long double& deriv) {
  long double coeff = 1, acc = 0, dacc = 0, xp = 1;
  for (int j = 0; j <= n_right; ++j) {
    acc += coeff * xp;
    if (j < n_right) {
      const long double a = -n_right + j;
      coeff *= a * a / ((k + j) * static_cast<long double>(j + 1));
      dacc += coeff * (j + 1) * xp;
    }
    xp *= x;
  }
  value = acc;
  deriv = dacc;
}

}  // namespace

long double gauss_2f1_transport(int n_right, int k, long double x) {
  check_args(n_right, k, x);
  long double p, dp;
  terminating_poly(n_right, k, x, p, dp);
  return std::pow(1.0L - x, -(2 * n_right + k)) * p;
}

long double gauss_2f1_transport_dx(int n_right, int k, long double x) {
  check_args(n_right, k, x);
  long double p, dp;
  terminating_poly(n_right, k, x, p, dp);
  const int e = 2 * n_right + k;
  return std::pow(1.0L - x, -e - 1) * (e * p + (1.0L - x) * dp);
}

long double gauss_2f1_series(long double a, long double b, long double c, long double x, long double rel_tol) {
  if (!(std::abs(x) < 1.0L)) throw DomainError("2F1 power series needs |x| < 1");
  long double term = 1, sum = 1;
  for (int j = 0; j < 100000; ++j) {
    term *= (a + j) * (b + j) / ((c + j) * (j + 1)) * x;
    sum += term;
    if (std::abs(term) <= rel_tol * std::abs(sum) && j > 2) return sum;
  }
  throw NumericalError("2F1 power series did not converge");
}

}  // namespace toda
