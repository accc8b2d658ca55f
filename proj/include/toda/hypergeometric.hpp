#pragma once

namespace toda {

/// 2F1(N_R+k, N_R+k; k; x) through the Euler transformation, which turns
/// it into (1-x)^{-2N_R-k} times a polynomial of degree N_R. Requires
/// x < 1, k >= 1, N_R >= 0.
long double gauss_2f1_transport(int n_right, int k, long double x);

/// d/dx of gauss_2f1_transport.
long double gauss_2f1_transport_dx(int n_right, int k, long double x);

/// Plain power series of 2F1(a, b; c; x), |x| < 1, summed until terms fall
/// below rel_tol of the partial sum.
long double gauss_2f1_series(long double a, long double b, long double c, long double x,
                             long double rel_tol = 1e-18L);

}  // namespace toda
