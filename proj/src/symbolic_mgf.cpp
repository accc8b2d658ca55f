#include "toda/symbolic_mgf.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "toda/error.hpp"

namespace toda {

ExpLaurentFn moment_fn(int m, int nu) {
  if (m + nu < 0) throw DomainError("moment_fn needs m + nu >= 0");
  const int d = nu + m;
  const BigInt df = factorial(d);
  ExpLaurentFn::Terms t;
  t[0] = LaurentPoly::monomial(BigRational(df), -(d + 1));
  LaurentPoly tail;
  for (int l = 0; l <= d; ++l) {
    BigRational c(df, factorial(l));
    c.canonicalize();
    tail -= LaurentPoly::monomial(c, l - d - 1);
  }
  t[1] = tail;
  return ExpLaurentFn(std::move(t));
}

namespace {

// det by expansion along rows over column subsets: D[S] is the minor of
// the first |S| rows restricted to columns S.
ExpLaurentFn ring_determinant(const std::vector<std::vector<ExpLaurentFn>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return ExpLaurentFn::constant(1);
  const std::uint32_t full = (1u << n) - 1;
  std::vector<ExpLaurentFn> minor(full + 1);
  minor[0] = ExpLaurentFn::constant(1);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int row = std::popcount(s) - 1;
    ExpLaurentFn acc;
    int pos = 0;
    for (int c = 0; c < n; ++c) {
      if (!(s & (1u << c))) continue;
      const std::uint32_t rest = s & ~(1u << c);
      // sign from the position of column c inside S
      ExpLaurentFn term = a[row][c] * minor[rest];
      if ((row - pos) % 2 == 0)
        acc += term;
      else
        acc -= term;
      ++pos;
    }
    minor[s] = std::move(acc);
  }
  return minor[full];
}

}  // namespace

ExpLaurentFn mgf_hankel(const LeadConfig& cfg) {
  const int n = cfg.n;
  const int nu = cfg.nu_int();
  if (n < 0 || nu < 0) throw DomainError("mgf_hankel needs n >= 0 and nu >= 0");
  if (n == 0) return ExpLaurentFn::constant(1);
  // z^{j} mu_{j+k} z^{k+nu+1} is free of negative powers
  std::vector<std::vector<ExpLaurentFn>> a(n, std::vector<ExpLaurentFn>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) a[j][k] = moment_fn(j + k, nu).shifted(j + k + nu + 1);
  ExpLaurentFn det = ring_determinant(a).shifted(-n * (n + nu));
  BigRational scale(factorial(n));
  scale /= normalization_c(n, nu);
  return det * scale;
}

ExpLaurentFn toda_residual(const LeadConfig& cfg, const BigRational& var) {
  if (cfg.n < 1) throw DomainError("Toda identity needs n >= 1");
  const ExpLaurentFn f = mgf_hankel(cfg);
  const ExpLaurentFn lower = mgf_hankel(effective_config(cfg.n - 1, cfg.nu));
  const ExpLaurentFn upper = mgf_hankel(effective_config(cfg.n + 1, cfg.nu));
  const ExpLaurentFn d1 = f.derivative();
  const ExpLaurentFn d2 = d1.derivative();
  return f * d2 - d1 * d1 - (lower * upper) * var;
}

ExpLaurentFn toda_residual(const LeadConfig& cfg) {
  return toda_residual(cfg, conductance_variance(cfg));
}

bool toda_check(const LeadConfig& cfg) { return toda_residual(cfg).is_zero(); }

bool toda_check(const LeadConfig& cfg, const BigRational& var) {
  return toda_residual(cfg, var).is_zero();
}

double PiecewisePolyDensity::operator()(double g) const {
  if (!(g > 0.0) || !(g < n)) return 0.0;
  // exact evaluation: the interval sums cancel heavily for larger n
  return to_double((*this)(BigRational(g)));
}

BigRational PiecewisePolyDensity::operator()(const BigRational& g) const {
  if (g <= 0 || g >= n) return 0;
  BigRational acc = 0;
  for (int k = 0; k < n && g > k; ++k) acc += heaviside[static_cast<std::size_t>(k)](g - k);
  return acc;
}

BigRational PiecewisePolyDensity::total_mass() const {
  BigRational acc = 0;
  for (int k = 0; k < n; ++k)
    acc += heaviside[static_cast<std::size_t>(k)].integral(0, BigRational(n - k));
  return acc;
}

Polynomial PiecewisePolyDensity::closure_residual() const {
  Polynomial acc;
  for (int k = 0; k <= n; ++k) acc += sgn[static_cast<std::size_t>(k)].shifted(BigRational(-k));
  return acc;
}

PiecewisePolyDensity density_from_mgf(const ExpLaurentFn& mgf, const LeadConfig& cfg) {
  PiecewisePolyDensity d;
  d.n = cfg.n;
  d.nu = cfg.nu_int();
  d.heaviside.assign(static_cast<std::size_t>(d.n + 1), Polynomial());
  for (const auto& [k, poly] : mgf.terms()) {
    if (k < 0 || k > d.n) throw ShapeError("exponential sector e^{-" + std::to_string(k) + "z} out of range");
    if (poly.high() >= 0)
      throw ShapeError("non-negative power of z in sector " + std::to_string(k) +
                       " (atom in the distribution)");
    Polynomial h;
    // c z^{-m} -> c x^{m-1} / (m-1)!
    for (int q = poly.low(); q <= poly.high(); ++q) {
      const BigRational c = poly.coeff(q);
      if (c == 0) continue;
      const int m = -q;
      h += Polynomial::monomial(c / BigRational(factorial(m - 1)), m - 1);
    }
    d.heaviside[static_cast<std::size_t>(k)] = std::move(h);
  }
  d.sgn.resize(static_cast<std::size_t>(d.n + 1));
  Polynomial tail;
  for (int k = 0; k < d.n; ++k) {
    d.sgn[static_cast<std::size_t>(k)] = d.heaviside[static_cast<std::size_t>(k)] * make_rational(1, 2);
    tail += d.sgn[static_cast<std::size_t>(k)].shifted(BigRational(d.n - k));
  }
  // closure: sum_k pi_k(g - k) = 0, solved for pi_n at x = g - n
  d.sgn[static_cast<std::size_t>(d.n)] = -tail;
  if (!(d.sgn[static_cast<std::size_t>(d.n)] * BigRational(2) == d.heaviside[static_cast<std::size_t>(d.n)]))
    throw ShapeError("density does not vanish beyond g = n");
  const int bound = d.n * (d.n + d.nu) - 1;
  for (const auto& p : d.sgn)
    if (p.degree() > bound) throw ShapeError("sgn polynomial exceeds degree n(n+nu)-1");
  return d;
}

MgfEvaluator::MgfEvaluator(ExpLaurentFn fn, long bits) : fn_(std::move(fn)), bits_(bits) {
  if (bits_ < 53) throw DomainError("precision below 53 bits");
  const int p = std::max(0, -fn_.lowest_power());
  taylor_ = fn_.series_at_zero(4 * p + 20 + static_cast<int>(bits_ / 8));
}

MpReal MgfEvaluator::operator()(double z) const {
  if (std::abs(z) < 0.5) {
    const long w = bits_ + 32;
    MpReal x(z, w), acc(w), c(w);
    for (auto it = taylor_.rbegin(); it != taylor_.rend(); ++it) {
      acc *= x;
      acc += c.set(*it);
    }
    return acc.rounded(bits_);
  }
  // Ziv loop: widen the working precision until two passes round alike
  long guard = 64;
  MpReal prev = fn_.evaluate_direct(MpReal(z, bits_ + guard)).rounded(bits_);
  for (int pass = 0; pass < 12; ++pass) {
    guard *= 2;
    MpReal next = fn_.evaluate_direct(MpReal(z, bits_ + guard)).rounded(bits_);
    if (next == prev) return next;
    prev = std::move(next);
  }
  throw NumericalError("MGF evaluation did not stabilise at z=" + std::to_string(z));
}

MpReal eval_mgf(const ExpLaurentFn& mgf, double z, long bits) {
  return MgfEvaluator(mgf, bits)(z);
}

std::vector<BigRational> log_series(const ExpLaurentFn& mgf, int order) {
  const std::vector<BigRational> a = mgf.series_at_zero(order);
  if (a.empty() || a[0] != 1) throw ShapeError("MGF is not normalised to 1 at z=0");
  std::vector<BigRational> b(a.size());
  for (int k = 1; k <= order; ++k) {
    BigRational acc = 0;
    for (int j = 1; j < k; ++j) acc += BigRational(j) * b[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(k - j)];
    b[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] - acc / k;
  }
  return b;
}

std::vector<BigRational> cumulants_from_mgf(const ExpLaurentFn& mgf, int L) {
  const std::vector<BigRational> b = log_series(mgf, L);
  std::vector<BigRational> kappa(static_cast<std::size_t>(L + 1));
  for (int l = 1; l <= L; ++l) {
    BigRational v = b[static_cast<std::size_t>(l)] * BigRational(factorial(l));
    kappa[static_cast<std::size_t>(l)] = (l % 2 == 0) ? v : BigRational(-v);
  }
  return kappa;
}

}  // namespace toda
