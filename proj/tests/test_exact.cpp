#include <cmath>
#include <random>

#include "doctest.h"
#include "toda/ensemble.hpp"
#include "toda/error.hpp"
#include "toda/exp_laurent.hpp"
#include "toda/mp_real.hpp"
#include "toda/polynomial.hpp"
#include "toda/rational.hpp"

using namespace toda;

TEST_CASE("rational parse and print round-trip") {
  CHECK(to_string(make_rational(6, -4)) == "-3/2");
  CHECK(to_string(make_rational(8, 4)) == "2");
  CHECK(parse_rational("-36/125") == make_rational(-36, 125));
  CHECK(parse_rational("7") == 7);
  CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
  CHECK_THROWS_AS(parse_rational("x/2"), DomainError);
  CHECK(to_decimal(make_rational(1, 3), 10) == "0.3333333333");
}

TEST_CASE("rational arithmetic is exact: (a/b)(b/a) = 1") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> pick(-1000000, 1000000);
  for (int i = 0; i < 500; ++i) {
    long a = pick(rng), b = pick(rng);
    if (a == 0 || b == 0) continue;
    BigRational q = make_rational(a, b);
    CHECK(q * (1 / q) == 1);
    CHECK(q.get_den() > 0);
    CHECK(gcd(q.get_num(), q.get_den()) == 1);
  }
}

TEST_CASE("factorial, binomial and integer powers") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(20) == BigInt("2432902008176640000"));
  CHECK(binomial(10, 3) == 120);
  CHECK(binomial(4, 7) == 0);
  CHECK(pow(make_rational(2, 3), -2) == make_rational(9, 4));
}

TEST_CASE("polynomial algebra") {
  Polynomial p{1, 2, 1};  // (1+x)^2
  CHECK(p == Polynomial{1, 1} * Polynomial{1, 1});
  CHECK(p.shifted(-1) == Polynomial{0, 0, 1});
  CHECK(p.reflected() == Polynomial{1, -2, 1});
  CHECK(p.derivative() == Polynomial{2, 2});
  CHECK(p.integral(0, 1) == make_rational(7, 3));
  CHECK((p - p).is_zero());
  CHECK((p - p).degree() == -1);
  CHECK(p(BigRational(2)) == 9);
  CHECK(p.evaluate(0.5) == doctest::Approx(2.25));
}

TEST_CASE("mp_real respects precision and environment override") {
  MpReal x(1.0, 200);
  MpReal e = exp(x);
  CHECK(e.precision() == 200);
  CHECK(e.to_double() == doctest::Approx(std::exp(1.0)));
  CHECK(e.to_string(30) == "2.71828182845904523536028747135");
  MpReal third(200);
  third.set(make_rational(1, 3));
  CHECK((third * MpReal(3.0, 200)).to_double() == 1.0);
  CHECK(extended_precision_bits(99) >= 53);
}

TEST_CASE("exp-laurent ring operations") {
  // (1 - e^{-z}) / z
  ExpLaurentFn f = ExpLaurentFn::term(1, 0, -1) - ExpLaurentFn::term(1, 1, -1);
  auto s = f.series_at_zero(4);
  CHECK(s[0] == 1);
  CHECK(s[1] == make_rational(-1, 2));
  CHECK(s[2] == make_rational(1, 6));
  CHECK(s[3] == make_rational(-1, 24));
  CHECK((f - f).is_zero());
  // d/dz of e^{-z} z^2 = e^{-z}(2z - z^2)
  ExpLaurentFn g = ExpLaurentFn::term(1, 1, 2);
  CHECK(g.derivative() == ExpLaurentFn::term(2, 1, 1) - ExpLaurentFn::term(1, 1, 2));
  // product rule on a non-trivial pair
  ExpLaurentFn h = f * g;
  CHECK(h.derivative() == f.derivative() * g + f * g.derivative());
  ExpLaurentFn bad = ExpLaurentFn::term(1, 0, -1);
  CHECK_THROWS_AS(bad.series_at_zero(2), ShapeError);
  MpReal z(1.0, 128);
  CHECK(f.evaluate_direct(z).to_double() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("lead configuration") {
  auto c = lead_config(2, 3);
  CHECK(c.n == 2);
  CHECK(c.nu == 1);
  c = lead_config(5, 5);
  CHECK(c.n == 5);
  CHECK(c.nu == 0);
  c = lead_config(1, 4);
  CHECK(c.n == 1);
  CHECK(c.nu == 3);
  CHECK_THROWS_AS(lead_config(0, 2), ConfigError);
  CHECK_THROWS_AS(effective_config(1, make_rational(-3, 4)), ConfigError);
  CHECK_NOTHROW(effective_config(1, make_rational(-1, 2)));
  CHECK_THROWS_AS(effective_config(2, make_rational(1, 2)).nu_int(), DomainError);
}

TEST_CASE("thermodynamic factor") {
  CHECK(thermo_factor(0.0).f == 0.0);
  CHECK(thermo_factor(1.0).f == doctest::Approx(0.3130352855).epsilon(1e-10));
  CHECK(thermo_factor(10.0).f == doctest::Approx(9.0000000412230725).epsilon(1e-12));
  CHECK(thermo_factor(20.0).f - 19.0 < 1e-8);
  CHECK(thermo_factor(std::numeric_limits<double>::infinity()).shot_limit);
  CHECK_THROWS_AS(thermo_factor(-0.1), DomainError);
  // series branch joins the direct branch smoothly
  const double a = thermo_factor(0.99e-4).f, b = thermo_factor(1.01e-4).f;
  CHECK(a < b);
  for (double eta : {1e-4, 1e-3, 0.1, 0.5, 0.999}) {
    const double e2 = eta * eta;
    double ref = e2 / 3 - e2 * e2 / 45 + 2 * e2 * e2 * e2 / 945 - e2 * e2 * e2 * e2 / 4725 +
                 2 * std::pow(e2, 5) / 93555 - 1382 * std::pow(e2, 6) / 638512875.0;
    CHECK(thermo_factor(eta).f == doctest::Approx(ref).epsilon(eta < 0.2 ? 1e-15 : 1e-5));
  }
  CHECK(thermo_factor(0.9999999).f == doctest::Approx(thermo_factor(1.0000001).f).epsilon(1e-6));
  double prev = -1.0;
  for (double eta = 0.0; eta < 30.0; eta += 0.37) {
    double f = thermo_factor(eta).f;
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("normalization constants") {
  CHECK(normalization_c(1, 0) == 1);
  CHECK(normalization_c(0, 5) == 1);
  CHECK(normalization_c(2, 0) == make_rational(1, 6));
  for (int nu = 0; nu < 5; ++nu) CHECK(normalization_c(1, nu) == make_rational(1, nu + 1));
  CHECK(conductance_variance(lead_config(2, 2)) == make_rational(1, 15));
  CHECK(conductance_variance(lead_config(2, 3)) == make_rational(3, 50));
}
