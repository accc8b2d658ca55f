#include <random>

#include "doctest.h"
#include "toda/error.hpp"
#include "toda/serialization.hpp"

using namespace toda;

namespace {

BigRational q(long a, long b = 1) { return make_rational(a, b); }

}  // namespace

TEST_CASE("rationals carry an exact and a decimal rendering") {
  const Json j = rational_json(q(-36, 125));
  CHECK(j["exact"] == "-36/125");
  CHECK(j["decimal"] == "-0.288");
  CHECK(rational_json(q(1, 3))["decimal"] == "0.33333333333333333333");
  CHECK(rational_from_json(j) == q(-36, 125));
  CHECK(rational_from_json(Json("7/2")) == q(7, 2));
  CHECK_THROWS_AS(rational_from_json(Json(0.5)), DomainError);
}

TEST_CASE("polynomial maps skip zero coefficients") {
  const Polynomial p{0, q(-6), 0, q(-2)};
  const Json j = polynomial_json(p);
  CHECK(j.dump() == R"({"1":"-6","3":"-2"})");
  CHECK(polynomial_from_json(j) == p);
  CHECK(polynomial_json(Polynomial{}).dump() == "{}");
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"({"x":"1"})")), DomainError);
  CHECK_THROWS_AS(polynomial_from_json(Json::parse(R"({"-1":"1"})")), DomainError);
}

TEST_CASE("exponential sums round-trip for every MGF up to n = 4") {
  for (int n = 1; n <= 4; ++n)
    for (int nu = 0; nu <= 2; ++nu) {
      CAPTURE(n);
      CAPTURE(nu);
      const ExpLaurentFn f = mgf_hankel(lead_config(n, n + nu));
      const Json j = exp_laurent_json(f);
      CHECK(exp_laurent_from_json(j) == f);
      CHECK(exp_laurent_from_json(Json::parse(j.dump())) == f);
    }
  // {k: {power: "num/den"}}
  const Json one = exp_laurent_json(mgf_hankel(lead_config(1, 1)));
  CHECK(one.dump() == R"({"0":{"-1":"1"},"1":{"-1":"-1"}})");
}

TEST_CASE("random exponential sums round-trip") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    ExpLaurentFn f;
    for (int t = 0; t < 6; ++t)
      f += ExpLaurentFn::term(q(small(rng), 1 + std::abs(small(rng))), std::abs(small(rng)), small(rng));
    CHECK(exp_laurent_from_json(exp_laurent_json(f)) == f);
  }
}

TEST_CASE("densities round-trip and keep their invariants") {
  for (int n = 1; n <= 4; ++n) {
    const LeadConfig cfg = lead_config(n, n + 1);
    const PiecewisePolyDensity d = density_from_mgf(mgf_hankel(cfg), cfg);
    const PiecewisePolyDensity back = density_from_json(Json::parse(density_json(d).dump()));
    CHECK(back.n == d.n);
    CHECK(back.nu == d.nu);
    CHECK(back.heaviside == d.heaviside);
    CHECK(back.sgn == d.sgn);
    CHECK(back.total_mass() == 1);
  }
  CHECK_THROWS_AS(density_from_json(Json::parse(R"({"n":1})")), DomainError);
}

TEST_CASE("cumulant and joint tables") {
  const auto seq = conductance_cumulants(lead_config(2, 3), 3);
  const Json rows = cumulants_json(seq);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["order"] == 1);
  CHECK(rows[0]["exact"] == "6/5");
  CHECK(rows[1]["exact"] == "3/50");
  CHECK(rows[2]["exact"] == "-1/875");

  const auto table = joint_cumulants(lead_config(1, 1), 1, 3);
  const Json entries = joint_table_json(table, thermo_shot_limit());
  for (const auto& e : entries) {
    CHECK(e["l"].get<int>() <= 1);
    CHECK(e["m"].get<int>() <= 3);
  }
  auto find = [&](int l, int m) {
    for (const auto& e : entries)
      if (e["l"] == l && e["m"] == m) return e;
    return Json();
  };
  CHECK(find(0, 1)["shot"]["exact"] == "1/6");
  CHECK(find(0, 2)["shot"]["exact"] == "1/180");
  CHECK(find(0, 1)["value"].get<double>() == doctest::Approx(1.0 / 6));
  CHECK(polynomial_from_json(find(0, 1)["polynomial"]) == table.at(0, 1));
  const Json warm = joint_table_json(table, thermo_factor(1.0));
  const int l0 = warm[0]["l"], m0 = warm[0]["m"];
  CHECK(warm[0]["value"].get<double>() == doctest::Approx(table.evaluate(l0, m0, thermo_factor(1.0).f)));
  CHECK_FALSE(joint_table_json(table, std::nullopt)[0].contains("value"));
}

TEST_CASE("report records") {
  const Json e = estimate_json("G", CumulantEstimate{2, 0.1, 0.01, 1000}, 42);
  CHECK(e.dump() == R"({"observable":"G","order":2,"estimate":0.1,"stderr":0.01,"n_samples":1000,"seed":42})");
  const Json r = nonideal_record(tunnel_config(1, 2, 0.25), 0.5, 0.75);
  CHECK(r.dump() == R"({"NL":1,"NR":2,"gamma2":0.25,"z":0.5,"mgf":0.75})");
  const Json c = lead_config_json(lead_config(2, 5));
  CHECK(c.dump() == R"({"n":2,"nu":"3","NL":2,"NR":5})");
}
