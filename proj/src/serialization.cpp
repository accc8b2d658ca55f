#include "toda/serialization.hpp"

#include <cmath>

#include "toda/error.hpp"

namespace toda {

namespace {

int parse_key(const std::string& key) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != key.size()) throw DomainError("malformed integer key \"" + key + "\"");
  return v;
}

Json coefficient_map(const std::vector<BigRational>& coeffs, int low) {
  Json out = Json::object();
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != 0) out[std::to_string(low + static_cast<int>(i))] = to_string(coeffs[i]);
  return out;
}

}  // namespace

Json rational_json(const BigRational& q) {
  return Json{{"exact", to_string(q)}, {"decimal", to_decimal(q, 20)}};
}

BigRational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_object() && j.contains("exact") && j["exact"].is_string())
    return parse_rational(j["exact"].get<std::string>());
  throw DomainError("expected a rational as \"p/q\" or {\"exact\": \"p/q\"}");
}

Json polynomial_json(const Polynomial& p) { return coefficient_map(p.coeffs(), 0); }

Polynomial polynomial_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("polynomial must be a {power: \"p/q\"} map");
  Polynomial p;
  for (const auto& [key, value] : j.items()) {
    const int k = parse_key(key);
    if (k < 0) throw DomainError("negative power in polynomial");
    p += Polynomial::monomial(rational_from_json(value), k);
  }
  return p;
}

Json exp_laurent_json(const ExpLaurentFn& f) {
  Json out = Json::object();
  for (const auto& [k, poly] : f.terms()) out[std::to_string(k)] = coefficient_map(poly.coeffs(), poly.low());
  return out;
}

ExpLaurentFn exp_laurent_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("exponential sum must be a {k: {power: \"p/q\"}} map");
  ExpLaurentFn f;
  for (const auto& [ks, inner] : j.items()) {
    const int k = parse_key(ks);
    if (!inner.is_object()) throw DomainError("sector " + ks + " must be a {power: \"p/q\"} map");
    for (const auto& [ps, value] : inner.items()) f += ExpLaurentFn::term(rational_from_json(value), k, parse_key(ps));
  }
  return f;
}

Json density_json(const PiecewisePolyDensity& d) {
  Json heaviside = Json::array(), sgn = Json::array();
  for (const auto& p : d.heaviside) heaviside.push_back(polynomial_json(p));
  for (const auto& p : d.sgn) sgn.push_back(polynomial_json(p));
  return Json{{"n", d.n}, {"nu", d.nu}, {"heaviside", heaviside}, {"sgn", sgn}};
}

PiecewisePolyDensity density_from_json(const Json& j) {
  PiecewisePolyDensity d;
  try {
    d.n = j.at("n").get<int>();
    d.nu = j.at("nu").get<int>();
    for (const auto& p : j.at("heaviside")) d.heaviside.push_back(polynomial_from_json(p));
    for (const auto& p : j.at("sgn")) d.sgn.push_back(polynomial_from_json(p));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed density: ") + e.what());
  }
  return d;
}

Json lead_config_json(const LeadConfig& cfg) {
  Json out{{"n", cfg.n}, {"nu", to_string(cfg.nu)}};
  if (cfg.n_left) out["NL"] = *cfg.n_left;
  if (cfg.n_right) out["NR"] = *cfg.n_right;
  return out;
}

Json cumulants_json(const CumulantSeq& seq) {
  Json rows = Json::array();
  for (int l = 1; l <= seq.order(); ++l) {
    Json row{{"order", l}};
    row.update(rational_json(seq[l]));
    rows.push_back(row);
  }
  return rows;
}

Json joint_table_json(const JointCumulantTable& table, const std::optional<ThermoFactor>& thermo) {
  const auto shot = shot_limit(table);
  Json rows = Json::array();
  for (const auto& [lm, poly] : table.entries) {
    if (lm.first > table.lmax || lm.second > table.mmax) continue;
    Json row{{"l", lm.first}, {"m", lm.second}, {"polynomial", polynomial_json(poly)}};
    row["shot"] = rational_json(shot.at(lm));
    if (thermo) {
      if (thermo->shot_limit)
        row["value"] = to_double(shot.at(lm));
      else
        row["value"] = poly.evaluate(thermo->f);
    }
    rows.push_back(row);
  }
  return rows;
}

Json estimate_json(const std::string& observable, const CumulantEstimate& e, std::uint64_t seed) {
  return Json{{"observable", observable}, {"order", e.order},         {"estimate", e.estimate},
              {"stderr", e.std_error},    {"n_samples", e.n_samples}, {"seed", seed}};
}

Json nonideal_record(const TunnelConfig& cfg, double z, double mgf) {
  return Json{{"NL", cfg.n_left}, {"NR", cfg.n_right}, {"gamma2", cfg.gamma2}, {"z", z}, {"mgf", mgf}};
}

}  // namespace toda
