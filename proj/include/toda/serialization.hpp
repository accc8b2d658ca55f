#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "toda/cumulants.hpp"
#include "toda/exp_laurent.hpp"
#include "toda/montecarlo.hpp"
#include "toda/nonideal.hpp"
#include "toda/symbolic_mgf.hpp"

namespace toda {

using Json = nlohmann::ordered_json;

/// {"exact": "p/q", "decimal": "<20 significant digits>"}
Json rational_json(const BigRational& q);
/// Accepts the object form or a bare "p/q" string.
BigRational rational_from_json(const Json& j);

/// {"<power>": "p/q"} over the non-zero coefficients.
Json polynomial_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);

/// {"<k>": {"<power>": "p/q"}} for sum_k e^{-kz} L_k(z).
Json exp_laurent_json(const ExpLaurentFn& f);
ExpLaurentFn exp_laurent_from_json(const Json& j);

Json density_json(const PiecewisePolyDensity& d);
PiecewisePolyDensity density_from_json(const Json& j);

Json lead_config_json(const LeadConfig& cfg);

/// [{"order", "exact", "decimal"}] for kappa_1..kappa_L.
Json cumulants_json(const CumulantSeq& seq);

/// Entries l <= lmax, m <= mmax with their shot-limit coefficient; when
/// `thermo` is given each entry also carries its value at that f.
Json joint_table_json(const JointCumulantTable& table, const std::optional<ThermoFactor>& thermo);

/// {"observable", "order", "estimate", "stderr", "n_samples", "seed"}
Json estimate_json(const std::string& observable, const CumulantEstimate& e, std::uint64_t seed);

/// {"NL", "NR", "gamma2", "z", "mgf"}
Json nonideal_record(const TunnelConfig& cfg, double z, double mgf);

}  // namespace toda
