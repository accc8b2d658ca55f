#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "toda/asymptotics.hpp"
#include "toda/diagnostics.hpp"
#include "toda/error.hpp"
#include "toda/painleve.hpp"

namespace toda::cli {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  Json doc;
  Table table;
  bool passed = true;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string poly_text(const Polynomial& p) {
  std::string s;
  for (int k = 0; k <= p.degree(); ++k) {
    if (p.coeff(k) == 0) continue;
    if (!s.empty()) s += ' ';
    s += std::to_string(k) + ':' + to_string(p.coeff(k));
  }
  return s.empty() ? "0" : s;
}

std::string config_text(int nl, int nr) { return "NL=" + std::to_string(nl) + " NR=" + std::to_string(nr); }

Json header(const RunSpec& s) { return Json{{"command", command_name(s.command)}, {"run_spec", to_json(s)}}; }

void write_csv(const Table& t, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

std::vector<double> linspace(double a, double b, int points) {
  if (points == 1) return {b};
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(a + (b - a) * i / (points - 1));
  return v;
}

// ---------------------------------------------------------------- commands

Report cmd_cumulants(const RunSpec& s) {
  const LeadConfig cfg = lead_config(s.n_left, s.n_right);
  CumulantSeq seq;
  try {
    seq = conductance_cumulants(cfg, s.lmax, SingularPolicy::Raise);
  } catch (const SingularOrderError& e) {
    if (s.strict) throw;
    warn(std::string(e.what()) + "; taking it from the exact log-MGF");
    seq = conductance_cumulants(cfg, s.lmax, SingularPolicy::SymbolicFallback);
  }
  std::vector<CumulantEstimate> mc;
  if (s.samples > 0) {
    SamplingPlan plan;
    plan.cfg = TunnelConfig{s.n_left, s.n_right, 0.0};
    plan.thermo = thermo_shot_limit();
    plan.samples = s.samples;
    plan.seed = s.seed;
    plan.workers = s.workers;
    mc = estimate_cumulants(run_sampling(plan).G, std::min(s.lmax, 6));
  }

  Report r;
  r.doc = header(s);
  r.doc["config"] = lead_config_json(cfg);
  r.doc["singular_orders"] = singular_orders(cfg, s.lmax);
  r.table.header = {"order", "exact", "decimal"};
  if (s.asymptotic) r.table.header.push_back("asymptotic");
  if (!mc.empty()) r.table.header.insert(r.table.header.end(), {"mc_estimate", "mc_stderr"});
  Json rows = cumulants_json(seq);
  for (int l = 1; l <= s.lmax; ++l) {
    Json& row = rows[static_cast<std::size_t>(l - 1)];
    std::vector<std::string> cells{std::to_string(l), to_string(seq[l]), to_decimal(seq[l], 20)};
    if (s.asymptotic) {
      const double a = kappa_asymptotic(l, cfg, true);
      row["asymptotic"] = a;
      cells.push_back(num(a));
    }
    if (l <= static_cast<int>(mc.size())) {
      const auto& e = mc[static_cast<std::size_t>(l - 1)];
      row["mc"] = estimate_json("G", e, s.seed);
      cells.insert(cells.end(), {num(e.estimate), num(e.std_error)});
    } else if (!mc.empty()) {
      cells.insert(cells.end(), {"", ""});
    }
    r.table.rows.push_back(cells);
  }
  r.doc["cumulants"] = rows;
  return r;
}

Report cmd_distribution(const RunSpec& s) {
  const LeadConfig cfg = lead_config(s.n_left, s.n_right);
  const ExpLaurentFn mgf = mgf_hankel(cfg);
  const PiecewisePolyDensity d = density_from_mgf(mgf, cfg);
  Report r;
  r.doc = header(s);
  r.doc["config"] = lead_config_json(cfg);
  r.doc["mgf"] = exp_laurent_json(mgf);
  r.doc["density"] = density_json(d);
  r.doc["total_mass"] = rational_json(d.total_mass());
  r.table.header = {"g", "pdf"};
  Json grid = Json::array();
  for (int i = 0; i < s.points; ++i) {
    const double g = (i + 0.5) * cfg.n / s.points;
    const double p = d(g);
    grid.push_back(Json{{"g", g}, {"pdf", p}});
    r.table.rows.push_back({num(g), num(p)});
  }
  r.doc["grid"] = grid;
  return r;
}

Report cmd_noise(const RunSpec& s) {
  const LeadConfig cfg = lead_config(s.n_left, s.n_right);
  const ThermoFactor thermo = s.eta ? s.eta->thermo() : thermo_shot_limit();
  const JointCumulantTable table = joint_cumulants(cfg, s.lmax, s.mmax);
  const auto shot = shot_limit(table);

  Report r;
  r.doc = header(s);
  r.doc["config"] = lead_config_json(cfg);
  r.doc["eta"] = thermo.shot_limit ? Json("inf") : Json(thermo.eta);
  r.doc["f"] = thermo.shot_limit ? Json("inf") : Json(thermo.f);
  r.doc["entries"] = joint_table_json(table, thermo);
  Json column = Json::array();
  for (int m = 1; m <= s.mmax; ++m) {
    Json row{{"order", m}};
    row.update(rational_json(shot.at({0, m})));
    column.push_back(row);
  }
  r.doc["shot_column"] = column;
  if (s.n_left == s.n_right && s.mmax >= 1) {
    Json sym = Json::array();
    const auto k = shot_cumulants_symmetric(s.n_left, s.mmax);
    for (int m = 1; m <= s.mmax; ++m) {
      Json row{{"order", m}};
      row.update(rational_json(k[static_cast<std::size_t>(m)]));
      sym.push_back(row);
    }
    r.doc["shot_symmetric_factorization"] = sym;
  }
  const FEtaPoly mean = mean_noise_power(s.n_left, s.n_right);
  r.doc["mean_noise"] = Json{{"polynomial", polynomial_json(mean)},
                             {"value", thermo.shot_limit ? to_double(mean.coeff(1)) : mean.evaluate(thermo.f)}};

  r.table.header = {"l", "m", "polynomial", "shot_exact", "shot_decimal", "value"};
  for (const auto& [lm, poly] : table.entries) {
    if (lm.first > table.lmax || lm.second > table.mmax) continue;
    const BigRational& sv = shot.at(lm);
    const double value = thermo.shot_limit ? to_double(sv) : poly.evaluate(thermo.f);
    r.table.rows.push_back({std::to_string(lm.first), std::to_string(lm.second), poly_text(poly), to_string(sv),
                            to_decimal(sv, 20), num(value)});
  }
  return r;
}

Report cmd_painleve(const RunSpec& s) {
  const LeadConfig cfg = lead_config(s.n_left, s.n_right);
  const double z_max = *std::max_element(s.z_grid.begin(), s.z_grid.end());
  const SigmaSolution sol = integrate_chazy(cfg, s.z_start, z_max, s.tol);
  const long bits = extended_precision_bits();
  const MgfEvaluator exact(mgf_hankel(cfg), bits);

  Report r;
  r.doc = header(s);
  r.doc["config"] = lead_config_json(cfg);
  r.doc["z_start"] = s.z_start;
  r.doc["handoff_z"] = sol.z0();
  r.doc["tol"] = s.tol;
  r.doc["precision_bits"] = bits;
  r.doc["jmo_sup"] = sol.jmo_sup();
  r.table.header = {"z", "sigma", "dsigma", "d2sigma", "jmo_residual", "log_mgf", "log_mgf_exact", "relative_error"};
  Json samples = Json::array();
  for (double z : s.z_grid) {
    const double sg = sol.sigma_at(z), s1 = sol.dsigma_at(z), s2 = sol.d2sigma_at(z);
    const double jmo = jmo_residual(cfg, z, sg, s1, s2);
    const double lm = log_mgf_from_sigma(sol, z);
    const double ex = log(exact(z)).to_double();
    const double rel = std::abs(lm - ex) / std::max(std::abs(ex), 1e-300);
    samples.push_back(Json{{"z", z},
                           {"sigma", sg},
                           {"dsigma", s1},
                           {"d2sigma", s2},
                           {"jmo_residual", jmo},
                           {"log_mgf", lm},
                           {"log_mgf_exact", ex},
                           {"relative_error", rel}});
    r.table.rows.push_back({num(z), num(sg), num(s1), num(s2), num(jmo), num(lm), num(ex), num(rel)});
  }
  r.doc["samples"] = samples;
  return r;
}

Report cmd_nonideal(const RunSpec& s) {
  const TunnelConfig cfg = tunnel_config(s.n_left, s.n_right, s.gamma2.value_or(0.0));
  Report r;
  r.doc = header(s);
  Json records = Json::array();
  for (double z : s.z_grid) records.push_back(nonideal_record(cfg, z, mgf_nonideal(cfg, z)));
  r.doc["records"] = records;
  if (s.density) {
    Json grid = Json::array();
    r.table.header = {"R", "pdf"};
    for (int i = 0; i < s.points; ++i) {
      const double R = (i + 0.5) / s.points;
      const double p = reflection_density(cfg, R);
      grid.push_back(Json{{"R", R}, {"pdf", p}});
      r.table.rows.push_back({num(R), num(p)});
    }
    r.doc["density"] = grid;
  } else {
    r.table.header = {"NL", "NR", "gamma2", "z", "mgf"};
    for (const auto& rec : records)
      r.table.rows.push_back({std::to_string(cfg.n_left), std::to_string(cfg.n_right), num(cfg.gamma2),
                              num(rec["z"].get<double>()), num(rec["mgf"].get<double>())});
  }
  return r;
}

void dump_raw(const std::string& path, const std::vector<double>& values) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_raw_samples(values, f);
}

Report cmd_montecarlo(const RunSpec& s) {
  SamplingPlan plan;
  plan.ensemble = s.ensemble;
  plan.cfg = s.ensemble == Ensemble::Cue ? TunnelConfig{s.n_left, s.n_right, 0.0}
                                         : tunnel_config(s.n_left, s.n_right, s.gamma2.value_or(0.0));
  plan.matrix_size = s.matrix_size;
  plan.thermo = s.eta ? s.eta->thermo() : thermo_shot_limit();
  plan.samples = s.samples;
  plan.seed = s.seed;
  plan.workers = s.workers;
  const SampleRun run = run_sampling(plan);

  // exact references exist for the ideal-lead ensemble
  std::map<std::string, std::vector<double>> exact;
  const bool ideal = s.ensemble == Ensemble::Cue || s.gamma2.value_or(0.0) == 0.0;
  if (ideal) {
    const LeadConfig cfg = lead_config(s.n_left, s.n_right);
    const JointCumulantTable table = joint_cumulants(cfg, 0, s.lmax);
    const auto shot = shot_limit(table);
    const CumulantSeq g = conductance_cumulants(cfg, s.lmax, SingularPolicy::SymbolicFallback);
    for (int l = 1; l <= s.lmax; ++l) {
      exact["G"].push_back(to_double(g[l]));
      exact["P_shot"].push_back(to_double(shot.at({0, l})));
      if (!plan.thermo.shot_limit) exact["P"].push_back(table.evaluate(0, l, plan.thermo.f));
    }
  }

  std::vector<std::pair<std::string, const std::vector<double>*>> observables{{"G", &run.G}, {"P_shot", &run.P_shot}};
  if (!plan.thermo.shot_limit) observables.emplace_back("P", &run.P);

  Report r;
  r.doc = header(s);
  r.doc["ensemble"] = ensemble_name(s.ensemble);
  r.doc["max_unitarity_defect"] = run.max_unitarity_defect;
  r.table.header = {"observable", "order", "estimate", "stderr", "n_samples", "seed", "exact"};
  Json reports = Json::array();
  for (const auto& [name, values] : observables) {
    for (const auto& e : estimate_cumulants(*values, s.lmax)) {
      Json rep = estimate_json(name, e, s.seed);
      std::string exact_cell;
      if (exact.count(name)) {
        const double x = exact[name][static_cast<std::size_t>(e.order - 1)];
        rep["exact"] = x;
        rep["z_score"] = e.std_error > 0 ? (e.estimate - x) / e.std_error : 0.0;
        exact_cell = num(x);
      }
      reports.push_back(rep);
      r.table.rows.push_back({name, std::to_string(e.order), num(e.estimate), num(e.std_error),
                              std::to_string(e.n_samples), std::to_string(s.seed), exact_cell});
    }
    if (!s.raw_out.empty()) dump_raw(s.raw_out + "." + name + ".bin", *values);
  }
  r.doc["reports"] = reports;
  return r;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string suite, name, config;
  double measured = 0, tolerance = 0;
  bool passed = false;
};

double max_abs(const ExpLaurentFn& f) {
  double m = 0;
  for (const auto& [k, poly] : f.terms())
    for (const auto& c : poly.coeffs()) m = std::max(m, std::abs(to_double(c)));
  return m;
}

Check exact_check(const std::string& suite, const std::string& name, const std::string& config, const BigRational& diff) {
  return Check{suite, name, config, std::abs(to_double(diff)), 0.0, diff == 0};
}

Check bound_check(const std::string& suite, const std::string& name, const std::string& config, double measured,
                  double tol) {
  return Check{suite, name, config, measured, tol, std::isfinite(measured) && measured <= tol};
}

void ideal_suite(const RunSpec& s, std::vector<Check>& out) {
  std::vector<std::pair<int, int>> configs;
  if (s.configs_given)
    configs.emplace_back(s.n_left, s.n_right);
  else
    for (int n = 1; n <= 3; ++n)
      for (int nu = 0; nu <= 2; ++nu) configs.emplace_back(n, n + nu);
  const std::string suite = "ideal";
  for (const auto& [nl, nr] : configs) {
    const LeadConfig cfg = lead_config(nl, nr);
    const std::string tag = config_text(nl, nr);
    const int L = std::max(s.lmax, 6);

    const BigRational var = conductance_variance(cfg) * (1 + BigRational(s.perturbation));
    const ExpLaurentFn toda = toda_residual(cfg, var);
    out.push_back(Check{suite, "toda_identity", tag, max_abs(toda), 0.0, toda.is_zero()});

    const CumulantSeq seq = conductance_cumulants(cfg, L, SingularPolicy::SymbolicFallback);
    BigRational worst = 0;
    for (int l = 2; l < L; ++l) worst = std::max(worst, BigRational(abs(cumulant_recurrence_residual(seq, l))));
    out.push_back(exact_check(suite, "cumulant_recurrence", tag, worst));

    const BigRational closed = abs(seq[1] - kappa1_closed(cfg)) + abs(seq[2] - kappa2_closed(cfg)) +
                               abs(seq[3] - kappa3_closed(cfg)) + abs(seq[2] - conductance_variance(cfg));
    out.push_back(exact_check(suite, "low_order_closed_forms", tag, closed));

    const ExpLaurentFn mgf = mgf_hankel(cfg);
    const auto from_mgf = cumulants_from_mgf(mgf, L);
    BigRational diff = 0;
    for (int l = 1; l <= L; ++l) diff += abs(from_mgf[static_cast<std::size_t>(l)] - seq[l]);
    out.push_back(exact_check(suite, "recurrence_vs_mgf", tag, diff));

    const PiecewisePolyDensity d = density_from_mgf(mgf, cfg);
    out.push_back(exact_check(suite, "density_mass", tag, d.total_mass() - 1));
    out.push_back(Check{suite, "density_closure", tag, d.closure_residual().is_zero() ? 0.0 : 1.0, 0.0,
                        d.closure_residual().is_zero()});

    const JointCumulantTable table = joint_cumulants(cfg, 2, 3);
    const auto shot = shot_limit(table);
    BigRational joint = 0;
    for (int l = 0; l <= 1; ++l) {
      const NoisePowerClosedForms cf = noise_power_closed_forms(seq, l);
      for (int k = 0; k <= 2; ++k) {
        joint += abs(cf.kappa_l1.coeff(k) - table.at(l, 1).coeff(k));
        joint += abs(cf.kappa_l2.coeff(k) - table.at(l, 2).coeff(k));
      }
      joint += abs(cf.shot_l1 - shot.at({l, 1})) + abs(cf.shot_l2 - shot.at({l, 2}));
    }
    out.push_back(exact_check(suite, "joint_closed_forms", tag, joint));
    if (cfg.nu == 0) {
      const auto sym = shot_cumulants_symmetric(cfg.n, 3);
      BigRational dd = abs(sym[1] - shot_kappa1_closed(cfg.n)) + abs(sym[2] - shot_kappa2_closed(cfg.n)) +
                       abs(sym[3] - shot_kappa3_closed(cfg.n));
      for (int m = 1; m <= 3; ++m) dd += abs(sym[static_cast<std::size_t>(m)] - shot.at({0, m}));
      out.push_back(exact_check(suite, "shot_noise_two_paths", tag, dd));
    }

    const SigmaSolution sol = integrate_chazy(cfg, 0.05, 5.0, 1e-10);
    out.push_back(bound_check(suite, "jmo_residual", tag, sol.jmo_sup(), 1e-6));
    const MgfEvaluator ev(mgf, extended_precision_bits());
    double rel = 0;
    for (int i = 0; i <= 49; ++i) {
      const double z = 0.1 + 4.9 * i / 49;
      const double ex = log(ev(z)).to_double();
      rel = std::max(rel, std::abs(log_mgf_from_sigma(sol, z) - ex) / std::abs(ex));
    }
    out.push_back(bound_check(suite, "painleve_log_mgf", tag, rel, 1e-7));
  }
}

void nonideal_suite(const RunSpec& s, std::vector<Check>& out) {
  const std::string suite = "nonideal";
  const double g2 = s.gamma2.value_or(0.25);
  const TunnelConfig cfg = tunnel_config(s.n_left, s.n_right, g2);
  std::ostringstream tag;
  tag << config_text(cfg.n_left, cfg.n_right) << " gamma2=" << num(g2);
  const double scale = 1 + s.perturbation;
  if (cfg.n_left <= 2)
    out.push_back(bound_check(suite, "jpdf_normalization", tag.str(),
                              std::abs(reflection_jpdf_mass(cfg) * scale - 1), 1e-8));
  out.push_back(bound_check(suite, "mgf_at_zero", tag.str(), std::abs(mgf_nonideal(cfg, 0.0) - 1), 1e-10));
  const double direct = mgf_nonideal(cfg, 1.0);
  out.push_back(bound_check(suite, "mgf_from_toda_variable", tag.str(),
                            std::abs(mgf_from_u(cfg, 1.0) - direct) / std::abs(direct), 1e-8));
  if (cfg.n_left <= 2 && cfg.gamma2 == 0.0) {
    const TunnelConfig ideal = tunnel_config(cfg.n_left, cfg.n_right, 0.0);
    const double ex = eval_mgf(mgf_hankel(lead_config(cfg.n_left, cfg.n_right)), 1.0, 64).to_double();
    out.push_back(bound_check(suite, "ideal_limit", tag.str(), std::abs(mgf_nonideal(ideal, 1.0) - ex), 1e-9));
  }

  // the 2D Toda stencil needs room on both sides of gamma2
  const double gt = (g2 >= 0.05 && g2 <= 0.9) ? g2 : 0.25;
  auto residual = [&](double h) {
    const Toda2DFrame f = toda2d_frame(cfg, 0.5, gt, h);
    return std::abs(f.mixed_log_derivative - scale * f.u_prev * f.u_next / (f.u * f.u));
  };
  const double r1 = residual(1e-2), r2 = residual(5e-3), r3 = residual(1e-3);
  std::ostringstream ttag;
  ttag << config_text(cfg.n_left, cfg.n_right) << " gamma2=" << num(gt) << " z=0.5";
  out.push_back(bound_check(suite, "toda2d_residual", ttag.str(), r3, 1e-4));
  out.push_back(bound_check(suite, "toda2d_second_order", ttag.str(), std::abs(std::log2(r1 / r2) - 2), 0.2));
}

void montecarlo_suite(const RunSpec& s, std::vector<Check>& out) {
  const std::string suite = "montecarlo";
  std::vector<std::pair<int, int>> configs;
  if (s.configs_given)
    configs.emplace_back(s.n_left, s.n_right);
  else
    configs = {{1, 1}, {1, 2}, {2, 2}, {2, 3}};
  for (const auto& [nl, nr] : configs) {
    const LeadConfig cfg = lead_config(nl, nr);
    SamplingPlan plan;
    plan.cfg = TunnelConfig{nl, nr, 0.0};
    plan.thermo = thermo_shot_limit();
    plan.samples = s.samples;
    plan.seed = s.seed;
    plan.workers = s.workers;
    const SampleRun run = run_sampling(plan);
    const CumulantSeq g = conductance_cumulants(cfg, 3, SingularPolicy::SymbolicFallback);
    const auto shot = shot_limit(joint_cumulants(cfg, 0, 3));
    const auto eg = estimate_cumulants(run.G, 3), ep = estimate_cumulants(run.P_shot, 3);
    for (int l = 1; l <= 3; ++l) {
      const auto& a = eg[static_cast<std::size_t>(l - 1)];
      const auto& b = ep[static_cast<std::size_t>(l - 1)];
      const std::string tag = config_text(nl, nr) + " order=" + std::to_string(l);
      out.push_back(bound_check(suite, "mc_conductance", tag, std::abs(a.estimate - to_double(g[l])) / a.std_error, 5));
      out.push_back(
          bound_check(suite, "mc_shot_noise", tag, std::abs(b.estimate - to_double(shot.at({0, l}))) / b.std_error, 5));
    }
  }
}

Report cmd_verify(const RunSpec& s, std::ostream& err) {
  std::vector<Check> checks;
  if (s.suite == "ideal" || s.suite == "all") ideal_suite(s, checks);
  if (s.suite == "nonideal" || s.suite == "all") nonideal_suite(s, checks);
  if (s.suite == "montecarlo" || s.suite == "all") montecarlo_suite(s, checks);

  Report r;
  r.doc = header(s);
  r.doc["suite"] = s.suite;
  r.table.header = {"suite", "check", "config", "measured", "tolerance", "passed"};
  Json rows = Json::array();
  for (const auto& c : checks) {
    rows.push_back(Json{{"suite", c.suite},
                        {"check", c.name},
                        {"config", c.config},
                        {"measured", c.measured},
                        {"tolerance", c.tolerance},
                        {"passed", c.passed}});
    r.table.rows.push_back(
        {c.suite, c.name, c.config, num(c.measured), num(c.tolerance), c.passed ? "true" : "false"});
    if (!c.passed)
      err << "FAIL " << c.suite << '/' << c.name << " [" << c.config << "] measured " << num(c.measured)
          << " > tolerance " << num(c.tolerance) << '\n';
    r.passed = r.passed && c.passed;
  }
  r.doc["passed"] = r.passed;
  r.doc["checks"] = rows;
  return r;
}

// ----------------------------------------------------------------- parsing

class Parser {
 public:
  Parser() {
    app_.require_subcommand(1);
    app_.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto* c = add(Command::Cumulants, "Exact conductance cumulants");
    c->add_flag("--strict", spec_.strict, "Fail at orders where the recurrence is singular");
    c->add_flag("--asymptotic", spec_.asymptotic, "Add the large-n expansion column");
    c->add_option("--mc-samples", spec_.samples, "Add a Monte Carlo column from this many CUE samples");

    auto* d = add(Command::Distribution, "Exact conductance density and a sampled grid");
    d->add_option("--points", spec_.points, "Grid cells over (0, n)");

    add(Command::Noise, "Joint conductance / noise-power cumulant tables");

    auto* p = add(Command::Painleve, "Numerical sigma function against the exact log-MGF");
    add_grid(p);
    p->add_option("--tol", spec_.tol, "Integrator tolerance");
    p->add_option("--z-start", spec_.z_start, "Start of the integration (seed series below it)");

    auto* n = add(Command::Nonideal, "MGF and reflection density for a tunnel-coupled lead");
    add_grid(n);
    n->add_flag("--density", spec_.density, "Emit the reflection-eigenvalue density on --points cells");

    auto* m = add(Command::Montecarlo, "Sampled cumulants from random scattering matrices");
    m->add_option("--ensemble", ensemble_, "Sampler")->check(CLI::IsMember({"cue", "heidelberg", "poisson"}));
    m->add_option("--samples", spec_.samples, "Number of samples");
    m->add_option("--matrix-size", spec_.matrix_size, "Hamiltonian dimension of the heidelberg sampler");
    m->add_option("--raw-out", spec_.raw_out, "Write raw samples to <prefix>.<observable>.bin");

    auto* v = add(Command::Verify, "Run an invariant suite; exit code 2 on failure");
    v->add_option("--suite", spec_.suite, "ideal, nonideal, montecarlo or all");
    v->add_option("--samples", spec_.samples, "Samples per configuration for the montecarlo suite");
    v->add_option("--inject-perturbation", spec_.perturbation, "Test hook: relative perturbation of the checked identities")
        ->group("");
  }

  void parse(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"toda-transport"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app_.parse(static_cast<int>(argv.size()), argv.data());
  }

  int exit(const CLI::ParseError& e, std::ostream& out, std::ostream& err) { return app_.exit(e, out, err); }

  RunSpec finish() {
    CLI::App* sub = nullptr;
    for (const auto& [app, cmd] : commands_)
      if (app->parsed()) {
        sub = app;
        spec_.command = cmd;
      }
    if (!sub) throw UsageError("a subcommand is required");
    auto given = [&](const std::string& name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };

    spec_.configs_given = given("--nl") || given("--nr");
    if (given("--gamma2")) spec_.gamma2 = gamma2_;
    if (given("--eta")) {
      std::string t = eta_text_;
      std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (t == "inf" || t == "infinity") {
        spec_.eta = EtaChoice{};
      } else {
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(eta_text_, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != eta_text_.size()) throw UsageError("--eta expects a number or \"inf\"");
        spec_.eta = EtaChoice{false, v};
      }
    }
    spec_.format = format_ == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    spec_.ensemble = ensemble_ == "heidelberg" ? Ensemble::Heidelberg
                     : ensemble_ == "poisson"  ? Ensemble::PoissonKernel
                                               : Ensemble::Cue;

    switch (spec_.command) {
      case Command::Cumulants:
        if (!given("--mc-samples")) spec_.samples = 0;
        break;
      case Command::Painleve:
        if (!given("--points")) spec_.points = 50;
        if (!given("--z")) spec_.z_grid = linspace(given("--z-min") ? z_min_ : 0.1, z_max_, spec_.points);
        break;
      case Command::Nonideal:
        if (!given("--points")) spec_.points = spec_.density ? 101 : 11;
        if (!given("--z")) spec_.z_grid = linspace(given("--z-min") ? z_min_ : 0.0, z_max_, spec_.points);
        break;
      default:
        break;
    }
    if (spec_.command == Command::Cumulants && spec_.samples != 0 &&
        (spec_.samples < 10L * std::min(spec_.lmax, 6)))
      throw UsageError("--mc-samples must be at least 10 times -L");
    validate(spec_);
    return spec_;
  }

 private:
  CLI::App* add(Command cmd, const std::string& description) {
    CLI::App* sub = app_.add_subcommand(command_name(cmd), description);
    commands_.emplace_back(sub, cmd);
    sub->add_option("--nl", spec_.n_left, "Channels in the left lead");
    sub->add_option("--nr", spec_.n_right, "Channels in the right lead");
    sub->add_option("--gamma2", gamma2_, "Squared reflection amplitude of the left-lead barrier");
    sub->add_option("--eta", eta_text_, "eV / 2kT, or \"inf\" for the shot-noise limit");
    sub->add_option("-L", spec_.lmax, "Highest conductance order");
    sub->add_option("-M", spec_.mmax, "Highest noise-power order");
    sub->add_option("--seed", spec_.seed, "Random seed");
    sub->add_option("--workers", spec_.workers, "Sampling threads");
    sub->add_option("--format", format_, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", spec_.out, "Output file (default stdout)");
    return sub;
  }

  void add_grid(CLI::App* sub) {
    sub->add_option("--z", spec_.z_grid, "Comma-separated evaluation points")->delimiter(',');
    sub->add_option("--z-min", z_min_, "Grid start");
    sub->add_option("--z-max", z_max_, "Grid end");
    sub->add_option("--points", spec_.points, "Grid size");
  }

  CLI::App app_{"Exact and sampled transport statistics of chaotic cavities", "toda-transport"};
  std::vector<std::pair<CLI::App*, Command>> commands_;
  RunSpec spec_;
  double gamma2_ = 0.0;
  double z_min_ = 0.0;
  double z_max_ = 5.0;
  std::string eta_text_;
  std::string format_ = "json";
  std::string ensemble_ = "cue";
};

}  // namespace

RunSpec parse_run_spec(const std::vector<std::string>& args) {
  Parser p;
  try {
    p.parse(args);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return p.finish();
}

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const WarningHandler previous = set_warning_handler([&err](const std::string& m) { err << "warning: " << m << '\n'; });
  struct Restore {
    const WarningHandler& h;
    ~Restore() { set_warning_handler(h); }
  } restore{previous};

  Report report;
  try {
    switch (spec.command) {
      case Command::Cumulants:
        report = cmd_cumulants(spec);
        break;
      case Command::Distribution:
        report = cmd_distribution(spec);
        break;
      case Command::Noise:
        report = cmd_noise(spec);
        break;
      case Command::Painleve:
        report = cmd_painleve(spec);
        break;
      case Command::Nonideal:
        report = cmd_nonideal(spec);
        break;
      case Command::Montecarlo:
        report = cmd_montecarlo(spec);
        break;
      case Command::Verify:
        report = cmd_verify(spec, err);
        break;
    }
    std::ofstream file;
    std::ostream* dest = &out;
    if (!spec.out.empty()) {
      file.open(spec.out);
      if (!file) throw Error("cannot open " + spec.out + " for writing");
      dest = &file;
    }
    if (spec.format == OutputFormat::Json)
      *dest << report.doc.dump(2) << '\n';
    else
      write_csv(report.table, *dest);
    dest->flush();
    if (!*dest) throw Error("failed writing the report");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_engine_error;
  }
  return report.passed ? exit_success : exit_verification_failure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser p;
  try {
    p.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = p.exit(e, out, err);
    return code == 0 ? exit_success : exit_engine_error;
  }
  RunSpec spec;
  try {
    spec = p.finish();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_engine_error;
  }
  return execute(spec, out, err);
}

}  // namespace toda::cli
