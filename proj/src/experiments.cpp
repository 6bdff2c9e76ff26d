#include "rsmm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "rsmm/csv.hpp"
#include "rsmm/exact_bellman.hpp"
#include "rsmm/ode.hpp"
#include "rsmm/parallel.hpp"
#include "rsmm/policy.hpp"
#include "rsmm/quadrature.hpp"

namespace rsmm {

double error_scale(double h, double lambda) { return h + lambda * (1.0 + std::abs(std::log(lambda))); }

namespace {

std::string key(const std::string& base, double x) { return base + "[" + format_double(x) + "]"; }

CheckSpec rel(double target, double tol) { return {"rel", target, tol}; }
CheckSpec abs_(double target, double tol) { return {"abs", target, tol}; }

}  // namespace

std::map<std::string, CheckSpec> ExperimentConfig::default_checks() {
  std::map<std::string, CheckSpec> c;
  const double hs[] = {0.02, 0.01, 0.005, 0.0025, 0.00125};
  const double e_h[] = {8.28e-4, 4.13e-4, 2.06e-4, 1.03e-4, 5.15e-5};
  const double gap[] = {0.038608, 0.015652, 0.007809, 0.003891, 0.001577};
  const double sq[] = {0.238605, 0.088551, 0.039221, 0.016583, 0.004985};
  const double reg[] = {0.418369, 0.188497, 0.102124, 0.054804, 0.023593};
  for (int i = 0; i < 5; ++i) {
    c[key("value_error", hs[i])] = rel(e_h[i], 0.02);
    c[key("policy_gap", hs[i])] = rel(gap[i], 0.02);
    c[key("sq_quote_error", hs[i])] = rel(sq[i], 0.03);
    c[key("regret", hs[i])] = rel(reg[i], 0.03);
  }
  c["value_slope"] = abs_(1.0017, 0.03);
  c["max_ratio"] = rel(0.8432, 0.03);
  c["policy_gap_slope"] = abs_(1.2093, 0.05);
  c["sq_quote_error_slope"] = abs_(1.4627, 0.05);
  c["regret_slope"] = abs_(1.0853, 0.05);

  const double ehs[] = {0.05, 0.025, 0.0125, 0.00625};
  const double vgap[] = {7.13e-4, 3.50e-4, 1.73e-4, 8.60e-5};
  for (int i = 0; i < 4; ++i) {
    c[key("error_over_h2", ehs[i])] = {"range", 0.085, 0.095};
    c[key("value_gap", ehs[i])] = rel(vgap[i], 0.03);
  }
  c["consistency_slope"] = abs_(1.9873, 0.05);
  c["random_phi_slope"] = {"range", 1.9, 2.1};
  c["value_gap_slope"] = abs_(1.0154, 0.1);
  c["quote_gap_slope"] = abs_(2.1205, 0.1);
  c["ce_gap_slope"] = abs_(0.9836, 0.1);
  c[key("exact_proxy_ce_gap", 0.05)] = {"max", 0.0, 1.1e-5};

  c["D_a"] = abs_(1.0654, 1e-3);
  c["D_b"] = abs_(1.0654, 1e-3);
  c["Theta_a"] = abs_(1.2908, 1e-3);
  c["Theta_b"] = abs_(1.2908, 1e-3);
  c["mu_a"] = abs_(0.2692, 1e-3);
  c["mu_b"] = abs_(0.2692, 1e-3);
  c["certificate_holds"] = {"bool", 0.0, 0.0};

  c["max_quadrature_error"] = {"max", 0.0, 1e-10};

  c["max_C_value"] = rel(0.8726, 0.05);

  c["hard_ce_z"] = {"max", 0.0, 3.0};
  c["proxy_ce_z"] = {"max", 0.0, 3.0};
  c["ce_le_mean"] = {"bool", 0.0, 0.0};
  c["baseline_q2_above_hard"] = {"bool", 0.0, 0.0};
  return c;
}

void ExperimentConfig::validate() const {
  model.validate();
  auto nonempty = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ExperimentConfig: ") + what + " must be nonempty");
  };
  nonempty(!h_grid.empty(), "h_grid");
  nonempty(!lambda_grid.empty(), "lambda_grid");
  nonempty(!coupled_path.empty(), "coupled_path");
  nonempty(!exact_h_grid.empty(), "exact_h_grid");
  nonempty(!gamma_grid.empty(), "gamma_grid");
  nonempty(!quadrature_nodes.empty(), "quadrature_nodes");
  for (std::size_t i = 0; i < coupled_path.size(); ++i)
    for (std::size_t j = i + 1; j < coupled_path.size(); ++j)
      if (coupled_path[i] == coupled_path[j])
        throw std::invalid_argument("ExperimentConfig: coupled_path entries must be distinct");
  if (hamiltonian_nodes < 1 || exact_nodes < 1 || reference_nodes < 1)
    throw std::invalid_argument("ExperimentConfig: node counts must be >= 1");
  if (!(reference_step > 0.0)) throw std::invalid_argument("ExperimentConfig: reference_step must be > 0");
  // every step must tile the horizon; TimeGrid::from_step throws otherwise
  const double T = model.horizon;
  auto lam = [](double l) {
    if (!(l > 0.0)) throw std::invalid_argument("ExperimentConfig: temperatures must be > 0");
  };
  for (double h : h_grid) TimeGrid::from_step(T, h);
  for (double h : exact_h_grid) TimeGrid::from_step(T, h);
  for (auto [h, l] : coupled_path) {
    TimeGrid::from_step(T, h);
    lam(l);
  }
  TimeGrid::from_step(T, sweep_h);
  TimeGrid::from_step(T, mc_proxy_h);
  for (double l : lambda_grid) lam(l);
  for (double l : {value_lambda, exact_lambda, sweep_lambda, quadrature_lambda, mc_proxy_lambda}) lam(l);
  for (double g : gamma_grid)
    if (!(g > 0.0)) throw std::invalid_argument("ExperimentConfig: gamma_grid entries must be > 0");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json path = nlohmann::json::array();
  for (auto [h, l] : c.coupled_path) path.push_back({h, l});
  j = nlohmann::json{{"model", c.model},
                     {"h_grid", c.h_grid},
                     {"value_lambda", c.value_lambda},
                     {"lambda_grid", c.lambda_grid},
                     {"tail_points", c.tail_points},
                     {"coupled_path", path},
                     {"exact_h_grid", c.exact_h_grid},
                     {"exact_lambda", c.exact_lambda},
                     {"random_phi_count", c.random_phi_count},
                     {"random_phi_scale", c.random_phi_scale},
                     {"gamma_grid", c.gamma_grid},
                     {"sweep_h", c.sweep_h},
                     {"sweep_lambda", c.sweep_lambda},
                     {"hamiltonian_nodes", c.hamiltonian_nodes},
                     {"exact_nodes", c.exact_nodes},
                     {"reference_nodes", c.reference_nodes},
                     {"quadrature_nodes", c.quadrature_nodes},
                     {"quadrature_lambda", c.quadrature_lambda},
                     {"reference_step", c.reference_step},
                     {"sim",
                      {{"paths", c.sim.paths},
                       {"seed", c.sim.seed},
                       {"substep", c.sim.substep},
                       {"threads", c.sim.threads}}},
                     {"mc_proxy_h", c.mc_proxy_h},
                     {"mc_proxy_lambda", c.mc_proxy_lambda},
                     {"constant_quote", {c.constant_quote.ask, c.constant_quote.bid}},
                     {"linear_c0", c.linear_c0},
                     {"linear_c1", c.linear_c1}};
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, s] : c.checks)
    checks[name] = {{"kind", s.kind}, {"target", s.target}, {"tolerance", s.tolerance}};
  j["checks"] = checks;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto get = [&](const char* k, auto& field) {
    if (j.contains(k)) j.at(k).get_to(field);
  };
  if (j.contains("model")) c.model = j.at("model").get<ModelParams>();
  get("h_grid", c.h_grid);
  get("value_lambda", c.value_lambda);
  get("lambda_grid", c.lambda_grid);
  get("tail_points", c.tail_points);
  if (j.contains("coupled_path")) {
    c.coupled_path.clear();
    for (const auto& e : j.at("coupled_path")) c.coupled_path.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  }
  get("exact_h_grid", c.exact_h_grid);
  get("exact_lambda", c.exact_lambda);
  get("random_phi_count", c.random_phi_count);
  get("random_phi_scale", c.random_phi_scale);
  get("gamma_grid", c.gamma_grid);
  get("sweep_h", c.sweep_h);
  get("sweep_lambda", c.sweep_lambda);
  get("hamiltonian_nodes", c.hamiltonian_nodes);
  get("exact_nodes", c.exact_nodes);
  get("reference_nodes", c.reference_nodes);
  get("quadrature_nodes", c.quadrature_nodes);
  get("quadrature_lambda", c.quadrature_lambda);
  get("reference_step", c.reference_step);
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    if (s.contains("paths")) s.at("paths").get_to(c.sim.paths);
    if (s.contains("seed")) s.at("seed").get_to(c.sim.seed);
    if (s.contains("substep")) s.at("substep").get_to(c.sim.substep);
    if (s.contains("threads")) s.at("threads").get_to(c.sim.threads);
  }
  get("mc_proxy_h", c.mc_proxy_h);
  get("mc_proxy_lambda", c.mc_proxy_lambda);
  if (j.contains("constant_quote")) {
    c.constant_quote.ask = j.at("constant_quote").at(0).get<double>();
    c.constant_quote.bid = j.at("constant_quote").at(1).get<double>();
  }
  get("linear_c0", c.linear_c0);
  get("linear_c1", c.linear_c1);
  if (j.contains("checks"))
    for (const auto& [name, s] : j.at("checks").items()) {
      CheckSpec spec = c.checks.count(name) ? c.checks.at(name) : CheckSpec{};
      if (s.contains("kind")) s.at("kind").get_to(spec.kind);
      if (s.contains("target")) s.at("target").get_to(spec.target);
      if (s.contains("tolerance")) s.at("tolerance").get_to(spec.tolerance);
      c.checks[name] = spec;
    }
  c.validate();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"value-convergence", "entropy-bias",      "policy-gap",
                                              "quote-convergence", "exact-consistency", "exact-vs-proxy",
                                              "curvature-check",   "quadrature-check",  "gamma-sweep",
                                              "simulate"};
  return names;
}

namespace {

int steps_for(double T, double h) { return TimeGrid::from_step(T, h).steps(); }

int reference_steps(const ExperimentConfig& cfg, const std::vector<double>& hs) {
  std::vector<int> ns;
  for (double h : hs) ns.push_back(steps_for(cfg.model.horizon, h));
  return nested_reference_steps(cfg.model.horizon, ns, cfg.reference_step);
}

void add_check(ExperimentReport& r, const ExperimentConfig& cfg, const std::string& name, double value) {
  auto it = cfg.checks.find(name);
  if (it == cfg.checks.end()) return;
  r.checks.push_back(evaluate_check(name, value, it->second));
}

// ---- value-convergence

ExperimentReport value_convergence(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  const double lam = cfg.value_lambda;
  const int nref = reference_steps(cfg, cfg.h_grid);
  Trajectory ref = solve_soft(lam, TimeGrid(cfg.model.horizon, nref), acts, m);

  ReportTable t{"value_error", "Euler soft scheme vs RK4 soft reference", {"h", "lambda", "E_h", "E_h_over_h"}};
  std::vector<double> errs(cfg.h_grid.size());
  parallel_for(cfg.h_grid.size(), cfg.sim.threads, [&](std::size_t i) {
    Trajectory vh = euler_soft_scheme(lam, TimeGrid::from_step(cfg.model.horizon, cfg.h_grid[i]), acts, m);
    errs[i] = grid_sup_error(vh, ref);
  });
  for (std::size_t i = 0; i < errs.size(); ++i) {
    double h = cfg.h_grid[i];
    t.add_row({h, lam, errs[i], errs[i] / h});
    add_check(r, cfg, key("value_error", h), errs[i]);
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "h", "E_h", "value_slope"));
  add_check(r, cfg, "value_slope", r.slopes.back().value);
  r.notes["reference_steps"] = nref;
  return r;
}

// ---- entropy-bias

ExperimentReport entropy_bias(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  TimeGrid g(cfg.model.horizon, std::max(1, static_cast<int>(std::ceil(cfg.model.horizon / cfg.reference_step - 1e-9))));
  Trajectory v0 = solve_hard(g, acts, m);

  std::vector<double> errs(cfg.lambda_grid.size());
  parallel_for(errs.size(), cfg.sim.threads, [&](std::size_t i) {
    errs[i] = grid_sup_error(solve_soft(cfg.lambda_grid[i], g, acts, m), v0);
  });
  ReportTable t{"entropy_bias", "Soft vs hard RK4 reference values over the temperature grid",
                {"lambda", "lambda_scale", "E_lambda", "ratio"}};
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    double l = cfg.lambda_grid[i];
    double s = l * (1.0 + std::abs(std::log(l)));
    t.add_row({l, s, errs[i], errs[i] / s});
    max_ratio = std::max(max_ratio, errs[i] / s);
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "lambda_scale", "E_lambda", "entropy_slope"));
  if (t.rows.size() > cfg.tail_points && cfg.tail_points >= 2)
    r.slopes.push_back(fit_slope(t, "lambda_scale", "E_lambda", "entropy_tail_slope", t.rows.size() - cfg.tail_points));
  add_check(r, cfg, "max_ratio", max_ratio);
  r.notes["reference_steps"] = g.steps();
  return r;
}

// ---- coupled path (policy-gap and quote-convergence)

struct CoupledRow {
  double h, lambda, scale, v_star, ce, gap, sq, regret;
};

std::vector<CoupledRow> coupled_path_rows(const ExperimentConfig& cfg, Trajectory* v0_out = nullptr) {
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  std::vector<double> hs;
  for (auto [h, l] : cfg.coupled_path) hs.push_back(h);
  const int nref = reference_steps(cfg, hs);
  Trajectory v0 = solve_hard(TimeGrid(cfg.model.horizon, nref), acts, m);
  const double v_star = v0.initial()[0];
  std::vector<CoupledRow> rows(cfg.coupled_path.size());
  parallel_for(rows.size(), cfg.sim.threads, [&](std::size_t i) {
    auto [h, lam] = cfg.coupled_path[i];
    TimeGrid g = TimeGrid::from_step(cfg.model.horizon, h);
    Policy pol = hamiltonian_gibbs_kernel(euler_soft_scheme(lam, g, acts, m), lam, acts, m);
    Trajectory u = evaluate_policy(pol, m, cfg.reference_step);
    auto cm = quote_concentration_metrics(pol, v0, acts, m);
    double ce = u.initial()[0];
    rows[i] = {h, lam, error_scale(h, lam), v_star, ce, v_star - ce, cm.sq_error_integral, cm.regret_integral};
  });
  if (v0_out) *v0_out = std::move(v0);
  return rows;
}

ExperimentReport policy_gap(const ExperimentConfig& cfg) {
  ExperimentReport r;
  auto rows = coupled_path_rows(cfg);
  ReportTable t{"policy_gap", "Fresh-sampling performance gap of the Hamiltonian-Gibbs proxy along the coupled path",
                {"h", "lambda", "scale", "V_star", "CE", "gap", "gap_over_scale"}};
  for (const auto& c : rows) {
    t.add_row({c.h, c.lambda, c.scale, c.v_star, c.ce, c.gap, c.gap / c.scale});
    add_check(r, cfg, key("policy_gap", c.h), c.gap);
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "scale", "gap", "policy_gap_slope"));
  add_check(r, cfg, "policy_gap_slope", r.slopes.back().value);
  return r;
}

ExperimentReport quote_convergence(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Trajectory v0{TimeGrid(1.0, 1), {}};
  auto rows = coupled_path_rows(cfg, &v0);
  ReportTable t{"quote_convergence", "Active-coordinate quote convergence and integrated Hamiltonian regret",
                {"h", "lambda", "scale", "sq_quote_error", "regret"}};
  for (const auto& c : rows) {
    t.add_row({c.h, c.lambda, c.scale, c.sq, c.regret});
    add_check(r, cfg, key("sq_quote_error", c.h), c.sq);
    add_check(r, cfg, key("regret", c.h), c.regret);
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "scale", "sq_quote_error", "sq_quote_error_slope"));
  add_check(r, cfg, "sq_quote_error_slope", r.slopes.back().value);
  r.slopes.push_back(fit_slope(t, "scale", "regret", "regret_slope"));
  add_check(r, cfg, "regret_slope", r.slopes.back().value);
  auto cert = curvature_certificate(v0, Model(cfg.model));
  r.notes["certificate_holds"] = cert.holds;
  r.notes["mu_a"] = cert.mu_a;
  r.notes["mu_b"] = cert.mu_b;
  return r;
}

// ---- exact-consistency

double consistency_error(const ExactBellman& op, const ValueVector& phi, const ActionGrid& acts, const Model& m) {
  ValueVector lhs = op.apply(phi);
  ValueVector rhs = phi;
  rhs.add_scaled(op.step(), soft_field(phi, op.lambda(), acts, m));
  return lhs.sup_distance(rhs);
}

ExperimentReport exact_consistency(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.exact_nodes), cfg.model);
  ActionGrid ham(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  const double lam = cfg.exact_lambda;
  const std::size_t nh = cfg.exact_h_grid.size();

  std::vector<ExactBellman> ops;
  for (double h : cfg.exact_h_grid) ops.emplace_back(m, acts, h, lam);

  ReportTable t{"consistency", "One-step defect of the exact Bellman operator against the soft Euler step",
                {"h", "consistency_error", "error_over_h2"}};
  for (std::size_t i = 0; i < nh; ++i) {
    double h = cfg.exact_h_grid[i];
    TimeGrid g = TimeGrid::from_step(cfg.model.horizon, h);
    Trajectory vh = euler_soft_scheme(lam, g, ham, m);
    double e = consistency_error(ops[i], vh.at(g.steps() - 1), acts, m);
    t.add_row({h, e, e / (h * h)});
    add_check(r, cfg, key("error_over_h2", h), e / (h * h));
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "h", "consistency_error", "consistency_slope"));
  add_check(r, cfg, "consistency_slope", r.slopes.back().value);

  // robustness: the O(h^2) order for random bounded test vectors
  std::mt19937_64 gen(cfg.sim.seed);
  std::uniform_real_distribution<double> U(-cfg.random_phi_scale, cfg.random_phi_scale);
  std::vector<std::string> cols{"h"};
  for (int k = 0; k < cfg.random_phi_count; ++k) cols.push_back("error_phi" + std::to_string(k));
  ReportTable rt{"random_phi", "One-step defect for random bounded test vectors", cols};
  std::vector<ValueVector> phis;
  for (int k = 0; k < cfg.random_phi_count; ++k) {
    ValueVector phi(m.q_max());
    for (int q = -m.q_max(); q <= m.q_max(); ++q) phi[q] = U(gen);
    phis.push_back(phi);
  }
  for (std::size_t i = 0; i < nh; ++i) {
    std::vector<double> row{cfg.exact_h_grid[i]};
    for (const auto& phi : phis) row.push_back(consistency_error(ops[i], phi, acts, m));
    rt.add_row(row);
  }
  r.tables.push_back(rt);
  double worst = 2.0;
  for (int k = 0; k < cfg.random_phi_count; ++k) {
    r.slopes.push_back(fit_slope(rt, "h", cols[static_cast<std::size_t>(k) + 1], "random_phi_slope_" + std::to_string(k)));
    double s = r.slopes.back().value;
    if (std::abs(s - 2.0) > std::abs(worst - 2.0)) worst = s;
  }
  if (cfg.random_phi_count > 0) add_check(r, cfg, "random_phi_slope", worst);
  r.notes["test_vector"] = "Euler soft iterate one step before maturity";
  return r;
}

// ---- exact-vs-proxy

ExperimentReport exact_vs_proxy(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.exact_nodes), cfg.model);
  ActionGrid ham(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  const double lam = cfg.exact_lambda;
  const int nref = reference_steps(cfg, cfg.exact_h_grid);
  Trajectory v0 = solve_hard(TimeGrid(cfg.model.horizon, nref), ham, m);
  const double v_star = v0.initial()[0];

  struct Row {
    double value_gap, quote_gap, ce_ex, ce_ham;
  };
  std::vector<Row> rows(cfg.exact_h_grid.size());
  parallel_for(rows.size(), cfg.sim.threads, [&](std::size_t i) {
    double h = cfg.exact_h_grid[i];
    TimeGrid g = TimeGrid::from_step(cfg.model.horizon, h);
    ExactBellman op(m, acts, h, lam);
    BellmanTable bt = bellman_recursion(op, m);
    Trajectory vh = euler_soft_scheme(lam, g, acts, m);
    Policy ex = exact_gibbs_kernel(bt, op);
    Policy px = hamiltonian_gibbs_kernel(vh, lam, acts, m);
    std::vector<double> qgap(static_cast<std::size_t>(g.steps()), 0.0);
    for (int n = 0; n < g.steps(); ++n)
      for (int q = -m.q_max(); q <= m.q_max(); ++q)
        qgap[n] += active_sq_distance(q, mean_quote(ex, n, q), mean_quote(px, n, q), m);
    rows[i] = {grid_sup_error(bt.as_trajectory(), vh), left_riemann(qgap, h),
               evaluate_policy(ex, m, cfg.reference_step).initial()[0],
               evaluate_policy(px, m, cfg.reference_step).initial()[0]};
  });

  ReportTable t{"exact_vs_proxy", "Exact Bellman Gibbs policy versus Hamiltonian-Gibbs proxy",
                {"h", "lambda", "value_gap", "quote_gap_sq", "exact_ce_gap", "proxy_ce_gap", "exact_proxy_ce_gap"}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double h = cfg.exact_h_grid[i];
    const auto& w = rows[i];
    double d = std::abs(w.ce_ex - w.ce_ham);
    t.add_row({h, lam, w.value_gap, w.quote_gap, v_star - w.ce_ex, v_star - w.ce_ham, d});
    add_check(r, cfg, key("value_gap", h), w.value_gap);
    add_check(r, cfg, key("exact_proxy_ce_gap", h), d);
  }
  r.tables.push_back(t);
  r.slopes.push_back(fit_slope(t, "h", "value_gap", "value_gap_slope"));
  add_check(r, cfg, "value_gap_slope", r.slopes.back().value);
  r.slopes.push_back(fit_slope(t, "h", "quote_gap_sq", "quote_gap_slope"));
  add_check(r, cfg, "quote_gap_slope", r.slopes.back().value);
  r.slopes.push_back(fit_slope(t, "h", "exact_proxy_ce_gap", "ce_gap_slope"));
  add_check(r, cfg, "ce_gap_slope", r.slopes.back().value);
  r.notes["V_star"] = v_star;
  r.notes["reference_steps"] = nref;
  return r;
}

// ---- curvature-check

ExperimentReport curvature_check(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  TimeGrid g(cfg.model.horizon, std::max(1, static_cast<int>(std::ceil(cfg.model.horizon / cfg.reference_step - 1e-9))));
  auto c = curvature_certificate(solve_hard(g, acts, m), m);
  ReportTable t{"curvature", "Exponential-intensity curvature certificate",
                {"D_a", "D_b", "Theta_a", "Theta_b", "mu_a", "mu_b", "holds"}};
  t.add_row({c.d_a, c.d_b, c.theta_a, c.theta_b, c.mu_a, c.mu_b, c.holds ? 1.0 : 0.0});
  r.tables.push_back(t);
  add_check(r, cfg, "D_a", c.d_a);
  add_check(r, cfg, "D_b", c.d_b);
  add_check(r, cfg, "Theta_a", c.theta_a);
  add_check(r, cfg, "Theta_b", c.theta_b);
  add_check(r, cfg, "mu_a", c.mu_a);
  add_check(r, cfg, "mu_b", c.mu_b);
  add_check(r, cfg, "certificate_holds", c.holds ? 1.0 : 0.0);
  return r;
}

// ---- quadrature-check

ExperimentReport quadrature_check(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  ActionGrid ref(static_cast<std::size_t>(cfg.reference_nodes), cfg.model);
  const double lam = cfg.quadrature_lambda;
  TimeGrid g(cfg.model.horizon, std::max(1, static_cast<int>(std::ceil(cfg.model.horizon / cfg.reference_step - 1e-9))));
  Trajectory states = solve_soft(lam, g, acts, m);

  std::vector<ValueVector> href;
  for (const auto& y : states.values) href.push_back(soft_field(y, lam, ref, m));
  std::vector<double> errs(cfg.quadrature_nodes.size(), 0.0);
  parallel_for(errs.size(), cfg.sim.threads, [&](std::size_t i) {
    ActionGrid a(static_cast<std::size_t>(cfg.quadrature_nodes[i]), cfg.model);
    for (std::size_t n = 0; n < states.values.size(); ++n)
      errs[i] = std::max(errs[i], soft_field(states.values[n], lam, a, m).sup_distance(href[n]));
  });
  ReportTable t{"quadrature", "Soft Hamiltonian quadrature error against the reference node count",
                {"nodes", "reference_nodes", "lambda", "max_error"}};
  double worst = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    t.add_row({static_cast<double>(cfg.quadrature_nodes[i]), static_cast<double>(cfg.reference_nodes), lam, errs[i]});
    worst = std::max(worst, errs[i]);
  }
  r.tables.push_back(t);
  add_check(r, cfg, "max_quadrature_error", worst);
  r.notes["states"] = "soft RK4 reference trajectory at every reference time";
  return r;
}

// ---- gamma-sweep

ExperimentReport gamma_sweep(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const double h = cfg.sweep_h, lam = cfg.sweep_lambda, sc = error_scale(h, lam);
  const int nref = reference_steps(cfg, {h});
  struct Row {
    double value_err, gap;
  };
  std::vector<Row> rows(cfg.gamma_grid.size());
  parallel_for(rows.size(), cfg.sim.threads, [&](std::size_t i) {
    ModelParams p = cfg.model;
    p.gamma = cfg.gamma_grid[i];
    Model m(p);
    ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), p);
    Trajectory v0 = solve_hard(TimeGrid(p.horizon, nref), acts, m);
    Trajectory vh = euler_soft_scheme(lam, TimeGrid::from_step(p.horizon, h), acts, m);
    Policy pol = hamiltonian_gibbs_kernel(vh, lam, acts, m);
    double ce = evaluate_policy(pol, m, cfg.reference_step).initial()[0];
    rows[i] = {grid_sup_error(vh, v0), v0.initial()[0] - ce};
  });
  ReportTable t{"gamma_sweep", "Empirical constants over the risk-aversion sweep",
                {"gamma", "value_error", "C_value", "policy_gap", "C_policy"}};
  double max_c = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.add_row({cfg.gamma_grid[i], rows[i].value_err, rows[i].value_err / sc, rows[i].gap, rows[i].gap / sc});
    max_c = std::max(max_c, rows[i].value_err / sc);
  }
  r.tables.push_back(t);
  add_check(r, cfg, "max_C_value", max_c);
  r.notes["h"] = h;
  r.notes["lambda"] = lam;
  return r;
}

// ---- simulate

ExperimentReport simulate(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Model m(cfg.model);
  ActionGrid acts(static_cast<std::size_t>(cfg.hamiltonian_nodes), cfg.model);
  TimeGrid g(cfg.model.horizon, std::max(1, static_cast<int>(std::ceil(cfg.model.horizon / cfg.reference_step - 1e-9))));
  Trajectory v0 = solve_hard(g, acts, m);

  std::vector<Strategy> strategies;
  strategies.push_back({"hard_optimal", hard_feedback(v0, acts, m)});
  TimeGrid gp = TimeGrid::from_step(cfg.model.horizon, cfg.mc_proxy_h);
  strategies.push_back({"gibbs_proxy", hamiltonian_gibbs_kernel(euler_soft_scheme(cfg.mc_proxy_lambda, gp, acts, m),
                                                                cfg.mc_proxy_lambda, acts, m)});
  strategies.push_back({"constant_spread", constant_spread(cfg.constant_quote, m)});
  strategies.push_back({"inventory_linear", inventory_linear(cfg.linear_c0, cfg.linear_c1, m)});

  std::vector<double> ode(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s)
    ode[s] = s == 0 ? v0.initial()[0] : evaluate_policy(strategies[s].policy, m, cfg.reference_step).initial()[0];

  auto mc = run_monte_carlo(strategies, cfg.sim, m);

  ReportTable t{"diagnostics", "Financial diagnostics under fresh-sampling marked-Poisson simulation",
                {"ce", "mean_reward", "std_reward", "sharpe", "mean_pnl", "time_avg_q2", "ce_std_error", "ode_value",
                 "z_score", "mean_fills_ask", "mean_fills_bid"}};
  t.label_column = "strategy";
  bool ce_le_mean = true, q2_above = true;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    const auto& d = mc.rows[s];
    double z = std::abs(d.ce - ode[s]) / d.ce_std_error;
    t.add_row({d.ce, d.mean_reward, d.std_reward, d.sharpe, d.mean_pnl, d.time_avg_q2, d.ce_std_error, ode[s], z,
               d.mean_fills_ask, d.mean_fills_bid},
              d.strategy);
    ce_le_mean = ce_le_mean && d.ce <= d.mean_reward;
    if (s >= 2) q2_above = q2_above && d.time_avg_q2 > mc.rows[0].time_avg_q2;
  }
  r.tables.push_back(t);
  add_check(r, cfg, "hard_ce_z", t.rows[0][8]);
  add_check(r, cfg, "proxy_ce_z", t.rows[1][8]);
  add_check(r, cfg, "ce_le_mean", ce_le_mean ? 1.0 : 0.0);
  add_check(r, cfg, "baseline_q2_above_hard", q2_above ? 1.0 : 0.0);

  // paired difference under common random numbers
  std::vector<double> diff(static_cast<std::size_t>(cfg.sim.paths));
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mc.rewards[0][i] - mc.rewards[1][i];
  auto var = [](const std::vector<double>& x) {
    double mu = pairwise_sum(x.data(), x.size()) / x.size(), s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / (x.size() - 1);
  };
  r.notes["paired_difference_variance"] = var(diff);
  r.notes["sum_of_variances"] = var(mc.rewards[0]) + var(mc.rewards[1]);
  r.notes["paths"] = cfg.sim.paths;
  r.notes["seed"] = cfg.sim.seed;
  return r;
}

}  // namespace

ExperimentReport run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  static const std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>> runners{
      {"value-convergence", value_convergence}, {"entropy-bias", entropy_bias},
      {"policy-gap", policy_gap},               {"quote-convergence", quote_convergence},
      {"exact-consistency", exact_consistency}, {"exact-vs-proxy", exact_vs_proxy},
      {"curvature-check", curvature_check},     {"quadrature-check", quadrature_check},
      {"gamma-sweep", gamma_sweep},             {"simulate", simulate}};
  auto it = runners.find(name);
  if (it == runners.end()) {
    std::string valid;
    for (const auto& n : experiment_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown experiment '" + name + "'; valid names: " + valid);
  }
  cfg.validate();
  auto start = std::chrono::steady_clock::now();
  ExperimentReport r = it->second(cfg);
  r.experiment = name;
  r.params = cfg;
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace rsmm
