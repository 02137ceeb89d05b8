// Command-line front end: stationary profiles, critical constants, self-similar
// solutions, evolution runs, energy audits, classification and sweeps.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kscrit/config.hpp"
#include "kscrit/errors.hpp"
#include "kscrit/evolution.hpp"
#include "kscrit/experiments.hpp"
#include "kscrit/io.hpp"
#include "kscrit/lyapunov.hpp"
#include "kscrit/selfsim.hpp"
#include "kscrit/stationary.hpp"

namespace {

using nlohmann::json;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_profile_any(const kscrit::Profile& u, const std::string& path) {
  if (ends_with(path, ".json")) {
    std::ofstream out(path);
    if (!out) throw kscrit::invalid_input("cannot write " + path);
    out << kscrit::profile_to_json(u).dump(2) << '\n';
  } else {
    kscrit::write_profile_csv(u, path);
  }
}

std::vector<double> parse_real_list(const std::string& raw, const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw kscrit::invalid_input(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw kscrit::invalid_input(std::string("empty ") + what + " list");
  return out;
}

kscrit::Scheme parse_scheme(const std::string& raw, double& reg_eps) {
  const auto colon = raw.find(':');
  const std::string kind = raw.substr(0, colon);
  reg_eps = 0.0;
  if (kind == "direct") return kscrit::Scheme::direct_imex;
  if (kind == "transformed") return kscrit::Scheme::transformed;
  if (kind == "regularized") {
    if (colon == std::string::npos)
      throw kscrit::invalid_input("scheme 'regularized' needs ':eps'");
    reg_eps = std::stod(raw.substr(colon + 1));
    return kscrit::Scheme::regularized_imex;
  }
  throw kscrit::invalid_input("unknown scheme '" + raw + "'");
}

// Transformed-scheme driver: map u0 to w, advance in recording chunks, map back.
json run_transformed(const kscrit::Scenario& scenario, const kscrit::Profile& u0) {
  const kscrit::Parameters params(scenario.params.N, u0.values.back());
  const double N2 = static_cast<double>(params.N) * params.N;

  std::vector<double> w0(u0.values.size());
  w0[0] = u0.derivative_at_zero;
  for (std::size_t i = 1; i < w0.size(); ++i) w0[i] = u0.values[i] / u0.grid.nodes[i];
  kscrit::TransformedState state(params, std::move(w0), params.m);

  const double h = 1.0 / scenario.n_cells;
  const double dt_w = 0.25 * h * h;
  const double chunk_w = scenario.record_interval / N2;
  const int steps_per_chunk = std::max(1, static_cast<int>(std::ceil(chunk_w / dt_w)));
  const double horizon_w = scenario.horizon / N2;

  std::vector<kscrit::DiagnosticsRecord> records;
  auto record = [&]() {
    auto u = kscrit::map_w_to_u(state, u0.grid);
    kscrit::DiagnosticsRecord rec;
    rec.t = N2 * state.t;
    rec.nmax_value = kscrit::nmax(u);
    rec.F_value = kscrit::energy_F(u, params, 1e-10);
    rec.dt = N2 * dt_w;
    rec.bd_residual = std::abs(u.values.back() - params.m);
    records.push_back(rec);
  };
  record();
  bool blew_up = false;
  while (state.t < horizon_w) {
    try {
      kscrit::solve_transformed(state, chunk_w / steps_per_chunk, steps_per_chunk);
    } catch (const kscrit::constraint_violation&) {
      blew_up = true;
      break;
    }
    record();
    if (records.back().nmax_value >= scenario.thresholds.nmax_threshold) {
      blew_up = true;
      break;
    }
  }
  if (!scenario.diagnostics_csv.empty())
    kscrit::write_diagnostics_csv(records, scenario.diagnostics_csv);

  json j;
  j["scheme"] = "transformed";
  j["blew_up"] = blew_up;
  j["final_t"] = N2 * state.t;
  j["final_nmax"] = records.back().nmax_value;
  j["time_scale"] = N2;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical-mass dynamics of the radial chemotaxis reduction"};
  app.require_subcommand(1);

  // ---- stationary ----------------------------------------------------------
  auto* stationary = app.add_subcommand("stationary", "solve the stationary profile U_a");
  int st_N = 3;
  double st_a = 1.0, st_tol = 1e-8, st_xmax = 0.0;
  std::string st_out;
  stationary->add_option("--N", st_N, "dimension (>= 3)");
  stationary->add_option("--a", st_a, "initial slope a >= 0");
  stationary->add_option("--tol", st_tol, "tolerance");
  stationary->add_option("--x-max", st_xmax, "solve window (0 = auto past the flat point)");
  stationary->add_option("--out", st_out, "profile output (.csv or .json)");
  stationary->callback([&] {
    kscrit::Parameters params(st_N);
    double xm = st_xmax;
    if (xm <= 0.0) {
      const auto cc = kscrit::critical_constants(params, st_tol);
      xm = (st_a > 0.0) ? (cc.A + 1.0) / st_a : 1.0;
    }
    auto sp = kscrit::solve_Pa(st_a, params, xm, st_tol);
    if (!st_out.empty()) write_profile_any(sp.profile, st_out);
    json j{{"a", sp.a},
           {"x_max", xm},
           {"max_value", sp.max_value},
           {"flat_point", std::isfinite(sp.flat_point) ? json(sp.flat_point) : json()},
           {"solver", sp.solver_tag == kscrit::SolverTag::picard_rk ? "picard_rk"
                                                                    : "integral_equation"}};
    std::cout << j.dump(2) << '\n';
  });

  // ---- critical-constants --------------------------------------------------
  auto* constants = app.add_subcommand("critical-constants", "critical mass constants");
  int cc_N = 3;
  double cc_tol = 1e-8;
  constants->add_option("--N", cc_N, "dimension (>= 3)");
  constants->add_option("--tol", cc_tol, "certification tolerance");
  constants->callback([&] {
    const auto cc = kscrit::critical_constants(kscrit::Parameters(cc_N), cc_tol);
    json j{{"N", cc.N}, {"M", cc.M}, {"A", cc.A}, {"M_bar", cc.M_bar}, {"tol", cc.tol}};
    std::cout << j.dump(2) << '\n';
  });

  // ---- selfsim -------------------------------------------------------------
  auto* selfsim = app.add_subcommand("selfsim", "self-similar profile and field");
  int ss_N = 3;
  double ss_eps = 0.01, ss_a0 = 0.0, ss_t = 0.0, ss_tol = 1e-7, ss_xmax = 0.0;
  std::string ss_out;
  selfsim->add_option("--N", ss_N, "dimension (>= 3)");
  selfsim->add_option("--eps", ss_eps, "perturbation strength in (0, 1]");
  selfsim->add_option("--a0", ss_a0, "initial amplitude (0 = skip the field)");
  selfsim->add_option("--t", ss_t, "evaluation time (< T*)");
  selfsim->add_option("--tol", ss_tol, "tolerance");
  selfsim->add_option("--x-max", ss_xmax, "solve window (0 = auto)");
  selfsim->add_option("--out", ss_out, "field/profile output (.csv or .json)");
  selfsim->callback([&] {
    kscrit::Parameters params(ss_N);
    double xm = ss_xmax;
    if (xm <= 0.0) {
      const auto cc = kscrit::critical_constants(params, 1e-6);
      xm = std::max(2.0 * (cc.A + 1.0), ss_a0 + 1.0);
    }
    auto V = kscrit::solve_Qeps(ss_eps, params, xm, ss_tol);
    json j{{"eps", V.eps},
           {"A_eps", std::isfinite(V.A_eps) ? json(V.A_eps) : json()},
           {"M_eps", V.M_eps},
           {"concave", V.concave},
           {"K_eps", V.K_eps}};
    if (ss_a0 > 0.0) {
      auto law = kscrit::AmplitudeLaw::make(ss_a0, ss_eps, params.q);
      j["T_star"] = law.T_star;
      j["a_of_t"] = kscrit::amplitude(law, ss_t);
      if (!ss_out.empty()) {
        kscrit::Grid grid = kscrit::Grid::graded(1.0, params.N, 2048);
        write_profile_any(kscrit::self_similar_field(V, law, ss_t, grid), ss_out);
      }
    } else if (!ss_out.empty()) {
      write_profile_any(V.profile, ss_out);
    }
    std::cout << j.dump(2) << '\n';
  });

  // ---- critical-band -------------------------------------------------------
  auto* band = app.add_subcommand("critical-band", "tabulate M_eps over an eps grid");
  int cb_N = 3;
  double cb_tol = 1e-7;
  std::string cb_grid = "0.1,0.05,0.02,0.01", cb_out;
  band->add_option("--N", cb_N, "dimension (>= 3)");
  band->add_option("--eps-grid", cb_grid, "comma-separated eps values");
  band->add_option("--tol", cb_tol, "tolerance");
  band->add_option("--out", cb_out, "CSV output path (default stdout)");
  band->callback([&] {
    auto rows = kscrit::critical_band(kscrit::Parameters(cb_N),
                                      parse_real_list(cb_grid, "eps-grid"), cb_tol);
    std::ostringstream csv;
    csv << "eps,A_eps,M_eps,concave\n";
    csv << std::setprecision(17);
    for (const auto& r : rows)
      csv << r.eps << ',' << r.A_eps << ',' << r.M_eps << ',' << (r.concave ? 1 : 0)
          << '\n';
    if (cb_out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(cb_out);
      if (!out) throw kscrit::invalid_input("cannot write " + cb_out);
      out << csv.str();
    }
  });

  // ---- evolve ---------------------------------------------------------------
  auto* evolve = app.add_subcommand("evolve", "time-step the evolution problem");
  int ev_N = 3, ev_cells = 256;
  double ev_m = -1.0, ev_horizon = 50.0, ev_record = 0.1, ev_nmax_thr = 1e6,
         ev_dt_min = 1e-13;
  std::string ev_init = "linear", ev_scheme = "direct", ev_out;
  evolve->add_option("--N", ev_N, "dimension (>= 3)");
  evolve->add_option("--m", ev_m, "boundary mass (required for linear init)");
  evolve->add_option("--init", ev_init, "linear | stationary:a | selfsim:eps,a0 | file:path");
  evolve->add_option("--scheme", ev_scheme, "direct | regularized:eps | transformed");
  evolve->add_option("--horizon", ev_horizon, "time horizon");
  evolve->add_option("--n-cells", ev_cells, "grid cells");
  evolve->add_option("--record-interval", ev_record, "diagnostics cadence");
  evolve->add_option("--nmax-threshold", ev_nmax_thr, "blow-up threshold on nmax");
  evolve->add_option("--dt-min", ev_dt_min, "smallest accepted dt");
  evolve->add_option("--out-csv", ev_out, "diagnostics CSV path");
  evolve->callback([&] {
    double reg = 0.0;
    const kscrit::Scheme scheme = parse_scheme(ev_scheme, reg);
    kscrit::Scenario scenario{kscrit::Parameters(ev_N, std::max(ev_m, 0.0))};
    if (ev_init == "linear" && ev_m < 0.0)
      throw kscrit::invalid_input("evolve: linear init requires --m");
    scenario.init = ev_init;
    scenario.scheme = scheme;
    scenario.reg_eps = reg;
    scenario.n_cells = ev_cells;
    scenario.horizon = ev_horizon;
    scenario.record_interval = ev_record;
    scenario.thresholds.nmax_threshold = ev_nmax_thr;
    scenario.thresholds.dt_min = ev_dt_min;
    scenario.diagnostics_csv = ev_out;

    if (scheme == kscrit::Scheme::transformed) {
      auto u0 = kscrit::build_initial_data(scenario);
      std::cout << run_transformed(scenario, u0).dump(2) << '\n';
      return;
    }

    auto u0 = kscrit::build_initial_data(scenario);
    kscrit::Parameters params(ev_N, u0.values.back());
    kscrit::EvolutionState state(params, std::move(u0), scheme, reg);
    state.dt_min = ev_dt_min;
    kscrit::StoppingRule rule;
    rule.nmax_threshold = ev_nmax_thr;
    rule.record_interval = ev_record;
    auto report = kscrit::run_until(state, ev_horizon, rule);
    if (!ev_out.empty()) kscrit::write_diagnostics_csv(state.diagnostics, ev_out);
    json j{{"blew_up", report.blew_up},
           {"final_t", state.t},
           {"final_nmax", kscrit::nmax(state.u)}};
    switch (report.trigger) {
      case kscrit::StopTrigger::nmax_threshold: j["trigger"] = "nmax_threshold"; break;
      case kscrit::StopTrigger::dt_collapse: j["trigger"] = "dt_collapse"; break;
      case kscrit::StopTrigger::horizon_reached: j["trigger"] = "horizon_reached"; break;
    }
    if (report.blew_up && std::isfinite(report.T_estimate))
      j["T_estimate"] = report.T_estimate;
    if (report.rate_exponent) j["rate_exponent"] = *report.rate_exponent;
    if (report.rate_fit_r2) j["rate_fit_r2"] = *report.rate_fit_r2;
    std::cout << j.dump(2) << '\n';
  });

  // ---- energy ---------------------------------------------------------------
  auto* energy = app.add_subcommand("energy", "evaluate F (and F_eps) on a profile CSV");
  int en_N = 3;
  double en_eps = 0.0, en_tol = 1e-10;
  std::string en_profile;
  energy->add_option("--N", en_N, "dimension (>= 3)");
  energy->add_option("--profile", en_profile, "profile CSV path")->required();
  energy->add_option("--eps", en_eps, "also evaluate F_eps at this eps");
  energy->add_option("--tol", en_tol, "quadrature tolerance for H_eps");
  energy->callback([&] {
    auto u = kscrit::read_profile_csv(en_profile);
    kscrit::Parameters params(en_N, u.values.back());
    json j{{"F", kscrit::energy_F(u, params, en_tol)}};
    if (en_eps > 0.0) j["F_eps"] = kscrit::energy_F_eps(u, params, en_eps, en_tol);
    std::cout << j.dump(2) << '\n';
  });

  // ---- classify / sweep -----------------------------------------------------
  auto* classify_cmd = app.add_subcommand("classify", "classify a configured scenario");
  std::string cl_config;
  classify_cmd->add_option("--config", cl_config, "config file")->required();
  classify_cmd->callback([&] {
    auto scenario = kscrit::scenario_from_config(kscrit::ConfigFile::parse_file(cl_config));
    std::cout << kscrit::classify(scenario).to_json().dump(2) << '\n';
  });

  auto* sweep_cmd = app.add_subcommand("sweep", "classify a grid of masses");
  std::string sw_config, sw_masses;
  sweep_cmd->add_option("--config", sw_config, "config file")->required();
  sweep_cmd->add_option("--masses", sw_masses, "override [sweep] masses = a,b,c");
  sweep_cmd->callback([&] {
    auto cfg = kscrit::ConfigFile::parse_file(sw_config);
    auto scenario = kscrit::scenario_from_config(cfg);
    std::vector<double> masses;
    if (!sw_masses.empty()) {
      masses = parse_real_list(sw_masses, "masses");
    } else if (cfg.has("sweep", "masses")) {
      masses = cfg.get_list("sweep", "masses");
    } else {
      throw kscrit::invalid_input("sweep: provide --masses or [sweep] masses");
    }
    auto rows = kscrit::dichotomy_sweep(scenario.params, masses, scenario);
    json table = json::array();
    for (const auto& row : rows) {
      json r = row.report.to_json();
      r["m"] = row.m;
      r["consistent"] = row.consistent;
      table.push_back(std::move(r));
    }
    std::cout << table.dump(2) << '\n';
  });

  // ---- rate-fit ---------------------------------------------------------------
  auto* ratefit = app.add_subcommand("rate-fit", "fit the blow-up rate from a CSV");
  std::string rf_csv;
  int rf_N = 3;
  double rf_window = 1.0;
  ratefit->add_option("--csv", rf_csv, "diagnostics CSV (t,nmax,... columns)")->required();
  ratefit->add_option("--N", rf_N, "dimension (sets q = 2/N)");
  ratefit->add_option("--window", rf_window, "trailing window in decades of growth");
  ratefit->callback([&] {
    std::ifstream in(rf_csv);
    if (!in) throw kscrit::invalid_input("cannot open " + rf_csv);
    std::string line;
    std::vector<std::pair<double, double>> series;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      if (!header_seen) {
        header_seen = true;  // skip the t,nmax,... header row
        continue;
      }
      const auto c1 = line.find(',');
      if (c1 == std::string::npos) continue;
      const auto c2 = line.find(',', c1 + 1);
      const std::string second =
          line.substr(c1 + 1, (c2 == std::string::npos ? line.size() : c2) - c1 - 1);
      series.emplace_back(std::stod(line.substr(0, c1)), std::stod(second));
    }
    kscrit::Parameters params(rf_N);
    auto fit = kscrit::fit_blowup_rate(series, params.q, rf_window);
    json j{{"exponent", fit.exponent}, {"r2", fit.r2}, {"T_estimate", fit.T_estimate}};
    std::cout << j.dump(2) << '\n';
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
