#include "kscrit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "kscrit/errors.hpp"
#include "kscrit/io.hpp"
#include "kscrit/lyapunov.hpp"
#include "stationary_detail.hpp"

namespace kscrit {

namespace {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::direct_imex: return "direct";
    case Scheme::regularized_imex: return "regularized";
    case Scheme::transformed: return "transformed";
  }
  return "direct";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "direct") return Scheme::direct_imex;
  if (name == "regularized") return Scheme::regularized_imex;
  if (name == "transformed") return Scheme::transformed;
  throw invalid_input("scenario: unknown scheme '" + name + "'");
}

// Evaluator for the scaling family U_a(x) = U_1(a x) from the cached
// reference profile (plateau M beyond the flat point A).
class StationaryFamily {
 public:
  StationaryFamily(const Parameters& params, double tol)
      : ref_(detail::u1_reference(params, tol)),
        interp_(detail::make_pchip(ref_->profile.grid.nodes, ref_->profile.values)) {}

  double A() const { return ref_->flat_point; }
  double M() const { return ref_->max_value; }

  Profile sample(double a, const Grid& grid) const {
    std::vector<double> v(grid.n_nodes(), 0.0);
    if (a > 0.0) {
      const double domain = ref_->profile.grid.x_max;
      for (int i = 1; i < grid.n_nodes(); ++i) {
        const double y = a * grid.nodes[i];
        v[i] = (y >= ref_->flat_point) ? ref_->max_value : interp_(std::min(y, domain));
      }
      for (int i = 0; i + 1 < grid.n_nodes(); ++i) v[i + 1] = std::max(v[i + 1], v[i]);
    }
    return Profile(grid, std::move(v), a);
  }

  // c1_distance to the nearest family member near the slope guess, refined by
  // golden-section search.
  std::pair<double, double> nearest(const Profile& u, double a_guess) const {
    auto dist = [&](double a) { return c1_distance(u, sample(a, u.grid)); };
    if (!(a_guess > 0.0)) return {0.0, dist(0.0)};
    double lo = 0.8 * a_guess, hi = 1.2 * a_guess;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 40 && hi - lo > 1e-10 * a_guess; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = dist(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = dist(x2);
      }
    }
    const double a_best = 0.5 * (lo + hi);
    return {a_best, dist(a_best)};
  }

 private:
  std::shared_ptr<const StationaryProfile> ref_;
  detail::pchip_t interp_;
};

// (t, nmax) series kept per accepted step, thinned geometrically so memory
// stays bounded on long runs.
struct SeriesBuffer {
  std::vector<std::pair<double, double>> data;
  std::size_t keep_every = 1, since = 0;

  void push(double t, double v) {
    if (++since >= keep_every) {
      data.emplace_back(t, v);
      since = 0;
    }
    if (data.size() >= (1u << 22)) {
      std::vector<std::pair<double, double>> half;
      half.reserve(data.size() / 2);
      for (std::size_t i = 0; i < data.size(); i += 2) half.push_back(data[i]);
      data.swap(half);
      keep_every *= 2;
    }
  }
};

constexpr double kFamilyTol = 1e-6;

}  // namespace

Profile build_initial_data(const Scenario& scenario) {
  const Parameters& params = scenario.params;
  Grid grid = Grid::graded(1.0, params.N, scenario.n_cells);
  const std::string& init = scenario.init;

  if (init == "linear") {
    std::vector<double> v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = params.m * grid.nodes[i];
    return Profile(std::move(grid), std::move(v), params.m);
  }

  const auto colon = init.find(':');
  const std::string kind = init.substr(0, colon);
  const std::string arg = (colon == std::string::npos) ? "" : init.substr(colon + 1);

  if (kind == "stationary") {
    double a = 0.0;
    try {
      a = std::stod(arg);
    } catch (const std::exception&) {
      throw invalid_input("scenario: bad stationary init '" + init + "'");
    }
    auto sp = solve_Pa(a, params, 1.0, 1e-8);
    const int n_src = sp.profile.grid.n_cells;
    if (n_src % scenario.n_cells == 0) {  // nodewise extraction, no interpolation
      const int stride = n_src / scenario.n_cells;
      std::vector<double> v(grid.n_nodes());
      for (int i = 0; i < grid.n_nodes(); ++i)
        v[i] = sp.profile.values[static_cast<std::size_t>(i) * stride];
      return Profile(std::move(grid), std::move(v), a);
    }
    auto interp = detail::make_pchip(sp.profile.grid.nodes, sp.profile.values);
    std::vector<double> v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = interp(grid.nodes[i]);
    return Profile(std::move(grid), std::move(v), a);
  }

  if (kind == "selfsim") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos)
      throw invalid_input("scenario: selfsim init needs 'eps,a0'");
    double eps = 0.0, a0 = 0.0;
    try {
      eps = std::stod(arg.substr(0, comma));
      a0 = std::stod(arg.substr(comma + 1));
    } catch (const std::exception&) {
      throw invalid_input("scenario: bad selfsim init '" + init + "'");
    }
    auto V = solve_Qeps(eps, params, a0 + 1.0, 1e-7);
    auto law = AmplitudeLaw::make(a0, eps, params.q);
    return self_similar_field(V, law, 0.0, grid);
  }

  if (kind == "file") {
    if (arg.empty()) throw invalid_input("scenario: file init needs a path");
    Profile loaded = read_profile_csv(arg);
    if (std::abs(loaded.grid.x_max - 1.0) > 1e-9)
      throw invalid_input("scenario: initial profile must live on [0, 1]");
    if (loaded.grid.same_layout(grid)) return loaded;
    auto interp = detail::make_pchip(loaded.grid.nodes, loaded.values);
    std::vector<double> v(grid.n_nodes());
    for (int i = 0; i < grid.n_nodes(); ++i) v[i] = interp(grid.nodes[i]);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i + 1] = std::max(v[i + 1], v[i]);
    return Profile(std::move(grid), std::move(v), loaded.derivative_at_zero);
  }

  throw invalid_input("scenario: unknown init descriptor '" + init + "'");
}

ScenarioReport classify(const Scenario& scenario) {
  if (scenario.scheme == Scheme::transformed)
    throw invalid_input("classify: drive the transformed scheme via solve_transformed");

  Profile u0 = build_initial_data(scenario);
  const double m = u0.values.back();
  if (scenario.params.m > 0.0 &&
      std::abs(scenario.params.m - m) > 1e-9 * std::max(1.0, m))
    throw invalid_input("classify: init data boundary value disagrees with params.m");
  Parameters params(scenario.params.N, m);

  StationaryFamily family(params, kFamilyTol);
  EvolutionState state(params, std::move(u0), scenario.scheme, scenario.reg_eps);
  state.dt_min = scenario.thresholds.dt_min;

  ScenarioReport report;
  report.config = scenario;
  report.m_vs_M = m - family.M();

  SeriesBuffer series;
  double current = nmax(state.u);
  series.push(state.t, current);
  auto record = [&](double nm) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.nmax_value = nm;
    rec.F_value = energy_F(state.u, params, 1e-10);
    rec.dt = state.dt;
    rec.bd_residual = std::abs(state.u.values.back() - m);
    state.diagnostics.push_back(rec);
  };
  record(current);

  int consecutive = 0;
  bool blew_up = false;
  double next_checkpoint = state.t + scenario.record_interval;
  long long steps = 0;

  while (state.t < scenario.horizon) {
    if (current >= scenario.thresholds.nmax_threshold) {
      blew_up = true;
      break;
    }
    if (step(state) == StepOutcome::dt_collapse) {
      blew_up = true;
      break;
    }
    ++steps;
    current = nmax(state.u);
    series.push(state.t, current);
    if (state.t < next_checkpoint) continue;
    next_checkpoint += scenario.record_interval;
    record(current);

    // Convergence probe: distance to the scaling family near the current
    // slope, refined only once the coarse match is in range.
    double a_guess = state.u.derivative_at_zero;
    double d = c1_distance(state.u, family.sample(a_guess, state.u.grid));
    double a_best = a_guess;
    if (d < 10.0 * scenario.thresholds.conv_tol) {
      auto [a_ref, d_ref] = family.nearest(state.u, a_guess);
      a_best = a_ref;
      d = d_ref;
    }
    if (d < scenario.thresholds.conv_tol) {
      if (++consecutive >= 10) {
        report.verdict = Verdict::converged;
        report.a_limit = a_best;
        break;
      }
    } else {
      consecutive = 0;
    }
  }

  if (state.diagnostics.empty() || state.diagnostics.back().t < state.t) record(current);
  if (blew_up) {
    report.verdict = Verdict::blew_up;
    try {
      auto fit = fit_rate_from_series(series.data, params.q, 1.0);
      report.T_estimate = fit.T_estimate;
      report.rate_exponent = fit.exponent;
      report.rate_fit_r2 = fit.r2;
    } catch (const invalid_input&) {
      // Not enough growth to fit a rate; leave the fit fields absent.
    }
  }
  report.final_t = state.t;
  report.final_nmax = current;
  report.final_F = state.diagnostics.back().F_value;
  report.steps = steps;

  if (!scenario.diagnostics_csv.empty())
    write_diagnostics_csv(state.diagnostics, scenario.diagnostics_csv);
  if (!scenario.report_json.empty()) {
    std::ofstream out(scenario.report_json);
    if (!out) throw invalid_input("classify: cannot write " + scenario.report_json);
    out << report.to_json().dump(2) << '\n';
  }
  return report;
}

RateFit fit_blowup_rate(const std::vector<std::pair<double, double>>& series, double q,
                        double window_decades) {
  if (!(q > 0.0) || q >= 1.0) throw invalid_input("fit_blowup_rate: q must be in (0, 1)");
  double peak = 0.0;
  for (const auto& p : series) peak = std::max(peak, p.second);
  if (!(peak > 0.0)) throw invalid_input("fit_blowup_rate: fit rejected, series never grows");
  const double floor_value = peak / std::pow(10.0, window_decades);

  std::size_t in_window = 0;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& p : series) {
    if (p.second < floor_value) continue;
    ++in_window;
    if (p.second < prev * (1.0 - 1e-12))
      throw invalid_input("fit_blowup_rate: fit rejected, nmax not monotone in window");
    prev = p.second;
  }
  if (in_window < 20)
    throw invalid_input("fit_blowup_rate: fit rejected, need >= 20 points in window");
  return fit_rate_from_series(series, q, window_decades);
}

std::vector<SweepRow> dichotomy_sweep(const Parameters& params,
                                      const std::vector<double>& mass_grid,
                                      const Scenario& base) {
  for (std::size_t i = 0; i + 1 < mass_grid.size(); ++i)
    if (mass_grid[i + 1] < mass_grid[i])
      throw invalid_input("dichotomy_sweep: mass grid must be sorted ascending");

  std::vector<std::future<ScenarioReport>> jobs;
  jobs.reserve(mass_grid.size());
  for (double m : mass_grid) {
    Scenario s = base;
    s.params = Parameters(params.N, m);
    s.init = "linear";
    s.diagnostics_csv.clear();
    s.report_json.clear();
    jobs.push_back(std::async(std::launch::async, [s] { return classify(s); }));
  }

  std::vector<SweepRow> rows;
  rows.reserve(mass_grid.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    SweepRow row;
    row.m = mass_grid[i];
    row.report = jobs[i].get();
    rows.push_back(std::move(row));
  }

  // The dichotomy is monotone in m: converged -> undecided -> blew_up.
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::converged: return 0;
      case Verdict::undecided: return 1;
      case Verdict::blew_up: return 2;
    }
    return 1;
  };
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rank(rows[i].report.verdict) < rank(rows[i - 1].report.verdict))
      rows[i].consistent = false;
  return rows;
}

nlohmann::json ScenarioReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = kArtifactVersion;
  switch (verdict) {
    case Verdict::converged: j["verdict"] = "converged"; break;
    case Verdict::blew_up: j["verdict"] = "blew_up"; break;
    case Verdict::undecided: j["verdict"] = "undecided"; break;
  }
  if (a_limit) j["a_limit"] = *a_limit;
  if (T_estimate) j["T_estimate"] = *T_estimate;
  if (rate_exponent) j["rate_exponent"] = *rate_exponent;
  if (rate_fit_r2) j["rate_fit_r2"] = *rate_fit_r2;
  j["m_vs_M"] = m_vs_M;
  j["final"] = {{"t", final_t}, {"nmax", final_nmax}, {"F", final_F}};
  j["steps"] = steps;
  j["config"] = {{"N", config.params.N},
                 {"m", config.params.m},
                 {"init", config.init},
                 {"scheme", scheme_name(config.scheme)},
                 {"reg_eps", config.reg_eps},
                 {"n_cells", config.n_cells},
                 {"horizon", config.horizon},
                 {"record_interval", config.record_interval},
                 {"thresholds",
                  {{"nmax", config.thresholds.nmax_threshold},
                   {"dt_min", config.thresholds.dt_min},
                   {"conv_tol", config.thresholds.conv_tol}}}};
  return j;
}

Scenario scenario_from_config(const ConfigFile& cfg) {
  const int N = cfg.get_int_or("params", "N", 3);
  const double m = cfg.get_double_or("params", "m", 0.0);
  Scenario s{Parameters(N, m)};
  s.init = cfg.get_or("init", "descriptor", "linear");
  s.scheme = scheme_from_name(cfg.get_or("scheme", "kind", "direct"));
  s.reg_eps = cfg.get_double_or("scheme", "reg_eps", 0.0);
  s.n_cells = cfg.get_int_or("scheme", "n_cells", 256);
  s.horizon = cfg.get_double_or("scheme", "horizon", 50.0);
  s.record_interval = cfg.get_double_or("scheme", "record_interval", 0.1);
  s.thresholds.nmax_threshold = cfg.get_double_or("thresholds", "nmax", 1e6);
  s.thresholds.dt_min = cfg.get_double_or("thresholds", "dt_min", 1e-13);
  s.thresholds.conv_tol = cfg.get_double_or("thresholds", "conv_tol", 1e-3);
  s.diagnostics_csv = cfg.get_or("output", "diagnostics_csv", "");
  s.report_json = cfg.get_or("output", "report_json", "");
  if (s.n_cells < 8) throw invalid_input("scenario: n_cells must be >= 8");
  if (!(s.horizon > 0.0)) throw invalid_input("scenario: horizon must be positive");
  return s;
}

}  // namespace kscrit
