#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kscrit/config.hpp"
#include "kscrit/evolution.hpp"
#include "kscrit/params.hpp"
#include "kscrit/selfsim.hpp"
#include "kscrit/stationary.hpp"

namespace kscrit {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kArtifactVersion = "kscrit 0.1.0";

struct Thresholds {
  double nmax_threshold = 1e6;
  double dt_min = 1e-13;
  double conv_tol = 1e-3;
};

// One experiment: initial data descriptor, scheme, horizon, thresholds, outputs.
struct Scenario {
  Parameters params;
  std::string init = "linear";  // linear | stationary:a | selfsim:eps,a0 | file:path
  Scheme scheme = Scheme::direct_imex;
  double reg_eps = 0.0;
  int n_cells = 256;
  double horizon = 50.0;
  double record_interval = 0.1;
  Thresholds thresholds;
  std::string diagnostics_csv;  // empty = do not write
  std::string report_json;      // empty = do not write
};

enum class Verdict { converged, blew_up, undecided };

struct ScenarioReport {
  Verdict verdict = Verdict::undecided;
  std::optional<double> a_limit;
  std::optional<double> T_estimate;
  std::optional<double> rate_exponent;
  std::optional<double> rate_fit_r2;
  double m_vs_M = 0.0;  // signed gap m - M
  double final_t = 0.0;
  double final_nmax = 0.0;
  double final_F = 0.0;
  long long steps = 0;
  Scenario config;  // echo

  nlohmann::json to_json() const;
};

// Builds the initial profile for a scenario on a graded p=N grid.
Profile build_initial_data(const Scenario& scenario);

// Runs the scenario and classifies the trajectory against the dichotomy:
// converged (sustained C1 proximity to a member of the stationary family),
// blew_up (threshold/dt-collapse with rate fit), or undecided at horizon.
ScenarioReport classify(const Scenario& scenario);

// Rate fit on an externally supplied (t, nmax) series: requires >= 20 points
// and monotone growth inside the selected window, then defers to
// fit_rate_from_series.
RateFit fit_blowup_rate(const std::vector<std::pair<double, double>>& series, double q,
                        double window_decades);

// Classifies each mass in the sorted grid and audits verdict monotonicity.
struct SweepRow {
  double m = 0.0;
  ScenarioReport report;
  bool consistent = true;  // flags non-monotone verdict patterns
};

std::vector<SweepRow> dichotomy_sweep(const Parameters& params,
                                      const std::vector<double>& mass_grid,
                                      const Scenario& base);

// Config-file front end (sections [params] [init] [scheme] [thresholds] [output]).
Scenario scenario_from_config(const ConfigFile& cfg);

}  // namespace kscrit
