#include "kscrit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kscrit/errors.hpp"

namespace kscrit {

namespace {

void require_stream(const std::ofstream& out, const std::string& path) {
  if (!out) throw invalid_input("io: cannot write " + path);
}

}  // namespace

void write_profile_csv(const Profile& u, const std::string& path) {
  std::ofstream out(path);
  require_stream(out, path);
  out << std::setprecision(17);
  out << "# grid: " << u.grid.x_max << ' ' << u.grid.grading_exponent << ' '
      << u.grid.n_cells << '\n';
  out << "# du0: " << u.derivative_at_zero << '\n';
  out << "x,u\n";
  for (int i = 0; i < u.grid.n_nodes(); ++i)
    out << u.grid.nodes[i] << ',' << u.values[i] << '\n';
  if (!out) throw numerical_failure("io: short write to " + path, 0.0);
}

Profile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("io: cannot open " + path);
  double x_max = 0.0, p = 0.0, du0 = 0.0;
  int n_cells = -1;
  bool have_grid = false, have_du0 = false, have_header = false;
  std::vector<double> xs, us;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string tag;
      meta >> tag;
      if (tag == "grid:") {
        if (!(meta >> x_max >> p >> n_cells))
          throw invalid_input("io: malformed grid comment in " + path);
        have_grid = true;
      } else if (tag == "du0:") {
        if (!(meta >> du0)) throw invalid_input("io: malformed du0 comment in " + path);
        have_du0 = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "x,u")
        throw invalid_input("io: expected header 'x,u' in " + path + " at line " +
                            std::to_string(line_no));
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw invalid_input("io: bad row in " + path + " at line " + std::to_string(line_no));
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      us.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw invalid_input("io: bad number in " + path + " at line " +
                          std::to_string(line_no));
    }
  }
  if (!have_grid || !have_du0 || !have_header)
    throw invalid_input("io: missing metadata in " + path);
  Grid g = Grid::graded(x_max, p, n_cells);
  if (static_cast<int>(xs.size()) != g.n_nodes())
    throw invalid_input("io: row count does not match the grid in " + path);
  for (int i = 0; i < g.n_nodes(); ++i)
    if (std::abs(xs[i] - g.nodes[i]) > 1e-12 * std::max(1.0, g.x_max))
      throw inconsistency_error("io: node column disagrees with the grid comment in " +
                                path);
  return Profile(std::move(g), std::move(us), du0);
}

nlohmann::json profile_to_json(const Profile& u) {
  nlohmann::json j;
  j["grid"] = {{"x_max", u.grid.x_max},
               {"grading_exponent", u.grid.grading_exponent},
               {"n_cells", u.grid.n_cells}};
  j["values"] = u.values;
  j["du0"] = u.derivative_at_zero;
  return j;
}

Profile profile_from_json(const nlohmann::json& j) {
  try {
    Grid g = Grid::graded(j.at("grid").at("x_max").get<double>(),
                          j.at("grid").at("grading_exponent").get<double>(),
                          j.at("grid").at("n_cells").get<int>());
    return Profile(std::move(g), j.at("values").get<std::vector<double>>(),
                   j.at("du0").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("io: bad profile json: ") + e.what());
  }
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path) {
  std::ofstream out(path);
  require_stream(out, path);
  out << std::setprecision(17);
  out << "t,nmax,F,dt,bd_residual\n";
  for (const auto& r : records)
    out << r.t << ',' << r.nmax_value << ',' << r.F_value << ',' << r.dt << ','
        << r.bd_residual << '\n';
  if (!out) throw numerical_failure("io: short write to " + path, 0.0);
}

}  // namespace kscrit
