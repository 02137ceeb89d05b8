#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kscrit/evolution.hpp"
#include "kscrit/profile.hpp"

namespace kscrit {

// CSV with header `x,u`; comment lines `# grid: x_max p n` and `# du0: v`
// carry the metadata needed for a lossless round trip (17 significant digits).
void write_profile_csv(const Profile& u, const std::string& path);
Profile read_profile_csv(const std::string& path);

// JSON form {grid: {x_max, grading_exponent, n_cells}, values: [...], du0: ...}.
nlohmann::json profile_to_json(const Profile& u);
Profile profile_from_json(const nlohmann::json& j);

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records,
                           const std::string& path);

}  // namespace kscrit
