#pragma once

// Batch front end: JSON run configs, command dispatch, deterministic run
// manifests, CSV/JSON artifacts.  This is the only layer the C API and the
// CLI sit on.

#include <string>

#include "gft.hpp"

namespace htg {

// command in {verify, evolve, kernel, projector-norms, strichartz-scan}.
// config_json may be empty (defaults).  Artifacts (manifest.json plus the
// command output) are written into out_dir (created when missing); a JSON
// report is placed in *report_json when non-null.
// Returns 0 on success, 1 on property failure, 2 on usage/config errors.
int run_command(const std::string& command, const std::string& config_json,
                const std::string& out_dir, std::string* report_json);

// Initial-data families shared by the commands: "gaussian",
// "coherent(x0,xi0)", "hermite_mode(lambda,k)", "bgx-transport"; throws
// std::runtime_error on unknown families or malformed arguments.
SpaceField sample_data_family(const HTypeStructure& s, const std::string& family, int n_x,
                              double L_x, int n_z, double L_z);

const char* version_string();

}  // namespace htg
