#pragma once

#include "plaque/diagnostics.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plaque {

// Config-file or flag problems, every issue collected before throwing so
// a bad file reports all of its defects at once.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> issues);

    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

enum class RunMode {
    Simulate,         // one trajectory -> trajectory.csv
    ConvergenceTime,  // step-count ladder -> convergence.csv
    ConvergenceSpace, // basis-order ladder -> convergence.csv
    Condition,        // startup-matrix conditioning -> condition.csv
    RiskSweep,        // cholesterol pairs -> radius.csv
    Mms,              // manufactured-solution gate -> mms.csv
    Perturb,          // bounded-perturbation run -> trajectory.csv
};

RunMode mode_from_name(const std::string& name); // throws ConfigError

// One cholesterol scenario in clinical units; converted to g/cm^3 when a
// run is built (1 mg/dl = 1e-4 g/cm^3).
struct RiskPair {
    double ldl_mgdl = 0.0;
    double hdl_mgdl = 0.0;
};

Parameters risk_parameters(const Parameters& base, const RiskPair& pair);

// Parsed configuration.  Unset fields fall back to per-mode defaults when
// the run is resolved; parameter overrides are kept by key so mode
// defaults (for example the study horizon) apply only when the file did
// not speak.
struct RunConfig {
    std::optional<RunMode> mode;
    std::map<std::string, double> param_overrides;
    std::optional<BasisKind> basis;
    std::optional<int> N, M, M_ref, N_ref, stride;
    std::vector<int> M_list, N_list;
    std::vector<RiskPair> risk_pairs;
    std::optional<double> eps1;
    std::optional<bool> zero_dynamics;
    std::optional<bool> radius_drift_squared, diffusion_first_power, robin_slope_negative;
    std::string out_dir = "out";
};

// Line-oriented `key = value` text with `#` comments.  Unknown keys,
// malformed values, and out-of-range parameters are all reported together
// with their line numbers.
RunConfig parse_config(std::string_view text);

// Executes the configured mode and writes its CSV outputs under the
// output directory.  Returns 0 on success and 2 on a numerical abort
// (partial outputs are kept); configuration problems throw ConfigError.
int run(const RunConfig& config);

} // namespace plaque
