#pragma once

// Subcommand implementations behind the piezo CLI. Each returns a process
// exit code and writes human-readable progress to `out`, errors to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "piezo/analysis.hpp"
#include "piezo/config.hpp"

namespace piezo {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 2;
inline constexpr int inadmissible = 3;
inline constexpr int check_failed = 4;
}  // namespace exit_code

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;  // overrides PIEZO_OUT_DIR and [output] dir
    std::optional<std::uint64_t> seed;   // overrides [check] seed
    int levels = 3;
    std::string axis;                 // sweep: "section.key"
    std::vector<std::string> values;  // sweep values
    bool dump_operator = false;
    int threads = 0;  // sweep workers; 0 = hardware concurrency
};

/// Output directory: --out, then PIEZO_OUT_DIR, then [output] dir.
std::string resolve_out_dir(const CommandOptions& opt, const RunConfig& cfg);

/// Outcome of one calibrated run plus the report built from it.
struct SimulationOutcome {
    AdmissibilityReport admissibility;
    Calibration calibration;
    Trace trace;
    TrajectoryCheck trajectory;
    DecayFit fit;
    Report report;
};

/// Calibrates, runs and evaluates one configuration. Does not check
/// admissibility first; the report records the verdict.
SimulationOutcome simulate(const RunConfig& cfg);

inline constexpr int kMaxDumpDimension = 4000;

int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_refine(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace piezo
