#pragma once

// =============================================================================
// Scenario
// =============================================================================
// A scenario couples a topology with load profiles, control settings and a
// solver configuration. The file format extends the netlist grammar:
//
//   netlist <path>            # relative to the scenario file; node/edge lines
//                             # may also be written inline
//   duration <s>
//   solver  dt=10u method=rk4 decimation=100 init=nominal control_period=0 state_limit=10M
//   control v_bus=12k main_bus=<node> v_droop=12k r_base=10 kp=1e-4 ki=0.05
//           kp_v=0.05 ki_v=2 dv_max=3k
//   droop   <pgm> weight=<w> [r=<ohms>]
//   ess     omega=1 mode=highpass|lowpass
//   profile <load> step@0=1M ramp@5=2M hold@7=2M
//   set     <node> <param>=<value> ...
// =============================================================================

#include "mgsim/control.hpp"
#include "mgsim/profile.hpp"
#include "mgsim/solver.hpp"
#include "mgsim/topology.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mgsim {

enum class InitMode {
    Nominal,  // nodes at v_bus, edges at 0 A, PGM AC side at its algebraic steady state
    Cold,     // every state zero
};

struct ControlSettings {
    double v_bus_ref = kNominalBusVoltage;   // secondary setpoint v_b*
    std::string main_bus;                    // node measured by the secondary loop
    double v_droop = kNominalBusVoltage;     // open-circuit droop voltage
    double r_base = 10.0;                    // Ω, r_i = r_base / w_i
    double kp = 1e-4;                        // rectifier PI, per volt
    double ki = 0.05;
    double kp_v = 0.05;                      // secondary PI
    double ki_v = 2.0;
    double dv_max = 3e3;                     // |Δv_b| limit (V)
    double control_period = 0.0;             // 0 = every solver step
};

struct EssSettings {
    double omega = 1.0;  // compensator filter rate (1/s)
    EssMode mode = EssMode::HighPass;
};

struct DroopSetting {
    std::string pgm;
    double weight = 1.0;
    std::optional<double> r;  // pins r_d_init instead of r_base / weight
};

struct ProfileSetting {
    std::string node;
    LoadProfile profile;
};

struct Scenario {
    std::string name;
    Topology topology;
    SolverConfig solver;  // solver.t_end is the scenario duration
    InitMode init = InitMode::Nominal;
    double state_limit = 1e7;  // any |state| above this counts as divergence
    ControlSettings control;
    EssSettings ess;
    std::vector<DroopSetting> droop;       // one per PGM, topology order
    std::vector<ProfileSetting> profiles;  // one per load node, topology order
    std::vector<std::string> warnings;

    [[nodiscard]] const LoadProfile& profile_for(std::string_view node) const;
    [[nodiscard]] const DroopSetting& droop_for(std::string_view pgm) const;

    /// Droop configuration per PGM, in topology order.
    [[nodiscard]] std::vector<DroopConfig> droop_configs() const;

    /// Sorted, de-duplicated profile breakpoints strictly inside (0, t_end).
    [[nodiscard]] std::vector<double> event_times() const;
};

/// Parses scenario text. Relative `netlist` paths resolve against `base_dir`.
/// The result is fully resolved: defaults filled, overrides applied, checked.
[[nodiscard]] Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {},
                                      std::string name = "scenario");

/// Reads and resolves a scenario file. Throws IoError, ParseError, SemanticError.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Self-contained text (inline topology, every setting explicit) that parses
/// back to an equivalent scenario.
[[nodiscard]] std::string serialize(const Scenario& scenario);

/// Sets one scalar addressed by a dotted path: `duration`, `solver.dt`,
/// `solver.decimation`, `solver.control_period`, `solver.state_limit`,
/// `control.<key>`, `ess.omega`, `droop.<pgm>.weight`, `droop.<pgm>.r`, or
/// `<node>.<param>`. Throws std::invalid_argument for unknown paths.
void set_param(Scenario& scenario, std::string_view path, double value);

/// Reads a whole file; throws IoError.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Resolves a scenario argument: an existing path as-is, otherwise `<name>`
/// or `<name>.scn` under each directory of MGSIM_SCENARIO_PATH (colon
/// separated), then the bundled data directory.
[[nodiscard]] std::filesystem::path find_scenario(std::string_view name_or_path);

}  // namespace mgsim
