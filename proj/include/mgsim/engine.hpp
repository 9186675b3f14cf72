#pragma once

// =============================================================================
// Network engine
// =============================================================================
// Assembles the component models over a topology, advances the continuous
// states with a fixed-step integrator and the controllers once per control
// period. A run is a pure function of its scenario.
// =============================================================================

#include "mgsim/control.hpp"
#include "mgsim/errors.hpp"
#include "mgsim/scenario.hpp"
#include "mgsim/schedule.hpp"
#include "mgsim/solver.hpp"
#include "mgsim/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mgsim {

struct StateSlot {
    std::string component;
    std::string variable;
};

struct ControllerState {
    std::vector<PiState> rectifier;                 // per PGM
    PiState secondary;
    std::vector<EssCompensatorState> compensators;  // per PCM
    std::vector<double> lambda;                     // held firing coefficients, per PGM
    std::vector<double> i_ess_ref;                  // held ESS current references, per PCM
    double dv_b = 0.0;
    double next_update = 0.0;
    bool started = false;
};

struct SystemState {
    double t = 0.0;
    std::uint64_t steps = 0;
    std::vector<double> x;  // continuous states, laid out per Engine::slots()
    ControllerState control;
};

struct EngineWorkspace {
    StepBuffers buffers;
    std::vector<double> node_voltage;
    std::vector<double> injection;
};

struct RunResult {
    TimeSeries series;
    std::optional<NumericalDivergence> divergence;
};

class Engine {
public:
    /// Builds the index map and schedule. Throws SemanticError for an invalid
    /// topology and DegenerateReference for a PGM whose AC reference is zero.
    explicit Engine(Scenario scenario);

    [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
    [[nodiscard]] const Schedule& schedule() const noexcept { return schedule_; }
    [[nodiscard]] const std::vector<StateSlot>& slots() const noexcept { return slots_; }

    /// Offset of a node's first state; PGM: i_dL,i_qL,v_d,v_q,i_dc,v_c_dc, PCM: v,i_ess,q_used, PMM: v.
    [[nodiscard]] std::size_t node_offset(std::size_t node) const { return nodes_[node].offset; }
    [[nodiscard]] std::size_t edge_offset(std::size_t edge) const { return edge_offset_[edge]; }
    [[nodiscard]] std::size_t voltage_index(std::size_t node) const { return nodes_[node].voltage; }

    [[nodiscard]] SystemState initial_state() const;

    /// Updates the controllers if a control period is due, then advances the
    /// continuous states by dt. Throws NumericalDivergence.
    void advance(SystemState& state, double dt, EngineWorkspace& ws) const;

    [[nodiscard]] SystemState step(const SystemState& state, double dt) const;

    /// Network derivative at (t, x) with the held controller outputs, evaluated in schedule order.
    void derivatives(double t, std::span<const double> x, const ControllerState& control, std::span<double> dx,
                     EngineWorkspace& ws) const;

    /// Column names of the recorded time series.
    [[nodiscard]] std::vector<std::string> column_names() const;
    void record(const SystemState& state, TimeSeries& out) const;

    /// Runs the scenario from initial_state() to t_end. Throws NumericalDivergence.
    [[nodiscard]] TimeSeries simulate() const;

    /// Like simulate(), but returns the rows recorded before a divergence
    /// together with the divergence instead of throwing.
    [[nodiscard]] RunResult run() const;

private:
    struct NodeSlot {
        NodeKind kind;
        std::size_t offset;
        std::size_t voltage;
        std::size_t sub;  // index among PGMs or PCMs
        const LoadProfile* profile;
    };

    void update_controls(SystemState& state, double period) const;
    void check_finite(const SystemState& state) const;

    Scenario scenario_;
    Schedule schedule_;
    std::vector<StateSlot> slots_;
    std::vector<NodeSlot> nodes_;
    std::vector<std::size_t> edge_offset_;
    std::vector<std::size_t> pgm_nodes_;
    std::vector<std::size_t> pcm_nodes_;
    std::vector<DroopConfig> droop_;
    std::size_t main_bus_ = 0;
};

[[nodiscard]] TimeSeries simulate(const Scenario& scenario);

}  // namespace mgsim
