#pragma once

// =============================================================================
// Component models
// =============================================================================
// Averaged (non-switching) models of the four DC microgrid building blocks:
// the power generation module (AC source, LC filter, ideal rectifier, DC LC
// filter), the RL line, the first-order energy storage system and the
// constant-power load with a parallel RC pair. Every function here is pure.
// =============================================================================

#include <numbers>
#include <optional>

namespace mgsim {

/// 3√3/π: DC voltage per unit of λ·v_d for the ideal three-phase bridge.
inline constexpr double kRectifierVoltageGain = 3.0 * std::numbers::sqrt3 / std::numbers::pi;
/// 2√3/π: AC current per unit of λ·i_dc.
inline constexpr double kRectifierCurrentGain = 2.0 * std::numbers::sqrt3 / std::numbers::pi;

inline constexpr double kNominalBusVoltage = 12e3;

struct PgmParams {
    double L = 100e-6;     // AC-side inductance (H)
    double R = 0.01;       // AC-side resistance (Ω)
    double C = 100e-6;     // AC-side capacitance (F)
    double f = 120.0;      // AC frequency (Hz)
    double L_dc = 200e-6;  // DC-side inductance (H)
    double R_dc = 0.01;    // DC-side resistance (Ω)
    double C_dc = 1e-3;    // DC-side capacitance (F)
    double R_d = 1e6;      // damping resistor (Ω)
    double phi = 0.0;      // rectifier phase angle (rad)
    double v_ds = 7620.0;  // d-axis source voltage (V)
    double v_qs = 0.0;     // q-axis source voltage (V)
    // AC references used by the rectifier feedforward; fall back to v_ds / v_qs.
    std::optional<double> v_d_ref;
    std::optional<double> v_q_ref;

    [[nodiscard]] double omega() const noexcept { return 2.0 * std::numbers::pi * f; }
    [[nodiscard]] double d_reference() const noexcept { return v_d_ref.value_or(v_ds); }
    [[nodiscard]] double q_reference() const noexcept { return v_q_ref.value_or(v_qs); }

    friend bool operator==(const PgmParams&, const PgmParams&) = default;
};

struct PgmState {
    double i_dL = 0.0;
    double i_qL = 0.0;
    double v_d = 0.0;
    double v_q = 0.0;
    double i_dc = 0.0;
    double v_c_dc = 0.0;  // node output voltage

    friend bool operator==(const PgmState&, const PgmState&) = default;
};

struct LoadParams {
    double C_L = 100e-6;
    double R_L = 10e3;
    double v_floor = 0.01 * kNominalBusVoltage;  // CPL division guard

    friend bool operator==(const LoadParams&, const LoadParams&) = default;
};

struct LoadState {
    double v_c_L = 0.0;
};

struct EssParams {
    double omega_ess = 20.0;  // current-tracking rate of the storage device (1/s)
    double Q_T = 10.0;        // capacity (A·h)
    double Q_0 = 5.0;         // initial charge (A·h)
    double P_min = -2e6;      // W, negative = charging
    double P_max = 2e6;       // W, positive = discharging

    friend bool operator==(const EssParams&, const EssParams&) = default;
};

/// i_ess > 0 discharges the battery into the node.
struct EssState {
    double i_ess = 0.0;
    double q_used = 0.0;  // ∫ i_batt dt (A·s)
};

struct LineState {
    double i = 0.0;
};

/// PCM = load module plus a shunt ESS.
struct PcmParams {
    LoadParams load{};
    EssParams ess{};

    friend bool operator==(const PcmParams&, const PcmParams&) = default;
};

/// PMM = load module only, with the larger propulsion-motor capacitance.
[[nodiscard]] inline LoadParams default_pmm_params() {
    LoadParams p;
    p.C_L = 1e-3;
    return p;
}

// -----------------------------------------------------------------------------
// Rectifier and PGM
// -----------------------------------------------------------------------------

struct RectifierOutput {
    double v_dc = 0.0;
    double i_d = 0.0;
    double i_q = 0.0;
};

/// Ideal rectifier: λ = cos(α) ∈ [0, 1] is the firing coefficient.
[[nodiscard]] RectifierOutput rectifier_map(double lambda, double phi, double v_d, double v_q,
                                            double i_dc) noexcept;

[[nodiscard]] PgmState pgm_derivatives(const PgmState& state, const PgmParams& params, double lambda,
                                       double i_g_in) noexcept;

struct PgmOperatingPoint {
    PgmState state;
    double lambda = 0.0;
};

/// Steady state of one PGM delivering `i_out` into an external node held at
/// `v_out`. λ is returned unclamped; values outside [0, 1] mean the operating
/// point is unreachable with the configured source voltage. Throws
/// DegenerateReference when no real solution exists.
[[nodiscard]] PgmOperatingPoint pgm_steady_state(const PgmParams& params, double v_out, double i_out);

// -----------------------------------------------------------------------------
// Line, ESS, load
// -----------------------------------------------------------------------------

[[nodiscard]] double line_derivative(const LineState& state, double v_in, double v_out, double R_line,
                                     double L_line) noexcept;

[[nodiscard]] double soc(const EssState& state, const EssParams& params) noexcept;

/// SOC from processed energy, with `energy_ws` = ∫ P_batt dt (J) and `v_b` the measured bus voltage.
[[nodiscard]] double soc_from_power(const EssParams& params, double v_b, double energy_ws) noexcept;

/// Applies the power window and SOC bounds to a current reference.
[[nodiscard]] double saturate_ess_reference(const EssState& state, const EssParams& params, double i_ref,
                                            double v_b) noexcept;

/// Current actually delivered by the storage: zero once it is past a SOC bound
/// and the current would push it further out. Reaching a bound exactly is
/// allowed, so a full discharge counts its last step in full.
[[nodiscard]] double ess_output_current(const EssState& state, const EssParams& params) noexcept;

/// d i_ess / dt toward the saturated reference.
[[nodiscard]] double ess_derivative(const EssState& state, const EssParams& params, double i_ref,
                                    double v_b) noexcept;

[[nodiscard]] double load_derivative(const LoadState& state, const LoadParams& params, double p_load,
                                     double i_in) noexcept;

}  // namespace mgsim
