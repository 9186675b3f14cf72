#pragma once

// =============================================================================
// Hierarchical control
// =============================================================================
// Primary: per-PGM droop with curve shifting.
// Secondary: PI on the main-bus voltage error, shifting every droop curve.
// Device level: rectifier feedforward from the steady state of the reference
//   model plus PI feedback on the DC capacitor voltage.
// ESS: first-order filter on the zone load; the storage supplies the fast part.
//
// Controllers are discrete-time maps advanced once per control period.
// =============================================================================

#include <cstddef>
#include <span>
#include <vector>

namespace mgsim {

struct DroopConfig {
    double v_d_ref = 12e3;  // open-circuit droop voltage (V)
    double r_d_init = 1.0;  // virtual resistance (Ω)
    double weight = 1.0;    // sharing weight
};

/// PI with output clamping. The integral only advances on steps whose output
/// stays inside [out_min, out_max], so it is frozen while clamped.
struct PiState {
    double kp = 0.0;
    double ki = 0.0;
    double integral = 0.0;  // ∫ e dτ
    double out_min = -1e300;
    double out_max = 1e300;
    bool saturated = false;
};

/// Advances the PI by one period and returns the clamped output
/// `bias + kp·e + ki·∫e`.
double pi_update(PiState& pi, double error, double dt, double bias = 0.0);

enum class EssMode { HighPass, LowPass };

struct EssCompensatorState {
    double omega = 1.0;  // filter rate (1/s)
    double p_lp = 0.0;   // filtered zone load (W)
};

[[nodiscard]] double droop_command(const DroopConfig& cfg, double current, double dv_b) noexcept;

/// Returns the droop curve shift Δv_b from the main-bus error v_b* - v_b.
double secondary_update(PiState& pi, double v_b_star, double v_b, double dt);

/// Firing coefficient that holds `v_c_dc_star` in steady state when the AC
/// side sits at its references. Throws DegenerateReference when the projected
/// AC reference is (numerically) zero.
[[nodiscard]] double rectifier_feedforward(double v_c_dc_star, double i_dc, double R_dc, double v_d_ref,
                                           double v_q_ref, double phi);

/// λ = clamp(λ_ff + PI(v* - v), 0, 1). The PI's limits are overwritten with [0, 1].
double rectifier_control(double lambda_ff, PiState& pi, double v_c_dc_star, double v_c_dc, double dt);

/// Returns the ESS power reference for the current period, then advances the
/// filter with the exact zero-order-hold update. High-pass mode returns
/// P_Load - P_lp; low-pass mode returns P_lp.
double ess_compensator_update(EssCompensatorState& st, double p_load, double dt,
                              EssMode mode = EssMode::HighPass);

/// r_i = r_base / w_i, so steady-state currents split in proportion to the weights.
[[nodiscard]] std::vector<double> design_droop_resistances(std::span<const double> weights, double r_base);

}  // namespace mgsim
