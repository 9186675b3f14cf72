#include "mgsim/components.hpp"

#include "mgsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mgsim {

RectifierOutput rectifier_map(double lambda, double phi, double v_d, double v_q, double i_dc) noexcept {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    RectifierOutput out;
    out.v_dc = kRectifierVoltageGain * lambda * (v_d * c + v_q * s);
    out.i_d = lambda * kRectifierCurrentGain * c * i_dc;
    out.i_q = lambda * kRectifierCurrentGain * s * i_dc;
    return out;
}

PgmState pgm_derivatives(const PgmState& x, const PgmParams& p, double lambda, double i_g_in) noexcept {
    const double w = p.omega();
    const auto rect = rectifier_map(lambda, p.phi, x.v_d, x.v_q, x.i_dc);
    PgmState dx;
    dx.i_dL = (p.v_ds + w * p.L * x.i_qL - p.R * x.i_dL - x.v_d) / p.L;
    dx.i_qL = (p.v_qs - w * p.L * x.i_dL - p.R * x.i_qL - x.v_q) / p.L;
    dx.v_d = (x.i_dL + w * p.C * x.v_q - rect.i_d) / p.C;
    dx.v_q = (x.i_qL - w * p.C * x.v_d - rect.i_q) / p.C;
    dx.i_dc = (rect.v_dc - p.R_dc * x.i_dc - x.v_c_dc) / p.L_dc;
    dx.v_c_dc = (x.i_dc - x.v_c_dc / p.R_d - i_g_in) / p.C_dc;
    return dx;
}

namespace {

struct AcSolution {
    double v_d;
    double v_q;
};

// AC-side steady state for a given rectifier current draw (i_d, i_q).
AcSolution solve_ac(const PgmParams& p, double i_d, double i_q) {
    const double w = p.omega();
    const double a = 1.0 - w * w * p.L * p.C;
    const double b = p.R * w * p.C;
    // [ a  -b ] [v_d]   [rd]
    // [ b   a ] [v_q] = [rq]
    const double rd = p.v_ds + w * p.L * i_q - p.R * i_d;
    const double rq = p.v_qs - w * p.L * i_d - p.R * i_q;
    const double det = a * a + b * b;
    if (det == 0.0) {
        throw DegenerateReference("AC filter resonates at the supply frequency");
    }
    return {(a * rd + b * rq) / det, (a * rq - b * rd) / det};
}

}  // namespace

PgmOperatingPoint pgm_steady_state(const PgmParams& p, double v_out, double i_out) {
    const double i_dc = i_out + v_out / p.R_d;
    const double v_dc_needed = p.R_dc * i_dc + v_out;
    const double c = std::cos(p.phi);
    const double s = std::sin(p.phi);

    // v_d, v_q are affine in λ (the rectifier draw scales with λ), so the DC
    // balance K·λ·(v_d c + v_q s) = v_dc_needed is a quadratic in λ.
    const auto ac0 = solve_ac(p, 0.0, 0.0);
    const auto ac1 = solve_ac(p, kRectifierCurrentGain * c * i_dc, kRectifierCurrentGain * s * i_dc);
    const double proj0 = ac0.v_d * c + ac0.v_q * s;
    const double slope = (ac1.v_d * c + ac1.v_q * s) - proj0;

    const double qa = kRectifierVoltageGain * slope;
    const double qb = kRectifierVoltageGain * proj0;
    const double qc = -v_dc_needed;
    double lambda = 0.0;
    if (std::abs(qa) < 1e-300) {
        if (qb == 0.0) {
            throw DegenerateReference("AC side delivers no voltage along the rectifier axis");
        }
        lambda = -qc / qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) {
            throw DegenerateReference("requested DC operating point exceeds the AC source capability");
        }
        // Root on the branch continuous with the unloaded solution (-qc/qb).
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        lambda = qc / q;
    }

    const auto rect_i_d = lambda * kRectifierCurrentGain * c * i_dc;
    const auto rect_i_q = lambda * kRectifierCurrentGain * s * i_dc;
    const auto ac = solve_ac(p, rect_i_d, rect_i_q);
    const double w = p.omega();

    PgmOperatingPoint op;
    op.lambda = lambda;
    op.state.v_d = ac.v_d;
    op.state.v_q = ac.v_q;
    op.state.i_dL = rect_i_d - w * p.C * ac.v_q;
    op.state.i_qL = rect_i_q + w * p.C * ac.v_d;
    op.state.i_dc = i_dc;
    op.state.v_c_dc = v_out;
    return op;
}

double line_derivative(const LineState& state, double v_in, double v_out, double R_line,
                       double L_line) noexcept {
    return (v_in - v_out - R_line * state.i) / L_line;
}

double soc(const EssState& state, const EssParams& params) noexcept {
    return (params.Q_0 - state.q_used / 3600.0) / params.Q_T;
}

double soc_from_power(const EssParams& params, double v_b, double energy_ws) noexcept {
    return (params.Q_0 * v_b - energy_ws / 3600.0) / (params.Q_T * v_b);
}

double saturate_ess_reference(const EssState& state, const EssParams& params, double i_ref,
                              double v_b) noexcept {
    if (v_b > 0.0) {
        i_ref = std::clamp(i_ref, params.P_min / v_b, params.P_max / v_b);
    }
    const double level = soc(state, params);
    if (level < 0.0 && i_ref > 0.0) {
        return 0.0;
    }
    if (level > 1.0 && i_ref < 0.0) {
        return 0.0;
    }
    return i_ref;
}

double ess_output_current(const EssState& state, const EssParams& params) noexcept {
    const double level = soc(state, params);
    if ((level < 0.0 && state.i_ess > 0.0) || (level > 1.0 && state.i_ess < 0.0)) {
        return 0.0;
    }
    return state.i_ess;
}

double ess_derivative(const EssState& state, const EssParams& params, double i_ref, double v_b) noexcept {
    const double target = saturate_ess_reference(state, params, i_ref, v_b);
    return params.omega_ess * (target - state.i_ess);
}

double load_derivative(const LoadState& state, const LoadParams& params, double p_load,
                       double i_in) noexcept {
    const double v_guard = std::max(state.v_c_L, params.v_floor);
    return (-p_load / v_guard - state.v_c_L / params.R_L + i_in) / params.C_L;
}

}  // namespace mgsim
