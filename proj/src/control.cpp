#include "mgsim/control.hpp"

#include "mgsim/components.hpp"
#include "mgsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgsim {

double pi_update(PiState& pi, double error, double dt, double bias) {
    const double candidate = pi.integral + error * dt;
    const double u = bias + pi.kp * error + pi.ki * candidate;
    if (u >= pi.out_min && u <= pi.out_max) {
        pi.integral = candidate;
        pi.saturated = false;
        return u;
    }
    pi.saturated = true;
    return std::clamp(bias + pi.kp * error + pi.ki * pi.integral, pi.out_min, pi.out_max);
}

double droop_command(const DroopConfig& cfg, double current, double dv_b) noexcept {
    return cfg.v_d_ref - cfg.r_d_init * current + dv_b;
}

double secondary_update(PiState& pi, double v_b_star, double v_b, double dt) {
    return pi_update(pi, v_b_star - v_b, dt);
}

double rectifier_feedforward(double v_c_dc_star, double i_dc, double R_dc, double v_d_ref, double v_q_ref,
                             double phi) {
    const double projected = v_d_ref * std::cos(phi) + v_q_ref * std::sin(phi);
    if (std::abs(projected) < 1e-9) {
        throw DegenerateReference("AC reference projects to zero on the rectifier axis");
    }
    return (R_dc * i_dc + v_c_dc_star) / (kRectifierVoltageGain * projected);
}

double rectifier_control(double lambda_ff, PiState& pi, double v_c_dc_star, double v_c_dc, double dt) {
    pi.out_min = 0.0;
    pi.out_max = 1.0;
    return pi_update(pi, v_c_dc_star - v_c_dc, dt, lambda_ff);
}

double ess_compensator_update(EssCompensatorState& st, double p_load, double dt, EssMode mode) {
    const double out = mode == EssMode::HighPass ? p_load - st.p_lp : st.p_lp;
    st.p_lp += (p_load - st.p_lp) * -std::expm1(-st.omega * dt);
    return out;
}

std::vector<double> design_droop_resistances(std::span<const double> weights, double r_base) {
    std::vector<double> r;
    r.reserve(weights.size());
    for (const double w : weights) {
        if (!(w > 0.0)) {
            throw std::invalid_argument("droop weights must be positive");
        }
        r.push_back(r_base / w);
    }
    return r;
}

}  // namespace mgsim
