#include "mgsim/components.hpp"
#include "mgsim/control.hpp"
#include "mgsim/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace mgsim;

TEST_SUITE("control") {

TEST_CASE("droop line") {
    const DroopConfig cfg{12e3, 2.0, 5.0};
    CHECK(droop_command(cfg, 0.0, 0.0) == 12e3);
    CHECK(droop_command(cfg, 100.0, 0.0) == 11800.0);
    CHECK(droop_command(cfg, 100.0, 150.0) == 11950.0);
}

TEST_CASE("droop resistances split current by weight") {
    const std::vector<double> w{5, 3, 2};
    const auto r = design_droop_resistances(w, 10.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(2.0));
    CHECK(r[1] == doctest::Approx(10.0 / 3.0));
    CHECK(r[2] == doctest::Approx(5.0));
    // common output voltage v: i_k = (v_ref - v) / r_k
    const double sag = 300.0;
    const double i0 = sag / r[0], i1 = sag / r[1], i2 = sag / r[2];
    CHECK(i0 / i2 == doctest::Approx(2.5));
    CHECK(i1 / i2 == doctest::Approx(1.5));
    CHECK_THROWS_AS((void)design_droop_resistances(std::vector<double>{1.0, 0.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS((void)design_droop_resistances(std::vector<double>{-1.0}, 10.0), std::invalid_argument);
}

TEST_CASE("PI integrates inside its limits") {
    PiState pi{0.5, 2.0, 0.0, -10.0, 10.0, false};
    const double u1 = pi_update(pi, 1.0, 0.1);
    CHECK(u1 == doctest::Approx(0.5 + 2.0 * 0.1));
    CHECK(pi.integral == doctest::Approx(0.1));
    const double u2 = pi_update(pi, 1.0, 0.1, 3.0);
    CHECK(u2 == doctest::Approx(3.0 + 0.5 + 2.0 * 0.2));
}

TEST_CASE("anti-windup freezes the integral while clamped") {
    PiState pi{1.0, 1.0, 0.0, 0.0, 1.0, false};
    for (int k = 0; k < 1000; ++k) {
        const double u = pi_update(pi, 5.0, 0.01);
        CHECK(u == 1.0);
        CHECK(pi.saturated);
    }
    CHECK(pi.integral == 0.0);
    // integrates again once the output is back inside
    const double u = pi_update(pi, 0.5, 0.01);
    CHECK(u == doctest::Approx(0.505));
    CHECK(pi.integral == doctest::Approx(0.005));
    CHECK_FALSE(pi.saturated);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> e(-10, 10);
    PiState q{0.1, 5.0, 0.0, -1.0, 1.0, false};
    for (int k = 0; k < 10000; ++k) {
        const double out = pi_update(q, e(rng), 1e-3);
        CHECK(out >= -1.0);
        CHECK(out <= 1.0);
        CHECK(std::abs(q.ki * q.integral) <= 1.0 + q.kp * 10.0 + 1e-12);
    }
}

TEST_CASE("secondary loop accumulates the bus error") {
    PiState pi{0.05, 2.0, 0.0, -3e3, 3e3, false};
    double dv = 0.0;
    for (int k = 0; k < 100; ++k) dv = secondary_update(pi, 12e3, 11900.0, 1e-3);
    CHECK(pi.integral == doctest::Approx(100.0 * 0.1));
    CHECK(dv == doctest::Approx(0.05 * 100.0 + 2.0 * 10.0));
}

TEST_CASE("rectifier feedforward inverts the steady-state DC balance") {
    const double lam = rectifier_feedforward(12e3, 200.0, 0.01, 7620.0, 0.0, 0.0);
    CHECK(lam == doctest::Approx((0.01 * 200.0 + 12e3) * std::numbers::pi / (3 * std::sqrt(3.0) * 7620.0)));
    // feeding λ back through the rectifier map reproduces v* + R_dc·i_dc
    const auto out = rectifier_map(lam, 0.0, 7620.0, 0.0, 200.0);
    CHECK(out.v_dc == doctest::Approx(12e3 + 2.0));
    const double lam_q = rectifier_feedforward(12e3, 0.0, 0.01, 7000.0, 3000.0, 0.3);
    CHECK(kRectifierVoltageGain * lam_q * (7000.0 * std::cos(0.3) + 3000.0 * std::sin(0.3)) ==
          doctest::Approx(12e3));
    CHECK_THROWS_AS((void)rectifier_feedforward(12e3, 0.0, 0.01, 0.0, 0.0, 0.0), DegenerateReference);
}

TEST_CASE("rectifier command is clamped to [0, 1]") {
    PiState pi{1e-4, 0.05, 0.0, -5, 5, false};
    CHECK(rectifier_control(0.9, pi, 12e3, 12e3, 1e-5) == doctest::Approx(0.9));
    CHECK(pi.out_min == 0.0);
    CHECK(pi.out_max == 1.0);
    CHECK(rectifier_control(0.9, pi, 12e3, 0.0, 1e-5) == 1.0);
    CHECK(rectifier_control(0.1, pi, 0.0, 12e3, 1e-5) == 0.0);
}

TEST_CASE("high-pass compensator step response") {
    EssCompensatorState st{1.0, 1e6};
    const double dt = 1e-3;
    const double dP = 2e5;
    double energy = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double p = ess_compensator_update(st, 1e6 + dP, dt);
        // exact discrete exponential
        CHECK(p == doctest::Approx(dP * std::exp(-1.0 * k * dt)).epsilon(1e-8));
        energy += p * dt;
    }
    // ∫ P_ESS dt = ΔP / ω, up to the rectangle rule
    CHECK(energy == doctest::Approx(dP / 1.0).epsilon(1e-3));
    CHECK(st.p_lp == doctest::Approx(1e6 + dP));
}

TEST_CASE("compensator modes are complementary") {
    EssCompensatorState hp{2.0, 0.0}, lp{2.0, 0.0};
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> load(0, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double P = load(rng);
        const double a = ess_compensator_update(hp, P, 1e-3, EssMode::HighPass);
        const double b = ess_compensator_update(lp, P, 1e-3, EssMode::LowPass);
        CHECK(a + b == doctest::Approx(P));
    }
}

}  // TEST_SUITE
