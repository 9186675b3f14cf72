#include "mgsim/components.hpp"
#include "mgsim/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace mgsim;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("components") {

TEST_CASE("rectifier gains") {
    CHECK(kRectifierVoltageGain == doctest::Approx(1.6539867));
    CHECK(kRectifierCurrentGain == doctest::Approx(1.1026578));
    const auto out = rectifier_map(1.0, 0.0, 7620.0, 0.0, 100.0);
    CHECK(out.v_dc == doctest::Approx(1.6539867 * 7620.0));
    CHECK(out.i_d == doctest::Approx(110.26578));
    CHECK(out.i_q == 0.0);
}

TEST_CASE("rectifier conserves power") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> lam(0.0, 1.0), ang(-3.14159, 3.14159), v(-1e4, 1e4), i(-1e3, 1e3);
    for (int k = 0; k < 10000; ++k) {
        const double l = lam(rng), phi = ang(rng), vd = v(rng), vq = v(rng), idc = i(rng);
        const auto r = rectifier_map(l, phi, vd, vq, idc);
        const double ac = 1.5 * (vd * r.i_d + vq * r.i_q);
        const double dc = r.v_dc * idc;
        const double scale = 1.5 * (std::abs(vd * r.i_d) + std::abs(vq * r.i_q)) + std::abs(dc);
        REQUIRE(std::abs(ac - dc) <= 16 * std::numeric_limits<double>::epsilon() * scale);
    }
}

TEST_CASE("PGM steady state is an equilibrium of the dynamics") {
    PgmParams p;
    for (const double i_out : {0.0, 50.0, 300.0, 600.0}) {
        for (const double phi : {0.0, 0.2}) {
            p.phi = phi;
            p.v_qs = phi > 0 ? 500.0 : 0.0;
            const auto op = pgm_steady_state(p, 12e3, i_out);
            CHECK(op.lambda > 0.0);
            CHECK(op.lambda < 1.0);
            const auto d = pgm_derivatives(op.state, p, op.lambda, i_out);
            // each derivative relative to the size of the terms feeding it
            CHECK(std::abs(d.i_dL) * p.L <= 1e-9 * p.v_ds);
            CHECK(std::abs(d.i_qL) * p.L <= 1e-9 * p.v_ds);
            CHECK(std::abs(d.v_d) * p.C <= 1e-9 * (std::abs(op.state.i_dL) + 1.0));
            CHECK(std::abs(d.v_q) * p.C <= 1e-9 * (std::abs(op.state.i_qL) + 1.0));
            CHECK(std::abs(d.i_dc) * p.L_dc <= 1e-9 * 12e3);
            CHECK(std::abs(d.v_c_dc) * p.C_dc <= 1e-9 * (i_out + 1.0));
        }
    }
}

TEST_CASE("PGM steady state agrees with Newton on the derivatives") {
    // Independent solve: Newton with a finite-difference Jacobian on the six
    // PGM derivatives plus the output voltage condition, unknowns (x, λ).
    PgmParams p;
    const double v_out = 12e3, i_out = 250.0;
    std::vector<double> z{0, 500, 7600, 0, i_out, v_out, 0.95};
    auto residual = [&](const std::vector<double>& u) {
        const PgmState s{u[0], u[1], u[2], u[3], u[4], u[5]};
        const auto d = pgm_derivatives(s, p, u[6], i_out);
        return std::vector<double>{d.i_dL * p.L, d.i_qL * p.L, d.v_d * p.C, d.v_q * p.C,
                                   d.i_dc * p.L_dc, d.v_c_dc * p.C_dc, u[5] - v_out};
    };
    for (int it = 0; it < 30; ++it) {
        const auto r = residual(z);
        std::vector<std::vector<double>> J(7, std::vector<double>(8));
        for (int j = 0; j < 7; ++j) {
            auto zp = z;
            const double h = 1e-6 * std::max(1.0, std::abs(z[j]));
            zp[j] += h;
            const auto rp = residual(zp);
            for (int i = 0; i < 7; ++i) J[i][j] = (rp[i] - r[i]) / h;
        }
        for (int i = 0; i < 7; ++i) J[i][7] = -r[i];
        for (int c = 0; c < 7; ++c) {  // Gaussian elimination with partial pivoting
            int piv = c;
            for (int i = c + 1; i < 7; ++i) if (std::abs(J[i][c]) > std::abs(J[piv][c])) piv = i;
            std::swap(J[c], J[piv]);
            for (int i = c + 1; i < 7; ++i) {
                const double f = J[i][c] / J[c][c];
                for (int k = c; k < 8; ++k) J[i][k] -= f * J[c][k];
            }
        }
        std::vector<double> dz(7);
        for (int i = 6; i >= 0; --i) {
            double s = J[i][7];
            for (int k = i + 1; k < 7; ++k) s -= J[i][k] * dz[k];
            dz[i] = s / J[i][i];
        }
        for (int i = 0; i < 7; ++i) z[i] += dz[i];
    }
    const auto op = pgm_steady_state(p, v_out, i_out);
    CHECK(rel(op.lambda, z[6]) < 1e-6);
    CHECK(rel(op.state.i_dL, z[0]) < 1e-6);
    CHECK(rel(op.state.v_d, z[2]) < 1e-6);
    CHECK(rel(op.state.i_dc, z[4]) < 1e-9);
}

TEST_CASE("PGM steady state beyond the source capability") {
    PgmParams p;
    const auto op = pgm_steady_state(p, 14e3, 0.0);
    CHECK(op.lambda > 1.0);  // reported, not clamped
    p.v_ds = 0.0;
    CHECK_THROWS_AS((void)pgm_steady_state(p, 12e3, 10.0), DegenerateReference);
}

TEST_CASE("line") {
    CHECK(line_derivative({0.0}, 100.0, 0.0, 0.01, 30e-6) == doctest::Approx(100.0 / 30e-6));
    CHECK(line_derivative({1e4}, 100.0, 0.0, 0.01, 30e-6) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(line_derivative({-5.0}, 0.0, 0.0, 0.01, 30e-6) > 0.0);
}

TEST_CASE("SOC coulomb counting") {
    EssParams p;
    p.Q_T = 10.0;
    p.Q_0 = 10.0;
    CHECK(soc({0.0, 0.0}, p) == 1.0);
    CHECK(soc({0.0, 36000.0}, p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(soc({0.0, 18000.0}, p) == doctest::Approx(0.5));
    // charging raises it
    CHECK(soc({0.0, -3600.0}, p) > 1.0);
}

TEST_CASE("SOC is monotone in the processed charge") {
    EssParams p;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> q(-2e4, 2e4), dq(0.0, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double a = q(rng);
        const double b = a + dq(rng);
        CHECK(soc({0.0, b}, p) <= soc({0.0, a}, p));
    }
}

TEST_CASE("SOC from power matches coulomb counting at constant voltage") {
    EssParams p;
    const double v = 12e3, q = 7200.0;
    CHECK(soc_from_power(p, v, v * q) == doctest::Approx(soc({0.0, q}, p)).epsilon(1e-12));
}

TEST_CASE("ESS reference saturation") {
    EssParams p;  // ±2 MW window, half charged
    const double v = 12e3;
    CHECK(saturate_ess_reference({0, 0}, p, 100.0, v) == 100.0);
    CHECK(saturate_ess_reference({0, 0}, p, 1e4, v) == doctest::Approx(p.P_max / v));
    CHECK(saturate_ess_reference({0, 0}, p, -1e4, v) == doctest::Approx(p.P_min / v));
    const EssState empty{0.0, p.Q_0 * 3600.0 + 1e-3};
    CHECK(saturate_ess_reference(empty, p, 100.0, v) == 0.0);   // cannot discharge further
    CHECK(saturate_ess_reference({0.0, p.Q_0 * 3600.0}, p, 100.0, v) == 100.0);  // exactly empty still discharges
    CHECK(saturate_ess_reference(empty, p, -100.0, v) == -100.0);
    const EssState full{0.0, (p.Q_0 - p.Q_T) * 3600.0 - 1e-3};
    CHECK(saturate_ess_reference(full, p, -100.0, v) == 0.0);
    CHECK(saturate_ess_reference(full, p, 100.0, v) == 100.0);
}

TEST_CASE("ESS output stops at a SOC bound") {
    EssParams p;
    const EssState empty{50.0, p.Q_0 * 3600.0 + 1e-3};
    CHECK(ess_output_current(empty, p) == 0.0);
    CHECK(ess_output_current({-50.0, p.Q_0 * 3600.0 + 1e-3}, p) == -50.0);
    CHECK(ess_output_current({50.0, 0.0}, p) == 50.0);
}

TEST_CASE("ESS tracks its reference at omega_ess") {
    EssParams p;
    CHECK(ess_derivative({0.0, 0.0}, p, 10.0, 12e3) == doctest::Approx(p.omega_ess * 10.0));
    CHECK(ess_derivative({10.0, 0.0}, p, 10.0, 12e3) == 0.0);
}

TEST_CASE("constant-power load") {
    LoadParams p;
    const double v = 12e3, P = 1e6;
    const double i_eq = P / v + v / p.R_L;
    CHECK(load_derivative({v}, p, P, i_eq) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(load_derivative({v}, p, P, i_eq + 1.0) == doctest::Approx(1.0 / p.C_L));
    // collapse stays finite thanks to the voltage floor
    const double d0 = load_derivative({0.0}, p, P, 0.0);
    CHECK(std::isfinite(d0));
    CHECK(d0 == doctest::Approx(-P / p.v_floor / p.C_L));
    CHECK(default_pmm_params().C_L == doctest::Approx(1e-3));
}

}  // TEST_SUITE
