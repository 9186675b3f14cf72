#pragma once

// Fixed-step explicit integrators shared by the network engine and the
// single-component benchmarks.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace mgsim {

enum class Method { Euler, Rk4 };

[[nodiscard]] std::string_view to_string(Method method) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;

struct SolverConfig {
    double dt = 10e-6;
    Method method = Method::Rk4;
    double t_end = 0.0;
    std::size_t record_decimation = 100;
};

/// Scratch buffers for one integrator step, reused across steps.
struct StepBuffers {
    std::vector<double> k1, k2, k3, k4, tmp;

    void resize(std::size_t n) {
        for (auto* v : {&k1, &k2, &k3, &k4, &tmp}) v->assign(n, 0.0);
    }
};

/// Advances x in place by one step of `method`. `f(t, x, dx)` writes the
/// derivative of x at t into dx.
template <class Rhs>
void integrate_step(Method method, Rhs&& f, std::vector<double>& x, double t, double dt, StepBuffers& b) {
    const std::size_t n = x.size();
    if (b.k1.size() != n) b.resize(n);
    if (method == Method::Euler) {
        f(t, x, b.k1);
        for (std::size_t i = 0; i < n; ++i) x[i] += dt * b.k1[i];
        return;
    }
    const double h2 = 0.5 * dt;
    f(t, x, b.k1);
    for (std::size_t i = 0; i < n; ++i) b.tmp[i] = x[i] + h2 * b.k1[i];
    f(t + h2, b.tmp, b.k2);
    for (std::size_t i = 0; i < n; ++i) b.tmp[i] = x[i] + h2 * b.k2[i];
    f(t + h2, b.tmp, b.k3);
    for (std::size_t i = 0; i < n; ++i) b.tmp[i] = x[i] + dt * b.k3[i];
    f(t + dt, b.tmp, b.k4);
    const double h6 = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] += h6 * (b.k1[i] + 2.0 * b.k2[i] + 2.0 * b.k3[i] + b.k4[i]);
    }
}

/// Integrates `steps` steps from t0; the step count fixes the end time exactly.
template <class Rhs>
std::vector<double> integrate_fixed(Method method, Rhs&& f, std::vector<double> x, double t0, double dt,
                                    std::size_t steps) {
    StepBuffers b;
    for (std::size_t k = 0; k < steps; ++k) {
        integrate_step(method, f, x, t0 + static_cast<double>(k) * dt, dt, b);
    }
    return x;
}

}  // namespace mgsim
