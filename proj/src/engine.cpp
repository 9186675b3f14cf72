#include "mgsim/engine.hpp"

#include "mgsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mgsim {

std::string_view to_string(Method method) noexcept { return method == Method::Euler ? "euler" : "rk4"; }

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "euler") return Method::Euler;
    if (name == "rk4") return Method::Rk4;
    return std::nullopt;
}

namespace {

constexpr std::size_t kPgmStates = 6;
constexpr std::size_t kPcmStates = 3;

PgmState read_pgm(std::span<const double> x, std::size_t o) {
    return {x[o], x[o + 1], x[o + 2], x[o + 3], x[o + 4], x[o + 5]};
}

}  // namespace

Engine::Engine(Scenario scenario) : scenario_(std::move(scenario)) {
    const auto& topo = scenario_.topology;
    if (const auto report = validate(topo); !report.ok()) {
        throw SemanticError(report.findings.front().message);
    }
    schedule_ = evaluation_order(topo);

    std::size_t offset = 0;
    for (std::size_t n = 0; n < topo.nodes().size(); ++n) {
        const auto& node = topo.nodes()[n];
        NodeSlot slot{node.kind, offset, offset, 0, nullptr};
        switch (node.kind) {
            case NodeKind::Pgm:
                slot.sub = pgm_nodes_.size();
                slot.voltage = offset + 5;
                pgm_nodes_.push_back(n);
                for (const char* v : {"i_dL", "i_qL", "v_d", "v_q", "i_dc", "v_c_dc"}) slots_.push_back({node.id, v});
                offset += kPgmStates;
                break;
            case NodeKind::Pcm:
                slot.sub = pcm_nodes_.size();
                pcm_nodes_.push_back(n);
                for (const char* v : {"v_c_L", "i_ess", "q_used"}) slots_.push_back({node.id, v});
                offset += kPcmStates;
                break;
            case NodeKind::Pmm:
                slots_.push_back({node.id, "v_c_L"});
                offset += 1;
                break;
        }
        if (node.kind != NodeKind::Pgm) {
            slot.profile = &scenario_.profile_for(node.id);
        }
        nodes_.push_back(slot);
    }
    for (const auto& edge : topo.edges()) {
        edge_offset_.push_back(offset++);
        slots_.push_back({edge.id, "i"});
    }

    droop_ = scenario_.droop_configs();
    for (const auto n : pgm_nodes_) {
        const auto& p = std::get<PgmParams>(topo.nodes()[n].params);
        // fails early on a degenerate AC reference
        (void)rectifier_feedforward(scenario_.control.v_bus_ref, 0.0, p.R_dc, p.d_reference(), p.q_reference(), p.phi);
    }
    main_bus_ = topo.node_index(scenario_.control.main_bus);
    if (main_bus_ == kNoIndex) {
        throw SemanticError("main_bus " + scenario_.control.main_bus + " is not a node");
    }
}

SystemState Engine::initial_state() const {
    const auto& topo = scenario_.topology;
    const auto& ctl = scenario_.control;
    SystemState s;
    s.x.assign(slots_.size(), 0.0);

    auto& c = s.control;
    c.secondary = {ctl.kp_v, ctl.ki_v, 0.0, -ctl.dv_max, ctl.dv_max, false};
    c.rectifier.assign(pgm_nodes_.size(), PiState{ctl.kp, ctl.ki, 0.0, 0.0, 1.0, false});
    c.lambda.assign(pgm_nodes_.size(), 0.0);
    c.compensators.assign(pcm_nodes_.size(), EssCompensatorState{scenario_.ess.omega, 0.0});
    c.i_ess_ref.assign(pcm_nodes_.size(), 0.0);

    if (scenario_.init == InitMode::Cold) {
        return s;
    }

    const double v0 = ctl.v_bus_ref;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const auto& slot = nodes_[n];
        if (slot.kind != NodeKind::Pgm) {
            s.x[slot.voltage] = v0;
            if (slot.kind == NodeKind::Pcm) {
                c.compensators[slot.sub].p_lp = profile_eval(*slot.profile, 0.0);
            }
            continue;
        }
        const auto& p = std::get<PgmParams>(topo.nodes()[n].params);
        const auto op = pgm_steady_state(p, v0, 0.0);
        const double st[kPgmStates] = {op.state.i_dL, op.state.i_qL, op.state.v_d,
                                       op.state.v_q,  op.state.i_dc, op.state.v_c_dc};
        std::copy(std::begin(st), std::end(st), s.x.begin() + static_cast<std::ptrdiff_t>(slot.offset));

        // Seed the PI integral so the held λ reproduces the operating point.
        const double lambda = std::clamp(op.lambda, 0.0, 1.0);
        const auto& droop = droop_[slot.sub];
        const double v_star = droop_command(droop, op.state.i_dc, 0.0);
        const double ff = rectifier_feedforward(v_star, op.state.i_dc, p.R_dc, p.d_reference(), p.q_reference(), p.phi);
        auto& pi = c.rectifier[slot.sub];
        if (pi.ki != 0.0) {
            pi.integral = (lambda - ff - pi.kp * (v_star - op.state.v_c_dc)) / pi.ki;
        }
        c.lambda[slot.sub] = lambda;
    }
    return s;
}

void Engine::update_controls(SystemState& s, double period) const {
    const auto& topo = scenario_.topology;
    const auto& ctl = scenario_.control;
    auto& c = s.control;

    const double v_main = s.x[nodes_[main_bus_].voltage];
    c.dv_b = secondary_update(c.secondary, ctl.v_bus_ref, v_main, period);

    for (std::size_t k = 0; k < pgm_nodes_.size(); ++k) {
        const auto n = pgm_nodes_[k];
        const auto& p = std::get<PgmParams>(topo.nodes()[n].params);
        const auto o = nodes_[n].offset;
        const double i_dc = s.x[o + 4];
        const double v_c = s.x[o + 5];
        const double v_star = droop_command(droop_[k], i_dc, c.dv_b);
        const double ff = rectifier_feedforward(v_star, i_dc, p.R_dc, p.d_reference(), p.q_reference(), p.phi);
        c.lambda[k] = rectifier_control(ff, c.rectifier[k], v_star, v_c, period);
    }

    for (std::size_t j = 0; j < pcm_nodes_.size(); ++j) {
        const auto n = pcm_nodes_[j];
        const auto& slot = nodes_[n];
        const auto& load = topo.nodes()[n].load();
        const double p_load = profile_eval(*slot.profile, s.t);
        const double p_ref = ess_compensator_update(c.compensators[j], p_load, period, scenario_.ess.mode);
        const double v_b = std::max(s.x[slot.voltage], load.v_floor);
        c.i_ess_ref[j] = p_ref / v_b;
    }
}

void Engine::derivatives(double t, std::span<const double> x, const ControllerState& control, std::span<double> dx,
                         EngineWorkspace& ws) const {
    const auto& topo = scenario_.topology;
    ws.node_voltage.resize(nodes_.size());
    ws.injection.resize(nodes_.size());

    for (const auto& task : schedule_.tasks) {
        const auto i = task.index;
        switch (task.kind) {
            case TaskKind::ReadNodeOutput:
                ws.node_voltage[i] = x[nodes_[i].voltage];
                break;
            case TaskKind::EdgeDerivative: {
                const auto& e = topo.edges()[i];
                const auto o = edge_offset_[i];
                dx[o] = line_derivative({x[o]}, ws.node_voltage[topo.edge_from(i)], ws.node_voltage[topo.edge_to(i)],
                                        e.R_line, e.L_line);
                break;
            }
            case TaskKind::NodeInjection: {
                double sum = 0.0;
                for (const auto& inc : topo.incidence(i)) {
                    sum -= inc.sign * x[edge_offset_[inc.edge]];
                }
                ws.injection[i] = sum;
                break;
            }
            case TaskKind::NodeDerivative: {
                const auto& slot = nodes_[i];
                const auto o = slot.offset;
                const auto& node = topo.nodes()[i];
                if (slot.kind == NodeKind::Pgm) {
                    const auto d = pgm_derivatives(read_pgm(x, o), std::get<PgmParams>(node.params),
                                                   control.lambda[slot.sub], -ws.injection[i]);
                    dx[o] = d.i_dL;
                    dx[o + 1] = d.i_qL;
                    dx[o + 2] = d.v_d;
                    dx[o + 3] = d.v_q;
                    dx[o + 4] = d.i_dc;
                    dx[o + 5] = d.v_c_dc;
                    break;
                }
                const double p_load = profile_eval(*slot.profile, t);
                const LoadState load_state{x[o]};
                if (slot.kind == NodeKind::Pmm) {
                    dx[o] = load_derivative(load_state, std::get<LoadParams>(node.params), p_load, ws.injection[i]);
                    break;
                }
                const auto& pcm = std::get<PcmParams>(node.params);
                const EssState ess{x[o + 1], x[o + 2]};
                const double i_out = ess_output_current(ess, pcm.ess);
                const double v_b = std::max(x[o], pcm.load.v_floor);
                dx[o] = load_derivative(load_state, pcm.load, p_load, ws.injection[i] + i_out);
                dx[o + 1] = ess_derivative(ess, pcm.ess, control.i_ess_ref[slot.sub], v_b);
                dx[o + 2] = i_out;
                break;
            }
        }
    }
}

void Engine::check_finite(const SystemState& s) const {
    const double limit = scenario_.state_limit;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || std::abs(s.x[i]) > limit) {
            throw NumericalDivergence(slots_[i].component, slots_[i].variable, s.t, s.x[i]);
        }
    }
    if (!std::isfinite(s.control.dv_b)) {
        throw NumericalDivergence("secondary", "dv_b", s.t, s.control.dv_b);
    }
}

void Engine::advance(SystemState& s, double dt, EngineWorkspace& ws) const {
    const double period = scenario_.control.control_period > 0.0 ? scenario_.control.control_period : dt;
    if (!s.control.started || s.t + 0.5 * dt >= s.control.next_update) {
        update_controls(s, period);
        s.control.next_update = (s.control.started ? s.control.next_update : s.t) + period;
        s.control.started = true;
    }
    const auto& control = s.control;
    auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
        derivatives(t, x, control, dx, ws);
    };
    integrate_step(scenario_.solver.method, rhs, s.x, s.t, dt, ws.buffers);
    ++s.steps;
    s.t = static_cast<double>(s.steps) * dt;
    check_finite(s);
}

SystemState Engine::step(const SystemState& state, double dt) const {
    SystemState next = state;
    EngineWorkspace ws;
    advance(next, dt, ws);
    return next;
}

std::vector<std::string> Engine::column_names() const {
    const auto& topo = scenario_.topology;
    std::vector<std::string> names{"t_s"};
    for (const auto& n : topo.nodes()) names.push_back("v_" + n.id);
    for (const auto& e : topo.edges()) names.push_back("i_" + e.id);
    for (const auto n : pgm_nodes_) names.push_back("ig_" + topo.nodes()[n].id);
    for (const auto n : pcm_nodes_) names.push_back("p_ess_" + topo.nodes()[n].id);
    for (const auto n : pcm_nodes_) names.push_back("soc_" + topo.nodes()[n].id);
    for (const auto n : pgm_nodes_) names.push_back("lambda_" + topo.nodes()[n].id);
    names.emplace_back("dv_sec");
    return names;
}

void Engine::record(const SystemState& s, TimeSeries& out) const {
    const auto& topo = scenario_.topology;
    if (out.names.empty()) {
        out.names = column_names();
        out.columns.assign(out.names.size(), {});
    }
    std::vector<double> row;
    row.reserve(out.names.size());
    row.push_back(s.t);
    for (const auto& slot : nodes_) row.push_back(s.x[slot.voltage]);
    std::vector<double> currents;
    for (const auto o : edge_offset_) currents.push_back(s.x[o]);
    row.insert(row.end(), currents.begin(), currents.end());
    for (const auto n : pgm_nodes_) row.push_back(-net_inflow(topo, n, currents));
    for (const auto n : pcm_nodes_) {
        const auto& pcm = std::get<PcmParams>(topo.nodes()[n].params);
        const auto o = nodes_[n].offset;
        row.push_back(s.x[o] * ess_output_current({s.x[o + 1], s.x[o + 2]}, pcm.ess));
    }
    for (const auto n : pcm_nodes_) {
        const auto& pcm = std::get<PcmParams>(topo.nodes()[n].params);
        const auto o = nodes_[n].offset;
        row.push_back(soc({s.x[o + 1], s.x[o + 2]}, pcm.ess));
    }
    for (std::size_t k = 0; k < pgm_nodes_.size(); ++k) row.push_back(s.control.lambda[k]);
    row.push_back(s.control.dv_b);
    out.append_row(row);
}

RunResult Engine::run() const {
    const auto& cfg = scenario_.solver;
    const auto steps = static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
    const auto decimation = std::max<std::size_t>(1, cfg.record_decimation);

    RunResult result;
    SystemState state = initial_state();
    EngineWorkspace ws;
    ws.buffers.resize(state.x.size());
    const auto expected_rows = steps / decimation + 1;
    result.series.names = column_names();
    result.series.columns.assign(result.series.names.size(), {});
    for (auto& col : result.series.columns) col.reserve(expected_rows);

    record(state, result.series);
    try {
        while (state.steps < steps) {
            advance(state, cfg.dt, ws);
            if (state.steps % decimation == 0) {
                record(state, result.series);
            }
        }
    } catch (const NumericalDivergence& e) {
        result.divergence = e;
    }
    return result;
}

TimeSeries Engine::simulate() const {
    auto result = run();
    if (result.divergence) {
        throw *result.divergence;
    }
    return std::move(result.series);
}

TimeSeries simulate(const Scenario& scenario) { return Engine(scenario).simulate(); }

}  // namespace mgsim
