#include "mgsim/schedule.hpp"

#include "mgsim/errors.hpp"

#include <queue>
#include <tuple>

namespace mgsim {

std::size_t SignalGraph::add_signal(std::string name, SignalKind kind) {
    signals.push_back({std::move(name), kind});
    return signals.size() - 1;
}

SignalGraph signal_graph(const Topology& t) {
    SignalGraph g;
    const auto n_nodes = t.nodes().size();
    const auto n_edges = t.edges().size();

    std::vector<std::size_t> node_state(n_nodes), node_input(n_nodes), node_voltage(n_nodes),
        node_inj(n_nodes), node_deriv(n_nodes);
    std::vector<std::size_t> edge_state(n_edges), edge_deriv(n_edges);

    for (std::size_t n = 0; n < n_nodes; ++n) {
        const auto& id = t.nodes()[n].id;
        node_state[n] = g.add_signal("x:" + id, SignalKind::State);
        // load demand for load nodes, held firing coefficient for generators
        node_input[n] = g.add_signal("u:" + id, SignalKind::Input);
        node_voltage[n] = g.add_signal("v:" + id, SignalKind::Algebraic);
        node_inj[n] = g.add_signal("kcl:" + id, SignalKind::Algebraic);
        node_deriv[n] = g.add_signal("dx:" + id, SignalKind::Derivative);
    }
    for (std::size_t e = 0; e < n_edges; ++e) {
        const auto& id = t.edges()[e].id;
        edge_state[e] = g.add_signal("i:" + id, SignalKind::State);
        edge_deriv[e] = g.add_signal("di:" + id, SignalKind::Derivative);
    }

    for (std::size_t n = 0; n < n_nodes; ++n) {
        g.tasks.push_back({{TaskKind::ReadNodeOutput, n}, {node_state[n]}, {node_voltage[n]}});
    }
    for (std::size_t e = 0; e < n_edges; ++e) {
        TaskSpec spec{{TaskKind::EdgeDerivative, e}, {edge_state[e]}, {edge_deriv[e]}};
        if (t.edge_from(e) != kNoIndex) spec.consumes.push_back(node_voltage[t.edge_from(e)]);
        if (t.edge_to(e) != kNoIndex) spec.consumes.push_back(node_voltage[t.edge_to(e)]);
        g.tasks.push_back(std::move(spec));
    }
    for (std::size_t n = 0; n < n_nodes; ++n) {
        TaskSpec spec{{TaskKind::NodeInjection, n}, {}, {node_inj[n]}};
        for (const auto& inc : t.incidence(n)) {
            spec.consumes.push_back(edge_state[inc.edge]);
        }
        g.tasks.push_back(std::move(spec));
    }
    for (std::size_t n = 0; n < n_nodes; ++n) {
        g.tasks.push_back(
            {{TaskKind::NodeDerivative, n}, {node_state[n], node_input[n], node_inj[n]}, {node_deriv[n]}});
    }
    return g;
}

Schedule order_tasks(const SignalGraph& g) {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> producer(g.signals.size(), kNone);
    for (std::size_t k = 0; k < g.tasks.size(); ++k) {
        for (const auto s : g.tasks[k].produces) {
            if (producer[s] != kNone) {
                throw AlgebraicLoopError("signal " + g.signals[s].name + " has more than one producer");
            }
            producer[s] = k;
        }
    }

    std::vector<std::vector<std::size_t>> dependents(g.tasks.size());
    std::vector<std::size_t> pending(g.tasks.size(), 0);
    for (std::size_t k = 0; k < g.tasks.size(); ++k) {
        for (const auto s : g.tasks[k].consumes) {
            if (g.signals[s].kind != SignalKind::Algebraic) {
                continue;
            }
            if (producer[s] == kNone) {
                throw AlgebraicLoopError("algebraic signal " + g.signals[s].name + " has no producer");
            }
            dependents[producer[s]].push_back(k);
            ++pending[k];
        }
    }

    using Key = std::tuple<int, std::size_t, std::size_t>;  // kind, index, task position
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    auto push = [&](std::size_t k) {
        ready.emplace(static_cast<int>(g.tasks[k].task.kind), g.tasks[k].task.index, k);
    };
    for (std::size_t k = 0; k < g.tasks.size(); ++k) {
        if (pending[k] == 0) push(k);
    }

    Schedule schedule;
    schedule.tasks.reserve(g.tasks.size());
    while (!ready.empty()) {
        const auto k = std::get<2>(ready.top());
        ready.pop();
        schedule.tasks.push_back(g.tasks[k].task);
        for (const auto d : dependents[k]) {
            if (--pending[d] == 0) push(d);
        }
    }
    if (schedule.tasks.size() != g.tasks.size()) {
        std::string members;
        for (std::size_t k = 0; k < g.tasks.size(); ++k) {
            if (pending[k] != 0) {
                for (const auto s : g.tasks[k].produces) {
                    members += (members.empty() ? "" : ", ") + g.signals[s].name;
                }
            }
        }
        throw AlgebraicLoopError("algebraic loop among: " + members);
    }
    return schedule;
}

Schedule evaluation_order(const Topology& topology) { return order_tasks(signal_graph(topology)); }

bool is_causal(const SignalGraph& g, const Schedule& schedule) {
    if (schedule.tasks.size() != g.tasks.size()) {
        return false;
    }
    std::vector<bool> available(g.signals.size(), false);
    for (std::size_t s = 0; s < g.signals.size(); ++s) {
        available[s] = g.signals[s].kind == SignalKind::State || g.signals[s].kind == SignalKind::Input;
    }
    std::vector<bool> ran(g.tasks.size(), false);
    for (const auto& task : schedule.tasks) {
        std::size_t k = 0;
        while (k < g.tasks.size() && !(g.tasks[k].task == task)) ++k;
        if (k == g.tasks.size() || ran[k]) {
            return false;
        }
        ran[k] = true;
        for (const auto s : g.tasks[k].consumes) {
            if (!available[s]) return false;
        }
        for (const auto s : g.tasks[k].produces) {
            available[s] = true;
        }
    }
    return true;
}

}  // namespace mgsim
