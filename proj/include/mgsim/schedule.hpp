#pragma once

// Causal evaluation order for one derivative evaluation of the network.
//
// Every task consumes signals and produces signals. Signals are tagged by
// producer kind: states and exogenous inputs are available before the
// evaluation starts, algebraic signals must be produced earlier in the same
// evaluation. A cycle among algebraic signals is an algebraic loop.

#include "mgsim/topology.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mgsim {

enum class TaskKind {
    ReadNodeOutput,  // node voltage from the node's capacitor state
    EdgeDerivative,  // line current derivative from terminal voltages
    NodeInjection,   // KCL sum of incident edge currents
    NodeDerivative,  // component derivatives from the KCL sum
};

struct Task {
    TaskKind kind = TaskKind::ReadNodeOutput;
    std::size_t index = 0;  // node or edge index

    friend bool operator==(const Task&, const Task&) = default;
};

struct Schedule {
    std::vector<Task> tasks;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

enum class SignalKind { State, Input, Algebraic, Derivative };

struct Signal {
    std::string name;
    SignalKind kind = SignalKind::State;
};

struct TaskSpec {
    Task task;
    std::vector<std::size_t> consumes;
    std::vector<std::size_t> produces;
};

struct SignalGraph {
    std::vector<Signal> signals;
    std::vector<TaskSpec> tasks;

    std::size_t add_signal(std::string name, SignalKind kind);
};

/// Tasks and signals of one network derivative evaluation.
[[nodiscard]] SignalGraph signal_graph(const Topology& topology);

/// Topological order of the tasks, ties broken by (task kind, declaration
/// index). Throws AlgebraicLoopError on a cycle among algebraic signals or an
/// algebraic signal without exactly one producer.
[[nodiscard]] Schedule order_tasks(const SignalGraph& graph);

[[nodiscard]] Schedule evaluation_order(const Topology& topology);

/// True when, executing `schedule` in order, every consumed signal is a state,
/// an input, or an algebraic signal already produced by an earlier task, and
/// every task of the graph runs exactly once.
[[nodiscard]] bool is_causal(const SignalGraph& graph, const Schedule& schedule);

}  // namespace mgsim
