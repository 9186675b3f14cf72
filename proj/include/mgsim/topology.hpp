#pragma once

// =============================================================================
// Network topology
// =============================================================================
// Nodes are generation or load modules; edges are RL lines. Nodes only ever
// touch edges, never each other, so every coupling between modules passes
// through an inductor current (an edge state) or a capacitor voltage (a node
// state). Positive edge current flows from `from` to `to`.
// =============================================================================

#include "mgsim/components.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace mgsim {

enum class NodeKind { Pgm, Pcm, Pmm };

[[nodiscard]] std::string_view to_string(NodeKind kind) noexcept;

using NodeParams = std::variant<PgmParams, PcmParams, LoadParams>;

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::Pmm;
    NodeParams params = default_pmm_params();

    [[nodiscard]] static NodeSpec make(std::string id, NodeKind kind);

    [[nodiscard]] bool is_generator() const noexcept { return kind == NodeKind::Pgm; }
    [[nodiscard]] const LoadParams& load() const;
    [[nodiscard]] LoadParams& load();

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct EdgeSpec {
    std::string id;
    std::string from_node;
    std::string to_node;
    double R_line = 0.0;
    double L_line = 0.0;

    friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct Incidence {
    std::size_t edge = 0;
    int sign = 0;  // +1 edge leaves the node, -1 edge enters it
};

class Topology {
public:
    Topology() = default;

    /// Indexes ids and incidence. Endpoints that name no node are kept
    /// unresolved (kNoIndex) so validate() can report them.
    Topology(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges);

    [[nodiscard]] const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<EdgeSpec>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::vector<NodeSpec>& mutable_nodes() noexcept { return nodes_; }

    [[nodiscard]] std::size_t node_index(std::string_view id) const noexcept;
    [[nodiscard]] std::size_t edge_index(std::string_view id) const noexcept;
    [[nodiscard]] std::size_t edge_from(std::size_t edge) const noexcept { return edge_from_[edge]; }
    [[nodiscard]] std::size_t edge_to(std::size_t edge) const noexcept { return edge_to_[edge]; }
    [[nodiscard]] std::span<const Incidence> incidence(std::size_t node) const noexcept {
        return incidence_[node];
    }

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    std::vector<NodeSpec> nodes_;
    std::vector<EdgeSpec> edges_;
    std::unordered_map<std::string, std::size_t> node_ids_;
    std::unordered_map<std::string, std::size_t> edge_ids_;
    std::vector<std::size_t> edge_from_;
    std::vector<std::size_t> edge_to_;
    std::vector<std::vector<Incidence>> incidence_;
};

// -----------------------------------------------------------------------------
// Text format
// -----------------------------------------------------------------------------

/// Sets one netlist parameter on a node. Throws SemanticError for keys the
/// node kind does not have.
void apply_node_param(NodeSpec& node, std::string_view key, double value);

/// Parameter keys accepted for a node kind, in serialization order.
[[nodiscard]] std::span<const std::string_view> node_param_keys(NodeKind kind) noexcept;

/// Parses one `node ...` or `edge ...` line into the builders; used by both
/// the netlist and scenario readers. Returns false if the line is neither.
bool parse_topology_line(std::string_view line, std::size_t line_no, std::vector<NodeSpec>& nodes,
                         std::vector<EdgeSpec>& edges);

/// Checks duplicate ids, endpoint existence and line impedances on parsed
/// declarations. Throws SemanticError.
void check_declarations(const std::vector<NodeSpec>& nodes, const std::vector<EdgeSpec>& edges,
                        const std::vector<std::size_t>& edge_lines = {});

[[nodiscard]] Topology parse_netlist(std::string_view text);

/// Writes every parameter explicitly so parse_netlist(serialize(t)) == t.
[[nodiscard]] std::string serialize(const Topology& topology);

// -----------------------------------------------------------------------------
// Validation and KCL
// -----------------------------------------------------------------------------

struct Finding {
    std::string code;     // e.g. "isolated-node", "non-positive-inductance"
    std::string subject;  // node or edge id
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    [[nodiscard]] bool ok() const noexcept { return findings.empty(); }
};

[[nodiscard]] ValidationReport validate(const Topology& topology);

/// Signed edge-current sum at a node. For a generator node it is the current
/// drawn from it (leaving minus entering); for a load node it is the current
/// delivered to it (entering minus leaving). Throws std::out_of_range for an
/// unknown id. `edge_currents` is indexed by edge declaration order.
[[nodiscard]] double node_injection_current(const Topology& topology, std::string_view node_id,
                                            std::span<const double> edge_currents);

/// Entering minus leaving, for any node. Sums to zero over the network.
[[nodiscard]] double net_inflow(const Topology& topology, std::size_t node,
                                std::span<const double> edge_currents) noexcept;

}  // namespace mgsim
