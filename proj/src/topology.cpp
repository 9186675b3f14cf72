#include "mgsim/topology.hpp"

#include "mgsim/errors.hpp"
#include "mgsim/text.hpp"

#include <array>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mgsim {

std::string_view to_string(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::Pgm: return "pgm";
        case NodeKind::Pcm: return "pcm";
        case NodeKind::Pmm: return "pmm";
    }
    return "?";
}

NodeSpec NodeSpec::make(std::string id, NodeKind kind) {
    NodeSpec n;
    n.id = std::move(id);
    n.kind = kind;
    switch (kind) {
        case NodeKind::Pgm: n.params = PgmParams{}; break;
        case NodeKind::Pcm: n.params = PcmParams{}; break;
        case NodeKind::Pmm: n.params = default_pmm_params(); break;
    }
    return n;
}

const LoadParams& NodeSpec::load() const {
    if (const auto* pcm = std::get_if<PcmParams>(&params)) {
        return pcm->load;
    }
    return std::get<LoadParams>(params);
}

LoadParams& NodeSpec::load() {
    if (auto* pcm = std::get_if<PcmParams>(&params)) {
        return pcm->load;
    }
    return std::get<LoadParams>(params);
}

Topology::Topology(std::vector<NodeSpec> nodes, std::vector<EdgeSpec> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        node_ids_.emplace(nodes_[i].id, i);
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        edge_ids_.emplace(edges_[i].id, i);
    }
    incidence_.resize(nodes_.size());
    edge_from_.resize(edges_.size(), kNoIndex);
    edge_to_.resize(edges_.size(), kNoIndex);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        edge_from_[e] = node_index(edges_[e].from_node);
        edge_to_[e] = node_index(edges_[e].to_node);
        if (edge_from_[e] != kNoIndex) {
            incidence_[edge_from_[e]].push_back({e, +1});
        }
        if (edge_to_[e] != kNoIndex) {
            incidence_[edge_to_[e]].push_back({e, -1});
        }
    }
}

std::size_t Topology::node_index(std::string_view id) const noexcept {
    const auto it = node_ids_.find(std::string(id));
    return it == node_ids_.end() ? kNoIndex : it->second;
}

std::size_t Topology::edge_index(std::string_view id) const noexcept {
    const auto it = edge_ids_.find(std::string(id));
    return it == edge_ids_.end() ? kNoIndex : it->second;
}

// -----------------------------------------------------------------------------
// Parameters
// -----------------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 13> kPgmKeys = {
    "L", "R", "C", "f", "L_dc", "R_dc", "C_dc", "R_d", "phi", "v_ds", "v_qs", "v_d_ref", "v_q_ref"};
constexpr std::array<std::string_view, 8> kPcmKeys = {"C_L", "R_L", "v_floor", "omega_ess",
                                                      "Q_T", "Q_0", "P_min", "P_max"};
constexpr std::array<std::string_view, 3> kPmmKeys = {"C_L", "R_L", "v_floor"};

bool apply_load_param(LoadParams& p, std::string_view key, double v) {
    if (key == "C_L") p.C_L = v;
    else if (key == "R_L") p.R_L = v;
    else if (key == "v_floor") p.v_floor = v;
    else return false;
    return true;
}

bool apply_pgm_param(PgmParams& p, std::string_view key, double v) {
    if (key == "L") p.L = v;
    else if (key == "R") p.R = v;
    else if (key == "C") p.C = v;
    else if (key == "f") p.f = v;
    else if (key == "L_dc") p.L_dc = v;
    else if (key == "R_dc") p.R_dc = v;
    else if (key == "C_dc") p.C_dc = v;
    else if (key == "R_d") p.R_d = v;
    else if (key == "phi") p.phi = v;
    else if (key == "v_ds") p.v_ds = v;
    else if (key == "v_qs") p.v_qs = v;
    else if (key == "v_d_ref") p.v_d_ref = v;
    else if (key == "v_q_ref") p.v_q_ref = v;
    else return false;
    return true;
}

bool apply_ess_param(EssParams& p, std::string_view key, double v) {
    if (key == "omega_ess") p.omega_ess = v;
    else if (key == "Q_T") p.Q_T = v;
    else if (key == "Q_0") p.Q_0 = v;
    else if (key == "P_min") p.P_min = v;
    else if (key == "P_max") p.P_max = v;
    else return false;
    return true;
}

std::optional<double> read_node_param(const NodeSpec& node, std::string_view key) {
    if (const auto* g = std::get_if<PgmParams>(&node.params)) {
        if (key == "L") return g->L;
        if (key == "R") return g->R;
        if (key == "C") return g->C;
        if (key == "f") return g->f;
        if (key == "L_dc") return g->L_dc;
        if (key == "R_dc") return g->R_dc;
        if (key == "C_dc") return g->C_dc;
        if (key == "R_d") return g->R_d;
        if (key == "phi") return g->phi;
        if (key == "v_ds") return g->v_ds;
        if (key == "v_qs") return g->v_qs;
        if (key == "v_d_ref") return g->v_d_ref;
        if (key == "v_q_ref") return g->v_q_ref;
        return std::nullopt;
    }
    const auto& l = node.load();
    if (key == "C_L") return l.C_L;
    if (key == "R_L") return l.R_L;
    if (key == "v_floor") return l.v_floor;
    if (const auto* pcm = std::get_if<PcmParams>(&node.params)) {
        if (key == "omega_ess") return pcm->ess.omega_ess;
        if (key == "Q_T") return pcm->ess.Q_T;
        if (key == "Q_0") return pcm->ess.Q_0;
        if (key == "P_min") return pcm->ess.P_min;
        if (key == "P_max") return pcm->ess.P_max;
    }
    return std::nullopt;
}

}  // namespace

std::span<const std::string_view> node_param_keys(NodeKind kind) noexcept {
    switch (kind) {
        case NodeKind::Pgm: return kPgmKeys;
        case NodeKind::Pcm: return kPcmKeys;
        case NodeKind::Pmm: return kPmmKeys;
    }
    return {};
}

void apply_node_param(NodeSpec& node, std::string_view key, double value) {
    bool known = false;
    if (auto* g = std::get_if<PgmParams>(&node.params)) {
        known = apply_pgm_param(*g, key, value);
    } else if (auto* pcm = std::get_if<PcmParams>(&node.params)) {
        known = apply_load_param(pcm->load, key, value) || apply_ess_param(pcm->ess, key, value);
    } else {
        known = apply_load_param(std::get<LoadParams>(node.params), key, value);
    }
    if (!known) {
        throw SemanticError("unknown key '" + std::string(key) + "' for " + std::string(to_string(node.kind)) +
                            " node " + node.id);
    }
}

// -----------------------------------------------------------------------------
// Parsing
// -----------------------------------------------------------------------------

namespace {

NodeKind parse_kind(const text::KeyValue& kv, std::size_t line_no) {
    if (kv.value == "pgm") return NodeKind::Pgm;
    if (kv.value == "pcm") return NodeKind::Pcm;
    if (kv.value == "pmm") return NodeKind::Pmm;
    throw ParseError(line_no, kv.column + 5, "unknown node kind '" + std::string(kv.value) + "'");
}

void require_id(const std::vector<text::Token>& tokens, std::size_t line_no) {
    if (tokens.size() < 2) {
        throw ParseError(line_no, tokens.front().column + tokens.front().text.size(),
                         "expected an id after '" + std::string(tokens.front().text) + "'");
    }
    if (tokens[1].text.find('=') != std::string_view::npos) {
        throw ParseError(line_no, tokens[1].column, "expected an id, got '" + std::string(tokens[1].text) + "'");
    }
}

}  // namespace

bool parse_topology_line(std::string_view line, std::size_t line_no, std::vector<NodeSpec>& nodes,
                         std::vector<EdgeSpec>& edges) {
    const auto tokens = text::tokenize(line);
    if (tokens.empty()) {
        return false;
    }
    const auto head = tokens.front().text;
    if (head == "node") {
        require_id(tokens, line_no);
        if (tokens.size() < 3) {
            throw ParseError(line_no, tokens[1].column + tokens[1].text.size(), "missing kind=<pgm|pcm|pmm>");
        }
        const auto kind_kv = text::split_key_value(tokens[2], line_no);
        if (kind_kv.key != "kind") {
            throw ParseError(line_no, tokens[2].column, "expected kind=<pgm|pcm|pmm> as first attribute");
        }
        auto node = NodeSpec::make(std::string(tokens[1].text), parse_kind(kind_kv, line_no));
        for (std::size_t i = 3; i < tokens.size(); ++i) {
            const auto kv = text::split_key_value(tokens[i], line_no);
            const double value = text::require_value(kv, line_no);
            try {
                apply_node_param(node, kv.key, value);
            } catch (const SemanticError& e) {
                throw SemanticError(e.detail(), line_no);
            }
        }
        nodes.push_back(std::move(node));
        return true;
    }
    if (head == "edge") {
        require_id(tokens, line_no);
        EdgeSpec edge;
        edge.id = std::string(tokens[1].text);
        bool has_from = false, has_to = false, has_r = false, has_l = false;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            const auto kv = text::split_key_value(tokens[i], line_no);
            if (kv.key == "from") {
                edge.from_node = std::string(kv.value);
                has_from = true;
            } else if (kv.key == "to") {
                edge.to_node = std::string(kv.value);
                has_to = true;
            } else if (kv.key == "R") {
                edge.R_line = text::require_value(kv, line_no);
                has_r = true;
            } else if (kv.key == "L") {
                edge.L_line = text::require_value(kv, line_no);
                has_l = true;
            } else {
                throw SemanticError("unknown key '" + std::string(kv.key) + "' for edge " + edge.id, line_no);
            }
        }
        const std::size_t end_col = tokens.back().column + tokens.back().text.size();
        if (!has_from) throw ParseError(line_no, end_col, "edge " + edge.id + " is missing from=<node>");
        if (!has_to) throw ParseError(line_no, end_col, "edge " + edge.id + " is missing to=<node>");
        if (!has_r) throw ParseError(line_no, end_col, "edge " + edge.id + " is missing R=<ohms>");
        if (!has_l) throw ParseError(line_no, end_col, "edge " + edge.id + " is missing L=<henries>");
        edges.push_back(std::move(edge));
        return true;
    }
    return false;
}

void check_declarations(const std::vector<NodeSpec>& nodes, const std::vector<EdgeSpec>& edges,
                        const std::vector<std::size_t>& edge_lines) {
    auto line_of = [&](std::size_t e) { return e < edge_lines.size() ? edge_lines[e] : 0; };
    std::unordered_set<std::string> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) {
            throw SemanticError("duplicate id " + n.id);
        }
    }
    std::unordered_set<std::string> node_ids(ids);
    std::unordered_set<std::string> edge_ids;
    for (const auto& edge : edges) edge_ids.insert(edge.id);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        if (!ids.insert(edge.id).second) {
            throw SemanticError("duplicate id " + edge.id, line_of(e));
        }
        for (const auto* end : {&edge.from_node, &edge.to_node}) {
            if (!node_ids.contains(*end)) {
                if (edge_ids.contains(*end)) {
                    throw SemanticError("edge-edge adjacency: edge " + edge.id + " connects to edge " + *end, line_of(e));
                }
                throw SemanticError("unknown node " + *end, line_of(e));
            }
        }
        if (edge.from_node == edge.to_node) {
            throw SemanticError("edge " + edge.id + " connects node " + edge.from_node + " to itself", line_of(e));
        }
        if (edge.R_line == 0.0 && edge.L_line == 0.0) {
            throw SemanticError("direct node-node adjacency: edge " + edge.id + " has zero impedance", line_of(e));
        }
        if (!(edge.R_line > 0.0)) {
            throw SemanticError("edge " + edge.id + " has non-positive resistance", line_of(e));
        }
        if (!(edge.L_line > 0.0)) {
            throw SemanticError("edge " + edge.id + " has non-positive inductance", line_of(e));
        }
    }
}

Topology parse_netlist(std::string_view source) {
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
    std::vector<std::size_t> edge_lines;
    std::vector<std::size_t> node_lines;
    std::size_t line_no = 0;
    for (const auto line : text::split_lines(source)) {
        ++line_no;
        const auto tokens = text::tokenize(line);
        if (tokens.empty()) {
            continue;
        }
        const std::size_t edges_before = edges.size();
        const std::size_t nodes_before = nodes.size();
        if (!parse_topology_line(line, line_no, nodes, edges)) {
            throw ParseError(line_no, tokens.front().column,
                             "unknown statement '" + std::string(tokens.front().text) + "'");
        }
        if (edges.size() > edges_before) edge_lines.push_back(line_no);
        if (nodes.size() > nodes_before) node_lines.push_back(line_no);
    }
    // Duplicate node ids get their own line numbers.
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!seen.insert(nodes[i].id).second) {
            throw SemanticError("duplicate id " + nodes[i].id, node_lines[i]);
        }
    }
    check_declarations(nodes, edges, edge_lines);
    return Topology(std::move(nodes), std::move(edges));
}

std::string serialize(const Topology& topology) {
    std::ostringstream out;
    for (const auto& n : topology.nodes()) {
        out << "node " << n.id << " kind=" << to_string(n.kind);
        for (const auto key : node_param_keys(n.kind)) {
            if (const auto v = read_node_param(n, key)) {
                out << ' ' << key << '=' << text::format_double(*v);
            }
        }
        out << '\n';
    }
    for (const auto& e : topology.edges()) {
        out << "edge " << e.id << " from=" << e.from_node << " to=" << e.to_node
            << " R=" << text::format_double(e.R_line) << " L=" << text::format_double(e.L_line) << '\n';
    }
    return out.str();
}

// -----------------------------------------------------------------------------
// Validation and KCL
// -----------------------------------------------------------------------------

namespace {

void check_positive(ValidationReport& report, const std::string& id, std::string_view name, double v) {
    if (!(v > 0.0)) {
        report.findings.push_back(
            {"non-positive-parameter", id, "node " + id + ": " + std::string(name) + " must be positive"});
    }
}

void check_node_params(ValidationReport& report, const NodeSpec& n) {
    if (const auto* g = std::get_if<PgmParams>(&n.params)) {
        check_positive(report, n.id, "L", g->L);
        check_positive(report, n.id, "C", g->C);
        check_positive(report, n.id, "f", g->f);
        check_positive(report, n.id, "L_dc", g->L_dc);
        check_positive(report, n.id, "C_dc", g->C_dc);
        check_positive(report, n.id, "R_d", g->R_d);
        if (g->R < 0.0 || g->R_dc < 0.0) {
            report.findings.push_back({"negative-resistance", n.id, "node " + n.id + ": R and R_dc must be >= 0"});
        }
        return;
    }
    const auto& l = n.load();
    check_positive(report, n.id, "C_L", l.C_L);
    check_positive(report, n.id, "R_L", l.R_L);
    check_positive(report, n.id, "v_floor", l.v_floor);
    if (const auto* pcm = std::get_if<PcmParams>(&n.params)) {
        check_positive(report, n.id, "omega_ess", pcm->ess.omega_ess);
        check_positive(report, n.id, "Q_T", pcm->ess.Q_T);
        if (pcm->ess.Q_0 < 0.0 || pcm->ess.Q_0 > pcm->ess.Q_T) {
            report.findings.push_back({"initial-charge-out-of-range", n.id, "node " + n.id + ": need 0 <= Q_0 <= Q_T"});
        }
        if (pcm->ess.P_min > pcm->ess.P_max) {
            report.findings.push_back({"empty-power-window", n.id, "node " + n.id + ": P_min exceeds P_max"});
        }
    }
}

}  // namespace

ValidationReport validate(const Topology& t) {
    ValidationReport report;
    std::unordered_set<std::string> ids;
    for (const auto& n : t.nodes()) {
        if (!ids.insert(n.id).second) {
            report.findings.push_back({"duplicate-id", n.id, "duplicate id " + n.id});
        }
    }
    for (const auto& e : t.edges()) {
        if (!ids.insert(e.id).second) {
            report.findings.push_back({"duplicate-id", e.id, "duplicate id " + e.id});
        }
    }
    for (std::size_t e = 0; e < t.edges().size(); ++e) {
        const auto& edge = t.edges()[e];
        for (const auto& end : {edge.from_node, edge.to_node}) {
            if (t.node_index(end) == kNoIndex) {
                const bool names_edge = t.edge_index(end) != kNoIndex;
                report.findings.push_back(
                    {names_edge ? "edge-edge-adjacency" : "unknown-node", edge.id,
                     names_edge ? "edge " + edge.id + " connects directly to edge " + end
                                : "edge " + edge.id + " references unknown node " + end});
            }
        }
        if (edge.from_node == edge.to_node) {
            report.findings.push_back({"self-loop", edge.id, "edge " + edge.id + " starts and ends at " + edge.from_node});
        }
        if (edge.R_line == 0.0 && edge.L_line == 0.0) {
            report.findings.push_back({"node-node-adjacency", edge.id,
                                       "nodes " + edge.from_node + " and " + edge.to_node +
                                           " are tied directly (edge " + edge.id + " has zero impedance)"});
            continue;
        }
        if (!(edge.R_line > 0.0)) {
            report.findings.push_back({"non-positive-resistance", edge.id, "edge " + edge.id + " has non-positive resistance"});
        }
        if (!(edge.L_line > 0.0)) {
            report.findings.push_back({"non-positive-inductance", edge.id, "edge " + edge.id + " has non-positive inductance"});
        }
    }
    for (std::size_t n = 0; n < t.nodes().size(); ++n) {
        if (t.incidence(n).empty()) {
            report.findings.push_back({"isolated-node", t.nodes()[n].id, "isolated node " + t.nodes()[n].id});
        }
        check_node_params(report, t.nodes()[n]);
    }
    return report;
}

double net_inflow(const Topology& t, std::size_t node, std::span<const double> edge_currents) noexcept {
    double sum = 0.0;
    for (const auto& inc : t.incidence(node)) {
        sum -= inc.sign * edge_currents[inc.edge];
    }
    return sum;
}

double node_injection_current(const Topology& t, std::string_view node_id,
                              std::span<const double> edge_currents) {
    const auto n = t.node_index(node_id);
    if (n == kNoIndex) {
        throw std::out_of_range("unknown node " + std::string(node_id));
    }
    if (edge_currents.size() < t.edges().size()) {
        throw std::invalid_argument("edge current vector shorter than edge count");
    }
    const double inflow = net_inflow(t, n, edge_currents);
    return t.nodes()[n].is_generator() ? -inflow : inflow;
}

}  // namespace mgsim
