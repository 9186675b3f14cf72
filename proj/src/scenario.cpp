#include "mgsim/scenario.hpp"

#include "mgsim/errors.hpp"
#include "mgsim/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#ifndef MGSIM_DATA_DIR
#define MGSIM_DATA_DIR "data"
#endif

namespace mgsim {

namespace {

struct Override {
    std::string node;
    std::string key;
    double value;
    std::size_t line;
};

struct PendingDroop {
    DroopSetting setting;
    std::size_t line;
};

struct PendingProfile {
    ProfileSetting setting;
    std::size_t line;
};

std::string_view to_string(InitMode mode) { return mode == InitMode::Cold ? "cold" : "nominal"; }
std::string_view to_string(EssMode mode) { return mode == EssMode::LowPass ? "lowpass" : "highpass"; }

std::size_t end_column(const std::vector<text::Token>& tokens) {
    return tokens.back().column + tokens.back().text.size();
}

std::string require_name(const std::vector<text::Token>& tokens, std::size_t line, std::string_view what) {
    if (tokens.size() < 2 || tokens[1].text.find('=') != std::string_view::npos) {
        throw ParseError(line, tokens.size() < 2 ? end_column(tokens) : tokens[1].column,
                         "expected " + std::string(what) + " after '" + std::string(tokens[0].text) + "'");
    }
    return std::string(tokens[1].text);
}

void parse_solver(const std::vector<text::Token>& tokens, std::size_t line, Scenario& s) {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto kv = text::split_key_value(tokens[i], line);
        if (kv.key == "method") {
            const auto m = parse_method(kv.value);
            if (!m) throw ParseError(line, kv.column + 7, "unknown method '" + std::string(kv.value) + "'");
            s.solver.method = *m;
        } else if (kv.key == "init") {
            if (kv.value == "nominal") s.init = InitMode::Nominal;
            else if (kv.value == "cold") s.init = InitMode::Cold;
            else throw ParseError(line, kv.column + 5, "unknown init mode '" + std::string(kv.value) + "'");
        } else {
            const double v = text::require_value(kv, line);
            if (kv.key == "dt") s.solver.dt = v;
            else if (kv.key == "decimation") {
                if (v < 1.0 || v != std::floor(v)) throw SemanticError("decimation must be an integer >= 1", line);
                s.solver.record_decimation = static_cast<std::size_t>(v);
            } else if (kv.key == "control_period") s.control.control_period = v;
            else if (kv.key == "state_limit") s.state_limit = v;
            else throw SemanticError("unknown solver key '" + std::string(kv.key) + "'", line);
        }
    }
}

void set_control_key(ControlSettings& c, std::string_view key, double v, std::size_t line) {
    if (key == "v_bus") c.v_bus_ref = v;
    else if (key == "v_droop") c.v_droop = v;
    else if (key == "r_base") c.r_base = v;
    else if (key == "kp") c.kp = v;
    else if (key == "ki") c.ki = v;
    else if (key == "kp_v") c.kp_v = v;
    else if (key == "ki_v") c.ki_v = v;
    else if (key == "dv_max") c.dv_max = v;
    else if (key == "control_period") c.control_period = v;
    else throw SemanticError("unknown control key '" + std::string(key) + "'", line);
}

void parse_control(const std::vector<text::Token>& tokens, std::size_t line, Scenario& s) {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto kv = text::split_key_value(tokens[i], line);
        if (kv.key == "main_bus") {
            s.control.main_bus = std::string(kv.value);
        } else {
            set_control_key(s.control, kv.key, text::require_value(kv, line), line);
        }
    }
}

void parse_ess(const std::vector<text::Token>& tokens, std::size_t line, Scenario& s) {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto kv = text::split_key_value(tokens[i], line);
        if (kv.key == "mode") {
            if (kv.value == "highpass") s.ess.mode = EssMode::HighPass;
            else if (kv.value == "lowpass") s.ess.mode = EssMode::LowPass;
            else throw ParseError(line, kv.column + 5, "unknown ess mode '" + std::string(kv.value) + "'");
        } else if (kv.key == "omega") {
            s.ess.omega = text::require_value(kv, line);
        } else {
            throw SemanticError("unknown ess key '" + std::string(kv.key) + "'", line);
        }
    }
}

PendingDroop parse_droop(const std::vector<text::Token>& tokens, std::size_t line) {
    PendingDroop d{{require_name(tokens, line, "a PGM id"), 1.0, std::nullopt}, line};
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto kv = text::split_key_value(tokens[i], line);
        const double v = text::require_value(kv, line);
        if (kv.key == "weight") d.setting.weight = v;
        else if (kv.key == "r") d.setting.r = v;
        else throw SemanticError("unknown droop key '" + std::string(kv.key) + "'", line);
    }
    return d;
}

PendingProfile parse_profile(const std::vector<text::Token>& tokens, std::size_t line) {
    PendingProfile p{{require_name(tokens, line, "a load node id"), {}}, line};
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        const auto at = tok.text.find('@');
        const auto eq = tok.text.find('=');
        if (at == std::string_view::npos || eq == std::string_view::npos || eq < at) {
            throw ParseError(line, tok.column, "expected <step|ramp|hold>@<time>=<watts>, got '" +
                                                   std::string(tok.text) + "'");
        }
        const auto kind = tok.text.substr(0, at);
        Segment seg;
        if (kind == "step") seg.kind = SegmentKind::Step;
        else if (kind == "ramp") seg.kind = SegmentKind::Ramp;
        else if (kind == "hold") seg.kind = SegmentKind::Hold;
        else throw ParseError(line, tok.column, "unknown segment kind '" + std::string(kind) + "'");
        const auto t = text::parse_value(tok.text.substr(at + 1, eq - at - 1));
        const auto level = text::parse_value(tok.text.substr(eq + 1));
        if (!t) throw ParseError(line, tok.column + at + 1, "invalid segment time");
        if (!level) throw ParseError(line, tok.column + eq + 1, "invalid segment level");
        seg.t_start = *t;
        seg.level = *level;
        p.setting.profile.segments.push_back(seg);
    }
    if (const auto problem = check_profile(p.setting.profile); !problem.empty()) {
        throw SemanticError("profile " + p.setting.node + ": " + problem, line);
    }
    return p;
}

void check_positive(double v, std::string_view what) {
    if (!(v > 0.0)) throw SemanticError(std::string(what) + " must be positive");
}

}  // namespace

// -----------------------------------------------------------------------------

const LoadProfile& Scenario::profile_for(std::string_view node) const {
    for (const auto& p : profiles) {
        if (p.node == node) return p.profile;
    }
    throw std::out_of_range("no profile for node " + std::string(node));
}

const DroopSetting& Scenario::droop_for(std::string_view pgm) const {
    for (const auto& d : droop) {
        if (d.pgm == pgm) return d;
    }
    throw std::out_of_range("no droop setting for " + std::string(pgm));
}

std::vector<DroopConfig> Scenario::droop_configs() const {
    std::vector<double> weights;
    for (const auto& d : droop) weights.push_back(d.weight);
    const auto r = design_droop_resistances(weights, control.r_base);
    std::vector<DroopConfig> out;
    for (std::size_t i = 0; i < droop.size(); ++i) {
        out.push_back({control.v_droop, droop[i].r.value_or(r[i]), droop[i].weight});
    }
    return out;
}

std::vector<double> Scenario::event_times() const {
    std::vector<double> times;
    for (const auto& p : profiles) {
        for (const auto& seg : p.profile.segments) {
            if (seg.t_start > 0.0 && seg.t_start < solver.t_end) times.push_back(seg.t_start);
        }
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

Scenario parse_scenario(std::string_view source, const std::filesystem::path& base_dir, std::string name) {
    Scenario s;
    s.name = std::move(name);
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
    std::vector<Override> overrides;
    std::vector<PendingDroop> droops;
    std::vector<PendingProfile> profiles;
    bool has_duration = false;

    std::size_t line_no = 0;
    for (const auto line : text::split_lines(source)) {
        ++line_no;
        const auto tokens = text::tokenize(line);
        if (tokens.empty()) continue;
        if (parse_topology_line(line, line_no, nodes, edges)) continue;

        const auto head = tokens.front().text;
        if (head == "netlist") {
            const auto rel = require_name(tokens, line_no, "a netlist path");
            const auto path = base_dir.empty() ? std::filesystem::path(rel) : base_dir / rel;
            const auto included = parse_netlist(read_file(path));
            nodes.insert(nodes.end(), included.nodes().begin(), included.nodes().end());
            edges.insert(edges.end(), included.edges().begin(), included.edges().end());
        } else if (head == "duration") {
            if (tokens.size() != 2) throw ParseError(line_no, end_column(tokens), "expected duration <seconds>");
            const auto v = text::parse_value(tokens[1].text);
            if (!v) throw ParseError(line_no, tokens[1].column, "invalid duration");
            s.solver.t_end = *v;
            has_duration = true;
        } else if (head == "solver") {
            parse_solver(tokens, line_no, s);
        } else if (head == "control") {
            parse_control(tokens, line_no, s);
        } else if (head == "ess") {
            parse_ess(tokens, line_no, s);
        } else if (head == "droop") {
            droops.push_back(parse_droop(tokens, line_no));
        } else if (head == "profile") {
            profiles.push_back(parse_profile(tokens, line_no));
        } else if (head == "set") {
            const auto node = require_name(tokens, line_no, "a node id");
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const auto kv = text::split_key_value(tokens[i], line_no);
                overrides.push_back({node, std::string(kv.key), text::require_value(kv, line_no), line_no});
            }
        } else {
            throw ParseError(line_no, tokens.front().column, "unknown statement '" + std::string(head) + "'");
        }
    }

    check_declarations(nodes, edges);
    for (const auto& o : overrides) {
        auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == o.node; });
        if (it == nodes.end()) throw SemanticError("set: unknown node " + o.node, o.line);
        try {
            apply_node_param(*it, o.key, o.value);
        } catch (const SemanticError& e) {
            throw SemanticError(e.detail(), o.line);
        }
    }
    s.topology = Topology(std::move(nodes), std::move(edges));
    if (const auto report = validate(s.topology); !report.ok()) {
        throw SemanticError(report.findings.front().message);
    }
    if (s.topology.nodes().empty()) throw SemanticError("scenario has no nodes");
    if (!has_duration) s.warnings.push_back("no duration given; using 0 s");

    // Droop: one per PGM, in topology order.
    std::unordered_set<std::string> seen;
    for (const auto& d : droops) {
        const auto n = s.topology.node_index(d.setting.pgm);
        if (n == kNoIndex) throw SemanticError("droop: unknown node " + d.setting.pgm, d.line);
        if (!s.topology.nodes()[n].is_generator()) throw SemanticError("droop: " + d.setting.pgm + " is not a pgm", d.line);
        if (!(d.setting.weight > 0.0)) throw SemanticError("droop weight must be positive", d.line);
        if (d.setting.r && !(*d.setting.r > 0.0)) throw SemanticError("droop r must be positive", d.line);
        if (!seen.insert(d.setting.pgm).second) throw SemanticError("duplicate droop for " + d.setting.pgm, d.line);
    }
    for (const auto& n : s.topology.nodes()) {
        if (!n.is_generator()) continue;
        auto it = std::find_if(droops.begin(), droops.end(), [&](const PendingDroop& d) { return d.setting.pgm == n.id; });
        if (it == droops.end()) {
            s.warnings.push_back("pgm " + n.id + " has no droop setting; using weight 1");
            s.droop.push_back({n.id, 1.0, std::nullopt});
        } else {
            s.droop.push_back(it->setting);
        }
    }

    // Profiles: one per load node, in topology order.
    seen.clear();
    for (const auto& p : profiles) {
        const auto n = s.topology.node_index(p.setting.node);
        if (n == kNoIndex) throw SemanticError("profile: unknown node " + p.setting.node, p.line);
        if (s.topology.nodes()[n].is_generator()) throw SemanticError("profile: " + p.setting.node + " is not a load node", p.line);
        if (!seen.insert(p.setting.node).second) throw SemanticError("duplicate profile for " + p.setting.node, p.line);
    }
    for (const auto& n : s.topology.nodes()) {
        if (n.is_generator()) continue;
        auto it = std::find_if(profiles.begin(), profiles.end(),
                               [&](const PendingProfile& p) { return p.setting.node == n.id; });
        if (it == profiles.end()) {
            s.warnings.push_back("load " + n.id + " has no profile; holding 0 W");
            s.profiles.push_back({n.id, {}});
        } else {
            s.profiles.push_back(it->setting);
        }
    }

    if (s.control.main_bus.empty()) {
        for (const auto& n : s.topology.nodes()) {
            if (!n.is_generator()) {
                s.control.main_bus = n.id;
                s.warnings.push_back("no main_bus given; using " + n.id);
                break;
            }
        }
        if (s.control.main_bus.empty()) s.control.main_bus = s.topology.nodes().front().id;
    }
    if (s.topology.node_index(s.control.main_bus) == kNoIndex) {
        throw SemanticError("main_bus " + s.control.main_bus + " is not a node");
    }

    check_positive(s.control.v_bus_ref, "v_bus");
    check_positive(s.control.r_base, "r_base");
    check_positive(s.ess.omega, "ess omega");
    check_positive(s.solver.dt, "solver dt");
    check_positive(s.state_limit, "state_limit");
    if (s.control.dv_max < 0.0) throw SemanticError("dv_max must be non-negative");
    if (s.control.control_period < 0.0) throw SemanticError("control_period must be non-negative");
    if (!(s.solver.t_end >= 0.0)) throw SemanticError("duration must be non-negative");
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading " + path.string());
    }
    return buf.str();
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path), path.parent_path(), path.stem().string());
}

std::string serialize(const Scenario& s) {
    using text::format_double;
    std::ostringstream out;
    out << "# resolved scenario " << s.name << '\n';
    out << serialize(s.topology);
    out << "duration " << format_double(s.solver.t_end) << '\n';
    out << "solver dt=" << format_double(s.solver.dt) << " method=" << to_string(s.solver.method)
        << " decimation=" << s.solver.record_decimation << " init=" << to_string(s.init)
        << " control_period=" << format_double(s.control.control_period)
        << " state_limit=" << format_double(s.state_limit) << '\n';
    const auto& c = s.control;
    out << "control v_bus=" << format_double(c.v_bus_ref) << " main_bus=" << c.main_bus
        << " v_droop=" << format_double(c.v_droop) << " r_base=" << format_double(c.r_base)
        << " kp=" << format_double(c.kp) << " ki=" << format_double(c.ki) << " kp_v=" << format_double(c.kp_v)
        << " ki_v=" << format_double(c.ki_v) << " dv_max=" << format_double(c.dv_max) << '\n';
    out << "ess omega=" << format_double(s.ess.omega) << " mode=" << to_string(s.ess.mode) << '\n';
    for (const auto& d : s.droop) {
        out << "droop " << d.pgm << " weight=" << format_double(d.weight);
        if (d.r) out << " r=" << format_double(*d.r);
        out << '\n';
    }
    for (const auto& p : s.profiles) {
        out << "profile " << p.node;
        for (const auto& seg : p.profile.segments) {
            out << ' ' << to_string(seg.kind) << '@' << format_double(seg.t_start) << '=' << format_double(seg.level);
        }
        out << '\n';
    }
    return out.str();
}

void set_param(Scenario& s, std::string_view path, double value) {
    auto bad = [&]() { return std::invalid_argument("unknown parameter path '" + std::string(path) + "'"); };
    if (path == "duration") {
        s.solver.t_end = value;
        return;
    }
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) throw bad();
    const auto head = path.substr(0, dot);
    const auto rest = path.substr(dot + 1);

    if (head == "solver") {
        if (rest == "dt") s.solver.dt = value;
        else if (rest == "decimation") s.solver.record_decimation = static_cast<std::size_t>(std::max(1.0, value));
        else if (rest == "control_period") s.control.control_period = value;
        else if (rest == "state_limit") s.state_limit = value;
        else throw bad();
        return;
    }
    if (head == "control") {
        try {
            set_control_key(s.control, rest, value, 0);
        } catch (const SemanticError&) {
            throw bad();
        }
        return;
    }
    if (head == "ess") {
        if (rest != "omega") throw bad();
        s.ess.omega = value;
        return;
    }
    if (head == "droop") {
        const auto dot2 = rest.find('.');
        if (dot2 == std::string_view::npos) throw bad();
        const auto pgm = rest.substr(0, dot2);
        const auto key = rest.substr(dot2 + 1);
        for (auto& d : s.droop) {
            if (d.pgm != pgm) continue;
            if (key == "weight") d.weight = value;
            else if (key == "r") d.r = value;
            else throw bad();
            return;
        }
        throw bad();
    }
    const auto n = s.topology.node_index(head);
    if (n == kNoIndex) throw bad();
    try {
        apply_node_param(s.topology.mutable_nodes()[n], rest, value);
    } catch (const SemanticError&) {
        throw bad();
    }
}

std::filesystem::path find_scenario(std::string_view name_or_path) {
    const std::filesystem::path direct(name_or_path);
    if (std::filesystem::is_regular_file(direct)) {
        return direct;
    }
    std::vector<std::filesystem::path> dirs;
    if (const char* env = std::getenv("MGSIM_SCENARIO_PATH")) {
        std::string_view list(env);
        while (!list.empty()) {
            const auto colon = list.find(':');
            const auto dir = list.substr(0, colon);
            if (!dir.empty()) dirs.emplace_back(dir);
            if (colon == std::string_view::npos) break;
            list.remove_prefix(colon + 1);
        }
    }
    dirs.emplace_back(MGSIM_DATA_DIR);
    for (const auto& dir : dirs) {
        for (const auto& candidate : {dir / direct, dir / (std::string(name_or_path) + ".scn")}) {
            if (std::filesystem::is_regular_file(candidate)) return candidate;
        }
    }
    return direct;  // let the caller report the I/O error on the name it was given
}

}  // namespace mgsim
