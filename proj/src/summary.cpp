#include "mgsim/summary.hpp"

#include "mgsim/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mgsim {

namespace {

struct Window {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
};

Window rows_between(std::span<const double> t, double a, double b, bool closed) {
    const auto lo = std::lower_bound(t.begin(), t.end(), a - 1e-12);
    const auto hi = closed ? std::upper_bound(t.begin(), t.end(), b + 1e-12) : std::lower_bound(t.begin(), t.end(), b - 1e-12);
    return {static_cast<std::size_t>(lo - t.begin()), static_cast<std::size_t>(hi - t.begin())};
}

double mean(std::span<const double> x, Window w) {
    if (w.end <= w.begin) return std::nan("");
    double s = 0.0;
    for (auto i = w.begin; i < w.end; ++i) s += x[i];
    return s / static_cast<double>(w.end - w.begin);
}

double max_abs(std::span<const double> x, Window w) {
    double m = 0.0;
    for (auto i = w.begin; i < w.end; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

}  // namespace

RunSummary summarize(const Scenario& scenario, const TimeSeries& series,
                     const std::optional<NumericalDivergence>& divergence) {
    const auto& topo = scenario.topology;
    RunSummary s;
    s.scenario = scenario.name;
    s.t_end = scenario.solver.t_end;
    s.main_bus = scenario.control.main_bus;
    s.v_bus_ref = scenario.control.v_bus_ref;
    if (divergence) {
        s.diverged = true;
        s.divergence_time = divergence->time();
        s.divergence_where = divergence->component() + "." + divergence->variable();
    }

    std::vector<std::string> pcms;
    for (const auto& n : topo.nodes()) {
        if (n.kind == NodeKind::Pgm) {
            s.pgms.push_back(n.id);
            s.weights.push_back(scenario.droop_for(n.id).weight);
        } else if (n.kind == NodeKind::Pcm) {
            pcms.push_back(n.id);
        }
    }
    double weight_sum = 0.0;
    for (const double w : s.weights) weight_sum += w;

    if (series.rows() == 0) return s;
    const auto t = series.column("t_s");
    const auto bus = series.column("v_" + s.main_bus);
    const double band = s.band * s.v_bus_ref;
    const double t_last = t.back();

    std::vector<double> edges{0.0};
    for (const double e : scenario.event_times()) {
        if (e < t_last) edges.push_back(e);
    }
    edges.push_back(t_last);

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        IntervalSummary iv;
        iv.t_start = edges[k];
        iv.t_end = edges[k + 1];
        const bool last = k + 2 == edges.size();
        const auto all = rows_between(t, iv.t_start, iv.t_end, last);
        const auto tail = rows_between(t, iv.t_end - kSteadyWindowFraction * (iv.t_end - iv.t_start), iv.t_end, last);
        if (all.end <= all.begin) continue;

        double total = 0.0;
        for (const auto& id : s.pgms) {
            iv.pgm_current.push_back(mean(series.column("ig_" + id), tail));
            total += iv.pgm_current.back();
        }
        for (std::size_t g = 0; g < s.pgms.size(); ++g) {
            iv.sharing.push_back(iv.pgm_current[g] / total);
            const double expected = s.weights[g] / weight_sum;
            iv.sharing_error = std::max(iv.sharing_error, std::abs(iv.sharing.back() / expected - 1.0));
        }

        iv.bus_mean = mean(bus, tail);
        std::optional<std::size_t> last_out;
        for (auto i = all.begin; i < all.end; ++i) {
            const double dev = std::abs(bus[i] - s.v_bus_ref);
            iv.bus_max_deviation = std::max(iv.bus_max_deviation, dev);
            if (!(dev <= band)) last_out = i;
        }
        if (!last_out) {
            iv.settling_time = 0.0;
        } else if (*last_out + 1 < all.end) {
            iv.settling_time = t[*last_out + 1] - iv.t_start;
        }

        for (const auto& id : pcms) {
            const auto p = series.column("p_ess_" + id);
            iv.ess_peak.push_back(max_abs(p, all));
            iv.ess_steady.push_back(max_abs(p, tail));
        }
        s.bus_max_deviation = std::max(s.bus_max_deviation, iv.bus_max_deviation);
        s.max_sharing_error = std::max(s.max_sharing_error, iv.sharing_error);
        s.intervals.push_back(std::move(iv));
    }

    for (const auto& id : pcms) {
        const auto& pcm = std::get<PcmParams>(topo.nodes()[topo.node_index(id)].params);
        const auto p = series.column("p_ess_" + id);
        EssSummary e;
        e.node = id;
        e.peak_power = max_abs(p, {0, p.size()});
        for (std::size_t i = 1; i < p.size(); ++i) e.net_energy += 0.5 * (p[i] + p[i - 1]) * (t[i] - t[i - 1]);
        e.final_soc = series.column("soc_" + id).back();
        e.final_soc_from_power = soc_from_power(pcm.ess, series.column("v_" + id).back(), e.net_energy);
        s.ess.push_back(std::move(e));
    }
    return s;
}

std::string to_text(const RunSummary& s) {
    using text::format_double;
    std::ostringstream out;
    out << "scenario: " << s.scenario << '\n';
    out << "t_end_s: " << format_double(s.t_end) << '\n';
    out << "diverged: " << (s.diverged ? "yes" : "no") << '\n';
    if (s.diverged) {
        out << "divergence: t=" << format_double(*s.divergence_time) << " s in " << s.divergence_where << '\n';
    }
    out << "main_bus: " << s.main_bus << " v_ref=" << format_double(s.v_bus_ref)
        << " band=±" << format_double(s.band * 100.0) << "%\n";
    out << "bus_max_deviation_V: " << format_double(s.bus_max_deviation) << '\n';
    out << "weights:";
    for (std::size_t g = 0; g < s.pgms.size(); ++g) out << ' ' << s.pgms[g] << '=' << format_double(s.weights[g]);
    out << '\n';
    out << "max_sharing_error: " << format_double(s.max_sharing_error) << '\n';
    for (std::size_t k = 0; k < s.intervals.size(); ++k) {
        const auto& iv = s.intervals[k];
        out << "interval " << k << " [" << format_double(iv.t_start) << ", " << format_double(iv.t_end) << "]\n";
        out << "  ig_A:";
        for (const double i : iv.pgm_current) out << ' ' << format_double(i);
        out << "\n  sharing:";
        for (const double r : iv.sharing) out << ' ' << format_double(r);
        out << "\n  sharing_error: " << format_double(iv.sharing_error) << '\n';
        out << "  bus_mean_V: " << format_double(iv.bus_mean) << '\n';
        out << "  bus_max_deviation_V: " << format_double(iv.bus_max_deviation) << '\n';
        out << "  settling_s: " << (iv.settling_time ? format_double(*iv.settling_time) : "unsettled") << '\n';
        out << "  ess_peak_W:";
        for (const double p : iv.ess_peak) out << ' ' << format_double(p);
        out << "\n  ess_steady_W:";
        for (const double p : iv.ess_steady) out << ' ' << format_double(p);
        out << '\n';
    }
    for (const auto& e : s.ess) {
        out << "ess " << e.node << ": peak_W=" << format_double(e.peak_power)
            << " net_energy_J=" << format_double(e.net_energy) << " soc=" << format_double(e.final_soc)
            << " soc_from_power=" << format_double(e.final_soc_from_power) << '\n';
    }
    return out.str();
}

std::string to_json(const RunSummary& s, int indent) {
    nlohmann::ordered_json j;
    j["scenario"] = s.scenario;
    j["t_end_s"] = s.t_end;
    j["diverged"] = s.diverged;
    if (s.diverged) {
        j["divergence"] = {{"t_s", *s.divergence_time}, {"where", s.divergence_where}};
    }
    j["main_bus"] = s.main_bus;
    j["v_bus_ref"] = s.v_bus_ref;
    j["settling_band"] = s.band;
    j["bus_max_deviation_V"] = s.bus_max_deviation;
    j["pgms"] = s.pgms;
    j["weights"] = s.weights;
    j["max_sharing_error"] = s.max_sharing_error;
    auto& ivs = j["intervals"] = nlohmann::ordered_json::array();
    for (const auto& iv : s.intervals) {
        nlohmann::ordered_json o;
        o["t_start"] = iv.t_start;
        o["t_end"] = iv.t_end;
        o["ig_A"] = iv.pgm_current;
        o["sharing"] = iv.sharing;
        o["sharing_error"] = iv.sharing_error;
        o["bus_mean_V"] = iv.bus_mean;
        o["bus_max_deviation_V"] = iv.bus_max_deviation;
        o["settling_s"] = iv.settling_time ? nlohmann::ordered_json(*iv.settling_time) : nlohmann::ordered_json();
        o["ess_peak_W"] = iv.ess_peak;
        o["ess_steady_W"] = iv.ess_steady;
        ivs.push_back(std::move(o));
    }
    auto& ess = j["ess"] = nlohmann::ordered_json::array();
    for (const auto& e : s.ess) {
        ess.push_back({{"node", e.node},
                       {"peak_W", e.peak_power},
                       {"net_energy_J", e.net_energy},
                       {"soc", e.final_soc},
                       {"soc_from_power", e.final_soc_from_power}});
    }
    return j.dump(indent);
}

}  // namespace mgsim
