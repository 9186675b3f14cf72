#include "mgsim/cli.hpp"

#include "mgsim/engine.hpp"
#include "mgsim/errors.hpp"
#include "mgsim/scenario.hpp"
#include "mgsim/summary.hpp"
#include "mgsim/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

namespace mgsim {

namespace {

void apply(const RunOptions& o, Scenario& s) {
    if (o.dt) s.solver.dt = *o.dt;
    if (o.method) s.solver.method = *o.method;
    if (o.t_end) s.solver.t_end = *o.t_end;
    if (o.decimation) s.solver.record_decimation = *o.decimation;
}

// Maps the library's exceptions onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kIo;
    } catch (const NumericalDivergence& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kDivergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kValidation;
    }
}

std::string monotonicity(const std::vector<std::pair<double, double>>& pts) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        up = up && pts[i].second >= pts[i - 1].second;
        down = down && pts[i].second <= pts[i - 1].second;
    }
    if (pts.size() < 2) return "n/a";
    if (up && down) return "constant";
    return up ? "non-decreasing" : down ? "non-increasing" : "non-monotone";
}

}  // namespace

int cmd_validate(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto source = read_file(path);
        const auto topology = path.extension() == ".scn" ? load_scenario(path).topology : parse_netlist(source);
        const auto report = validate(topology);
        for (const auto& f : report.findings) {
            err << path.string() << ": " << f.code << ": " << f.subject << ": " << f.message << '\n';
        }
        if (!report.ok()) return exit_code::kValidation;
        out << path.string() << ": ok (" << topology.nodes().size() << " nodes, " << topology.edges().size()
            << " edges)\n";
        return exit_code::kOk;
    });
}

int cmd_run(const std::string& scenario_arg, const std::filesystem::path& csv_path, const RunOptions& options,
            std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto scenario = load_scenario(find_scenario(scenario_arg));
        apply(options, scenario);
        for (const auto& w : scenario.warnings) err << "warning: " << w << '\n';

        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw IoError("cannot open " + csv_path.string() + " for writing");

        const Engine engine(scenario);
        const auto result = engine.run();
        write_csv(csv, result.series);
        csv.close();
        if (!csv) throw IoError("failed writing " + csv_path.string());

        const auto summary = summarize(engine.scenario(), result.series, result.divergence);
        out << (options.summary_json ? to_json(summary) + "\n" : to_text(summary));
        if (result.divergence) {
            err << "error: " << result.divergence->what() << '\n';
            return exit_code::kDivergence;
        }
        return exit_code::kOk;
    });
}

int cmd_sweep(const std::string& scenario_arg, const std::string& param, const std::vector<double>& values,
              const RunOptions& options, std::ostream& out, std::ostream& err, unsigned jobs) {
    return guarded(err, [&] {
        if (values.empty()) {
            out << "no values, nothing to run\n";
            return exit_code::kOk;
        }
        auto base = load_scenario(find_scenario(scenario_arg));
        apply(options, base);

        // Resolve every variant up front so a bad path fails before any run starts.
        std::vector<Scenario> variants;
        for (const double v : values) {
            auto s = base;
            set_param(s, param, v);
            s.name = base.name + "[" + param + "=" + text::format_double(v) + "]";
            variants.push_back(std::move(s));
        }

        if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
        std::vector<RunSummary> summaries(variants.size());
        for (std::size_t first = 0; first < variants.size(); first += jobs) {
            std::vector<std::future<RunSummary>> batch;
            for (auto i = first; i < std::min(variants.size(), first + jobs); ++i) {
                batch.push_back(std::async(std::launch::async, [&variant = variants[i]] {
                    const Engine engine(variant);
                    const auto r = engine.run();
                    return summarize(engine.scenario(), r.series, r.divergence);
                }));
            }
            for (std::size_t k = 0; k < batch.size(); ++k) summaries[first + k] = batch[k].get();
        }

        using text::format_double;
        bool any_diverged = false;
        std::vector<std::pair<double, double>> peaks;
        out << param << ",diverged,max_sharing_error,bus_max_deviation_V,ess_peak_W,sharing\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& s = summaries[i];
            double peak = 0.0;
            for (const auto& e : s.ess) peak = std::max(peak, e.peak_power);
            std::string sharing;
            if (!s.intervals.empty()) {
                for (const double r : s.intervals.back().sharing) sharing += (sharing.empty() ? "" : ":") + format_double(r);
            }
            out << format_double(values[i]) << ',' << (s.diverged ? "yes" : "no") << ','
                << format_double(s.max_sharing_error) << ',' << format_double(s.bus_max_deviation) << ','
                << format_double(peak) << ',' << sharing << '\n';
            any_diverged = any_diverged || s.diverged;
            peaks.emplace_back(values[i], peak);
        }
        std::sort(peaks.begin(), peaks.end());
        out << "ess_peak_vs_" << param << ": " << monotonicity(peaks) << '\n';
        return any_diverged ? exit_code::kDivergence : exit_code::kOk;
    });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"DC microgrid simulator"};
    app.require_subcommand(1);

    std::string path;
    std::string csv;
    std::string param;
    std::string method;
    std::vector<double> values;
    unsigned jobs = 0;
    RunOptions options;

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--dt", options.dt, "step size (s)");
        cmd->add_option("--method", method, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
        cmd->add_option("--t-end", options.t_end, "end time (s)");
        cmd->add_option("--decimation", options.decimation, "record every n-th step");
        cmd->add_option("--seed", options.seed, "ignored, runs are deterministic");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a netlist");
    validate_cmd->add_option("netlist", path)->required();

    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write CSV");
    run_cmd->add_option("scenario", path, "scenario file or bundled name")->required();
    run_cmd->add_option("out", csv, "CSV output path")->required();
    run_cmd->add_flag("--summary-json", options.summary_json, "print the summary as JSON");
    add_solver_flags(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "run one simulation per parameter value");
    sweep_cmd->add_option("scenario", path)->required();
    sweep_cmd->add_option("param", param, "dotted parameter path, e.g. ess.omega")->required();
    sweep_cmd->add_option("values", values, "values to try");
    sweep_cmd->add_option("--jobs", jobs, "parallel runs (0 = all cores)");
    add_solver_flags(sweep_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::kOk : exit_code::kValidation;
    }
    if (!method.empty()) options.method = parse_method(method);

    if (*validate_cmd) return cmd_validate(path, out, err);
    if (*run_cmd) return cmd_run(path, csv, options, out, err);
    return cmd_sweep(path, param, values, options, out, err, jobs);
}

}  // namespace mgsim
