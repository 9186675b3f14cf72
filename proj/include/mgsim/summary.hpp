#pragma once

// Run metrics derived from the recorded time series only, so anyone holding
// the CSV can recompute them.

#include "mgsim/errors.hpp"
#include "mgsim/scenario.hpp"
#include "mgsim/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mgsim {

inline constexpr double kSettlingBand = 0.005;      // ±0.5% of v_b*
inline constexpr double kSteadyWindowFraction = 0.2;  // tail of each interval

/// One interval between consecutive load events.
struct IntervalSummary {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<double> pgm_current;     // mean ig over the steady window, per PGM
    std::vector<double> sharing;         // pgm_current normalised to sum 1
    double sharing_error = 0.0;          // max relative error of sharing against the weights
    double bus_mean = 0.0;               // main bus, steady window
    double bus_max_deviation = 0.0;      // max |v - v_b*| over the interval (V)
    std::optional<double> settling_time; // from t_start until the bus stays inside the band
    std::vector<double> ess_peak;        // max |p_ess| over the interval, per PCM
    std::vector<double> ess_steady;      // max |p_ess| over the steady window, per PCM
};

struct EssSummary {
    std::string node;
    double peak_power = 0.0;  // max |p_ess| (W)
    double net_energy = 0.0;  // ∫ p_ess dt (J), positive = discharged
    double final_soc = 0.0;
    double final_soc_from_power = 0.0;
};

struct RunSummary {
    std::string scenario;
    double t_end = 0.0;
    std::vector<std::string> pgms;
    std::vector<double> weights;
    std::string main_bus;
    double v_bus_ref = 0.0;
    double band = kSettlingBand;
    double bus_max_deviation = 0.0;
    double max_sharing_error = 0.0;
    std::vector<IntervalSummary> intervals;
    std::vector<EssSummary> ess;
    bool diverged = false;
    std::optional<double> divergence_time;
    std::string divergence_where;
};

[[nodiscard]] RunSummary summarize(const Scenario& scenario, const TimeSeries& series,
                                   const std::optional<NumericalDivergence>& divergence = std::nullopt);

[[nodiscard]] std::string to_text(const RunSummary& summary);
[[nodiscard]] std::string to_json(const RunSummary& summary, int indent = 2);

}  // namespace mgsim
