#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mgsim {

/// Columnar simulation output. Column 0 is always `t_s`.
struct TimeSeries {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    [[nodiscard]] bool has(std::string_view name) const noexcept;
    /// Throws std::out_of_range for an unknown column.
    [[nodiscard]] std::span<const double> column(std::string_view name) const;
    void append_row(std::span<const double> row);
};

/// Header row, then one row per sample; `.` decimal point, shortest
/// round-trip number formatting, `\n` line ends.
void write_csv(std::ostream& out, const TimeSeries& series);
[[nodiscard]] std::string to_csv(const TimeSeries& series);

/// Reads what write_csv produced. Throws std::runtime_error on malformed input.
[[nodiscard]] TimeSeries read_csv(std::string_view text);

}  // namespace mgsim
