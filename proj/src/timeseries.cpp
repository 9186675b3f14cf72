#include "mgsim/timeseries.hpp"

#include "mgsim/text.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mgsim {

bool TimeSeries::has(std::string_view name) const noexcept {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::span<const double> TimeSeries::column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw std::out_of_range("no column " + std::string(name));
    }
    return columns[static_cast<std::size_t>(it - names.begin())];
}

void TimeSeries::append_row(std::span<const double> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("row width does not match the column count");
    }
    for (std::size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    std::string line;
    for (std::size_t c = 0; c < series.names.size(); ++c) {
        if (c) line += ',';
        line += series.names[c];
    }
    line += '\n';
    out << line;
    for (std::size_t r = 0; r < series.rows(); ++r) {
        line.clear();
        for (std::size_t c = 0; c < series.columns.size(); ++c) {
            if (c) line += ',';
            line += text::format_double(series.columns[c][r]);
        }
        line += '\n';
        out << line;
    }
}

std::string to_csv(const TimeSeries& series) {
    std::ostringstream out;
    write_csv(out, series);
    return std::move(out).str();
}

TimeSeries read_csv(std::string_view text) {
    const auto lines = text::split_lines(text);
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    TimeSeries series;
    std::size_t n = 0;
    for (; n < lines.size() && lines[n].empty(); ++n) {}
    if (n == lines.size()) {
        throw std::runtime_error("csv: missing header");
    }
    for (const auto cell : split(lines[n])) series.names.emplace_back(cell);
    series.columns.assign(series.names.size(), {});
    std::vector<double> row(series.names.size());
    for (std::size_t i = n + 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = split(lines[i]);
        if (cells.size() != row.size()) {
            throw std::runtime_error("csv: row " + std::to_string(i + 1) + " has " + std::to_string(cells.size()) +
                                     " fields, expected " + std::to_string(row.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = text::parse_value(cells[c]);
            if (!v) {
                throw std::runtime_error("csv: bad number '" + std::string(cells[c]) + "' on row " +
                                         std::to_string(i + 1));
            }
            row[c] = *v;
        }
        series.append_row(row);
    }
    return series;
}

}  // namespace mgsim
