#include "mgsim/text.hpp"

#include "mgsim/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace mgsim {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column),
      detail_(message) {}

SemanticError::SemanticError(const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line),
      detail_(message) {}

NumericalDivergence::NumericalDivergence(std::string component, std::string variable, double time,
                                         double value)
    : std::runtime_error("numerical divergence at t=" + text::format_double(time) + " s in " + component +
                         "." + variable + " (value " + text::format_double(value) + ")"),
      component_(std::move(component)),
      variable_(std::move(variable)),
      time_(time),
      value_(value) {}

namespace text {

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const auto c = static_cast<unsigned char>(line[i]);
        if (c == '#') {
            break;
        }
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') {
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), start + 1});
    }
    return tokens;
}

std::optional<double> parse_value(std::string_view token) {
    if (token.empty()) {
        return std::nullopt;
    }
    // The suffix becomes a decimal exponent so "10u" parses to the same double as "10e-6".
    std::string_view exponent;
    switch (token.back()) {
        case 'u': exponent = "e-6"; break;
        case 'm': exponent = "e-3"; break;
        case 'k': exponent = "e3"; break;
        case 'M': exponent = "e6"; break;
        default: break;
    }
    if (!exponent.empty()) {
        token.remove_suffix(1);
        if (token.find_first_of("eE") != std::string_view::npos) {
            return std::nullopt;
        }
    }
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    if (token.empty()) {
        return std::nullopt;
    }
    std::string digits(token);
    digits += exponent;
    double value = 0.0;
    const auto* first = digits.data();
    const auto* last = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

KeyValue split_key_value(const Token& token, std::size_t line) {
    const auto eq = token.text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ParseError(line, token.column, "expected key=value, got '" + std::string(token.text) + "'");
    }
    return {token.text.substr(0, eq), token.text.substr(eq + 1), token.column};
}

double require_value(const KeyValue& kv, std::size_t line) {
    if (auto v = parse_value(kv.value)) {
        return *v;
    }
    throw ParseError(line, kv.column + kv.key.size() + 1,
                     "invalid number '" + std::string(kv.value) + "' for " + std::string(kv.key));
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return {buf, ptr};
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        if (end == text.size()) {
            break;
        }
        start = end + 1;
    }
    return lines;
}

}  // namespace text
}  // namespace mgsim
