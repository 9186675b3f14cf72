#pragma once

// Shared lexical helpers for the line-oriented netlist and scenario formats.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mgsim::text {

struct Token {
    std::string_view text;
    std::size_t column = 0;  // 1-based
};

/// Splits a line into whitespace-separated tokens, dropping a trailing `#` comment.
[[nodiscard]] std::vector<Token> tokenize(std::string_view line);

/// Parses a decimal number with an optional engineering suffix (u, m, k, M).
/// Returns nullopt when the token is not a complete number.
[[nodiscard]] std::optional<double> parse_value(std::string_view token);

struct KeyValue {
    std::string_view key;
    std::string_view value;
    std::size_t column = 0;
};

/// Splits `key=value`. Throws ParseError on a malformed token.
[[nodiscard]] KeyValue split_key_value(const Token& token, std::size_t line);

/// Parses the value half of a key=value token; throws ParseError with the value's column.
[[nodiscard]] double require_value(const KeyValue& kv, std::size_t line);

/// Shortest representation that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Splits text into lines (handles \n and \r\n).
[[nodiscard]] std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace mgsim::text
