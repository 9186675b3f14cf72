#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mgsim {

/// Syntax error in netlist or scenario text. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

/// Well-formed input that violates a model rule (duplicate id, unknown node,
/// non-positive line parameter, unknown key). Line is 0 when not tied to text.
class SemanticError : public std::runtime_error {
public:
    explicit SemanticError(const std::string& message, std::size_t line = 0);

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// A same-step dependency cycle among algebraic signals.
class AlgebraicLoopError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Rectifier feedforward denominator vanishes (misconfigured AC reference).
class DegenerateReference : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A state became non-finite (or left the configured magnitude bound).
class NumericalDivergence : public std::runtime_error {
public:
    NumericalDivergence(std::string component, std::string variable, double time, double value);

    [[nodiscard]] const std::string& component() const noexcept { return component_; }
    [[nodiscard]] const std::string& variable() const noexcept { return variable_; }
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    std::string component_;
    std::string variable_;
    double time_;
    double value_;
};

}  // namespace mgsim

namespace mgsim {

/// File could not be opened or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mgsim
