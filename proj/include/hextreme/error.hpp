#ifndef HEXTREME_ERROR_HPP
#define HEXTREME_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hextreme {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure (series, root finder, quadrature) failed to converge.
/// `partial()` carries the best value reached, if any.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, double partial = 0.0)
        : std::runtime_error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// Parameter estimation could not produce an admissible estimate.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data; `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace hextreme

#endif  // HEXTREME_ERROR_HPP
