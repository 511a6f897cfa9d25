#ifndef SGFLOW_ERRORS_HPP
#define SGFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sgflow {

// Base of all library errors. `name()` is a stable machine-readable tag,
// used by the CLI when emitting error records.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Invalid inputs: bad measures, bad config, guard violations. CLI exit code 2.
class ValidationFailure : public Error {
    using Error::Error;
};

// Numerical solve failures. CLI exit code 3.
class SolveFailure : public Error {
    using Error::Error;
};

// File and format problems. CLI exit code 4.
class IoFailure : public Error {
    using Error::Error;
};

struct DimensionMismatch : ValidationFailure {
    explicit DimensionMismatch(const std::string& msg)
        : ValidationFailure("DimensionMismatch", msg) {}
};

struct NegativeWeight : ValidationFailure {
    explicit NegativeWeight(const std::string& msg)
        : ValidationFailure("NegativeWeight", msg) {}
};

struct BadNormalization : ValidationFailure {
    explicit BadNormalization(const std::string& msg)
        : ValidationFailure("BadNormalization", msg) {}
};

struct NonFinitePoint : ValidationFailure {
    explicit NonFinitePoint(const std::string& msg)
        : ValidationFailure("NonFinitePoint", msg) {}
};

struct MapProducedNonFinite : ValidationFailure {
    explicit MapProducedNonFinite(const std::string& msg)
        : ValidationFailure("MapProducedNonFinite", msg) {}
};

struct AxisOutOfRange : ValidationFailure {
    explicit AxisOutOfRange(const std::string& msg)
        : ValidationFailure("AxisOutOfRange", msg) {}
};

struct EpsilonNonPositive : ValidationFailure {
    explicit EpsilonNonPositive(const std::string& msg)
        : ValidationFailure("EpsilonNonPositive", msg) {}
};

struct InvalidSolverOption : ValidationFailure {
    explicit InvalidSolverOption(const std::string& msg)
        : ValidationFailure("InvalidSolverOption", msg) {}
};

struct InstanceTooLarge : ValidationFailure {
    explicit InstanceTooLarge(const std::string& msg)
        : ValidationFailure("InstanceTooLarge", msg) {}
};

struct NotConverged : SolveFailure {
    NotConverged(const std::string& msg, double last_marginal_error, long iterations)
        : SolveFailure("NotConverged", msg),
          last_marginal_error(last_marginal_error),
          iterations(iterations) {}
    double last_marginal_error;
    long iterations;
};

struct Degenerate : SolveFailure {
    explicit Degenerate(const std::string& msg) : SolveFailure("Degenerate", msg) {}
};

struct NonFiniteUpdate : SolveFailure {
    explicit NonFiniteUpdate(const std::string& msg)
        : SolveFailure("NonFiniteUpdate", msg) {}
};

struct ParseError : ValidationFailure {
    ParseError(int line, const std::string& msg)
        : ValidationFailure("ParseError",
                            "line " + std::to_string(line) + ": " + msg),
          line(line) {}
    int line;
};

struct ValidationError : ValidationFailure {
    ValidationError(const std::string& field, const std::string& constraint)
        : ValidationFailure("ValidationError", field + ": " + constraint),
          field(field), constraint(constraint) {}
    std::string field;
    std::string constraint;
};

struct UnknownKey : ValidationFailure {
    explicit UnknownKey(const std::string& key)
        : ValidationFailure("UnknownKey", "unknown config key: " + key), key(key) {}
    std::string key;
};

struct IoError : IoFailure {
    explicit IoError(const std::string& msg) : IoFailure("IoError", msg) {}
};

struct FormatVersionMismatch : IoFailure {
    explicit FormatVersionMismatch(const std::string& msg)
        : IoFailure("FormatVersionMismatch", msg) {}
};

struct ChecksumMismatch : IoFailure {
    explicit ChecksumMismatch(const std::string& msg)
        : IoFailure("ChecksumMismatch", msg) {}
};

} // namespace sgflow

#endif
