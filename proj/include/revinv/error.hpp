#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace revinv {

// All library failures derive from Error. The module tag ("corpus",
// "extract", ...) is prefixed to the message so the CLI can surface it as is.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

// Malformed input text. line is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(std::string module, const std::string& what, std::size_t line = 0)
        : Error(std::move(module), line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CorpusError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// No guard statement at the reported source location.
class ExtractionFailure : public Error {
public:
    using Error::Error;
};

// Input collapses to nothing usable (empty predicate, empty document, zero variance).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public Error {
public:
    using Error::Error;
};

class EmptySelectionError : public Error {
public:
    using Error::Error;
};

}  // namespace revinv
