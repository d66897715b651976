#pragma once

#include <stdexcept>
#include <string>

namespace nf {

// All firing strengths vanished below the degenerate-sum floor; the input is
// far outside every membership function's support.
class DegenerateActivationError : public std::runtime_error {
public:
    explicit DegenerateActivationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss or non-finite activations.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// A training sample cannot be used (e.g. it degenerately activates no rule).
class TrainingDataError : public std::runtime_error {
public:
    explicit TrainingDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// CSV header does not match the expected schema.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// A CSV row failed to parse; message carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A feature is constant and cannot be min-max scaled.
class ScaleError : public std::runtime_error {
public:
    explicit ScaleError(const std::string& msg) : std::runtime_error(msg) {}
};

// A file could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nf
