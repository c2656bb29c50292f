#pragma once

#include <stdexcept>
#include <string>

namespace cogfric {

// Error taxonomy. Each failure mode gets its own type so callers can
// distinguish recoverable conditions (ProviderError, NoPath) from
// programming errors (DimensionMismatch, OutOfBounds).

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg)
        : std::runtime_error("validation error: " + msg) {}
};

struct OutOfBounds : std::runtime_error {
    explicit OutOfBounds(const std::string& msg) : std::runtime_error("out of bounds: " + msg) {}
};

struct NoPath : std::runtime_error {
    explicit NoPath(const std::string& msg) : std::runtime_error("no path: " + msg) {}
};

struct InvalidEndpoint : std::runtime_error {
    explicit InvalidEndpoint(const std::string& msg)
        : std::runtime_error("invalid endpoint: " + msg) {}
};

struct NoHistory : std::runtime_error {
    NoHistory() : std::runtime_error("no percept history (first step)") {}
};

struct PathExhausted : std::runtime_error {
    PathExhausted() : std::runtime_error("path exhausted (agent already at goal)") {}
};

struct EmptyDescriptor : std::runtime_error {
    EmptyDescriptor() : std::runtime_error("cannot embed an empty descriptor") {}
};

struct EmptyList : std::runtime_error {
    EmptyList() : std::runtime_error("cannot aggregate an empty vector list") {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg)
        : std::runtime_error("dimension mismatch: " + msg) {}
};

// Remote or local expectation provider failed to deliver usable samples.
// The run records the affected event as skipped; it never fabricates a value.
struct ProviderError : std::runtime_error {
    explicit ProviderError(const std::string& msg) : std::runtime_error("provider error: " + msg) {}
};

// All sampled expectation descriptors were empty, so no expectation
// embedding exists. Only reachable through an empty triggering percept.
struct EmptyExpectation : std::runtime_error {
    EmptyExpectation() : std::runtime_error("expectation samples are all empty") {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io error: " + msg) {}
};

}  // namespace cogfric
