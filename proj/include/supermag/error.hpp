#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace supermag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad file, unknown cell, bad argument).
class InputError : public Error {
public:
    using Error::Error;
};

/// The requested physical configuration cannot work (no bias window,
/// I_c < I_sot, PDP target unreachable, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Opposing drivers joined by a zero-resistance path.
class ShortCircuitError : public Error {
public:
    ShortCircuitError(const std::string &what, std::vector<std::string> nodes)
        : Error(what), nodes_(std::move(nodes)) {}

    const std::vector<std::string> &nodes() const { return nodes_; }

private:
    std::vector<std::string> nodes_;
};

/// Switching wires feed back on themselves without settling.
class LoopError : public Error {
public:
    LoopError(const std::string &what, std::vector<std::string> cycle)
        : Error(what), cycle_(std::move(cycle)) {}

    const std::vector<std::string> &cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

} // namespace supermag
