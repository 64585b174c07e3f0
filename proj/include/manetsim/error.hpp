#pragma once

#include <stdexcept>
#include <string>

namespace manetsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario file could not be parsed or violates an invariant.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

/// Attempt to schedule an event before the current simulation clock.
class ScheduleError : public Error {
public:
    explicit ScheduleError(const std::string& what) : Error("schedule error: " + what) {}
};

/// An event handler failed; carries the offending event description.
class EngineFault : public Error {
public:
    explicit EngineFault(const std::string& what) : Error("engine fault: " + what) {}
};

/// Internal protocol inconsistency (a simulation bug, not a network condition).
class ProtocolFault : public Error {
public:
    explicit ProtocolFault(const std::string& what) : Error("protocol fault: " + what) {}
};

/// Metrics ledger integrity violation (receive without send, double receive, ...).
class LedgerFault : public Error {
public:
    explicit LedgerFault(const std::string& what) : Error("ledger fault: " + what) {}
};

} // namespace manetsim
