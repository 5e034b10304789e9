#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace primelab {

/// Argument outside the mathematical domain of an operation (a >= q, limit < 2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Request exceeds a configured desk-scale cap (sieve bound, class-lookup work).
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent generator configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A generator loop hit its iteration hard cap.
class NonTerminationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The bit source rejected too many times in a row; the underlying stream is broken.
class BitSourceError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Reading or writing a report file failed; the message names the path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A benchmark trial failed; wraps the generator error with the trial index.
class TrialError : public std::runtime_error {
public:
    TrialError(std::uint64_t trial, std::string kind, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial), kind_(std::move(kind)) {}

    std::uint64_t trial() const { return trial_; }
    /// Name of the underlying error class, e.g. "NonTerminationError".
    const std::string& kind() const { return kind_; }

private:
    std::uint64_t trial_;
    std::string kind_;
};

/// Class name of a library error, "Error" for anything else.
inline std::string error_kind(const std::exception& e) {
    if (const auto* t = dynamic_cast<const TrialError*>(&e)) return t->kind();
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const ResourceLimitError*>(&e)) return "ResourceLimitError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const NonTerminationError*>(&e)) return "NonTerminationError";
    if (dynamic_cast<const BitSourceError*>(&e)) return "BitSourceError";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

}  // namespace primelab
