#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace prodres {

// State or derivative became non-finite while stepping a reservoir or
// integrating a generator. Carries the step index at which it happened.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, std::int64_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

// A zero input (or zero feedback value) annihilates the multiplicative
// history of a product node; distinct from an ordinary domain violation.
class zero_input_error : public std::domain_error {
public:
    explicit zero_input_error(const std::string& what) : std::domain_error(what) {}
};

// Configuration file / experiment parameter validation failure.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// File I/O failure, annotated with the offending path.
class io_error : public std::runtime_error {
public:
    io_error(const std::string& what, const std::string& path)
        : std::runtime_error(what + ": " + path), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace prodres
