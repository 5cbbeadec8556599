#pragma once

#include <stdexcept>
#include <string>

namespace pencil {

// Input violates a stated precondition; callers map this to exit code 2.
class Refused : public std::runtime_error {
public:
    explicit Refused(const std::string& what) : std::runtime_error(what) {}
};

// Malformed problem or run configuration (also exit code 2).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to reach its tolerance (exit code 3).
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pencil
