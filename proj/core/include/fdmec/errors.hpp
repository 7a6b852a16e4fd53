#pragma once

#include <stdexcept>
#include <string>

namespace fdmec {

// Bad user-supplied input: config fields, out-of-range arguments, malformed files.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// The model itself has no feasible point (or none could be constructed).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside a solver: non-finite values, divergence.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem trouble: missing, unreadable, or unwritable files.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fdmec
