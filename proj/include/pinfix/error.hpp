#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pinfix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid shape construction (degenerate, self-intersecting, non-finite).
struct GeometryError : Error {
    using Error::Error;
};

/// A part footprint leaves the pin grid.
struct OutOfBoundsError : Error {
    OutOfBoundsError(std::string part_id, const std::string& what)
        : Error(what), part(std::move(part_id)) {}
    std::string part;
};

/// Bad operation arguments (pin index, displacement, grid parameters).
struct ArgumentError : Error {
    using Error::Error;
};

/// The LP solver did not reach a verdict; never mapped to a silent true/false.
struct IndeterminateError : Error {
    using Error::Error;
};

struct ValidationIssue {
    std::string path;  // JSON pointer
    std::string message;
};

struct ValidationError : Error {
    explicit ValidationError(std::vector<ValidationIssue> list)
        : Error(summarize(list)), issues(std::move(list)) {}

    std::vector<ValidationIssue> issues;

private:
    static std::string summarize(const std::vector<ValidationIssue>& list) {
        std::string s = "invalid scenario";
        for (const auto& i : list) s += "\n  " + (i.path.empty() ? "/" : i.path) + ": " + i.message;
        return s;
    }
};

}  // namespace pinfix
