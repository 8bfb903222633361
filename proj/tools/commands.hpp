#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "jetvar/problem.hpp"

namespace jetvar::cli {

/// A spec that lacks what the command needs; reported with exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Command-line overrides; unset values fall back to the spec, then to defaults.
struct RunOptions {
    bool json = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> h;
    std::optional<int> panels;
    std::optional<double> tol;
    double radius = 1.0;
    std::optional<double> a;
    std::string out_dir;
    bool fault = false;
};

// Each command writes its report to `os` and returns the exit status:
// 0 success, 1 a check failed.
int cmd_derive(const ProblemSpec& spec, const RunOptions& o, std::ostream& os);
int cmd_jacobi(const ProblemSpec& spec, const RunOptions& o, std::ostream& os);
int cmd_stability(const ProblemSpec& spec, const RunOptions& o, std::ostream& os);
int cmd_demo_sphere(const RunOptions& o, std::ostream& os);
int cmd_selfcheck(const RunOptions& o, std::ostream& os);

} // namespace jetvar::cli
