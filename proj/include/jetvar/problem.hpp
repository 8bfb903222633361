#pragma once

// Problem specification files for the command-line front end.
//
// One "key: value" pair per line; '#' starts a comment. List values are
// separated by commas at parenthesis depth 0. Expressions use the infix
// grammar of parse_infix. Keys:
//
//   base:       t                      base coordinate names (default t)
//   fibers:     x, y                   fiber coordinate names
//   order:      1                      Lagrangian order, 1 or 2
//   params:     w = 1.5, m = 2         parameter names with numeric values
//   lagrangian: 1/2*y_t^2              density
//   metric:     sphere1                catalog metric; supplies the geodesic
//                                      Lagrangian and fibers when absent
//   metric_components: g11, g12, g21, g22   row-major, in the fiber names
//   solution:   cos(t), sin(t)         closed-form solution, one per fiber
//   trial:      sin(2*t)*cos(t), ...   trial deformation; repeatable
//   field:      -y, x                  vertical field X(t, y)
//   interval:   0, pi                  trial interval
//   h, panels, tol, seed               run parameters
//
// Unknown or repeated keys (other than trial) are parse errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jetvar/riemann.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

struct ProblemSpec {
    std::vector<std::string> base{"t"};
    std::vector<std::string> fibers;
    int order = 1;
    std::vector<std::pair<std::string, double>> params;
    std::optional<Expr> lagrangian;
    std::optional<std::string> metric_name;
    std::vector<Expr> metric_components;
    std::vector<Expr> solution;
    std::vector<std::vector<Expr>> trials;
    std::vector<Expr> field;
    std::optional<std::pair<double, double>> interval;
    std::optional<double> h;
    std::optional<int> panels;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;

    Bindings param_values() const;
    std::vector<std::string> param_names() const;
};

/// Throws ParseError with 1-based line and column.
ProblemSpec parse_problem_spec(const std::string& text);
ProblemSpec load_problem_spec(const std::string& path);

/// Metric from metric or metric_components, if either is present.
std::optional<MetricChart> problem_metric(const ProblemSpec& spec);

/// The Lagrangian of the spec, or the geodesic Lagrangian of its metric.
/// Throws invalid-argument when neither is given.
Lagrangian problem_lagrangian(const ProblemSpec& spec);

/// Splits at commas outside parentheses; returns (offset, piece) pairs with
/// surrounding blanks trimmed.
std::vector<std::pair<std::size_t, std::string>> split_list(const std::string& s);

} // namespace jetvar
