#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "jetvar/error.hpp"

using namespace jetvar;

int main(int argc, char** argv)
{
    CLI::App app{"jetvar: variational calculus on jet bundles"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    app.fallthrough();
    cli::RunOptions o;
    std::string spec_path;
    std::uint64_t seed = 0;
    double h = 0, tol = 0, a = 0;
    int panels = 0;
    app.add_flag("--json", o.json, "machine-readable output");
    auto* seed_opt = app.add_option("--seed", seed, "random seed for zero tests");
    auto* h_opt = app.add_option("--h", h, "integration step")->check(CLI::PositiveNumber);
    auto* panels_opt = app.add_option("--panels", panels, "Simpson panels (even)")->check(CLI::Range(2, 100000000));
    auto* tol_opt = app.add_option("--tol", tol, "zero-test tolerance")->check(CLI::PositiveNumber);
    app.add_option("--radius", o.radius, "sphere radius for demo-sphere")->check(CLI::PositiveNumber);
    auto* a_opt = app.add_option("--a", a, "trial interval length in units of pi*radius")->check(CLI::PositiveNumber);
    app.add_option("--out", o.out_dir, "directory for CSV output");
    app.add_flag("--fault", o.fault, "inject a momentum fault (negative control)");

    auto* derive = app.add_subcommand("derive", "momenta, Euler-Lagrange form and boundary form");
    auto* jacobi = app.add_subcommand("jacobi", "Jacobi Lagrangian, its equations and the tangency check");
    auto* stability = app.add_subcommand("stability", "trial integrals of the Hessian form");
    auto* demo = app.add_subcommand("demo-sphere", "the unit-sphere equator pipeline");
    auto* self = app.add_subcommand("selfcheck", "run the invariant suites");
    for (auto* s : {derive, jacobi, stability}) s->add_option("--spec", spec_path, "problem file")->required();
    (void)demo;
    (void)self;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (*seed_opt) o.seed = seed;
    if (*h_opt) o.h = h;
    if (*panels_opt) {
        if (panels % 2) {
            std::cerr << "error: --panels must be even\n";
            return 2;
        }
        o.panels = panels;
    }
    if (*tol_opt) o.tol = tol;
    if (*a_opt) o.a = a;

    ProblemSpec spec;
    if (!spec_path.empty()) {
        try {
            spec = load_problem_spec(spec_path);
            problem_lagrangian(spec);
        } catch (const ParseError& e) {
            std::cerr << spec_path << ":" << e.line() << ":" << e.column() << ": parse error: " << e.message() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << spec_path << ": " << e.what() << "\n";
            return 2;
        }
    }
    try {
        if (*derive) return cli::cmd_derive(spec, o, std::cout);
        if (*jacobi) return cli::cmd_jacobi(spec, o, std::cout);
        if (*stability) return cli::cmd_stability(spec, o, std::cout);
        if (*demo) return cli::cmd_demo_sphere(o, std::cout);
        return cli::cmd_selfcheck(o, std::cout);
    } catch (const cli::UsageError& e) {
        std::cerr << spec_path << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
