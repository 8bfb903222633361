#include "jetvar/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "jetvar/error.hpp"

namespace jetvar {

Bindings ProblemSpec::param_values() const
{
    Bindings b;
    for (const auto& [k, v] : params) b[k] = v;
    return b;
}

std::vector<std::string> ProblemSpec::param_names() const
{
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(p.first);
    return out;
}

std::vector<std::pair<std::size_t, std::string>> split_list(const std::string& s)
{
    std::vector<std::pair<std::size_t, std::string>> out;
    int depth = 0;
    std::size_t start = 0;
    auto push = [&](std::size_t end) {
        std::size_t a = start, b = end;
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        out.emplace_back(a, s.substr(a, b - a));
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == ',' && depth == 0) {
            push(i);
            start = i + 1;
        }
    }
    push(s.size());
    return out;
}

namespace {

bool is_identifier(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

double constant_value(const Expr& e, int line, int col)
{
    if (!free_symbols(e).empty()) throw ParseError(line, col, "expected a numeric constant");
    return evaluate(e, {});
}

} // namespace

ProblemSpec parse_problem_spec(const std::string& text)
{
    static const std::set<std::string> known{"base",     "fibers", "order", "params",   "lagrangian", "metric",
                                             "metric_components", "solution", "trial", "field", "interval",
                                             "h",        "panels", "tol",   "seed"};
    ProblemSpec spec;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw.substr(0, raw.find('#'));
        if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::size_t colon = s.find(':');
        std::size_t k0 = s.find_first_not_of(" \t");
        if (colon == std::string::npos) throw ParseError(line, static_cast<int>(k0) + 1, "expected 'key: value'");
        std::string key = s.substr(k0, colon - k0);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        if (!known.count(key)) throw ParseError(line, static_cast<int>(k0) + 1, "unknown key '" + key + "'");
        if (key != "trial" && !seen.insert(key).second)
            throw ParseError(line, static_cast<int>(k0) + 1, "repeated key '" + key + "'");
        std::string value = s.substr(colon + 1);
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
        const int vcol = static_cast<int>(colon) + 2;  // 1-based column of value[0]
        auto items = split_list(value);
        auto col_of = [&](std::size_t off) { return vcol + static_cast<int>(off); };
        auto exprs = [&] {
            std::vector<Expr> out;
            for (const auto& [off, piece] : items) {
                if (piece.empty()) throw ParseError(line, col_of(off), "empty list item");
                out.push_back(parse_infix(piece, line, col_of(off)));
            }
            return out;
        };
        auto names = [&] {
            std::vector<std::string> out;
            for (const auto& [off, piece] : items) {
                if (!is_identifier(piece)) throw ParseError(line, col_of(off), "expected a name, got '" + piece + "'");
                out.push_back(piece);
            }
            return out;
        };
        auto single = [&] {
            if (items.size() != 1 || items[0].second.empty())
                throw ParseError(line, vcol, "expected a single value for '" + key + "'");
            return items[0];
        };

        if (key == "base") {
            spec.base = names();
        } else if (key == "fibers") {
            spec.fibers = names();
        } else if (key == "order") {
            auto [off, piece] = single();
            double v = constant_value(parse_infix(piece, line, col_of(off)), line, col_of(off));
            if (v != 1.0 && v != 2.0) throw ParseError(line, col_of(off), "order must be 1 or 2");
            spec.order = static_cast<int>(v);
        } else if (key == "params") {
            for (const auto& [off, piece] : items) {
                std::size_t eq = piece.find('=');
                if (eq == std::string::npos) throw ParseError(line, col_of(off), "expected 'name = value'");
                std::string name = piece.substr(0, eq);
                while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
                if (!is_identifier(name)) throw ParseError(line, col_of(off), "bad parameter name '" + name + "'");
                int c = col_of(off + eq + 1);
                spec.params.emplace_back(name, constant_value(parse_infix(piece.substr(eq + 1), line, c), line, c));
            }
        } else if (key == "lagrangian") {
            auto [off, piece] = single();
            spec.lagrangian = parse_infix(piece, line, col_of(off));
        } else if (key == "metric") {
            spec.metric_name = single().second;
        } else if (key == "metric_components") {
            spec.metric_components = exprs();
        } else if (key == "solution") {
            spec.solution = exprs();
        } else if (key == "trial") {
            spec.trials.push_back(exprs());
        } else if (key == "field") {
            spec.field = exprs();
        } else if (key == "interval") {
            auto e = exprs();
            if (e.size() != 2) throw ParseError(line, vcol, "interval needs two endpoints");
            double a = constant_value(e[0], line, col_of(items[0].first));
            double b = constant_value(e[1], line, col_of(items[1].first));
            if (!(b > a)) throw ParseError(line, vcol, "interval must be increasing");
            spec.interval = {a, b};
        } else {
            auto [off, piece] = single();
            double v = constant_value(parse_infix(piece, line, col_of(off)), line, col_of(off));
            if (key == "h") {
                if (!(v > 0)) throw ParseError(line, col_of(off), "h must be positive");
                spec.h = v;
            } else if (key == "panels") {
                if (v < 2 || v != std::floor(v)) throw ParseError(line, col_of(off), "panels must be an integer >= 2");
                spec.panels = static_cast<int>(v);
            } else if (key == "tol") {
                if (!(v > 0)) throw ParseError(line, col_of(off), "tol must be positive");
                spec.tol = v;
            } else {
                if (v < 0 || v != std::floor(v)) throw ParseError(line, col_of(off), "seed must be a nonnegative integer");
                spec.seed = static_cast<std::uint64_t>(v);
            }
        }
    }
    if (spec.fibers.empty() && spec.metric_name) spec.fibers = metric_from_catalog(*spec.metric_name).coords();
    if (spec.fibers.empty()) throw ParseError(line + 1, 1, "missing 'fibers' (or a catalog 'metric')");
    if (!spec.lagrangian && !spec.metric_name && spec.metric_components.empty())
        throw ParseError(line + 1, 1, "missing 'lagrangian' (or a 'metric')");
    return spec;
}

ProblemSpec load_problem_spec(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read spec file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_problem_spec(ss.str());
}

std::optional<MetricChart> problem_metric(const ProblemSpec& spec)
{
    if (spec.metric_name) return metric_from_catalog(*spec.metric_name);
    if (spec.metric_components.empty()) return std::nullopt;
    const std::size_t n = spec.fibers.size();
    if (spec.metric_components.size() != n * n)
        throw Error(ErrorKind::InvalidArgument, "metric_components needs n*n entries for n fibers");
    ExprMatrix g(n, std::vector<Expr>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) g[a][b] = spec.metric_components[a * n + b];
    return MetricChart(spec.fibers, g);
}

Lagrangian problem_lagrangian(const ProblemSpec& spec)
{
    if (spec.lagrangian) {
        JetChart c(spec.base, spec.fibers, spec.order, spec.param_names());
        c.check(*spec.lagrangian);
        return Lagrangian(c, *spec.lagrangian, spec.order);
    }
    auto g = problem_metric(spec);
    if (!g) throw Error(ErrorKind::InvalidArgument, "spec has neither a lagrangian nor a metric");
    if (spec.base.size() != 1) throw Error(ErrorKind::InvalidArgument, "geodesic problems need one base coordinate");
    return geodesic_lagrangian(*g, spec.base[0]);
}

} // namespace jetvar
