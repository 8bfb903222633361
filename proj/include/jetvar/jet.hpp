#pragma once

// Jet charts: coordinate lists for J^kB and for the composite bundle used by
// the Jacobi construction, plus total derivatives and prolongations.
//
// Naming. Base symbols default to "t" (m = 1) or "x1".."xm"; fiber symbols to
// "y" (n = 1) or "y1".."yn". A fiber jet appends "_" and the base names, one
// per derivative, in base order: y_t, y_tt, phi_tx. The composite layer uses
// the perturbation names ("X" for a single fiber, "X" + fiber name otherwise)
// and appends base names then fiber names: X_t, X_y, X_ty.
//
// Second jets are stored once per unordered index set. partial() on a stored
// symbol gives the raw derivative; sym_partial() divides by the number of
// ordered index tuples the symbol stands for, which is the convention where
// sums over ordered indices reproduce the chain rule.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "jetvar/eval.hpp"
#include "jetvar/expr.hpp"

namespace jetvar {

constexpr int kMaxJetOrder = 4;

/// Derivative counts per base (or fiber) direction.
using MultiIndex = std::vector<int>;

int total(const MultiIndex& c);
/// All count vectors of length m with total k, lexicographically descending.
std::vector<MultiIndex> multi_indices(int m, int k);
/// Number of ordered index tuples with these counts: |c|! / prod c_i!.
std::int64_t multiplicity(const MultiIndex& c);

enum class SymbolKind { Base, Fiber, Composite, Parameter };

struct JetSymbol {
    std::string name;
    SymbolKind kind = SymbolKind::Base;
    int component = 0;          // base index, fiber index, or composite index
    MultiIndex base_counts;     // fiber and composite symbols
    MultiIndex fiber_counts;    // composite symbols only
    int order() const { return total(base_counts) + total(fiber_counts); }
};

class JetChart {
public:
    JetChart(std::vector<std::string> bases, std::vector<std::string> fibers, int order,
             std::vector<std::string> parameters = {}, std::vector<std::string> perturbations = {});

    /// Default names; make_chart(1, 1, 2) has t, y, y_t, y_tt.
    static JetChart make(int m, int n, int order);

    int m() const { return static_cast<int>(bases_.size()); }
    int n() const { return static_cast<int>(fibers_.size()); }
    int order() const { return order_; }
    bool is_composite() const { return composite_order_ > 0; }
    int composite_order() const { return composite_order_; }

    const std::vector<std::string>& base_names() const { return bases_; }
    const std::vector<std::string>& fiber_names() const { return fibers_; }
    const std::vector<std::string>& parameter_names() const { return params_; }
    const std::vector<std::string>& perturbation_names() const { return perts_; }

    Expr base(int mu) const { return Expr::symbol(bases_.at(mu)); }
    Expr fiber(int i) const { return Expr::symbol(fibers_.at(i)); }
    std::string jet_name(int i, const MultiIndex& counts) const;
    std::string composite_name(int a, const MultiIndex& base_counts, const MultiIndex& fiber_counts) const;
    /// Throws order-overflow if the jet is beyond the chart.
    Expr jet(int i, const MultiIndex& counts) const;
    Expr composite(int a, const MultiIndex& base_counts, const MultiIndex& fiber_counts) const;
    /// Unit multi-index along base direction mu.
    MultiIndex unit(int mu) const;

    /// All symbols in declaration order.
    const std::vector<JetSymbol>& symbols() const { return symbols_; }
    bool has(const std::string& name) const { return index_.count(name) != 0; }
    /// Throws unknown-symbol.
    const JetSymbol& lookup(const std::string& name) const;
    /// Fiber jets with order <= k, grouped by order then component.
    std::vector<const JetSymbol*> fiber_jets(int max_order) const;
    std::vector<const JetSymbol*> composite_symbols() const;

    /// Throws unknown-symbol if e mentions anything outside the chart.
    void check(const Expr& e) const;

    /// Same names, different order; the composite layer (if any) is rebuilt.
    JetChart with_order(int order) const;
    JetChart with_parameters(std::vector<std::string> params) const;
    /// Plain chart with fibers (y..., X...) of the same order, where X are the
    /// perturbation names. X-jets there are ordinary jets of a field X(x).
    JetChart doubled(int order = -1) const;

    friend JetChart composite_extend(const JetChart& c);

private:
    void add_symbol(JetSymbol s);
    void build();

    std::vector<std::string> bases_;
    std::vector<std::string> fibers_;
    std::vector<std::string> params_;
    std::vector<std::string> perts_;
    int order_ = 1;
    int composite_order_ = 0;
    std::vector<JetSymbol> symbols_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Adds the vertical coordinates X^a with mixed jets up to order max(2, order).
/// Throws already-composite.
JetChart composite_extend(const JetChart& c);

/// partial() after checking that the symbol belongs to the chart.
Expr chart_partial(const Expr& e, const std::string& symbol, const JetChart& c);
/// Symmetrized-convention partial: raw partial divided by the multiplicity
/// of the stored jet symbol.
Expr sym_partial(const Expr& e, const std::string& symbol, const JetChart& c);

/// d_mu e on the chart, with the composite chain rule on the X-layer.
/// Throws order-overflow when a needed jet is beyond the chart.
Expr total_derivative(const Expr& e, int mu, const JetChart& c);
/// d_I e for a multi-index of base counts.
Expr total_derivative(const Expr& e, const MultiIndex& counts, const JetChart& c);

/// Substitution map {X^i_I -> d_I X^i} for |I| <= order, keyed by the jet
/// names of the X fibers of c.doubled(). Components may depend on base,
/// order-0 fiber, parameter and composite symbols; anything else throws
/// dependence-on-jets.
SubstitutionMap prolong_vertical_field(const std::vector<Expr>& components, int order, const JetChart& c);

/// J^kX(e) = sum over stored I of (d_I X^i) * raw dE/dy^i_I, using a map from
/// prolong_vertical_field or any map with the same keys.
Expr prolonged_action(const Expr& e, const SubstitutionMap& prolongation, const JetChart& c);

/// A section x -> y(x), and optionally a composite section (x, y) -> z(x, y).
class SectionSamples {
public:
    using Callable = std::function<std::vector<double>(const std::vector<double>&)>;

    /// Components as closed-form expressions in the base symbols. Composite
    /// components, if given, are expressions in base and fiber symbols.
    static SectionSamples analytic(std::vector<Expr> components, std::vector<Expr> composite = {});
    /// Central differences with step h (default 1e-4); orders up to 2.
    static SectionSamples callable(Callable f, int n, double h = 1e-4);
    /// One-dimensional base only. Derivatives come from a degree-6 polynomial
    /// through the 7 samples nearest to the evaluation point.
    static SectionSamples tabulated(std::vector<double> times, std::vector<std::vector<double>> values);

    bool has_composite() const { return !composite_.empty(); }

    friend Bindings numeric_jet(const SectionSamples& s, const JetChart& c, const std::vector<double>& x,
                                int order);

private:
    enum class Mode { Analytic, Callable, Tabulated };
    Mode mode_ = Mode::Analytic;
    std::vector<Expr> components_;
    std::vector<Expr> composite_;
    Callable fn_;
    int n_ = 0;
    double h_ = 1e-4;
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
};

/// Bindings for base symbols, fiber jets up to `order` and, when the section
/// has them, composite symbols up to the chart's composite order. Throws
/// domain-error outside the sampled range.
Bindings numeric_jet(const SectionSamples& s, const JetChart& c, const std::vector<double>& x, int order);

} // namespace jetvar
