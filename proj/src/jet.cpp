#include "jetvar/jet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jetvar/error.hpp"

namespace jetvar {

int total(const MultiIndex& c) { return std::accumulate(c.begin(), c.end(), 0); }

std::vector<MultiIndex> multi_indices(int m, int k)
{
    std::vector<MultiIndex> out;
    MultiIndex cur(m, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == m - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int c = left; c >= 0; --c) {
            cur[pos] = c;
            rec(pos + 1, left - c);
        }
    };
    if (m > 0) rec(0, k);
    return out;
}

std::int64_t multiplicity(const MultiIndex& c)
{
    auto fact = [](int n) {
        std::int64_t f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    std::int64_t r = fact(total(c));
    for (int v : c) r /= fact(v);
    return r;
}

namespace {

std::string default_name(const char* stem, const char* single, int count, int i)
{
    return count == 1 ? std::string(single) : std::string(stem) + std::to_string(i + 1);
}

bool valid_identifier(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

} // namespace

JetChart::JetChart(std::vector<std::string> bases, std::vector<std::string> fibers, int order,
                   std::vector<std::string> parameters, std::vector<std::string> perturbations)
    : bases_(std::move(bases)), fibers_(std::move(fibers)), params_(std::move(parameters)),
      perts_(std::move(perturbations)), order_(order)
{
    if (bases_.empty() || fibers_.empty())
        throw Error(ErrorKind::InvalidArgument, "a chart needs at least one base and one fiber coordinate");
    if (order < 1 || order > kMaxJetOrder)
        throw Error(ErrorKind::UnsupportedOrder, "jet order " + std::to_string(order) + " (supported: 1..4)");
    if (perts_.empty()) {
        for (const auto& f : fibers_) perts_.push_back(fibers_.size() == 1 ? "X" : "X" + f);
    }
    if (perts_.size() != fibers_.size())
        throw Error(ErrorKind::InvalidArgument, "one perturbation name per fiber is required");
    for (const auto* list : {&bases_, &fibers_, &params_, &perts_})
        for (const auto& s : *list)
            if (!valid_identifier(s)) throw Error(ErrorKind::InvalidArgument, "bad coordinate name '" + s + "'");
    build();
}

JetChart JetChart::make(int m, int n, int order)
{
    if (m < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "dimensions must be positive");
    std::vector<std::string> b, f;
    for (int i = 0; i < m; ++i) b.push_back(default_name("x", "t", m, i));
    for (int i = 0; i < n; ++i) f.push_back(default_name("y", "y", n, i));
    return JetChart(b, f, order);
}

void JetChart::add_symbol(JetSymbol s)
{
    if (!index_.emplace(s.name, symbols_.size()).second)
        throw Error(ErrorKind::InvalidArgument, "coordinate name '" + s.name + "' is generated twice");
    symbols_.push_back(std::move(s));
}

void JetChart::build()
{
    symbols_.clear();
    index_.clear();
    for (int mu = 0; mu < m(); ++mu) add_symbol({bases_[mu], SymbolKind::Base, mu, {}, {}});
    for (int k = 0; k <= order_; ++k)
        for (const auto& I : multi_indices(m(), k))
            for (int i = 0; i < n(); ++i) add_symbol({jet_name(i, I), SymbolKind::Fiber, i, I, {}});
    for (int k = 0; is_composite() && k <= composite_order_; ++k)
        for (int kb = k; kb >= 0; --kb)
            for (const auto& I : multi_indices(m(), kb))
                for (const auto& K : multi_indices(n(), k - kb))
                    for (int a = 0; a < n(); ++a)
                        add_symbol({composite_name(a, I, K), SymbolKind::Composite, a, I, K});
    for (std::size_t p = 0; p < params_.size(); ++p)
        add_symbol({params_[p], SymbolKind::Parameter, static_cast<int>(p), {}, {}});
}

std::string JetChart::jet_name(int i, const MultiIndex& counts) const
{
    std::string s = fibers_.at(i);
    if (total(counts) == 0) return s;
    s += '_';
    for (int mu = 0; mu < m(); ++mu)
        for (int r = 0; r < counts.at(mu); ++r) s += bases_[mu];
    return s;
}

std::string JetChart::composite_name(int a, const MultiIndex& bc, const MultiIndex& fc) const
{
    std::string s = perts_.at(a);
    if (total(bc) + total(fc) == 0) return s;
    s += '_';
    for (int mu = 0; mu < m(); ++mu)
        for (int r = 0; r < bc.at(mu); ++r) s += bases_[mu];
    for (int k = 0; k < n(); ++k)
        for (int r = 0; r < fc.at(k); ++r) s += fibers_[k];
    return s;
}

Expr JetChart::jet(int i, const MultiIndex& counts) const
{
    if (total(counts) > order_)
        throw Error(ErrorKind::OrderOverflow, "jet of order " + std::to_string(total(counts)) +
                                                  " exceeds chart order " + std::to_string(order_));
    return Expr::symbol(jet_name(i, counts));
}

Expr JetChart::composite(int a, const MultiIndex& bc, const MultiIndex& fc) const
{
    if (!is_composite()) throw Error(ErrorKind::InvalidArgument, "chart has no composite layer");
    if (total(bc) + total(fc) > composite_order_)
        throw Error(ErrorKind::OrderOverflow, "composite jet beyond order " + std::to_string(composite_order_));
    return Expr::symbol(composite_name(a, bc, fc));
}

MultiIndex JetChart::unit(int mu) const
{
    MultiIndex c(m(), 0);
    c.at(mu) = 1;
    return c;
}

const JetSymbol& JetChart::lookup(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(ErrorKind::UnknownSymbol, "'" + name + "' is not a chart coordinate");
    return symbols_[it->second];
}

std::vector<const JetSymbol*> JetChart::fiber_jets(int max_order) const
{
    std::vector<const JetSymbol*> out;
    for (const auto& s : symbols_)
        if (s.kind == SymbolKind::Fiber && s.order() <= max_order) out.push_back(&s);
    return out;
}

std::vector<const JetSymbol*> JetChart::composite_symbols() const
{
    std::vector<const JetSymbol*> out;
    for (const auto& s : symbols_)
        if (s.kind == SymbolKind::Composite) out.push_back(&s);
    return out;
}

void JetChart::check(const Expr& e) const
{
    for (const auto& s : free_symbols(e)) lookup(s);
}

JetChart JetChart::with_order(int order) const
{
    JetChart c(bases_, fibers_, order, params_, perts_);
    return is_composite() ? composite_extend(c) : c;
}

JetChart JetChart::with_parameters(std::vector<std::string> params) const
{
    JetChart c(bases_, fibers_, order_, std::move(params), perts_);
    return is_composite() ? composite_extend(c) : c;
}

JetChart JetChart::doubled(int order) const
{
    if (is_composite()) throw Error(ErrorKind::AlreadyComposite, "cannot double a composite chart");
    std::vector<std::string> f = fibers_;
    f.insert(f.end(), perts_.begin(), perts_.end());
    return JetChart(bases_, f, order < 0 ? order_ : order, params_);
}

JetChart composite_extend(const JetChart& c)
{
    if (c.is_composite()) throw Error(ErrorKind::AlreadyComposite, "chart already has a composite layer");
    JetChart out = c;
    out.composite_order_ = std::max(2, c.order_);
    out.build();
    return out;
}

Expr chart_partial(const Expr& e, const std::string& symbol, const JetChart& c)
{
    c.lookup(symbol);
    return partial(e, symbol);
}

Expr sym_partial(const Expr& e, const std::string& symbol, const JetChart& c)
{
    const JetSymbol& s = c.lookup(symbol);
    Expr d = partial(e, symbol);
    if (s.kind != SymbolKind::Fiber) return d;
    std::int64_t k = multiplicity(s.base_counts);
    return k == 1 ? d : d * Expr::rational(1, k);
}

Expr total_derivative(const Expr& e, int mu, const JetChart& c)
{
    if (mu < 0 || mu >= c.m()) throw Error(ErrorKind::InvalidArgument, "base index out of range");
    std::vector<Expr> terms;
    for (const auto& name : free_symbols(e)) {
        const JetSymbol& s = c.lookup(name);
        if (s.kind == SymbolKind::Parameter) continue;
        if (s.kind == SymbolKind::Base) {
            if (s.component == mu) terms.push_back(partial(e, name));
            continue;
        }
        Expr d = partial(e, name);
        if (d.is_zero()) continue;
        if (s.kind == SymbolKind::Fiber) {
            MultiIndex I = s.base_counts;
            ++I[mu];
            terms.push_back(c.jet(s.component, I) * d);
            continue;
        }
        MultiIndex I = s.base_counts;
        ++I[mu];
        std::vector<Expr> chain{c.composite(s.component, I, s.fiber_counts)};
        for (int k = 0; k < c.n(); ++k) {
            MultiIndex K = s.fiber_counts;
            ++K[k];
            chain.push_back(c.jet(k, c.unit(mu)) * c.composite(s.component, s.base_counts, K));
        }
        terms.push_back(add(std::move(chain)) * d);
    }
    return add(std::move(terms));
}

Expr total_derivative(const Expr& e, const MultiIndex& counts, const JetChart& c)
{
    Expr r = e;
    for (int mu = 0; mu < c.m(); ++mu)
        for (int k = 0; k < counts.at(mu); ++k) r = total_derivative(r, mu, c);
    return r;
}

SubstitutionMap prolong_vertical_field(const std::vector<Expr>& components, int order, const JetChart& c)
{
    if (static_cast<int>(components.size()) != c.n())
        throw Error(ErrorKind::InvalidArgument, "one vector-field component per fiber is required");
    if (order < 0 || order > kMaxJetOrder)
        throw Error(ErrorKind::UnsupportedOrder, "prolongation order " + std::to_string(order));
    for (const auto& x : components)
        for (const auto& name : free_symbols(x)) {
            const JetSymbol& s = c.lookup(name);
            if (s.kind == SymbolKind::Fiber && s.order() > 0)
                throw Error(ErrorKind::JetDependence, "vertical field depends on jet coordinate '" + name + "'");
        }
    JetChart work = order > c.order() ? c.with_order(order) : c;
    JetChart names = JetChart(c.base_names(), c.fiber_names(), std::max(1, order), c.parameter_names(),
                              c.perturbation_names())
                         .doubled();
    SubstitutionMap out;
    for (int i = 0; i < c.n(); ++i) {
        // Walk orders upward so each derivative reuses the previous one.
        std::map<MultiIndex, Expr> level{{MultiIndex(c.m(), 0), components[i]}};
        out[names.jet_name(c.n() + i, MultiIndex(c.m(), 0))] = components[i];
        for (int k = 1; k <= order; ++k) {
            std::map<MultiIndex, Expr> next;
            for (const auto& I : multi_indices(c.m(), k)) {
                // Lowest direction present, so the parent index is canonical.
                int mu = 0;
                while (I[mu] == 0) ++mu;
                MultiIndex parent = I;
                --parent[mu];
                Expr d = total_derivative(level.at(parent), mu, work);
                out[names.jet_name(c.n() + i, I)] = d;
                next.emplace(I, d);
            }
            level = std::move(next);
        }
    }
    return out;
}

Expr prolonged_action(const Expr& e, const SubstitutionMap& prolongation, const JetChart& c)
{
    JetChart names = JetChart(c.base_names(), c.fiber_names(), c.order(), c.parameter_names(),
                              c.perturbation_names())
                         .doubled();
    std::vector<Expr> terms;
    for (const auto& name : free_symbols(e)) {
        const JetSymbol& s = c.lookup(name);
        if (s.kind != SymbolKind::Fiber) continue;
        Expr d = partial(e, name);
        if (d.is_zero()) continue;
        auto it = prolongation.find(names.jet_name(c.n() + s.component, s.base_counts));
        if (it == prolongation.end())
            throw Error(ErrorKind::OrderOverflow, "prolongation does not reach '" + name + "'");
        terms.push_back(it->second * d);
    }
    return add(std::move(terms));
}

// ---- sections ----

SectionSamples SectionSamples::analytic(std::vector<Expr> components, std::vector<Expr> composite)
{
    SectionSamples s;
    s.mode_ = Mode::Analytic;
    s.n_ = static_cast<int>(components.size());
    s.components_ = std::move(components);
    s.composite_ = std::move(composite);
    return s;
}

SectionSamples SectionSamples::callable(Callable f, int n, double h)
{
    SectionSamples s;
    s.mode_ = Mode::Callable;
    s.fn_ = std::move(f);
    s.n_ = n;
    s.h_ = h;
    return s;
}

SectionSamples SectionSamples::tabulated(std::vector<double> times, std::vector<std::vector<double>> values)
{
    if (times.size() < 7 || times.size() != values.size())
        throw Error(ErrorKind::InvalidArgument, "tabulated section needs at least 7 samples, one row per time");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw Error(ErrorKind::InvalidArgument, "sample times must increase");
    SectionSamples s;
    s.mode_ = Mode::Tabulated;
    s.n_ = static_cast<int>(values.front().size());
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

namespace {

// Derivatives 0..kmax at x of the degree-6 interpolant through the 7 samples nearest x.
std::vector<std::vector<double>> local_poly_derivs(const std::vector<double>& t,
                                                   const std::vector<std::vector<double>>& v, double x, int kmax)
{
    constexpr int P = 7;
    auto it = std::lower_bound(t.begin(), t.end(), x);
    std::ptrdiff_t centre = it - t.begin();
    std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(centre - P / 2, 0, static_cast<std::ptrdiff_t>(t.size()) - P);
    double scale = (t[lo + P - 1] - t[lo]) / 2.0;
    std::size_t ncomp = v.front().size();
    // Vandermonde in s = (t - x) / scale, solved with partial pivoting.
    std::vector<std::vector<double>> A(P, std::vector<double>(P + ncomp));
    for (int r = 0; r < P; ++r) {
        double s = (t[lo + r] - x) / scale, p = 1.0;
        for (int c = 0; c < P; ++c, p *= s) A[r][c] = p;
        for (std::size_t k = 0; k < ncomp; ++k) A[r][P + k] = v[lo + r][k];
    }
    for (int col = 0; col < P; ++col) {
        int piv = col;
        for (int r = col + 1; r < P; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (int r = 0; r < P; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < A[r].size(); ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<std::vector<double>> out(kmax + 1, std::vector<double>(ncomp));
    double fact = 1.0, sp = 1.0;
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) {
            fact *= k;
            sp *= scale;
        }
        for (std::size_t c = 0; c < ncomp; ++c) out[k][c] = k < P ? fact * A[k][P + c] / A[k][k] / sp : 0.0;
    }
    return out;
}

} // namespace

Bindings numeric_jet(const SectionSamples& s, const JetChart& c, const std::vector<double>& x, int order)
{
    if (static_cast<int>(x.size()) != c.m()) throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
    if (s.n_ != c.n()) throw Error(ErrorKind::InvalidArgument, "section has wrong fiber dimension");
    if (order > c.order()) throw Error(ErrorKind::OrderOverflow, "requested jet order exceeds chart order");
    Bindings b;
    for (int mu = 0; mu < c.m(); ++mu) b[c.base_names()[mu]] = x[mu];
    auto jets = c.fiber_jets(order);

    switch (s.mode_) {
    case SectionSamples::Mode::Analytic: {
        Bindings at = b;
        for (const auto* j : jets) {
            Expr d = s.components_[j->component];
            for (int mu = 0; mu < c.m(); ++mu)
                for (int r = 0; r < j->base_counts[mu]; ++r) d = partial(d, c.base_names()[mu]);
            b[j->name] = evaluate(d, at);
        }
        if (s.has_composite() && c.is_composite()) {
            Bindings xy = at;
            for (int i = 0; i < c.n(); ++i) xy[c.fiber_names()[i]] = b[c.fiber_names()[i]];
            for (const auto* z : c.composite_symbols()) {
                Expr d = s.composite_.at(z->component);
                for (int mu = 0; mu < c.m(); ++mu)
                    for (int r = 0; r < z->base_counts[mu]; ++r) d = partial(d, c.base_names()[mu]);
                for (int k = 0; k < c.n(); ++k)
                    for (int r = 0; r < z->fiber_counts[k]; ++r) d = partial(d, c.fiber_names()[k]);
                b[z->name] = evaluate(d, xy);
            }
        }
        break;
    }
    case SectionSamples::Mode::Callable: {
        if (order > 2) throw Error(ErrorKind::UnsupportedOrder, "finite-difference jets support order <= 2");
        const double h = s.h_;
        auto at = [&](int mu, double dm, int nu, double dn) {
            std::vector<double> p = x;
            if (mu >= 0) p[mu] += dm;
            if (nu >= 0) p[nu] += dn;
            auto v = s.fn_(p);
            if (static_cast<int>(v.size()) != c.n()) throw Error(ErrorKind::InvalidArgument, "section arity");
            return v;
        };
        for (const auto* j : jets) {
            const auto& I = j->base_counts;
            int i = j->component;
            std::vector<int> dirs;
            for (int mu = 0; mu < c.m(); ++mu)
                for (int r = 0; r < I[mu]; ++r) dirs.push_back(mu);
            double v = 0.0;
            if (dirs.empty()) {
                v = at(-1, 0, -1, 0)[i];
            } else if (dirs.size() == 1) {
                v = (at(dirs[0], h, -1, 0)[i] - at(dirs[0], -h, -1, 0)[i]) / (2 * h);
            } else if (dirs[0] == dirs[1]) {
                v = (at(dirs[0], h, -1, 0)[i] - 2 * at(-1, 0, -1, 0)[i] + at(dirs[0], -h, -1, 0)[i]) / (h * h);
            } else {
                v = (at(dirs[0], h, dirs[1], h)[i] - at(dirs[0], h, dirs[1], -h)[i] - at(dirs[0], -h, dirs[1], h)[i] +
                     at(dirs[0], -h, dirs[1], -h)[i]) /
                    (4 * h * h);
            }
            b[j->name] = v;
        }
        break;
    }
    case SectionSamples::Mode::Tabulated: {
        if (c.m() != 1) throw Error(ErrorKind::InvalidArgument, "tabulated sections need a one-dimensional base");
        double span = s.times_.back() - s.times_.front();
        if (x[0] < s.times_.front() - 1e-12 * span || x[0] > s.times_.back() + 1e-12 * span)
            throw Error(ErrorKind::Domain, "point outside the tabulated range");
        auto d = local_poly_derivs(s.times_, s.values_, x[0], order);
        for (const auto* j : jets) b[j->name] = d[j->base_counts[0]][j->component];
        break;
    }
    }
    return b;
}

} // namespace jetvar
