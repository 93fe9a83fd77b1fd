#include "spectral/pdt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace spectral {

namespace {

using Node = ParityDecisionTree::Node;
using FNode = FunctionalPdt::Node;

std::unique_ptr<Node> make_leaf(int label) {
    auto node = std::make_unique<Node>();
    node->label = label;
    return node;
}

std::unique_ptr<Node> make_node(Mask query, std::unique_ptr<Node> plus,
                                std::unique_ptr<Node> minus) {
    auto node = std::make_unique<Node>();
    node->query = query;
    node->plus = std::move(plus);
    node->minus = std::move(minus);
    return node;
}

Mask lift_mask(Mask local, const std::vector<int>& coords) {
    Mask global = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (local & (Mask(1) << i)) global |= Mask(1) << coords[i];
    return global;
}

template <class N>
std::size_t count_leaves(const N& node) {
    if (node.is_leaf()) return 1;
    return count_leaves(*node.plus) + count_leaves(*node.minus);
}

template <class N>
int max_depth(const N& node) {
    if (node.is_leaf()) return 0;
    return 1 + std::max(max_depth(*node.plus), max_depth(*node.minus));
}

bool is_constant(const Spectrum& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s.scaled(static_cast<Mask>(i)) != 0) return false;
    return true;
}

// Index of the single nonzero coefficient of a norm-1 spectrum.
Mask lone_mask(const Spectrum& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.scaled(static_cast<Mask>(i)) != 0) return static_cast<Mask>(i);
    return 0;
}

// Passes trivially when the bound overflows long double range.
void check_size_bound(std::size_t size, long double bound, const char* what) {
    if (std::isinf(bound) || std::isnan(bound) || bound > 1e30L) return;
    check(static_cast<long double>(size) <= bound, what);
}

}  // namespace

ParityDecisionTree::ParityDecisionTree(int n, std::unique_ptr<Node> root)
    : n_(n), root_(std::move(root)) {
    check(root_ != nullptr, "tree must have a root");
}

ParityDecisionTree ParityDecisionTree::leaf(int n, int label) {
    return ParityDecisionTree(n, make_leaf(label));
}

std::size_t ParityDecisionTree::size() const { return count_leaves(*root_); }
int ParityDecisionTree::depth() const { return max_depth(*root_); }

namespace {
bool nodes_equal(const Node& a, const Node& b) {
    if (a.query != b.query) return false;
    if (a.is_leaf()) return a.label == b.label;
    return nodes_equal(*a.plus, *b.plus) && nodes_equal(*a.minus, *b.minus);
}
}  // namespace

bool ParityDecisionTree::operator==(const ParityDecisionTree& o) const {
    return n_ == o.n_ && nodes_equal(*root_, *o.root_);
}

int evaluate(const ParityDecisionTree& t, Mask x) {
    if (x >= (std::size_t(1) << t.n())) throw ParamError("input out of range");
    const Node* node = &t.root();
    while (!node->is_leaf()) node = parity(node->query, x) ? node->minus.get() : node->plus.get();
    return node->label;
}

FunctionalPdt::FunctionalPdt(int n, std::unique_ptr<Node> root) : n_(n), root_(std::move(root)) {
    check(root_ != nullptr, "tree must have a root");
}

std::size_t FunctionalPdt::size() const { return count_leaves(*root_); }
int FunctionalPdt::depth() const { return max_depth(*root_); }

const FunctionalPdt::Leaf& FunctionalPdt::leaf_for(Mask x) const {
    const FNode* node = root_.get();
    while (!node->is_leaf()) node = parity(node->query, x) ? node->minus.get() : node->plus.get();
    return *node->leaf;
}

// ---------------------------------------------------------------------------
// Exact synthesis (query alpha ^ beta until a lone character remains).

namespace {

std::unique_ptr<Node> synth_exact_rec(const Spectrum& s, const std::vector<int>& coords) {
    if (spectral_norm(s) == Dyadic::from_int(1)) {
        Mask alpha = lone_mask(s);
        int sign = s.scaled(alpha) > 0 ? 1 : -1;
        if (alpha == 0) return make_leaf(sign);
        // f = sign * chi_alpha: one query, two constant leaves.
        return make_node(lift_mask(alpha, coords), make_leaf(sign), make_leaf(-sign));
    }
    TopTwo top = top_two(s);
    Mask delta = top.alpha ^ top.beta;
    int pivot = __builtin_ctz(delta);
    std::vector<int> sub = coords;
    sub.erase(sub.begin() + pivot);
    return make_node(lift_mask(delta, coords),
                     synth_exact_rec(restrict_spectrum(s, LinearForm(delta), +1), sub),
                     synth_exact_rec(restrict_spectrum(s, LinearForm(delta), -1), sub));
}

}  // namespace

ParityDecisionTree synth_exact(const Spectrum& s) {
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    ParityDecisionTree t(s.n(), synth_exact_rec(s, coords));
    const long double a = spectral_norm(s).to_double();
    check_size_bound(t.size(), std::exp2(a * a) * std::pow(s.n(), 2 * a),
                     "synth_exact: size exceeded 2^(A^2) n^(2A)");
    return t;
}

// ---------------------------------------------------------------------------
// Sparse synthesis (full constraint layer per round, sparsity halves).

namespace {

std::unique_ptr<Node> sparse_round(const Spectrum& s, const std::vector<int>& coords);

std::unique_ptr<Node> sparse_layer(const Spectrum& s, const std::vector<int>& coords,
                                   const std::vector<Mask>& forms,
                                   std::int64_t round_sparsity) {
    if (is_constant(s)) {
        // Early exit: a constant branch needs no further queries. Never
        // increases the depth, strictly shrinks the tree.
        return make_leaf(s.scaled(0) > 0 ? 1 : -1);
    }
    if (forms.empty()) {
        check(2 * sparsity(s) <= round_sparsity,
              "synth_sparse_depth: branch did not halve the sparsity");
        return sparse_round(s, coords);
    }
    const Mask gamma = forms.front();
    const int pivot = __builtin_ctz(gamma);
    std::vector<int> sub = coords;
    sub.erase(sub.begin() + pivot);
    // Remaining forms move to the quotient: clear the pivot bit (adding gamma
    // if necessary) and re-index.
    std::vector<Mask> projected(forms.begin() + 1, forms.end());
    for (Mask& f : projected) {
        if (f & (Mask(1) << pivot)) f ^= gamma;
        Mask low = f & ((Mask(1) << pivot) - 1);
        f = low | ((f >> (pivot + 1)) << pivot);
        check(f != 0, "synth_sparse_depth: projected form vanished");
    }
    auto plus = sparse_layer(restrict_spectrum(s, LinearForm(gamma), +1), sub, projected,
                             round_sparsity);
    auto minus = sparse_layer(restrict_spectrum(s, LinearForm(gamma), -1), sub, projected,
                              round_sparsity);
    return make_node(lift_mask(gamma, coords), std::move(plus), std::move(minus));
}

std::unique_ptr<Node> sparse_round(const Spectrum& s, const std::vector<int>& coords) {
    if (is_constant(s)) return make_leaf(s.scaled(0) > 0 ? 1 : -1);
    AffineRestriction constraints = find_constant_subspace(s, SubspaceMode::Basic);
    std::vector<Mask> forms;
    forms.reserve(constraints.co_dimension());
    for (const auto& c : constraints.constraints()) forms.push_back(c.form);
    return sparse_layer(s, coords, forms, sparsity(s));
}

}  // namespace

ParityDecisionTree synth_sparse_depth(const Spectrum& s) {
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    ParityDecisionTree t(s.n(), sparse_round(s, coords));

    const std::int64_t spar0 = sparsity(s);
    const std::int64_t a_sq = spectral_norm(s).ceil_square();
    std::int64_t log_s = 0;
    while ((std::int64_t(1) << log_s) < spar0) ++log_s;
    // A lone character still takes one query even though ceil(log2 1) = 0.
    const std::int64_t allowed = spar0 == 1 ? 1 : a_sq * log_s;
    check(t.depth() <= allowed, "synth_sparse_depth: depth exceeded ceil(A^2) ceil(log2 s)");
    return t;
}

// ---------------------------------------------------------------------------
// Approximate synthesis (functional leaves, depth cap K).

namespace {

std::unique_ptr<FNode> make_functional_leaf(const Spectrum& s, const std::vector<int>& coords) {
    auto node = std::make_unique<FNode>();
    node->leaf = std::make_unique<FunctionalPdt::Leaf>();
    node->leaf->constant = s.coeff(0);
    node->leaf->scaled = s.scaled();
    node->leaf->coords = coords;
    return node;
}

struct ApproxCtx {
    double eps;  // internal (request halved)
    int cap;     // depth cap K
};

bool above_threshold(std::int64_t scaled, int n, double threshold) {
    long double mag = scaled < 0 ? -static_cast<long double>(scaled) : scaled;
    return mag > static_cast<long double>(threshold) * std::exp2(n);
}

std::unique_ptr<FNode> synth_approx_rec(const ApproxCtx& ctx, const Spectrum& s,
                                        const std::vector<int>& coords, int depth) {
    if (above_threshold(s.scaled(0), s.n(), 1.0 - ctx.eps))
        return make_functional_leaf(s, coords);
    if (depth >= ctx.cap) return make_functional_leaf(s, coords);

    Mask alpha = 0;
    std::int64_t best = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::int64_t mag = std::abs(s.scaled(static_cast<Mask>(i)));
        if (mag > best) {
            best = mag;
            alpha = static_cast<Mask>(i);
        }
    }

    if (above_threshold(s.scaled(alpha), s.n(), 1.0 - ctx.eps)) {
        // alpha != 0 here; one query and both restrictions are highly biased.
        const int pivot = __builtin_ctz(alpha);
        std::vector<int> sub = coords;
        sub.erase(sub.begin() + pivot);
        auto node = std::make_unique<FNode>();
        node->query = lift_mask(alpha, coords);
        Spectrum plus = restrict_spectrum(s, LinearForm(alpha), +1);
        Spectrum minus = restrict_spectrum(s, LinearForm(alpha), -1);
        check(plus.coeff(0).abs().to_double() >= 1.0 - 2 * ctx.eps - 1e-12 &&
                  minus.coeff(0).abs().to_double() >= 1.0 - 2 * ctx.eps - 1e-12,
              "synth_approx: character-dominated leaf is not highly biased");
        node->plus = make_functional_leaf(plus, sub);
        node->minus = make_functional_leaf(minus, sub);
        return node;
    }

    TopTwo top = top_two(s);
    Mask delta = top.alpha ^ top.beta;
    const int pivot = __builtin_ctz(delta);
    std::vector<int> sub = coords;
    sub.erase(sub.begin() + pivot);
    auto node = std::make_unique<FNode>();
    node->query = lift_mask(delta, coords);
    node->plus = synth_approx_rec(ctx, restrict_spectrum(s, LinearForm(delta), +1), sub, depth + 1);
    node->minus =
        synth_approx_rec(ctx, restrict_spectrum(s, LinearForm(delta), -1), sub, depth + 1);
    return node;
}

}  // namespace

FunctionalPdt synth_approx(const Spectrum& s, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw ParamError("eps must be in (0, 1/2)");
    // Unbiased leaves cost eps and rounding the biased ones costs eps again,
    // so run the recursion at eps/2 to honor the requested total.
    ApproxCtx ctx;
    ctx.eps = eps / 2;
    const double a = spectral_norm(s).to_double();
    ctx.cap = static_cast<int>(std::ceil(std::max(10.0 * a * a, 2.0 * std::log2(1.0 / ctx.eps))));

    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    FunctionalPdt t(s.n(), synth_approx_rec(ctx, s, coords, 0));
    check(t.depth() <= ctx.cap, "synth_approx: depth exceeded K");
    const long double k = ctx.cap;
    check_size_bound(t.size(),
                     std::min(std::exp2(k), std::exp2(a * a) * std::pow(k, 2 * a)),
                     "synth_approx: size exceeded min(2^K, 2^(A^2) K^(2A))");
    return t;
}

namespace {
std::unique_ptr<Node> round_rec(const FNode& f) {
    if (f.is_leaf()) return make_leaf(f.leaf->constant.num() >= 0 ? 1 : -1);
    return make_node(f.query, round_rec(*f.plus), round_rec(*f.minus));
}
}  // namespace

ParityDecisionTree round_to_pdt(const FunctionalPdt& ft) {
    return ParityDecisionTree(ft.n(), round_rec(ft.root()));
}

// ---------------------------------------------------------------------------

BooleanFunction evaluate_to_table(const ParityDecisionTree& t) {
    std::vector<std::int8_t> values(std::size_t(1) << t.n());
    for (std::size_t x = 0; x < values.size(); ++x)
        values[x] = static_cast<std::int8_t>(evaluate(t, static_cast<Mask>(x)));
    return BooleanFunction(t.n(), std::move(values));
}

SimpleFactsReport check_simple_facts(const ParityDecisionTree& t) {
    if (t.n() > 16) throw ParamError("check_simple_facts is limited to n <= 16");
    SimpleFactsReport report;
    report.size = static_cast<std::int64_t>(t.size());
    report.depth = t.depth();
    Spectrum s = wht_forward(evaluate_to_table(t));
    report.spar = sparsity(s);
    report.norm = spectral_norm(s);
    const __int128 spar_cap = static_cast<__int128>(report.size) << report.depth;
    report.spar_bound_ok = static_cast<__int128>(report.spar) <= spar_cap;
    report.norm_bound_ok = report.norm <= Dyadic::from_int(report.size);
    check(report.spar_bound_ok, "simple facts: spar(f) > m 2^k");
    check(report.norm_bound_ok, "simple facts: ||f||_1 > m");
    return report;
}

namespace {
bool paths_independent_rec(const Node& node, std::vector<Mask>& echelon) {
    if (node.is_leaf()) return true;
    Mask reduced = node.query;
    for (Mask row : echelon) {
        Mask lead = Mask(1) << (31 - __builtin_clz(row));
        if (reduced & lead) reduced ^= row;
    }
    if (reduced == 0) return false;
    // Insert sorted by descending lead.
    echelon.push_back(reduced);
    std::sort(echelon.begin(), echelon.end(), std::greater<Mask>());
    bool ok = paths_independent_rec(*node.plus, echelon) &&
              paths_independent_rec(*node.minus, echelon);
    echelon.erase(std::find(echelon.begin(), echelon.end(), reduced));
    return ok;
}
}  // namespace

bool paths_independent(const ParityDecisionTree& t) {
    std::vector<Mask> echelon;
    return paths_independent_rec(t.root(), echelon);
}

ParityDecisionTree random_pdt(int n, std::int64_t leaves, std::mt19937_64& rng) {
    if (n < 1 || n > kMaxVars) throw ParamError("random_pdt: bad dimension");
    if (leaves < 1 || leaves > (std::int64_t(1) << n))
        throw ParamError("random_pdt: leaf count must be in [1, 2^n]");
    std::uniform_int_distribution<int> coin(0, 1);

    auto root = make_leaf(coin(rng) ? 1 : -1);
    struct Growable {
        Node* node;
        std::vector<Mask> echelon;
    };
    std::vector<Growable> open{{root.get(), {}}};
    std::int64_t count = 1;
    while (count < leaves) {
        std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
        std::size_t at = pick(rng);
        Growable g = open[at];
        if (static_cast<int>(g.echelon.size()) >= n) continue;  // saturated path

        std::uniform_int_distribution<Mask> form(1, (Mask(1) << n) - 1);
        Mask query, reduced;
        do {
            query = form(rng);
            reduced = query;
            for (Mask row : g.echelon) {
                Mask lead = Mask(1) << (31 - __builtin_clz(row));
                if (reduced & lead) reduced ^= row;
            }
        } while (reduced == 0);

        g.node->query = query;
        g.node->label = 0;
        g.node->plus = make_leaf(coin(rng) ? 1 : -1);
        g.node->minus = make_leaf(coin(rng) ? 1 : -1);
        std::vector<Mask> echelon = g.echelon;
        echelon.push_back(reduced);
        std::sort(echelon.begin(), echelon.end(), std::greater<Mask>());
        open.erase(open.begin() + at);
        open.push_back({g.node->plus.get(), echelon});
        open.push_back({g.node->minus.get(), echelon});
        ++count;
    }
    return ParityDecisionTree(n, std::move(root));
}

}  // namespace spectral
