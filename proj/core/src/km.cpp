#include "spectral/km.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t hoeffding_samples(double accuracy, double delta) {
    if (!(accuracy > 0) || !(delta > 0) || delta >= 1)
        throw ParamError("estimation accuracy and delta must be in (0,1)");
    double m = std::ceil(2.0 / (accuracy * accuracy) * std::log(2.0 / delta));
    return static_cast<std::int64_t>(std::min(m, 9.0e15));
}

}  // namespace

RestrictedOracle::RestrictedOracle(QueryOracle& base, int base_n) : base_(&base) {
    if (base_n < 0 || base_n > kMaxVars) throw ParamError("bad oracle dimension");
    coords_.resize(base_n);
    for (int i = 0; i < base_n; ++i) coords_[i] = i;
}

Mask RestrictedOracle::lift_form(Mask gamma) const {
    Mask lifted = 0;
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (gamma & (Mask(1) << i)) lifted |= Mask(1) << coords_[i];
    return lifted;
}

void RestrictedOracle::restrict(Mask gamma, int b) {
    if (gamma == 0) throw ZeroFormError("cannot restrict on the zero form");
    if (gamma >= (Mask(1) << coords_.size())) throw ParamError("form out of range");
    if (b != 1 && b != -1) throw ParamError("restriction value must be +1 or -1");
    const int pivot_local = __builtin_ctz(gamma);
    Constraint c;
    c.form = lift_form(gamma);
    c.pivot = coords_[pivot_local];
    c.target = b == 1 ? 0 : 1;
    constraints_.push_back(c);
    coords_.erase(coords_.begin() + pivot_local);
}

Mask RestrictedOracle::lift_point(Mask x) const {
    Mask full = 0;
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (x & (Mask(1) << i)) full |= Mask(1) << coords_[i];
    // Each constraint's form avoids all earlier pivots, so solving newest
    // first only ever reads bits that are already fixed.
    for (auto it = constraints_.rbegin(); it != constraints_.rend(); ++it) {
        Mask rest = it->form & ~(Mask(1) << it->pivot);
        int bit = it->target ^ parity(rest, full);
        full |= static_cast<Mask>(bit) << it->pivot;
    }
    return full;
}

int RestrictedOracle::do_query(Mask x) { return base_->query(lift_point(x)); }

CoeffEstimate estimate_coeff(QueryOracle& oracle, int n, Mask alpha, double eta, double delta,
                             std::uint64_t seed) {
    if (n < 0 || n > kMaxVars) throw ParamError("bad dimension");
    if (alpha >= (Mask(1) << n)) throw ParamError("alpha out of range");
    CoeffEstimate est;
    est.samples = hoeffding_samples(eta, delta);
    std::mt19937_64 rng(seed);
    const Mask domain = (Mask(1) << n) - 1;
    for (std::int64_t i = 0; i < est.samples; ++i) {
        Mask x = static_cast<Mask>(rng()) & domain;
        int chi = parity(alpha, x) ? -1 : 1;
        est.sum += oracle.query(x) * chi;
    }
    return est;
}

double estimate_bucket_weight(QueryOracle& oracle, int n, Mask prefix, int len,
                              std::int64_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Mask low = (Mask(1) << len) - 1;
    const Mask high = (len == n) ? 0 : ((Mask(1) << (n - len)) - 1);
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < samples; ++i) {
        Mask x1 = static_cast<Mask>(rng()) & low;
        Mask x2 = static_cast<Mask>(rng()) & low;
        Mask z = static_cast<Mask>(rng()) & high;
        int chi = parity(prefix, x1 ^ x2) ? -1 : 1;
        sum += oracle.query(x1 | (z << len)) * oracle.query(x2 | (z << len)) * chi;
    }
    return static_cast<double>(sum) / static_cast<double>(samples);
}

namespace {

SearchResult km_search_exact(QueryOracle& oracle, int n, const SearchParams& params) {
    std::vector<std::int8_t> values(std::size_t(1) << n);
    for (std::size_t x = 0; x < values.size(); ++x)
        values[x] = static_cast<std::int8_t>(oracle.query(static_cast<Mask>(x)));
    Spectrum s = wht_forward(BooleanFunction(n, std::move(values)));
    SearchResult result;
    result.exact = true;
    const double cutoff = params.theta * params.theta / 2;
    for (std::size_t a = 0; a < s.size(); ++a) {
        double c = s.coeff(static_cast<Mask>(a)).to_double();
        if (c * c >= cutoff) result.hits.push_back({static_cast<Mask>(a), c});
    }
    return result;
}

}  // namespace

SearchResult km_search(QueryOracle& oracle, int n, const SearchParams& params) {
    if (n < 0 || n > kMaxVars) throw ParamError("km_search: bad dimension");
    if (!(params.theta > 0 && params.theta <= 1)) throw ParamError("theta must be in (0,1]");
    if (!(params.eta > 0 && params.eta <= params.theta / 2 + 1e-15))
        throw ParamError("eta must be in (0, theta/2]");
    if (!(params.delta > 0 && params.delta < 1)) throw ParamError("delta must be in (0,1)");

    const double theta_sq = params.theta * params.theta;
    // Union-bound budget: bucket weights at a level sum to 1, so at most
    // 4/theta^2 buckets survive honest estimates, two child evaluations
    // each, n levels, plus the final coefficient estimates. Doubled for
    // slack against noise survivors.
    const double per_level = std::ceil(8.0 / theta_sq);
    const double events = std::max(2.0, 2.0 * n * per_level + per_level);
    const double delta_event = params.delta / events;
    const std::int64_t bucket_samples = hoeffding_samples(theta_sq / 4, delta_event);

    const std::uint64_t before = oracle.query_count();
    if (!params.force_sampling && n <= kMaxVars &&
        (double(std::size_t(1) << n) <= 2.0 * double(bucket_samples))) {
        // A full scan is cheaper than sampling even one bucket and makes the
        // guarantee exact; the query count stays below the sampling cost.
        SearchResult result = km_search_exact(oracle, n, params);
        result.queries = oracle.query_count() - before;
        return result;
    }

    std::vector<Mask> frontier{0};
    std::uint64_t stream = 0;
    for (int len = 1; len <= n; ++len) {
        std::vector<Mask> next;
        for (Mask parent : frontier) {
            for (Mask bit = 0; bit <= 1; ++bit) {
                Mask prefix = parent | (bit << (len - 1));
                std::uint64_t seed = splitmix64(params.seed ^ splitmix64(stream++));
                double w = estimate_bucket_weight(oracle, n, prefix, len, bucket_samples, seed);
                if (w >= theta_sq / 2) next.push_back(prefix);
            }
        }
        frontier = std::move(next);
    }

    SearchResult result;
    for (Mask alpha : frontier) {
        std::uint64_t seed = splitmix64(params.seed ^ splitmix64(stream++));
        CoeffEstimate est = estimate_coeff(oracle, n, alpha, params.eta, delta_event, seed);
        result.hits.push_back({alpha, est.value()});
    }
    std::sort(result.hits.begin(), result.hits.end(),
              [](const SearchHit& a, const SearchHit& b) { return a.alpha < b.alpha; });
    result.queries = oracle.query_count() - before;
    return result;
}

// ---------------------------------------------------------------------------
// Query-driven learner.

namespace {

using Node = ParityDecisionTree::Node;

struct LearnCtx {
    double eps_int;
    double theta;
    double eta;
    double delta_node;
    int cap;
    std::uint64_t seed;
    std::uint64_t stream = 0;
    std::uint64_t nodes = 0;
};

std::uint64_t next_seed(LearnCtx& ctx) {
    return splitmix64(ctx.seed ^ splitmix64(0x517cc1b727220a95ULL + ctx.stream++));
}

// Sign-accuracy estimate of f-hat(0), for labeling leaves whose bias the
// search already bounded. Far cheaper than an eta-accurate one.
double coarse_bias(LearnCtx& ctx, RestrictedOracle& oracle) {
    return estimate_coeff(oracle, oracle.n(), 0, 0.25, ctx.delta_node, next_seed(ctx)).value();
}

std::unique_ptr<Node> learn_leaf(LearnCtx& ctx, double bias) {
    ++ctx.nodes;
    auto node = std::make_unique<Node>();
    node->label = bias >= 0 ? 1 : -1;
    return node;
}

std::unique_ptr<Node> learn_rec(LearnCtx& ctx, RestrictedOracle oracle, int depth) {
    const int n = oracle.n();
    if (n == 0) {
        // All variables are pinned; one query settles the leaf.
        return learn_leaf(ctx, oracle.query(0));
    }

    SearchParams sp{ctx.theta, ctx.eta, ctx.delta_node, next_seed(ctx), false};
    SearchResult found = km_search(oracle, n, sp);
    // If the constant coefficient is below theta it never made the list, and
    // theta < 1 - eps rules the biased-leaf case out without an estimate.
    const SearchHit* bias_hit = nullptr;
    for (const SearchHit& h : found.hits)
        if (h.alpha == 0) bias_hit = &h;
    if (bias_hit && std::abs(bias_hit->estimate) > 1.0 - ctx.eps_int)
        return learn_leaf(ctx, bias_hit->estimate);
    if (depth >= ctx.cap)
        return learn_leaf(ctx, bias_hit ? bias_hit->estimate : coarse_bias(ctx, oracle));

    std::vector<SearchHit> ranked = found.hits;
    std::sort(ranked.begin(), ranked.end(), [](const SearchHit& a, const SearchHit& b) {
        double ma = std::abs(a.estimate), mb = std::abs(b.estimate);
        if (ma != mb) return ma > mb;
        return a.alpha < b.alpha;
    });
    if (ranked.empty()) return learn_leaf(ctx, coarse_bias(ctx, oracle));

    if (ranked[0].alpha != 0 && std::abs(ranked[0].estimate) > 1.0 - ctx.eps_int) {
        // Character-dominated: one query, both restrictions are highly biased.
        const Mask alpha = ranked[0].alpha;
        ++ctx.nodes;
        auto node = std::make_unique<Node>();
        node->query = oracle.lift_form(alpha);
        for (int b : {+1, -1}) {
            RestrictedOracle child = oracle;
            child.restrict(alpha, b);
            double child_bias = child.n() == 0 ? child.query(0) : coarse_bias(ctx, child);
            (b == 1 ? node->plus : node->minus) = learn_leaf(ctx, child_bias);
        }
        return node;
    }

    if (ranked.size() < 2) {
        // The search should have produced a second coefficient; give up on
        // this branch gracefully, the measured distance accounts for it.
        return learn_leaf(ctx, coarse_bias(ctx, oracle));
    }
    const Mask delta_mask = ranked[0].alpha ^ ranked[1].alpha;
    ++ctx.nodes;
    auto node = std::make_unique<Node>();
    node->query = oracle.lift_form(delta_mask);
    for (int b : {+1, -1}) {
        RestrictedOracle child = oracle;
        child.restrict(delta_mask, b);
        (b == 1 ? node->plus : node->minus) = learn_rec(ctx, std::move(child), depth + 1);
    }
    return node;
}

}  // namespace

LearnResult learn_approx_pdt(QueryOracle& oracle, int n, double a_bound, double eps, double delta,
                             std::uint64_t seed, const LearnOptions& options) {
    if (n < 1 || n > kMaxVars) throw ParamError("learn_approx_pdt: bad dimension");
    if (!(eps > 0 && eps < 0.5)) throw ParamError("eps must be in (0, 1/2)");
    if (!(delta > 0 && delta < 1)) throw ParamError("delta must be in (0,1)");
    if (!(a_bound >= 1)) throw ParamError("a_bound must be at least 1");

    LearnCtx ctx;
    ctx.eps_int = eps / 2;
    ctx.theta = options.theta > 0 ? options.theta : eps / (2 * a_bound);
    ctx.eta = options.eta > 0 ? options.eta : eps / (4 * a_bound);
    ctx.cap = static_cast<int>(
        std::ceil(std::max(10.0 * a_bound * a_bound, 2.0 * std::log2(1.0 / ctx.eps_int))));
    // Split delta over the node budget from the synthesis size recursion
    // S(K, A) <= min(2^K, 2^(A^2) K^(2A)); the split only enters sample
    // counts through a logarithm, so the clamp is harmless.
    long double size_bound =
        std::min(std::exp2(static_cast<long double>(ctx.cap)),
                 std::exp2(static_cast<long double>(a_bound) * a_bound) *
                     std::pow(static_cast<long double>(ctx.cap), 2 * a_bound));
    if (!(size_bound >= 1) || size_bound > 1e15L) size_bound = 1e15L;
    ctx.delta_node = delta / (2.0 * static_cast<double>(size_bound));
    ctx.seed = seed;

    const std::uint64_t before = oracle.query_count();
    RestrictedOracle root(oracle, n);
    std::unique_ptr<Node> tree_root = learn_rec(ctx, std::move(root), 0);
    LearnResult result{ParityDecisionTree(n, std::move(tree_root)),
                       oracle.query_count() - before, ctx.nodes};
    return result;
}

}  // namespace spectral
