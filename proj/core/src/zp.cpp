#include "spectral/zp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace spectral {
namespace zp {

namespace {

constexpr std::size_t kMaxTable = std::size_t(1) << 20;

bool is_supported_prime(int p) {
    return p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
}

std::size_t pow_int(int p, int n) {
    std::size_t r = 1;
    for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(p);
    return r;
}

void require_shape(int p, int n) {
    if (!is_supported_prime(p)) throw ParamError("p must be an odd prime in [3,13]");
    if (n < 0) throw ParamError("dimension must be non-negative");
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) {
        size *= static_cast<std::size_t>(p);
        if (size > kMaxTable) throw ParamError("p^n exceeds the 2^20 table cap");
    }
}

std::vector<Complex> omega_table(int p) {
    std::vector<Complex> w(p);
    for (int k = 0; k < p; ++k)
        w[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / p);
    return w;
}

Code insert_digit0(Code v, int pos, int p) {
    Code stride = static_cast<Code>(pow_int(p, pos));
    Code low = v % stride;
    Code high = v / stride;
    return low + high * stride * p;
}

int lowest_nonzero_digit(Code v, int n, int p) {
    for (int i = 0; i < n; ++i) {
        if (v % p != 0) return i;
        v /= p;
    }
    return -1;
}

}  // namespace

int digit(Code v, int i, int p) {
    return static_cast<int>(v / pow_int(p, i)) % p;
}

Code set_digit(Code v, int i, int p, int d) {
    Code stride = static_cast<Code>(pow_int(p, i));
    int old = digit(v, i, p);
    return v - static_cast<Code>(old) * stride + static_cast<Code>(d) * stride;
}

int dot(Code a, Code x, int n, int p) {
    int sum = 0;
    for (int i = 0; i < n; ++i) {
        sum += (a % p) * (x % p);
        a /= p;
        x /= p;
    }
    return sum % p;
}

Code add(Code a, Code b, int n, int p) {
    Code out = 0;
    Code stride = 1;
    for (int i = 0; i < n; ++i) {
        out += stride * ((a % p + b % p) % p);
        a /= p;
        b /= p;
        stride *= p;
    }
    return out;
}

Code sub(Code a, Code b, int n, int p) {
    Code out = 0;
    Code stride = 1;
    for (int i = 0; i < n; ++i) {
        out += stride * ((a % p - b % p + p) % p);
        a /= p;
        b /= p;
        stride *= p;
    }
    return out;
}

Code scale(Code a, int c, int n, int p) {
    Code out = 0;
    Code stride = 1;
    for (int i = 0; i < n; ++i) {
        out += stride * ((a % p) * c % p);
        a /= p;
        stride *= p;
    }
    return out;
}

int inverse_mod(int a, int p) {
    a %= p;
    if (a < 0) a += p;
    for (int x = 1; x < p; ++x)
        if (a * x % p == 1) return x;
    throw ParamError("no inverse: not coprime with p");
}

ZpFunction::ZpFunction(int p, int n, std::vector<std::int8_t> values)
    : p_(p), n_(n), values_(std::move(values)) {
    require_shape(p, n);
    if (values_.size() != pow_int(p, n)) throw ParamError("table length must be p^n");
    for (std::int8_t v : values_)
        if (v != 1 && v != -1) throw ParamError("table entries must be +1 or -1");
}

ZpFunction ZpFunction::constant(int p, int n, int value) {
    return ZpFunction(p, n, std::vector<std::int8_t>(pow_int(p, n),
                                                     static_cast<std::int8_t>(value)));
}

ZpSpectrum::ZpSpectrum(int p, int n, std::vector<Complex> coeffs)
    : p_(p), n_(n), coeffs_(std::move(coeffs)) {
    require_shape(p, n);
    if (coeffs_.size() != pow_int(p, n)) throw ParamError("spectrum length must be p^n");
}

bool ZpSpectrum::conjugate_symmetric() const {
    for (std::size_t a = 0; a < coeffs_.size(); ++a) {
        Code neg = sub(0, static_cast<Code>(a), n_, p_);
        if (std::abs(coeffs_[a] - std::conj(coeffs_[neg])) > kTau) return false;
    }
    return true;
}

bool ZpSpectrum::parseval_ok() const {
    double sum = 0;
    for (const Complex& c : coeffs_) sum += std::norm(c);
    return std::abs(sum - 1.0) <= kTau * static_cast<double>(coeffs_.size());
}

double spectral_norm(const ZpSpectrum& s) {
    double sum = 0;
    for (const Complex& c : s.coeffs()) sum += std::abs(c);
    return sum;
}

std::int64_t sparsity(const ZpSpectrum& s) {
    std::int64_t count = 0;
    for (const Complex& c : s.coeffs()) count += std::abs(c) > kTau;
    return count;
}

namespace {

// One length-p transform along dimension `dim`; sign -1 for the forward
// (conjugated characters), +1 for the inverse.
void dft_dimension(std::vector<Complex>& v, int p, int dim, int sign) {
    const std::size_t stride = pow_int(p, dim);
    std::vector<Complex> w(p);
    for (int k = 0; k < p; ++k)
        w[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * k / p);
    std::vector<Complex> tmp(p);
    for (std::size_t base = 0; base < v.size(); ++base) {
        if ((base / stride) % p != 0) continue;
        for (int j = 0; j < p; ++j) tmp[j] = v[base + j * stride];
        for (int k = 0; k < p; ++k) {
            Complex sum = 0;
            for (int j = 0; j < p; ++j) sum += tmp[j] * w[j * k % p];
            v[base + k * stride] = sum;
        }
    }
}

}  // namespace

ZpSpectrum dft_forward(const ZpFunction& f) {
    std::vector<Complex> v(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) v[x] = f(static_cast<Code>(x));
    for (int d = 0; d < f.n(); ++d) dft_dimension(v, f.p(), d, -1);
    const double scale = 1.0 / static_cast<double>(f.size());
    for (Complex& c : v) c *= scale;
    return ZpSpectrum(f.p(), f.n(), std::move(v));
}

ZpFunction dft_inverse(const ZpSpectrum& s) {
    std::vector<Complex> v = s.coeffs();
    for (int d = 0; d < s.n(); ++d) dft_dimension(v, s.p(), d, +1);
    std::vector<std::int8_t> values(v.size());
    for (std::size_t x = 0; x < v.size(); ++x) {
        if (std::abs(v[x] - Complex(1, 0)) <= kTau * static_cast<double>(v.size()))
            values[x] = 1;
        else if (std::abs(v[x] - Complex(-1, 0)) <= kTau * static_cast<double>(v.size()))
            values[x] = -1;
        else
            throw NotBooleanError("reconstructed value is not within tolerance of +1 or -1");
    }
    return ZpFunction(s.p(), s.n(), std::move(values));
}

ZpSpectrum restrict_zp(const ZpSpectrum& s, Code gamma, int lambda) {
    const int p = s.p(), n = s.n();
    if (gamma == 0) throw ZeroFormError("restriction form must be nonzero");
    if (gamma >= pow_int(p, n)) throw ParamError("form out of range");
    if (lambda < 0 || lambda >= p) throw ParamError("lambda out of range");
    if (n < 1) throw ParamError("cannot restrict a 0-dimensional spectrum");

    // Canonical quotient: scale so the pivot digit is 1, then collapse each
    // coset at its pivot-digit-0 representative and drop the pivot digit.
    const int pivot = lowest_nonzero_digit(gamma, n, p);
    const int u = inverse_mod(digit(gamma, pivot, p), p);
    const Code gamma1 = scale(gamma, u, n, p);
    const int lambda1 = lambda * u % p;
    const auto w = omega_table(p);

    std::vector<Complex> out(pow_int(p, n - 1));
    for (std::size_t i = 0; i < out.size(); ++i) {
        Code rep = insert_digit0(static_cast<Code>(i), pivot, p);
        Complex sum = 0;
        Code cur = rep;
        for (int k = 0; k < p; ++k) {
            sum += w[lambda1 * k % p] * s.coeff(cur);
            cur = add(cur, gamma1, n, p);
        }
        out[i] = sum;
    }
    return ZpSpectrum(p, n - 1, std::move(out));
}

Complex convolution_check_p(const ZpSpectrum& s, Code beta) {
    if (beta == 0) throw ZeroFormError("convolution_check_p requires beta != 0");
    Complex sum = 0;
    for (std::size_t a = 0; a < s.size(); ++a)
        sum += s.coeff(static_cast<Code>(a)) *
               s.coeff(sub(beta, static_cast<Code>(a), s.n(), s.p()));
    return sum;
}

TriangleGap triangle_gap(Complex z1, Complex z2) {
    if (std::abs(z2) > std::abs(z1)) std::swap(z1, z2);
    TriangleGap out;
    out.gap = std::abs(z1) + std::abs(z2) - std::abs(z1 + z2);
    const double denom = std::abs(z1) * std::abs(z2);
    if (denom < 1e-300) {
        out.angle = 0;
        out.bound = 0;
        return out;
    }
    double cosine = std::clamp((z1 * std::conj(z2)).real() / denom, -1.0, 1.0);
    out.angle = std::acos(cosine);
    out.bound = (1.0 - cosine) / 2.0 * std::abs(z2);
    check(out.gap >= out.bound - kTau, "triangle gap below C(theta) * min(|z1|,|z2|)");
    return out;
}

OvercountReport overcount_check(const ZpSpectrum& s, Code eta, int lambda) {
    if (eta == 0) throw ZeroFormError("overcount_check requires eta != 0");
    const int p = s.p(), n = s.n();
    const auto w = omega_table(p);

    OvercountReport report;
    // Coset-wise L1 loss of restricting on chi_eta = omega^lambda.
    report.lhs = spectral_norm(s) - spectral_norm(restrict_zp(s, eta, lambda));
    // Sum of pairwise losses over all (not disjoint) pairs (gamma, gamma+eta).
    report.rhs = 0;
    for (std::size_t g = 0; g < s.size(); ++g) {
        Code gamma = static_cast<Code>(g);
        Complex a = s.coeff(gamma);
        Complex b = s.coeff(add(gamma, eta, n, p));
        report.rhs += std::abs(a) + std::abs(b) - std::abs(a + w[lambda] * b);
    }
    check(3.0 * report.lhs >= report.rhs - kTau, "overcounting bound violated");
    return report;
}

double c1_of(int p) {
    return (1.0 - std::cos(std::numbers::pi / p)) / 6.0;
}

namespace {

struct TopTwoP {
    Code alpha;
    Code beta;
    double mag_alpha;
    double mag_beta;
};

// Magnitude descending with kTau-aware ties broken by ascending index.
TopTwoP top_two_p(const ZpSpectrum& s) {
    Code alpha = 0, beta = 0;
    double best = -1, second = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double mag = std::abs(s.coeff(static_cast<Code>(i)));
        if (mag > best + kTau) {
            second = best;
            beta = alpha;
            best = mag;
            alpha = static_cast<Code>(i);
        } else if (mag > second + kTau) {
            second = mag;
            beta = static_cast<Code>(i);
        }
    }
    check(second > kTau, "top_two_p: fewer than two nonzero coefficients");
    return TopTwoP{alpha, beta, best, second};
}

}  // namespace

StepReportP main_lemma_step_p(const ZpSpectrum& s) {
    const int p = s.p(), n = s.n();
    const double norm = spectral_norm(s);
    if (norm <= 1.0 + kTau)
        throw NormOneError("spectral norm is 1: the function is constant");

    TopTwoP top = top_two_p(s);
    StepReportP report;
    report.alpha = top.alpha;
    report.beta = top.beta;
    report.eta = sub(top.beta, top.alpha, n, p);

    report.drops.resize(p);
    for (int lambda = 0; lambda < p; ++lambda) {
        ZpSpectrum r = restrict_zp(s, report.eta, lambda);
        report.drops[lambda] = norm - spectral_norm(r);
        report.restricted.push_back(std::move(r));
    }

    int drops_alpha = 0, drops_c1 = 0;
    const double c1 = c1_of(p);
    for (int lambda = 0; lambda < p; ++lambda) {
        check(report.drops[lambda] >= kC0 * top.mag_beta - kTau,
              "main_lemma_step_p: a branch dropped less than c0 |f(beta)|");
        drops_alpha += report.drops[lambda] >= kC0 * top.mag_alpha - kTau;
        drops_c1 += report.drops[lambda] >= c1 * top.mag_alpha - kTau;
    }
    check(drops_alpha >= p / 3, "main_lemma_step_p: fewer than floor(p/3) c0-drops");
    check(drops_c1 >= p - 1, "main_lemma_step_p: fewer than p-1 c1-drops");
    return report;
}

namespace {

Code lift_code(Code local, const std::vector<int>& coords, int p) {
    Code global = 0;
    Code v = local;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        int d = static_cast<int>(v % p);
        v /= p;
        global += static_cast<Code>(d) * static_cast<Code>(pow_int(p, coords[i]));
    }
    return global;
}

// Scale a form so its pivot digit is 1, remapping branch indices to match:
// chi_gamma = omega^lambda  <=>  chi_{u gamma} = omega^{u lambda}.
struct Canonical {
    Code form;
    int pivot;
    int unit;  // the scaling factor u
};

Canonical canonicalize(Code gamma, int n, int p) {
    Canonical c;
    c.pivot = lowest_nonzero_digit(gamma, n, p);
    c.unit = inverse_mod(digit(gamma, c.pivot, p), p);
    c.form = scale(gamma, c.unit, n, p);
    return c;
}

bool is_constant_p(const ZpSpectrum& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s.coeff(static_cast<Code>(i))) > kTau) return false;
    return true;
}

int constant_sign(const ZpSpectrum& s) {
    return s.coeff(0).real() >= 0 ? 1 : -1;
}

}  // namespace

ZpRestriction find_constant_subspace_p(const ZpSpectrum& s) {
    const int p = s.p();
    const double a0 = spectral_norm(s);
    const std::int64_t budget =
        static_cast<std::int64_t>(std::ceil(a0 * a0 / kC0));

    ZpRestriction result;
    ZpSpectrum cur = s;
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);

    std::int64_t steps = 0;
    while (spectral_norm(cur) > 1.0 + kTau) {
        StepReportP step = main_lemma_step_p(cur);
        int best = 0;
        for (int lambda = 1; lambda < p; ++lambda)
            if (step.drops[lambda] > step.drops[best] + kTau) best = lambda;
        Canonical canon = canonicalize(step.eta, cur.n(), p);
        result.constraints.push_back(
            {lift_code(canon.form, coords, p), canon.unit * best % p});
        coords.erase(coords.begin() + canon.pivot);
        cur = std::move(step.restricted[best]);
        ++steps;
        check(steps <= budget + 1, "constant-subspace search (p) exceeded its budget");
    }
    check(static_cast<std::int64_t>(result.co_dimension()) <= budget,
          "constant subspace (p) co-dimension exceeded ceil(A^2 / c0)");
    return result;
}

// ---------------------------------------------------------------------------
// p-ary trees.

PAryPdt::PAryPdt(int p, int n, std::unique_ptr<Node> root)
    : p_(p), n_(n), root_(std::move(root)) {
    check(root_ != nullptr, "tree must have a root");
}

namespace {
std::size_t count_leaves_p(const PAryPdt::Node& node) {
    if (node.is_leaf()) return 1;
    std::size_t sum = 0;
    for (const auto& c : node.children) sum += count_leaves_p(*c);
    return sum;
}
int max_depth_p(const PAryPdt::Node& node) {
    if (node.is_leaf()) return 0;
    int best = 0;
    for (const auto& c : node.children) best = std::max(best, max_depth_p(*c));
    return 1 + best;
}
std::unique_ptr<PAryPdt::Node> make_leaf_p(int label) {
    auto node = std::make_unique<PAryPdt::Node>();
    node->leaf.label = label;
    return node;
}
std::unique_ptr<PAryPdt::Node> make_functional_leaf_p(const ZpSpectrum& s) {
    auto node = std::make_unique<PAryPdt::Node>();
    node->leaf.label = constant_sign(s);
    node->leaf.constant_re = s.coeff(0).real();
    node->leaf.functional = true;
    return node;
}
}  // namespace

std::size_t PAryPdt::size() const { return count_leaves_p(*root_); }
int PAryPdt::depth() const { return max_depth_p(*root_); }

int evaluate_p(const PAryPdt& t, Code x) {
    if (x >= pow_int(t.p(), t.n())) throw ParamError("input out of range");
    const PAryPdt::Node* node = &t.root();
    while (!node->is_leaf()) node = node->children[dot(node->query, x, t.n(), t.p())].get();
    return node->leaf.label;
}

ZpFunction evaluate_to_table_p(const PAryPdt& t) {
    std::vector<std::int8_t> values(pow_int(t.p(), t.n()));
    for (std::size_t x = 0; x < values.size(); ++x)
        values[x] = static_cast<std::int8_t>(evaluate_p(t, static_cast<Code>(x)));
    return ZpFunction(t.p(), t.n(), std::move(values));
}

namespace {

// Row echelon over Z_p: rows keyed by their distinct highest nonzero digit,
// scaled so that digit is 1. Reduction must walk leads high-to-low, since a
// row may reintroduce digits below its own lead.
Code reduce_row_p(Code v, const std::vector<std::pair<int, Code>>& rows, int n, int p) {
    for (int lead = n - 1; lead >= 0; --lead) {
        for (const auto& [l, row] : rows) {
            if (l != lead) continue;
            int d = digit(v, lead, p);
            if (d != 0) v = sub(v, scale(row, d, n, p), n, p);
            break;
        }
    }
    return v;
}

bool paths_independent_p_rec(const PAryPdt::Node& node,
                             std::vector<std::pair<int, Code>>& rows, int n, int p) {
    if (node.is_leaf()) return true;
    Code reduced = reduce_row_p(node.query, rows, n, p);
    if (reduced == 0) return false;
    int lead = -1;
    for (int i = n - 1; i >= 0; --i)
        if (digit(reduced, i, p) != 0) {
            lead = i;
            break;
        }
    reduced = scale(reduced, inverse_mod(digit(reduced, lead, p), p), n, p);
    rows.emplace_back(lead, reduced);
    bool ok = true;
    for (const auto& child : node.children)
        ok = ok && paths_independent_p_rec(*child, rows, n, p);
    rows.pop_back();
    return ok;
}

}  // namespace

bool paths_independent_p(const PAryPdt& t) {
    std::vector<std::pair<int, Code>> rows;
    return paths_independent_p_rec(t.root(), rows, t.n(), t.p());
}

namespace {

std::unique_ptr<PAryPdt::Node> synth_pdt_p_rec(const ZpSpectrum& s,
                                               const std::vector<int>& coords) {
    if (spectral_norm(s) <= 1.0 + kTau) return make_leaf_p(constant_sign(s));
    TopTwoP top = top_two_p(s);
    Code eta = sub(top.beta, top.alpha, s.n(), s.p());
    Canonical canon = canonicalize(eta, s.n(), s.p());
    std::vector<int> sub_coords = coords;
    sub_coords.erase(sub_coords.begin() + canon.pivot);
    auto node = std::make_unique<PAryPdt::Node>();
    node->query = lift_code(canon.form, coords, s.p());
    node->children.resize(s.p());
    for (int lambda = 0; lambda < s.p(); ++lambda)
        node->children[lambda] =
            synth_pdt_p_rec(restrict_zp(s, canon.form, lambda), sub_coords);
    return node;
}

}  // namespace

PAryPdt synth_pdt_p(const ZpSpectrum& s) {
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    PAryPdt t(s.p(), s.n(), synth_pdt_p_rec(s, coords));
    const long double a = spectral_norm(s);
    const long double c = std::min(kC0, c1_of(s.p()));
    const long double bound =
        std::pow(s.p(), 2 * a * a / c) * std::pow(std::max(1, s.n()), 2 * a / c);
    if (!std::isinf(bound) && !std::isnan(bound) && bound <= 1e30L)
        check(static_cast<long double>(t.size()) <= bound,
              "synth_pdt_p: size exceeded p^(2A^2/c) n^(2A/c)");
    return t;
}

namespace {

std::unique_ptr<PAryPdt::Node> sparse_round_p(const ZpSpectrum& s,
                                              const std::vector<int>& coords);

std::unique_ptr<PAryPdt::Node> sparse_layer_p(const ZpSpectrum& s,
                                              const std::vector<int>& coords,
                                              const std::vector<Code>& forms,
                                              std::int64_t round_sparsity) {
    if (is_constant_p(s)) return make_leaf_p(constant_sign(s));
    if (forms.empty()) {
        check(2 * sparsity(s) <= round_sparsity,
              "synth_sparse_p: branch did not halve the sparsity");
        return sparse_round_p(s, coords);
    }
    const int p = s.p(), n = s.n();
    const Code gamma = forms.front();  // canonical: pivot digit is 1
    const int pivot = lowest_nonzero_digit(gamma, n, p);
    std::vector<int> sub_coords = coords;
    sub_coords.erase(sub_coords.begin() + pivot);
    std::vector<Code> projected(forms.begin() + 1, forms.end());
    for (Code& f : projected) {
        int d = digit(f, pivot, p);
        if (d != 0) f = sub(f, scale(gamma, d, n, p), n, p);
        Code stride = static_cast<Code>(pow_int(p, pivot));
        f = f % stride + (f / (stride * p)) * stride;
        check(f != 0, "synth_sparse_p: projected form vanished");
    }
    auto node = std::make_unique<PAryPdt::Node>();
    node->query = lift_code(gamma, coords, p);
    node->children.resize(p);
    for (int lambda = 0; lambda < p; ++lambda)
        node->children[lambda] = sparse_layer_p(restrict_zp(s, gamma, lambda), sub_coords,
                                                projected, round_sparsity);
    return node;
}

std::unique_ptr<PAryPdt::Node> sparse_round_p(const ZpSpectrum& s,
                                              const std::vector<int>& coords) {
    if (is_constant_p(s)) return make_leaf_p(constant_sign(s));
    ZpRestriction constraints = find_constant_subspace_p(s);
    std::vector<Code> forms;
    forms.reserve(constraints.co_dimension());
    for (const auto& c : constraints.constraints) forms.push_back(c.form);
    return sparse_layer_p(s, coords, forms, sparsity(s));
}

}  // namespace

PAryPdt synth_sparse_p(const ZpSpectrum& s) {
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    PAryPdt t(s.p(), s.n(), sparse_round_p(s, coords));

    const double a = spectral_norm(s);
    const std::int64_t spar0 = sparsity(s);
    std::int64_t log_s = 0;
    while ((std::int64_t(1) << log_s) < spar0) ++log_s;
    const std::int64_t layers = static_cast<std::int64_t>(std::ceil(a * a / kC0));
    if (spar0 > 1)
        check(t.depth() <= layers * log_s,
              "synth_sparse_p: depth exceeded ceil(A^2/c0) ceil(log2 s)");
    return t;
}

namespace {

struct ApproxCtxP {
    double eps;
    int cap;
};

std::unique_ptr<PAryPdt::Node> synth_approx_p_rec(const ApproxCtxP& ctx, const ZpSpectrum& s,
                                                  const std::vector<int>& coords, int depth) {
    if (std::abs(s.coeff(0)) > 1.0 - ctx.eps) return make_functional_leaf_p(s);
    if (depth >= ctx.cap) return make_functional_leaf_p(s);

    const int p = s.p(), n = s.n();
    Code alpha = 0;
    double best = -1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double mag = std::abs(s.coeff(static_cast<Code>(i)));
        if (mag > best + kTau) {
            best = mag;
            alpha = static_cast<Code>(i);
        }
    }

    auto node = std::make_unique<PAryPdt::Node>();
    node->children.resize(p);
    if (alpha != 0 && best > 1.0 - ctx.eps) {
        // Impossible for eps < 1 - 1/sqrt(2) (two conjugate coefficients would
        // break Parseval); if it does apply, one query leaves every branch
        // highly biased.
        Canonical canon = canonicalize(alpha, n, p);
        std::vector<int> sub_coords = coords;
        sub_coords.erase(sub_coords.begin() + canon.pivot);
        node->query = lift_code(canon.form, coords, p);
        for (int lambda = 0; lambda < p; ++lambda)
            node->children[lambda] = make_functional_leaf_p(restrict_zp(s, canon.form, lambda));
        return node;
    }

    TopTwoP top = top_two_p(s);
    Code eta = sub(top.beta, top.alpha, n, p);
    Canonical canon = canonicalize(eta, n, p);
    std::vector<int> sub_coords = coords;
    sub_coords.erase(sub_coords.begin() + canon.pivot);
    node->query = lift_code(canon.form, coords, p);
    for (int lambda = 0; lambda < p; ++lambda)
        node->children[lambda] =
            synth_approx_p_rec(ctx, restrict_zp(s, canon.form, lambda), sub_coords, depth + 1);
    return node;
}

}  // namespace

PAryPdt synth_approx_p(const ZpSpectrum& s, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw ParamError("eps must be in (0, 1/2)");
    ApproxCtxP ctx;
    ctx.eps = eps / 2;
    const double a = spectral_norm(s);
    ctx.cap = static_cast<int>(
        std::ceil(20.0 / kC0 * (a * a + std::log2(1.0 / ctx.eps))));
    std::vector<int> coords(s.n());
    std::iota(coords.begin(), coords.end(), 0);
    PAryPdt t(s.p(), s.n(), synth_approx_p_rec(ctx, s, coords, 0));
    check(t.depth() <= ctx.cap, "synth_approx_p: depth exceeded K");
    return t;
}

// ---------------------------------------------------------------------------
// p-ary coefficient search.

namespace {

std::uint64_t splitmix64_p(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t hoeffding_samples_p(double accuracy, double delta) {
    double m = std::ceil(2.0 / (accuracy * accuracy) * std::log(2.0 / delta));
    return static_cast<std::int64_t>(std::min(m, 9.0e15));
}

Complex estimate_coeff_p(ZpOracle& oracle, int p, int n, Code alpha, double eta, double delta,
                         std::uint64_t seed) {
    const std::int64_t m = hoeffding_samples_p(eta, delta);
    const auto w = omega_table(p);
    std::mt19937_64 rng(seed);
    const std::size_t domain = pow_int(p, n);
    Complex sum = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        Code x = static_cast<Code>(rng() % domain);
        // conj(chi_alpha(x)) = omega^(-<alpha,x>)
        sum += static_cast<double>(oracle.query(x)) * std::conj(w[dot(alpha, x, n, p)]);
    }
    return sum / static_cast<double>(m);
}

double estimate_bucket_p(ZpOracle& oracle, int p, int n, Code prefix, int len,
                         std::int64_t samples, std::uint64_t seed) {
    const auto w = omega_table(p);
    std::mt19937_64 rng(seed);
    const std::size_t low = pow_int(p, len);
    const std::size_t high = pow_int(p, n - len);
    Complex sum = 0;
    for (std::int64_t i = 0; i < samples; ++i) {
        Code x1 = static_cast<Code>(rng() % low);
        Code x2 = static_cast<Code>(rng() % low);
        Code z = static_cast<Code>(rng() % high);
        Code p1 = x1 + static_cast<Code>(z * low);
        Code p2 = x2 + static_cast<Code>(z * low);
        // f(x1|z) f(x2|z) conj(chi_a(x1)) chi_a(x2)
        int phase = (dot(prefix, x2, len, p) - dot(prefix, x1, len, p) + p) % p;
        sum += static_cast<double>(oracle.query(p1) * oracle.query(p2)) * w[phase];
    }
    return (sum / static_cast<double>(samples)).real();
}

SearchResultP km_search_p_exact(ZpOracle& oracle, int p, int n, const SearchParams& params) {
    std::vector<std::int8_t> values(pow_int(p, n));
    for (std::size_t x = 0; x < values.size(); ++x)
        values[x] = static_cast<std::int8_t>(oracle.query(static_cast<Code>(x)));
    ZpSpectrum s = dft_forward(ZpFunction(p, n, std::move(values)));
    SearchResultP result;
    result.exact = true;
    const double cutoff = params.theta * params.theta / 2;
    for (std::size_t a = 0; a < s.size(); ++a)
        if (std::norm(s.coeff(static_cast<Code>(a))) >= cutoff)
            result.hits.push_back({static_cast<Code>(a), s.coeff(static_cast<Code>(a))});
    return result;
}

}  // namespace

SearchResultP km_search_p(ZpOracle& oracle, int p, int n, const SearchParams& params) {
    require_shape(p, n);
    if (!(params.theta > 0 && params.theta <= 1)) throw ParamError("theta must be in (0,1]");
    if (!(params.eta > 0 && params.eta <= params.theta / 2 + 1e-15))
        throw ParamError("eta must be in (0, theta/2]");
    if (!(params.delta > 0 && params.delta < 1)) throw ParamError("delta must be in (0,1)");

    const double theta_sq = params.theta * params.theta;
    const double per_level = std::ceil(4.0 * p / theta_sq);
    const double events = std::max(2.0, double(n) * per_level + per_level);
    const double delta_event = params.delta / events;
    const std::int64_t bucket_samples = hoeffding_samples_p(theta_sq / 4, delta_event);

    const std::uint64_t before = oracle.query_count();
    if (!params.force_sampling &&
        static_cast<double>(pow_int(p, n)) <= 2.0 * static_cast<double>(bucket_samples)) {
        SearchResultP result = km_search_p_exact(oracle, p, n, params);
        result.queries = oracle.query_count() - before;
        return result;
    }

    std::vector<Code> frontier{0};
    std::uint64_t stream = 0;
    for (int len = 1; len <= n; ++len) {
        std::vector<Code> next;
        const Code stride = static_cast<Code>(pow_int(p, len - 1));
        for (Code parent : frontier) {
            for (int d = 0; d < p; ++d) {
                Code prefix = parent + static_cast<Code>(d) * stride;
                std::uint64_t seed = splitmix64_p(params.seed ^ splitmix64_p(stream++));
                double w = estimate_bucket_p(oracle, p, n, prefix, len, bucket_samples, seed);
                if (w >= theta_sq / 2) next.push_back(prefix);
            }
        }
        frontier = std::move(next);
    }

    SearchResultP result;
    for (Code alpha : frontier) {
        std::uint64_t seed = splitmix64_p(params.seed ^ splitmix64_p(stream++));
        result.hits.push_back(
            {alpha, estimate_coeff_p(oracle, p, n, alpha, params.eta, delta_event, seed)});
    }
    std::sort(result.hits.begin(), result.hits.end(),
              [](const SearchHitP& a, const SearchHitP& b) { return a.alpha < b.alpha; });
    result.queries = oracle.query_count() - before;
    return result;
}

}  // namespace zp
}  // namespace spectral
