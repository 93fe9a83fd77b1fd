#include "spectral/restriction.hpp"

#include <algorithm>
#include <cstdlib>

namespace spectral {

namespace {

// Insert a zero bit at position `pos`, shifting higher bits up.
Mask insert_bit(Mask m, int pos) {
    Mask low = m & ((Mask(1) << pos) - 1);
    Mask high = m >> pos;
    return low | (high << (pos + 1));
}

}  // namespace

bool AffineRestriction::try_push(Mask form, int value) {
    if (form == 0) return false;
    if (value != 1 && value != -1) throw ParamError("constraint value must be +1 or -1");
    // Reduce against rows, each keyed by its (distinct) highest set bit; rows
    // are kept sorted by descending lead so one pass suffices.
    Mask reduced = form;
    for (Mask row : echelon_) {
        Mask row_lead = Mask(1) << (31 - __builtin_clz(row));
        if (reduced & row_lead) reduced ^= row;
    }
    if (reduced == 0) return false;
    echelon_.push_back(reduced);
    // Keep rows sorted by descending leading bit so reduction stays a single
    // pass.
    std::sort(echelon_.begin(), echelon_.end(), std::greater<Mask>());
    constraints_.push_back(Constraint{form, value});
    return true;
}

void AffineRestriction::push(Mask form, int value) {
    if (!try_push(form, value))
        throw ParamError("constraint form is zero or linearly dependent");
}

Spectrum restrict_spectrum(const Spectrum& s, LinearForm gamma, int b) {
    if (b != 1 && b != -1) throw ParamError("restriction value must be +1 or -1");
    if (gamma.mask >= (Mask(1) << s.n())) throw ParamError("form out of range for dimension");
    if (s.n() < 1) throw ParamError("cannot restrict a 0-dimensional spectrum");
    const int pivot = __builtin_ctz(gamma.mask);
    const std::size_t half = s.size() >> 1;
    std::vector<std::int64_t> out(half);
    for (std::size_t i = 0; i < half; ++i) {
        Mask beta = insert_bit(static_cast<Mask>(i), pivot);  // pivot bit 0 representative
        std::int64_t sum = s.scaled(beta) + std::int64_t(b) * s.scaled(beta ^ gamma.mask);
        // Coefficients of the restricted function are multiples of 2^-(n-1),
        // so the collapsed sum is always even relative to the 2^-n scale.
        check((sum & 1) == 0, "collapsed coefficient is odd");
        out[i] = sum / 2;
    }
    return Spectrum(s.n() - 1, std::move(out));
}

StepReport main_lemma_step(const Spectrum& s) {
    const Dyadic norm = spectral_norm(s);
    if (norm == Dyadic::from_int(1))
        throw NormOneError("spectral norm is 1: the function is +/- a character");
    check(norm > Dyadic::from_int(1), "Boolean spectrum has norm < 1");

    const TopTwo top = top_two(s);  // norm > 1 guarantees a second coefficient
    const Mask delta = top.alpha ^ top.beta;
    Spectrum plus = restrict_spectrum(s, LinearForm(delta), +1);
    Spectrum minus = restrict_spectrum(s, LinearForm(delta), -1);
    Dyadic drop_plus = norm - spectral_norm(plus);
    Dyadic drop_minus = norm - spectral_norm(minus);

    const Dyadic mag_alpha = s.coeff(top.alpha).abs();
    const Dyadic mag_beta = s.coeff(top.beta).abs();
    const bool same_sign = (s.scaled(top.alpha) > 0) == (s.scaled(top.beta) > 0);
    // Same sign: the plus branch kills at least |f-hat(alpha)| of mass, the
    // minus branch at least |f-hat(beta)|; opposite signs swap the roles.
    if (same_sign) {
        check(drop_plus >= mag_alpha, "main_lemma_step: plus-branch drop below |f(alpha)|");
        check(drop_minus >= mag_beta, "main_lemma_step: minus-branch drop below |f(beta)|");
    } else {
        check(drop_plus >= mag_beta, "main_lemma_step: plus-branch drop below |f(beta)|");
        check(drop_minus >= mag_alpha, "main_lemma_step: minus-branch drop below |f(alpha)|");
    }
    const Dyadic best = std::max(drop_plus, drop_minus);
    check(Dyadic::product_at_least_one(best, norm), "main_lemma_step: best drop below 1/A");

    return StepReport{delta, drop_plus, drop_minus, std::move(plus), std::move(minus)};
}

AffineRestriction find_constant_subspace(const Spectrum& s, SubspaceMode mode) {
    const Dyadic one = Dyadic::from_int(1);
    const std::int64_t budget = spectral_norm(s).ceil_square();

    AffineRestriction result;
    Spectrum cur = s;
    // coords[i] = original position of the current variable i; shrinks as
    // pivots are eliminated.
    std::vector<int> coords(s.n());
    for (int i = 0; i < s.n(); ++i) coords[i] = i;

    auto lift = [&coords](Mask local) {
        Mask global = 0;
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (local & (Mask(1) << i)) global |= Mask(1) << coords[i];
        return global;
    };

    std::int64_t steps = 0;
    while (spectral_norm(cur) > one) {
        StepReport step = main_lemma_step(cur);
        int branch;
        if (mode == SubspaceMode::Accelerated &&
            2 * std::abs(cur.scaled(top_two(cur).alpha)) >= (std::int64_t(1) << cur.n())) {
            // Past the 1/2 threshold the restriction that saves the most also
            // grows the leading coefficient; chase the larger new leader.
            std::int64_t lead_plus = 0, lead_minus = 0;
            for (std::int64_t c : step.restricted_plus.scaled())
                lead_plus = std::max(lead_plus, std::abs(c));
            for (std::int64_t c : step.restricted_minus.scaled())
                lead_minus = std::max(lead_minus, std::abs(c));
            // Compare as dyadics on n-1 shared scale; tie goes to the bigger
            // drop, then to the plus branch.
            if (lead_plus != lead_minus)
                branch = lead_plus > lead_minus ? +1 : -1;
            else
                branch = step.drop_minus > step.drop_plus ? -1 : +1;
        } else {
            branch = step.drop_minus > step.drop_plus ? -1 : +1;
        }

        result.push(lift(step.delta), branch);
        const int pivot = __builtin_ctz(step.delta);
        coords.erase(coords.begin() + pivot);
        cur = branch == +1 ? std::move(step.restricted_plus) : std::move(step.restricted_minus);

        ++steps;
        check(steps <= budget + 1, "constant-subspace search exceeded ceil(A^2)+1 steps");
    }

    // Norm 1: +/- chi_alpha. A nonzero alpha needs one final fixing.
    Mask alpha = 0;
    for (std::size_t i = 0; i < cur.size(); ++i)
        if (cur.scaled(static_cast<Mask>(i)) != 0) alpha = static_cast<Mask>(i);
    if (alpha != 0) result.push(lift(alpha), +1);

    check(static_cast<std::int64_t>(result.co_dimension()) <= budget,
          "constant subspace co-dimension exceeded ceil(A^2)");
    return result;
}

}  // namespace spectral
