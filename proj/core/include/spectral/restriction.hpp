#pragma once

#include <cstdint>
#include <vector>

#include "spectral/boolfn.hpp"

namespace spectral {

// Nonzero linear form gamma over Z_2^n.
struct LinearForm {
    Mask mask;

    explicit LinearForm(Mask m) : mask(m) {
        if (m == 0) throw ZeroFormError("linear form must be nonzero");
    }
};

// Ordered, linearly independent list of (form, value) constraints. The list
// length equals the co-dimension of the affine subspace it defines.
class AffineRestriction {
  public:
    struct Constraint {
        Mask form;
        int value;  // +1 or -1

        bool operator==(const Constraint&) const = default;
    };

    AffineRestriction() = default;

    // Throws ParamError if the new form is linearly dependent on the current
    // ones (checked by Gaussian elimination) or zero.
    void push(Mask form, int value);

    // Non-throwing variant: false if the form would be dependent or zero.
    bool try_push(Mask form, int value);

    std::size_t co_dimension() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    bool operator==(const AffineRestriction&) const = default;

  private:
    std::vector<Constraint> constraints_;
    std::vector<Mask> echelon_;  // row-reduced basis of the span
};

// Coefficient-collapse restriction of s to the subspace chi_gamma = b.
// The pivot (lowest set bit of gamma) is eliminated, so the result lives on
// n-1 re-indexed variables: deleting the pivot bit maps the coset
// representative with pivot bit 0 to its new index. Never increases the
// spectral norm or the sparsity.
Spectrum restrict_spectrum(const Spectrum& s, LinearForm gamma, int b);

struct StepReport {
    Mask delta;  // alpha ^ beta of the two largest coefficients
    Dyadic drop_plus;
    Dyadic drop_minus;
    Spectrum restricted_plus;
    Spectrum restricted_minus;
};

// One restriction step on chi_{alpha^beta}: both branches and their exact L1
// drops. Verifies at runtime the sign-cased drop guarantees and that the best
// branch saves at least 1/A. Throws NormOneError when ||s||_1 = 1 (the
// function is +/- a character and has no second coefficient to play against).
StepReport main_lemma_step(const Spectrum& s);

enum class SubspaceMode { Basic, Accelerated };

// Iterated restriction until the function is constant. Returned constraints
// are in the original n coordinates and restricting f by them (in order)
// provably yields a constant; co-dimension <= ceil(A^2) is checked. Basic
// mode follows the larger L1 drop; accelerated mode switches to chasing the
// largest new coefficient once |f-hat(alpha)| >= 1/2.
AffineRestriction find_constant_subspace(const Spectrum& s,
                                         SubspaceMode mode = SubspaceMode::Basic);

}  // namespace spectral
