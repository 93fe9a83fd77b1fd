#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "spectral/boolfn.hpp"
#include "spectral/pdt.hpp"
#include "spectral/restriction.hpp"
#include "spectral/zp.hpp"

namespace spectral {
namespace io {

// Truth table: line 1 "BF p=<p> n=<n>", line 2 the p^n tokens "+1"/"-1" in
// ascending index order. Spectrum dump: "SPEC p=2 n=<n>" then one
// "<alpha-binary> <scaled-int>" line per nonzero entry, ascending alpha.
// Tree: "PDT p=<p> n=<n>" then pre-order lines, "N <gamma>" for an internal
// node (children follow plus-first / lambda order), "L <+1|-1>" for a leaf,
// "F <bias-rational>" for a functional leaf. Masks and forms are written in
// their base-p digit encoding, coordinate 0 rightmost (digits a,b,c for
// 10,11,12). All formats round-trip bit-exactly.

std::string write_boolfn(const BooleanFunction& f);
BooleanFunction read_boolfn(std::istream& in);

std::string write_zpfn(const zp::ZpFunction& f);
zp::ZpFunction read_zpfn(std::istream& in);

// Either a BF p=2 table or a p>2 table; exactly one optional is set.
struct AnyFunction {
    std::optional<BooleanFunction> f2;
    std::optional<zp::ZpFunction> fp;

    int p() const { return f2 ? 2 : fp->p(); }
    int n() const { return f2 ? f2->n() : fp->n(); }
};
AnyFunction read_function(std::istream& in);
AnyFunction read_function_file(const std::string& path);

std::string write_spectrum(const Spectrum& s);
Spectrum read_spectrum(std::istream& in);

std::string write_pdt(const ParityDecisionTree& t);
std::string write_functional_pdt(const FunctionalPdt& t);
std::string write_pary_pdt(const zp::PAryPdt& t);

struct AnyTree {
    std::optional<ParityDecisionTree> pdt;
    std::optional<FunctionalPdt> fpdt;
    std::optional<zp::PAryPdt> pary;
};
AnyTree read_tree(std::istream& in);
AnyTree read_tree_file(const std::string& path);

// "<gamma-binary> <+1|-1>" per constraint line.
std::string write_restriction(const AffineRestriction& r, int n);
AffineRestriction read_restriction(std::istream& in, int n);

std::string mask_to_string(Mask m, int n);
Mask mask_from_string(const std::string& s, int line_number);
std::string code_to_string(zp::Code c, int n, int p);

void write_file(const std::string& path, const std::string& contents);

}  // namespace io
}  // namespace spectral
