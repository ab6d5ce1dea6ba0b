#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "combcalc/expr.hpp"
#include "combcalc/space.hpp"

namespace combcalc {

// Strictly increasing list of coordinate positions (indices into
// CombSpace::coord_order). Names the basis element dx^{i1} ^ ... ^ dx^{ik}.
class MultiIndex {
public:
    MultiIndex() = default;
    // Throws DegreeError unless positions are strictly increasing and >= 0.
    explicit MultiIndex(std::vector<int> positions);

    // Sorts an arbitrary sequence into canonical order. Returns the sorted
    // index and the permutation sign, or nullopt if a position repeats.
    static std::optional<std::pair<MultiIndex, int>> canonicalize(std::vector<int> positions);

    // Every coordinate of space, i.e. the index of the volume form.
    static MultiIndex top(const CombSpace& space);

    int degree() const { return static_cast<int>(positions_.size()); }
    const std::vector<int>& positions() const { return positions_; }
    bool contains(int position) const;
    // 0-based slot of position, or -1.
    int slot_of(int position) const;
    MultiIndex without_slot(int slot) const;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<int> positions_;
};

// "dx1^dx2_2" style; the empty index prints as "1".
std::string to_string(const MultiIndex& index, const CombSpace& space);
// Inverse of to_string. Throws ParseError / UnknownVariableError /
// DegreeError (for unsorted or repeated indices).
MultiIndex parse_multi_index(std::string_view text, const CombSpace& space);

// A differential k-form: sparse map from basis multi-indices to
// coefficient expressions. Terms whose coefficient folds to the constant 0
// are never stored.
class DiffForm {
public:
    DiffForm(CombSpace space, int degree);
    DiffForm(CombSpace space, int degree, const std::map<MultiIndex, Expr>& terms);

    static DiffForm function(const CombSpace& space, Expr f);
    static DiffForm basis(const CombSpace& space, MultiIndex index, Expr coefficient = Expr::constant(1.0));
    static DiffForm volume(const CombSpace& space, Expr coefficient = Expr::constant(1.0));

    const CombSpace& space() const { return space_; }
    int degree() const { return degree_; }
    const std::map<MultiIndex, Expr>& terms() const { return terms_; }
    Expr coefficient(const MultiIndex& index) const;
    bool is_zero() const { return terms_.empty(); }

    // Coefficient values at p, keyed like terms().
    std::map<MultiIndex, double> evaluate(const Point& p) const;

private:
    CombSpace space_;
    int degree_;
    std::map<MultiIndex, Expr> terms_;
};

// Vector field with components indexed by coordinate position; absent
// components are zero.
class VectorField {
public:
    explicit VectorField(CombSpace space);
    VectorField(CombSpace space, std::map<int, Expr> components);

    const CombSpace& space() const { return space_; }
    const std::map<int, Expr>& components() const { return components_; }
    Expr component(int position) const;

private:
    CombSpace space_;
    std::map<int, Expr> components_;
};

std::uint64_t binomial(int n, int k);

// Dimension of Lambda^l, binomial(n, l). Throws DegreeError if l not in [0, n].
std::uint64_t lambda_dim(const CombSpace& space, int l);

DiffForm add_forms(const DiffForm& a, const DiffForm& b);
DiffForm scale_form(const Expr& c, const DiffForm& a);
DiffForm negate_form(const DiffForm& a);
DiffForm sub_forms(const DiffForm& a, const DiffForm& b);

// When deg a + deg b exceeds n the product is the zero form, reported with
// degree n (forms never carry a degree above n).
DiffForm wedge(const DiffForm& a, const DiffForm& b);

// i_X w. Throws DegreeError for 0-forms.
DiffForm interior_product(const VectorField& x, const DiffForm& w);

} // namespace combcalc
