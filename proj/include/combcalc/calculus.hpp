#pragma once

#include <map>
#include <span>
#include <vector>

#include "combcalc/exterior.hpp"

namespace combcalc {

// A smooth map between combinatorial Euclidean spaces, one component
// expression (over domain coordinates) per codomain coordinate.
class SmoothMap {
public:
    // components[i] is the codomain coordinate at position i.
    SmoothMap(CombSpace domain, CombSpace codomain, std::vector<Expr> components);

    static SmoothMap identity(const CombSpace& space);
    // x -> A x + b over positions, A given row-major n_codomain x n_domain.
    static SmoothMap affine(const CombSpace& domain, const CombSpace& codomain,
                            std::span<const double> matrix, std::span<const double> offset);

    const CombSpace& domain() const { return domain_; }
    const CombSpace& codomain() const { return codomain_; }
    const std::vector<Expr>& components() const { return components_; }
    const Expr& component(int codomain_position) const;

    // Image coordinates of p.
    Point operator()(const Point& p) const;

    // Rewrites an expression over codomain coordinates into one over domain
    // coordinates (f -> f o this).
    Expr compose_with(const Expr& f) const;

private:
    CombSpace domain_;
    CombSpace codomain_;
    std::vector<Expr> components_;
};

// outer o inner, by substituting inner's components into outer's.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

// Sum over terms c dx^I of sum_v (dc/dx^v) dx^v ^ dx^I. Top-degree input
// yields the zero n-form.
DiffForm exterior_derivative(const DiffForm& w);

// d(t^i)/d(x^j) at p, rows over codomain positions, columns over domain.
CoordMatrix jacobian(const SmoothMap& t, const Point& p);

// LU with partial pivoting. Throws DimensionError for non-square input.
double determinant(const CoordMatrix& a);

// Throws DimensionError when domain and codomain dimensions differ.
double det_jacobian(const SmoothMap& t, const Point& p);

// t* w for w on t's codomain; result lives on t's domain.
DiffForm pullback(const SmoothMap& t, const DiffForm& w);

// The function g with d(i_X v) = g v for a top-degree volume form v.
// The coefficient of v is checked to be nonzero at every sample point;
// elsewhere a vanishing coefficient surfaces as an EvalError on evaluation.
Expr divergence(const VectorField& x, const DiffForm& v, std::span<const Point> samples = {});

} // namespace combcalc
