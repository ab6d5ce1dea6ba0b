#include "combcalc/calculus.hpp"

#include <cmath>
#include <utility>

#include "combcalc/error.hpp"

namespace combcalc {

SmoothMap::SmoothMap(CombSpace domain, CombSpace codomain, std::vector<Expr> components)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != codomain_.n()) {
        throw DimensionError("smooth map needs one component per codomain coordinate");
    }
    for (const Expr& c : components_) validate(c, domain_);
}

SmoothMap SmoothMap::identity(const CombSpace& space) {
    std::vector<Expr> comps;
    for (const CoordLabel& l : space.coord_order()) comps.push_back(Expr::variable(l));
    return SmoothMap(space, space, std::move(comps));
}

SmoothMap SmoothMap::affine(const CombSpace& domain, const CombSpace& codomain,
                            std::span<const double> matrix, std::span<const double> offset) {
    const auto rows = static_cast<std::size_t>(codomain.n());
    const auto cols = static_cast<std::size_t>(domain.n());
    if (matrix.size() != rows * cols || offset.size() != rows) {
        throw DimensionError("affine map needs an n_codomain x n_domain matrix and n_codomain offsets");
    }
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < rows; ++i) {
        Expr c = Expr::constant(offset[i]);
        for (std::size_t j = 0; j < cols; ++j) {
            c = c + Expr::constant(matrix[i * cols + j]) * Expr::variable(domain.label(static_cast<int>(j)));
        }
        comps.push_back(c);
    }
    return SmoothMap(domain, codomain, std::move(comps));
}

const Expr& SmoothMap::component(int codomain_position) const {
    return components_.at(static_cast<std::size_t>(codomain_position));
}

Point SmoothMap::operator()(const Point& p) const {
    if (!(p.space() == domain_)) throw SpaceMismatchError("point is not in the map's domain");
    std::vector<double> image;
    image.reserve(components_.size());
    for (const Expr& c : components_) image.push_back(eval(c, p));
    return Point(codomain_, std::move(image));
}

Expr SmoothMap::compose_with(const Expr& f) const {
    return substitute(f, [this](const CoordLabel& l) { return components_[static_cast<std::size_t>(codomain_.index_of(l))]; });
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
    if (!(outer.domain() == inner.codomain())) throw SpaceMismatchError("maps do not compose");
    std::vector<Expr> comps;
    for (const Expr& c : outer.components()) comps.push_back(inner.compose_with(c));
    return SmoothMap(inner.domain(), outer.codomain(), std::move(comps));
}

DiffForm exterior_derivative(const DiffForm& w) {
    const CombSpace& space = w.space();
    if (w.degree() >= space.n()) return DiffForm(space, space.n());
    DiffForm result(space, w.degree() + 1);
    for (const auto& [index, c] : w.terms()) {
        for (int v = 0; v < space.n(); ++v) {
            if (index.contains(v)) continue;
            const Expr dc = diff(c, space.label(v));
            if (dc.is_zero()) continue;
            result = add_forms(result, wedge(DiffForm::basis(space, MultiIndex({v}), dc), DiffForm::basis(space, index)));
        }
    }
    return result;
}

CoordMatrix jacobian(const SmoothMap& t, const Point& p) {
    if (!(p.space() == t.domain())) throw SpaceMismatchError("point is not in the map's domain");
    const auto rows = static_cast<std::size_t>(t.codomain().n());
    const auto cols = static_cast<std::size_t>(t.domain().n());
    CoordMatrix j(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            j(r, c) = eval(diff(t.components()[r], t.domain().label(static_cast<int>(c))), p);
        }
    }
    return j;
}

double determinant(const CoordMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("determinant of a non-square matrix");
    const std::size_t n = a.rows();
    CoordMatrix lu = a;
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
        }
        if (lu(pivot, k) == 0.0) return 0.0;
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
            det = -det;
        }
        det *= lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return det;
}

double det_jacobian(const SmoothMap& t, const Point& p) {
    if (t.domain().n() != t.codomain().n()) throw DimensionError("det_jacobian needs equal dimensions");
    return determinant(jacobian(t, p));
}

DiffForm pullback(const SmoothMap& t, const DiffForm& w) {
    if (!(w.space() == t.codomain())) throw SpaceMismatchError("form does not live on the map's codomain");
    const CombSpace& dom = t.domain();
    if (w.degree() > dom.n()) return DiffForm(dom, dom.n());

    // dt^i as 1-forms on the domain.
    std::vector<DiffForm> dt;
    dt.reserve(t.components().size());
    for (const Expr& c : t.components()) dt.push_back(exterior_derivative(DiffForm::function(dom, c)));

    DiffForm result(dom, w.degree());
    for (const auto& [index, c] : w.terms()) {
        DiffForm term = DiffForm::function(dom, t.compose_with(c));
        for (int pos : index.positions()) term = wedge(term, dt[static_cast<std::size_t>(pos)]);
        result = add_forms(result, term);
    }
    return result;
}

Expr divergence(const VectorField& x, const DiffForm& v, std::span<const Point> samples) {
    const CombSpace& space = v.space();
    if (!(x.space() == space)) throw SpaceMismatchError("vector field and volume form live on different spaces");
    if (v.degree() != space.n()) throw DegreeError("divergence needs a top-degree volume form");
    const MultiIndex top = MultiIndex::top(space);
    const Expr vc = v.coefficient(top);
    if (vc.is_zero()) throw VolumeFormError("volume form is identically zero");
    for (const Point& p : samples) {
        if (eval(vc, p) == 0.0) throw VolumeFormError("volume form vanishes at a sample point");
    }
    const DiffForm dixv = exterior_derivative(interior_product(x, v));
    return dixv.coefficient(top) / vc;
}

} // namespace combcalc
