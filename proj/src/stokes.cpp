#include "combcalc/stokes.hpp"

#include <algorithm>
#include <cmath>

#include "combcalc/error.hpp"

namespace combcalc {

namespace {

std::vector<BoundaryFace> make_faces(const Box& box) {
    std::vector<BoundaryFace> faces;
    const int n = box.space().n();
    const std::vector<Axis> axes = box.axes();
    for (int j = 0; j < n; ++j) {
        std::vector<Axis> free;
        for (const Axis& a : axes) {
            if (a.position != j) free.push_back(a);
        }
        const int parity = j % 2 == 0 ? 1 : -1; // (-1)^(j-1) with 1-based j
        const auto [lo, hi] = box.interval(j);
        faces.push_back({j, lo, -1, -parity, free});
        faces.push_back({j, hi, +1, parity, free});
    }
    return faces;
}

} // namespace

BoundedDomain::BoundedDomain(Box box) : box_(std::move(box)), faces_(make_faces(box_)) {}

bool BoundedDomain::is_interior(std::span<const double> coords) const {
    if (coords.size() != box_.intervals().size()) return false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto [lo, hi] = box_.intervals()[i];
        if (!(coords[i] > lo && coords[i] < hi)) return false;
    }
    return true;
}

std::vector<BoundaryFace> boundary(const BoundedDomain& d) { return d.faces(); }

std::vector<BoundaryFace> reverse_orientation(std::span<const BoundaryFace> faces) {
    std::vector<BoundaryFace> out(faces.begin(), faces.end());
    for (BoundaryFace& f : out) f.orientation = -f.orientation;
    return out;
}

double integrate_faces(const DiffForm& w, const Box& box, std::span<const BoundaryFace> faces,
                       const IntegrationOptions& options) {
    const CombSpace& space = w.space();
    if (!(box.space() == space)) throw SpaceMismatchError("form and box live on different spaces");
    if (w.degree() != space.n() - 1) throw DegreeError("boundary integral needs an (n-1)-form");
    const QuadratureOptions q{options.order, options.cells};
    CompensatedSum sum;
    for (const BoundaryFace& face : faces) {
        // Only dx^{complement of fixed} survives restriction to the face.
        std::vector<int> rest;
        for (const Axis& a : face.free) rest.push_back(a.position);
        const Expr c = w.coefficient(MultiIndex(rest));
        if (c.is_zero()) continue;
        const CompiledExpr f(c, space);
        std::vector<double> base = box.center();
        base[static_cast<std::size_t>(face.fixed)] = face.value;
        const double value = options.parallel ? integrate_parallel(f, base, face.free, q)
                                              : integrate_serial(f, base, face.free, q);
        sum.add(face.orientation * value);
    }
    return sum.value();
}

double integrate_boundary(const DiffForm& w, const BoundedDomain& d, const IntegrationOptions& options) {
    return integrate_faces(w, d.box(), d.faces(), options);
}

std::string to_string(Theorem t) {
    switch (t) {
    case Theorem::Stokes: return "stokes";
    case Theorem::Gauss: return "gauss";
    case Theorem::Integral: return "integral";
    case Theorem::Atlas: return "atlas";
    }
    return "unknown";
}

VerificationReport make_report(Theorem theorem, double lhs, double rhs, int order, Tolerance tol) {
    VerificationReport r;
    r.theorem = theorem;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_err = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
    r.order = order;
    r.tol = tol;
    r.pass = r.abs_err <= tol.abs || r.rel_err <= tol.rel;
    return r;
}

VerificationReport verify_stokes(const DiffForm& w, const BoundedDomain& d, const IntegrationOptions& options,
                                 Tolerance tol) {
    if (w.degree() != w.space().n() - 1) throw DegreeError("Stokes verification needs an (n-1)-form");
    const double lhs = integrate_box(exterior_derivative(w), d.box(), options);
    const double rhs = integrate_boundary(w, d, options);
    return make_report(Theorem::Stokes, lhs, rhs, options.order, tol);
}

VerificationReport verify_gauss(const VectorField& x, const DiffForm& v, const BoundedDomain& d,
                                const IntegrationOptions& options, Tolerance tol) {
    std::vector<Point> samples;
    for (auto& p : sample_grid(d.box(), 729)) samples.emplace_back(v.space(), std::move(p));
    const Expr div = divergence(x, v, samples);
    const double lhs = integrate_box(scale_form(div, v), d.box(), options);
    const double rhs = integrate_boundary(interior_product(x, v), d, options);
    return make_report(Theorem::Gauss, lhs, rhs, options.order, tol);
}

} // namespace combcalc
