#pragma once

#include <span>
#include <string>
#include <vector>

#include "combcalc/integration.hpp"

namespace combcalc {

// One face of a box: coordinate `fixed` pinned at `value`.
struct BoundaryFace {
    int fixed = 0;          // coordinate position
    double value = 0.0;     // lo or hi of that coordinate's interval
    int outward = 1;        // +1 upper face, -1 lower face
    int orientation = 1;    // induced sign: outward * (-1)^fixed
    std::vector<Axis> free; // the remaining n-1 coordinates
};

// A box domain with boundary. Degenerate intervals are already rejected by Box.
class BoundedDomain {
public:
    explicit BoundedDomain(Box box);

    const Box& box() const { return box_; }
    const std::vector<BoundaryFace>& faces() const { return faces_; }

    // Interior test in the sense of having an open box neighbourhood.
    bool is_interior(std::span<const double> coords) const;

private:
    Box box_;
    std::vector<BoundaryFace> faces_;
};

// The 2n faces in canonical order: coordinate 1 lower, coordinate 1 upper,
// coordinate 2 lower, ...
std::vector<BoundaryFace> boundary(const BoundedDomain& d);

// Same faces with every orientation negated.
std::vector<BoundaryFace> reverse_orientation(std::span<const BoundaryFace> faces);

// sum over faces of orientation * integral over the face of the coefficient
// of dx^{I} with I the complement of the fixed coordinate. Empty face list
// gives 0. Throws DegreeError unless deg w = n - 1.
double integrate_faces(const DiffForm& w, const Box& box, std::span<const BoundaryFace> faces,
                       const IntegrationOptions& options = {});
double integrate_boundary(const DiffForm& w, const BoundedDomain& d, const IntegrationOptions& options = {});

enum class Theorem { Stokes, Gauss, Integral, Atlas };

std::string to_string(Theorem t);

struct Tolerance {
    double abs = 1e-8;
    double rel = 1e-8;
};

struct VerificationReport {
    Theorem theorem = Theorem::Stokes;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    int order = 0;
    Tolerance tol;
    bool pass = false;
};

// Fills the error fields and pass flag from lhs, rhs and tol.
VerificationReport make_report(Theorem theorem, double lhs, double rhs, int order, Tolerance tol);

// lhs = integral of dw over the box, rhs = boundary integral of w.
VerificationReport verify_stokes(const DiffForm& w, const BoundedDomain& d, const IntegrationOptions& options = {},
                                 Tolerance tol = {});

// lhs = integral of (div X) v, rhs = boundary integral of i_X v.
// Throws VolumeFormError if v's coefficient vanishes at a sample of the box.
VerificationReport verify_gauss(const VectorField& x, const DiffForm& v, const BoundedDomain& d,
                                const IntegrationOptions& options = {}, Tolerance tol = {});

} // namespace combcalc
