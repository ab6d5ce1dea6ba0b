#pragma once

#include <span>
#include <vector>

#include "combcalc/expr.hpp"

namespace combcalc {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes from Newton iteration on P_order, converged to 1e-15.
// Throws DomainError for order < 1.
GaussRule gauss_legendre(int order);

// One integration direction: coordinate position and its interval.
struct Axis {
    int position = 0;
    double lo = 0.0;
    double hi = 0.0;
};

struct QuadratureOptions {
    int order = 8;
    // Equal sub-intervals per axis; the rule is applied on each.
    int cells = 1;
};

// Running sum with Neumaier compensation.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

// Tensor-product Gauss-Legendre integral of f over the product of axes.
// Coordinates not named by an axis are taken from base (which must hold a
// full coordinate vector). With no axes the result is f(base).
//
// integrate_serial is the reference: a plain loop over every node in
// canonical order (last axis fastest). integrate_parallel splits the same
// node sequence into fixed blocks evaluated under OpenMP and reduces the
// block sums in block order, so its result does not depend on the thread
// count.
double integrate_serial(const CompiledExpr& f, std::span<const double> base, std::span<const Axis> axes,
                        const QuadratureOptions& options);
double integrate_parallel(const CompiledExpr& f, std::span<const double> base, std::span<const Axis> axes,
                          const QuadratureOptions& options);

} // namespace combcalc
