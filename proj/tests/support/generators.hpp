#pragma once

// Random inputs and independent oracles shared by the test suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "combcalc/calculus.hpp"
#include "combcalc/exterior.hpp"
#include "combcalc/space.hpp"

namespace testing_support {

using namespace combcalc;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Point random_point(const CombSpace& space, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> x(static_cast<std::size_t>(space.n()));
    for (double& v : x) v = uniform(rng, lo, hi);
    return Point(space, std::move(x));
}

inline CoordMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    CoordMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
    }
    return m;
}

// Sum of up to `terms` monomials, each of total degree <= max_degree.
inline Expr random_polynomial(const CombSpace& space, std::mt19937_64& rng, int max_degree, int terms = 3) {
    Expr sum = Expr::constant(0.0);
    for (int t = 0; t < terms; ++t) {
        Expr mono = Expr::constant(std::round(uniform(rng, -3.0, 3.0) * 4.0) / 4.0 + 0.5);
        const int degree = uniform_int(rng, 0, max_degree);
        for (int k = 0; k < degree; ++k) {
            mono = mono * Expr::variable(space.label(uniform_int(rng, 0, space.n() - 1)));
        }
        sum = sum + mono;
    }
    return sum;
}

// Random tree mixing polynomial arithmetic with sin, cos and exp.
inline Expr random_smooth(const CombSpace& space, std::mt19937_64& rng, int depth) {
    if (depth == 0 || uniform_int(rng, 0, 5) == 0) {
        if (uniform_int(rng, 0, 2) == 0) return Expr::constant(std::round(uniform(rng, 0.0, 4.0) * 4.0) / 4.0);
        return Expr::variable(space.label(uniform_int(rng, 0, space.n() - 1)));
    }
    switch (uniform_int(rng, 0, 7)) {
    case 0: return random_smooth(space, rng, depth - 1) + random_smooth(space, rng, depth - 1);
    case 1: return random_smooth(space, rng, depth - 1) - random_smooth(space, rng, depth - 1);
    case 2:
    case 3: return random_smooth(space, rng, depth - 1) * random_smooth(space, rng, depth - 1);
    case 4: return pow(random_smooth(space, rng, depth - 1), uniform_int(rng, 0, 3));
    case 5: return sin(random_smooth(space, rng, depth - 1));
    case 6: return cos(random_smooth(space, rng, depth - 1));
    default: return exp(Expr::constant(0.5) * sin(random_smooth(space, rng, depth - 1)));
    }
}

// Unfolded tree from the node set the parser produces (nonnegative
// constants, no Apply nodes).
inline Expr random_parseable(const CombSpace& space, std::mt19937_64& rng, int depth) {
    if (depth == 0 || uniform_int(rng, 0, 4) == 0) {
        if (uniform_int(rng, 0, 1) == 0) return Expr::constant(std::round(uniform(rng, 0.0, 100.0)) / 8.0);
        return Expr::variable(space.label(uniform_int(rng, 0, space.n() - 1)));
    }
    const int pick = uniform_int(rng, 0, 8);
    if (pick < 4) {
        static constexpr ExprKind kinds[] = {ExprKind::Add, ExprKind::Sub, ExprKind::Mul, ExprKind::Div};
        return Expr::make_binary(kinds[pick], random_parseable(space, rng, depth - 1), random_parseable(space, rng, depth - 1));
    }
    if (pick == 4) return Expr::make_pow(random_parseable(space, rng, depth - 1), uniform_int(rng, 0, 4));
    static constexpr ExprKind unary[] = {ExprKind::Neg, ExprKind::Sin, ExprKind::Cos, ExprKind::Exp};
    return Expr::make_unary(unary[pick - 5], random_parseable(space, rng, depth - 1));
}

inline std::vector<MultiIndex> all_indices(int n, int degree) {
    std::vector<MultiIndex> out;
    std::vector<int> pick(static_cast<std::size_t>(degree));
    std::iota(pick.begin(), pick.end(), 0);
    if (degree > n) return out;
    for (;;) {
        out.emplace_back(pick);
        int i = degree - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - degree + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < degree; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

inline DiffForm random_form(const CombSpace& space, int degree, std::mt19937_64& rng, int coeff_degree) {
    std::map<MultiIndex, Expr> terms;
    for (const MultiIndex& index : all_indices(space.n(), degree)) {
        if (uniform_int(rng, 0, 2) == 0) continue;
        terms.emplace(index, random_polynomial(space, rng, coeff_degree));
    }
    return DiffForm(space, degree, terms);
}

inline VectorField random_field(const CombSpace& space, std::mt19937_64& rng, int coeff_degree) {
    std::map<int, Expr> comps;
    for (int i = 0; i < space.n(); ++i) comps.emplace(i, random_polynomial(space, rng, coeff_degree));
    return VectorField(space, std::move(comps));
}

// Central difference of e along coordinate v at p.
inline double central_difference(const Expr& e, const Point& p, int position, double h = 1e-5) {
    std::vector<double> plus(p.coords().begin(), p.coords().end());
    std::vector<double> minus = plus;
    plus[static_cast<std::size_t>(position)] += h;
    minus[static_cast<std::size_t>(position)] -= h;
    return (eval(e, p.space(), plus) - eval(e, p.space(), minus)) / (2.0 * h);
}

// Determinant by the permutation (Leibniz) expansion.
inline double leibniz_det(const CoordMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double det = 0.0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        }
        double term = inversions % 2 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) term *= a(i, perm[i]);
        det += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// Largest |coefficient| of w at p (0 for the zero form).
inline double max_abs_coefficient(const DiffForm& w, const Point& p) {
    double m = 0.0;
    for (const auto& [index, value] : w.evaluate(p)) m = std::max(m, std::abs(value));
    return m;
}

// Largest coefficientwise |a - b| at p.
inline double max_difference(const DiffForm& a, const DiffForm& b, const Point& p) {
    return max_abs_coefficient(sub_forms(a, b), p);
}

} // namespace testing_support
