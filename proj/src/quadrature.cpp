#include "combcalc/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>

#include "combcalc/error.hpp"

namespace combcalc {

GaussRule gauss_legendre(int order) {
    if (order < 1) throw DomainError("quadrature order must be >= 1");
    const auto n = static_cast<std::size_t>(order);
    GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_n(x) and P_{n-1}(x).
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                  static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) <= 1e-15) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk =
                ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        if (n == 1) p0 = 1.0;
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        correction_ += (sum_ - t) + x;
    } else {
        correction_ += (x - t) + sum_;
    }
    sum_ = t;
}

namespace {

// Composite nodes and weights along one axis.
struct AxisNodes {
    int position;
    std::vector<double> x;
    std::vector<double> w;
};

std::vector<AxisNodes> expand_axes(std::span<const Axis> axes, const QuadratureOptions& options) {
    if (options.cells < 1) throw DomainError("quadrature cells must be >= 1");
    const GaussRule rule = gauss_legendre(options.order);
    std::vector<AxisNodes> out;
    out.reserve(axes.size());
    for (const Axis& a : axes) {
        AxisNodes an{a.position, {}, {}};
        const double h = (a.hi - a.lo) / options.cells;
        for (int c = 0; c < options.cells; ++c) {
            const double lo = a.lo + h * c;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                an.x.push_back(lo + 0.5 * h * (rule.nodes[k] + 1.0));
                an.w.push_back(0.5 * h * rule.weights[k]);
            }
        }
        out.push_back(std::move(an));
    }
    return out;
}

void check_base(std::span<const double> base, std::span<const Axis> axes) {
    for (const Axis& a : axes) {
        if (a.position < 0 || static_cast<std::size_t>(a.position) >= base.size()) {
            throw DomainError("quadrature axis outside the coordinate vector");
        }
    }
}

void serial_recurse(const CompiledExpr& f, const std::vector<AxisNodes>& axes, std::size_t depth,
                    std::vector<double>& point, double weight, CompensatedSum& sum) {
    if (depth == axes.size()) {
        sum.add(weight * f(point));
        return;
    }
    const AxisNodes& a = axes[depth];
    for (std::size_t k = 0; k < a.x.size(); ++k) {
        point[static_cast<std::size_t>(a.position)] = a.x[k];
        serial_recurse(f, axes, depth + 1, point, weight * a.w[k], sum);
    }
}

constexpr std::int64_t kBlock = 2048;

} // namespace

double integrate_serial(const CompiledExpr& f, std::span<const double> base, std::span<const Axis> axes,
                        const QuadratureOptions& options) {
    check_base(base, axes);
    const auto nodes = expand_axes(axes, options);
    std::vector<double> point(base.begin(), base.end());
    CompensatedSum sum;
    serial_recurse(f, nodes, 0, point, 1.0, sum);
    return sum.value();
}

double integrate_parallel(const CompiledExpr& f, std::span<const double> base, std::span<const Axis> axes,
                          const QuadratureOptions& options) {
    check_base(base, axes);
    const auto nodes = expand_axes(axes, options);
    std::int64_t total = 1;
    for (const AxisNodes& a : nodes) total *= static_cast<std::int64_t>(a.x.size());
    const std::int64_t blocks = (total + kBlock - 1) / kBlock;

    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
    std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < blocks; ++b) {
        try {
            std::vector<double> point(base.begin(), base.end());
            std::vector<std::size_t> digit(nodes.size(), 0);
            const std::int64_t first = b * kBlock;
            const std::int64_t last = std::min(total, first + kBlock);
            // Decode the first flat index; the last axis varies fastest.
            std::int64_t rest = first;
            for (std::size_t d = nodes.size(); d-- > 0;) {
                const auto len = static_cast<std::int64_t>(nodes[d].x.size());
                digit[d] = static_cast<std::size_t>(rest % len);
                rest /= len;
            }
            CompensatedSum sum;
            for (std::int64_t flat = first; flat < last; ++flat) {
                double weight = 1.0;
                for (std::size_t d = 0; d < nodes.size(); ++d) {
                    point[static_cast<std::size_t>(nodes[d].position)] = nodes[d].x[digit[d]];
                    weight *= nodes[d].w[digit[d]];
                }
                sum.add(weight * f(point));
                for (std::size_t d = nodes.size(); d-- > 0;) {
                    if (++digit[d] < nodes[d].x.size()) break;
                    digit[d] = 0;
                }
            }
            partial[static_cast<std::size_t>(b)] = sum.value();
        } catch (...) {
#pragma omp critical(combcalc_quadrature_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    CompensatedSum sum;
    for (double p : partial) sum.add(p);
    return sum.value();
}

} // namespace combcalc
