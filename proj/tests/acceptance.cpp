// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "combcalc/stokes.hpp"
#include "support/generators.hpp"

using namespace combcalc;
namespace ts = testing_support;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome cauchy_schwarz() {
    std::mt19937_64 rng(1001);
    double worst = -1.0;
    double worst_eq = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto rows = static_cast<std::size_t>(ts::uniform_int(rng, 1, 4));
        const auto cols = static_cast<std::size_t>(ts::uniform_int(rng, 1, 6));
        const CoordMatrix a = ts::random_matrix(rows, cols, rng);
        const CoordMatrix b = ts::random_matrix(rows, cols, rng);
        const double ab = inner_product(a, b);
        worst = std::max(worst, ab * ab - inner_product(a, a) * inner_product(b, b));
        const CoordMatrix c = ts::uniform(rng, -2.0, 2.0) * a;
        const double ac = inner_product(a, c);
        worst_eq = std::max(worst_eq, std::abs(ac * ac - inner_product(a, a) * inner_product(c, c)));
    }
    return {worst <= 1e-12 && worst_eq <= 1e-9,
            "max excess " + fmt("%.2e", worst) + ", equality gap " + fmt("%.2e", worst_eq)};
}

Outcome metric_axioms() {
    const CombSpace s({2, 3}, 1);
    std::mt19937_64 rng(1002);
    double worst = -1.0;
    bool identity = true;
    for (int trial = 0; trial < 10000; ++trial) {
        const Point p = ts::random_point(s, rng);
        const Point q = ts::random_point(s, rng);
        const Point r = ts::random_point(s, rng);
        worst = std::max(worst, distance(p, r) - distance(p, q) - distance(q, r));
        identity = identity && distance(p, p) == 0.0 && (p == q) == (distance(p, q) == 0.0);
        std::vector<double> moved(p.coords().begin(), p.coords().end());
        const auto k = static_cast<std::size_t>(ts::uniform_int(rng, 0, s.n() - 1));
        moved[k] = std::nextafter(moved[k], 2.0);
        identity = identity && distance(p, Point(s, moved)) > 0.0;
    }
    return {worst <= 1e-12 && identity,
            "max triangle excess " + fmt("%.2e", worst) + (identity ? ", identity ok" : ", identity broken")};
}

Outcome lambda_dimension() {
    std::vector<std::vector<std::uint64_t>> pascal{{1}};
    for (int n = 1; n <= 10; ++n) {
        std::vector<std::uint64_t> row(static_cast<std::size_t>(n + 1), 1);
        for (int l = 1; l < n; ++l) {
            row[static_cast<std::size_t>(l)] =
                pascal.back()[static_cast<std::size_t>(l - 1)] + pascal.back()[static_cast<std::size_t>(l)];
        }
        pascal.push_back(row);
    }
    int mismatches = 0;
    for (int n = 1; n <= 10; ++n) {
        const CombSpace s = CombSpace::euclidean(n);
        for (int l = 0; l <= n; ++l) {
            mismatches += lambda_dim(s, l) != pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(l)];
        }
    }
    const CombSpace r35({3, 5}, 1);
    const bool top = r35.n() == 7 && lambda_dim(r35, 7) == 1;
    return {mismatches == 0 && top, std::to_string(mismatches) + " mismatches, top dimension of R(3,5) is " +
                                        std::to_string(lambda_dim(r35, r35.n()))};
}

Outcome d_squared_and_leibniz() {
    const CombSpace s({2, 3}, 1);
    std::mt19937_64 rng(1004);
    double dd = 0.0;
    double leibniz = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int ka = ts::uniform_int(rng, 0, 2);
        const int kb = ts::uniform_int(rng, 0, 3 - ka);
        const DiffForm a = ts::random_form(s, ka, rng, 3);
        const DiffForm b = ts::random_form(s, kb, rng, 3);
        const DiffForm dda = exterior_derivative(exterior_derivative(a));
        const DiffForm lhs = exterior_derivative(wedge(a, b));
        const DiffForm second = wedge(a, exterior_derivative(b));
        const DiffForm rhs = add_forms(wedge(exterior_derivative(a), b), ka % 2 ? negate_form(second) : second);
        for (int k = 0; k < 20; ++k) {
            const Point p = ts::random_point(s, rng);
            dd = std::max(dd, ts::max_abs_coefficient(dda, p));
            leibniz = std::max(leibniz, ts::max_difference(lhs, rhs, p));
        }
    }
    return {dd <= 1e-10 && leibniz <= 1e-10, "max |ddw| " + fmt("%.2e", dd) + ", Leibniz residual " + fmt("%.2e", leibniz)};
}

// Integral of sum c[a][b] x^a y^b over the parallelogram with counterclockwise
// corners, as the line integral of its x-antiderivative along the edges.
double parallelogram_oracle(const std::array<std::array<double, 4>, 4>& c, const std::array<std::array<double, 2>, 4>& v) {
    const auto q = [&](double x, double y) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) s += c[a][b] * std::pow(x, a + 1) / (a + 1) * std::pow(y, b);
        }
        return s;
    };
    const GaussRule rule = gauss_legendre(8);
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const auto& u = v[static_cast<std::size_t>(e)];
        const auto& w = v[static_cast<std::size_t>((e + 1) % 4)];
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = 0.5 * (rule.nodes[i] + 1.0);
            total += 0.5 * rule.weights[i] * q(u[0] + t * (w[0] - u[0]), u[1] + t * (w[1] - u[1])) * (w[1] - u[1]);
        }
    }
    return total;
}

Outcome change_of_variables() {
    std::mt19937_64 rng(1005);
    const std::array<CombSpace, 2> spaces{CombSpace({1, 2}, 1), CombSpace::euclidean(2)};
    double worst = 0.0;
    int maps = 0;
    while (maps < 20) {
        const CombSpace& s = spaces[static_cast<std::size_t>(maps % 2)];
        const std::vector<double> a{ts::uniform(rng, -1.5, 1.5), ts::uniform(rng, -1.5, 1.5),
                                    ts::uniform(rng, -1.5, 1.5), ts::uniform(rng, -1.5, 1.5)};
        const double det = a[0] * a[3] - a[1] * a[2];
        if (det < 0.1) continue;
        const std::vector<double> b{ts::uniform(rng, -1.0, 1.0), ts::uniform(rng, -1.0, 1.0)};
        const SmoothMap tau = SmoothMap::affine(s, s, a, b);

        std::array<std::array<double, 4>, 4> c{};
        Expr poly = Expr::constant(0.0);
        const Expr x = Expr::variable(s.label(0));
        const Expr y = Expr::variable(s.label(1));
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; i + j < 4; ++j) {
                c[i][j] = std::round(ts::uniform(rng, -3.0, 3.0) * 4.0) / 4.0;
                poly = poly + Expr::constant(c[i][j]) * pow(x, i) * pow(y, j);
            }
        }
        const DiffForm w = DiffForm::volume(s, poly);
        const Box box(s, {{0.0, 1.0}, {-0.5, 0.5}});
        const double lhs = integrate_box(pullback(tau, w), box, {8, 1});

        std::array<std::array<double, 2>, 4> corners{};
        const double square[4][2] = {{0.0, -0.5}, {1.0, -0.5}, {1.0, 0.5}, {0.0, 0.5}};
        for (int k = 0; k < 4; ++k) {
            const Point img = tau(Point(s, {square[k][0], square[k][1]}));
            corners[static_cast<std::size_t>(k)] = {img[0], img[1]};
        }
        worst = std::max(worst, std::abs(lhs - parallelogram_oracle(c, corners)));
        ++maps;
    }
    return {worst <= 1e-8, "20 maps, max |diff| " + fmt("%.2e", worst)};
}

Outcome partition_independence() {
    const CombSpace r1 = CombSpace::euclidean(1);
    const Atlas atlas({Chart::identity("left", Box(r1, {{-0.1, 0.75}})), Chart::identity("right", Box(r1, {{0.25, 1.1}}))});
    const std::vector<Box> p{Box(r1, {{0.0, 0.6}}), Box(r1, {{0.4, 1.0}})};
    const std::vector<Box> q{Box(r1, {{0.0, 0.7}}), Box(r1, {{0.3, 1.0}})};
    const Expr f = box_bump(Box(r1, {{0.05, 0.95}})) * parse("1 + x1^2 + sin(3*x1)", r1);
    const DiffForm w = DiffForm::volume(r1, f);
    const IntegrationOptions options{16, 16};
    const double a = integrate_atlas(w, build_partition(atlas, p), options);
    const double b = integrate_atlas(w, build_partition(atlas, q), options);
    return {std::abs(a - b) <= 1e-8, fmt("P %.15f", a) + fmt(", Q %.15f", b) + fmt(", |diff| %.2e", std::abs(a - b))};
}

Outcome stokes_corpus() {
    const CombSpace r1 = CombSpace::euclidean(1);
    const CombSpace r2 = CombSpace::euclidean(2);
    const CombSpace r23({2, 3}, 1);
    const auto ftc = verify_stokes(DiffForm::function(r1, parse("x1^3", r1)), BoundedDomain(Box::uniform(r1, 0.0, 1.0)));
    const auto green = verify_stokes(DiffForm::basis(r2, MultiIndex({1}), parse("x1", r2)),
                                     BoundedDomain(Box::uniform(r2, 0.0, 1.0)));
    const auto comb = verify_stokes(DiffForm::basis(r23, MultiIndex({1, 2, 3}), parse("x1*x1_2", r23)),
                                    BoundedDomain(Box::uniform(r23, 0.0, 1.0)));
    const bool a = std::abs(ftc.lhs - 1.0) <= 1e-12 && std::abs(ftc.rhs - 1.0) <= 1e-12;
    const bool b = std::abs(green.lhs - 1.0) <= 1e-12 && std::abs(green.rhs - 1.0) <= 1e-12;
    const bool c = comb.abs_err <= 1e-10 && std::abs(comb.lhs - 0.5) <= 1e-10;
    return {a && b && c, fmt("ftc %.16f", ftc.lhs) + fmt("/%.16f", ftc.rhs) + fmt(", green %.16f", green.lhs) +
                             fmt("/%.16f", green.rhs) + fmt(", R(2,3) %.16f", comb.lhs) + fmt("/%.16f", comb.rhs)};
}

Outcome gauss_cube() {
    const CombSpace r3 = CombSpace::euclidean(3);
    const BoundedDomain cube(Box::uniform(r3, 0.0, 1.0));
    const VectorField x(r3, {{0, parse("x1", r3)}, {1, parse("x2", r3)}, {2, parse("x3", r3)}});
    const DiffForm v = DiffForm::volume(r3);
    const auto g = verify_gauss(x, v, cube);
    const auto s = verify_stokes(interior_product(x, v), cube);
    const bool values = std::abs(g.lhs - 3.0) <= 1e-12 && std::abs(g.rhs - 3.0) <= 1e-12;
    const bool consistent = std::abs(g.rhs - s.rhs) <= 1e-12 && std::abs(g.lhs - s.lhs) <= 1e-12;
    return {values && consistent, fmt("lhs %.16f", g.lhs) + fmt(", rhs %.16f", g.rhs) +
                                      fmt(", Stokes rhs %.16f", s.rhs)};
}

Outcome interior_exactness() {
    const CombSpace r2 = CombSpace::euclidean(2);
    const Expr bump = box_bump(Box(r2, {{0.125, 0.625}, {0.25, 0.75}}));
    const DiffForm w = add_forms(DiffForm::basis(r2, MultiIndex({0}), bump * parse("x1 + x2^2", r2)),
                                 DiffForm::basis(r2, MultiIndex({1}), bump * parse("3*x1*x2", r2)));
    // Order 16 rule, composite over 8 cells per axis.
    const double v = integrate_box(exterior_derivative(w), Box::uniform(r2, 0.0, 1.0), {16, 8});
    return {std::abs(v) <= 1e-6, fmt("|integral of dw| %.2e", std::abs(v))};
}

std::pair<int, std::string> capture(const std::string& command) {
    std::string out;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return {-1, out};
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome cli_determinism() {
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(COMBCALC_SCENARIO_DIR)) {
        if (e.path().extension() == ".scn") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    std::string args;
    for (const auto& f : files) args += " '" + f + "'";
    const std::string cli = std::string("'") + COMBCALC_CLI_PATH + "'";
    const auto run = capture(cli + " run" + args);
    const auto first = capture(cli + " report --format json" + args);
    const auto second = capture(cli + " report --format json" + args);
    const bool ok = !files.empty() && run.first == 0 && first.first == 0 && second.first == 0 &&
                    first.second == second.second && !first.second.empty();
    return {ok, std::to_string(files.size()) + " scenario files, exit codes " + std::to_string(run.first) + "/" +
                    std::to_string(first.first) + "/" + std::to_string(second.first) +
                    (first.second == second.second ? ", JSON identical" : ", JSON differs")};
}

struct Criterion {
    int id;
    const char* name;
    double seconds_limit; // 0 means unlimited
    std::function<Outcome()> check;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Cauchy-Schwarz inequality", 1.0, cauchy_schwarz},
        {2, "metric axioms", 0.0, metric_axioms},
        {3, "Lambda dimension", 0.0, lambda_dimension},
        {4, "d o d = 0 and Leibniz rule", 10.0, d_squared_and_leibniz},
        {5, "change of variables", 0.0, change_of_variables},
        {6, "partition independence", 0.0, partition_independence},
        {7, "Stokes regression corpus", 30.0, stokes_corpus},
        {8, "Gauss on the unit cube", 0.0, gauss_cube},
        {9, "exactness of interior-supported forms", 0.0, interior_exactness},
        {10, "CLI determinism", 60.0, cli_determinism},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.pass;
        if (c.seconds_limit > 0.0 && secs >= c.seconds_limit) {
            pass = false;
            o.detail += ", over the time limit";
        }
        failures += !pass;
        std::printf("%s [%d] %s: %s (%.3f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
