#include "combcalc/integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "combcalc/error.hpp"

namespace combcalc {

// Box

Box::Box(CombSpace space, std::vector<std::pair<double, double>> intervals)
    : space_(std::move(space)), intervals_(std::move(intervals)) {
    if (static_cast<int>(intervals_.size()) != space_.n()) {
        throw DimensionError("box needs one interval per independent coordinate");
    }
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto [lo, hi] = intervals_[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw DomainError("interval for " + space_.label(static_cast<int>(i)).name() + " must satisfy lo < hi");
        }
    }
}

Box Box::uniform(const CombSpace& space, double lo, double hi) {
    return Box(space, std::vector<std::pair<double, double>>(static_cast<std::size_t>(space.n()), {lo, hi}));
}

std::vector<Axis> Box::axes() const {
    std::vector<Axis> out;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        out.push_back({static_cast<int>(i), intervals_[i].first, intervals_[i].second});
    }
    return out;
}

std::vector<double> Box::center() const {
    std::vector<double> c;
    for (const auto& [lo, hi] : intervals_) c.push_back(0.5 * (lo + hi));
    return c;
}

bool Box::contains(const Box& other) const {
    if (!(space_ == other.space_)) return false;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (other.intervals_[i].first < intervals_[i].first || other.intervals_[i].second > intervals_[i].second) {
            return false;
        }
    }
    return true;
}

bool Box::contains(std::span<const double> coords) const {
    if (coords.size() != intervals_.size()) return false;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (coords[i] < intervals_[i].first || coords[i] > intervals_[i].second) return false;
    }
    return true;
}

Box bounding_box(std::span<const Box> boxes) {
    if (boxes.empty()) throw DomainError("bounding box of no boxes");
    auto intervals = boxes.front().intervals();
    for (const Box& b : boxes.subspan(1)) {
        if (!(b.space() == boxes.front().space())) throw SpaceMismatchError("boxes live on different spaces");
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            intervals[i].first = std::min(intervals[i].first, b.intervals()[i].first);
            intervals[i].second = std::max(intervals[i].second, b.intervals()[i].second);
        }
    }
    return Box(boxes.front().space(), std::move(intervals));
}

// BumpProfile

namespace {

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Poly poly_add(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly poly_derivative(const Poly& a) {
    if (a.size() <= 1) return {0.0};
    Poly out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = static_cast<double>(i) * a[i];
    return out;
}

double poly_eval(const Poly& a, double t) {
    double v = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) v = v * t + a[i];
    return v;
}

} // namespace

BumpProfile::BumpProfile(int derivative_order) : order_(derivative_order), poly_{1.0} {
    if (order_ < 0) throw DomainError("derivative order must be nonnegative");
    const Poly s{1.0, 0.0, -1.0};
    const Poly s2 = poly_mul(s, s);
    for (int k = 0; k < order_; ++k) {
        Poly next = poly_mul(poly_derivative(poly_), s2);
        next = poly_add(next, poly_mul(Poly{0.0, 4.0 * k}, poly_mul(s, poly_)));
        next = poly_add(next, poly_mul(Poly{0.0, -2.0}, poly_));
        poly_ = std::move(next);
    }
}

double BumpProfile::operator()(double t) const {
    if (!(t > -1.0 && t < 1.0)) return 0.0;
    const double s = 1.0 - t * t;
    const double log_scale = -1.0 / s - 2.0 * order_ * std::log(s);
    return poly_eval(poly_, t) * std::exp(log_scale);
}

std::shared_ptr<const UnaryFunction> BumpProfile::derivative() const {
    return std::make_shared<BumpProfile>(order_ + 1);
}

std::string BumpProfile::name() const {
    return order_ == 0 ? "bump" : "bump" + std::string(static_cast<std::size_t>(order_), '\'');
}

Expr interval_bump(const CombSpace& space, int position, double lo, double hi) {
    if (!(lo < hi)) throw DomainError("bump interval must satisfy lo < hi");
    const double c = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    const Expr t = (Expr::variable(space.label(position)) - Expr::constant(c)) / Expr::constant(r);
    return combcalc::apply(std::make_shared<BumpProfile>(), t);
}

Expr box_bump(const Box& box) {
    Expr product = Expr::constant(1.0);
    for (int i = 0; i < box.space().n(); ++i) {
        const auto [lo, hi] = box.interval(i);
        product = product * interval_bump(box.space(), i, lo, hi);
    }
    return product;
}

// Charts and atlases

Chart::Chart(std::string name, Box box, SmoothMap to_ambient, Box image, bool identity)
    : name_(std::move(name)), box_(std::move(box)), to_ambient_(std::move(to_ambient)), image_(std::move(image)),
      identity_(identity) {
    if (!(to_ambient_.domain() == box_.space())) throw SpaceMismatchError("chart map domain differs from chart box space");
    if (!(to_ambient_.codomain() == image_.space())) throw SpaceMismatchError("chart map codomain differs from image space");
}

Chart Chart::identity(std::string name, Box box) {
    SmoothMap id = SmoothMap::identity(box.space());
    Box image = box;
    return Chart(std::move(name), std::move(box), std::move(id), std::move(image), true);
}

Chart::Chart(std::string name, Box box, SmoothMap to_ambient, Box image)
    : Chart(std::move(name), std::move(box), std::move(to_ambient), std::move(image), false) {}

Atlas::Atlas(std::vector<Chart> charts, std::vector<Transition> transitions)
    : charts_(std::move(charts)), transitions_(std::move(transitions)) {
    if (charts_.empty()) throw DomainError("atlas needs at least one chart");
    for (const Chart& c : charts_) {
        if (!(c.image().space() == charts_.front().image().space())) {
            throw SpaceMismatchError("charts map into different ambient spaces");
        }
        hset_.insert(c.top_degree());
    }
    for (const Transition& t : transitions_) {
        if (t.from >= charts_.size() || t.to >= charts_.size()) throw DomainError("transition names a missing chart");
        if (!(t.map.domain() == charts_[t.from].box().space()) || !(t.map.codomain() == charts_[t.to].box().space()) ||
            !(t.overlap.space() == t.map.domain())) {
            throw SpaceMismatchError("transition map spaces do not match its charts");
        }
    }
}

bool check_orientation(const Atlas& atlas, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (const Transition& t : atlas.transitions()) {
        const CombSpace& space = t.overlap.space();
        for (int s = 0; s < samples; ++s) {
            std::vector<double> x;
            for (const auto& [lo, hi] : t.overlap.intervals()) {
                x.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
            }
            if (!(det_jacobian(t.map, Point(space, std::move(x))) > 0.0)) return false;
        }
    }
    return true;
}

// Partitions of unity

PartitionOfUnity::PartitionOfUnity(Atlas atlas, std::vector<PartitionEntry> entries, Box region)
    : atlas_(std::move(atlas)), entries_(std::move(entries)), region_(std::move(region)) {
    for (const PartitionEntry& e : entries_) {
        if (e.chart >= atlas_.charts().size()) throw DomainError("partition entry names a missing chart");
        validate(e.weight, region_.space());
    }
}

std::pair<double, double> PartitionOfUnity::check(std::span<const std::vector<double>> points) const {
    std::vector<CompiledExpr> weights;
    for (const PartitionEntry& e : entries_) weights.emplace_back(e.weight, region_.space());
    double max_dev = 0.0;
    double min_weight = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        double sum = 0.0;
        for (const CompiledExpr& g : weights) {
            const double v = g(p);
            min_weight = std::min(min_weight, v);
            sum += v;
        }
        max_dev = std::max(max_dev, std::abs(sum - 1.0));
    }
    return {max_dev, min_weight};
}

std::vector<std::vector<double>> sample_grid(const Box& box, std::size_t budget) {
    const int n = box.space().n();
    const auto per_axis = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(budget), 1.0 / n) + 1e-9)));
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= per_axis;
    std::vector<std::vector<double>> points;
    points.reserve(total);
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> p(static_cast<std::size_t>(n));
        for (std::size_t d = 0; d < p.size(); ++d) {
            const auto [lo, hi] = box.interval(static_cast<int>(d));
            p[d] = lo + (hi - lo) * (static_cast<double>(digit[d]) + 0.5) / static_cast<double>(per_axis);
        }
        points.push_back(std::move(p));
        for (std::size_t d = digit.size(); d-- > 0;) {
            if (++digit[d] < per_axis) break;
            digit[d] = 0;
        }
    }
    return points;
}

namespace {

// Bump for one support inside region. A side of the support lying on the
// region boundary is reflected across it so the bump stays positive up to
// that boundary; a coordinate spanned entirely contributes a factor 1.
Expr region_bump(const Box& support, const Box& region) {
    const CombSpace& space = support.space();
    Expr product = Expr::constant(1.0);
    for (int i = 0; i < space.n(); ++i) {
        const auto [lo, hi] = support.interval(i);
        const auto [rlo, rhi] = region.interval(i);
        const bool at_lo = lo <= rlo;
        const bool at_hi = hi >= rhi;
        if (at_lo && at_hi) continue;
        if (at_lo) {
            product = product * interval_bump(space, i, 2.0 * lo - hi, hi);
        } else if (at_hi) {
            product = product * interval_bump(space, i, lo, 2.0 * hi - lo);
        } else {
            product = product * interval_bump(space, i, lo, hi);
        }
    }
    return product;
}

} // namespace

PartitionOfUnity build_partition(const Atlas& atlas, std::span<const Box> supports, std::size_t sample_budget) {
    if (supports.size() != atlas.charts().size()) throw DomainError("partition needs one support per chart");
    const CombSpace& ambient = atlas.ambient();
    for (std::size_t i = 0; i < supports.size(); ++i) {
        if (!(supports[i].space() == ambient)) throw SpaceMismatchError("support box is not in the ambient space");
        if (!atlas.charts()[i].image().contains(supports[i])) {
            throw DomainError("support " + std::to_string(i) + " is not inside chart " + atlas.charts()[i].name());
        }
    }
    const Box region = bounding_box(supports);

    std::vector<Expr> raw;
    for (const Box& s : supports) raw.push_back(region_bump(s, region));

    std::vector<CompiledExpr> compiled;
    for (const Expr& b : raw) compiled.emplace_back(b, ambient);
    for (const auto& p : sample_grid(region, sample_budget)) {
        double sum = 0.0;
        for (const CompiledExpr& b : compiled) sum += b(p);
        if (!(sum > 0.0)) throw CoverageError("supports leave a gap in the covered region");
    }

    Expr total = Expr::constant(0.0);
    for (const Expr& b : raw) total = total + b;
    std::vector<PartitionEntry> entries;
    for (std::size_t i = 0; i < supports.size(); ++i) {
        entries.push_back({i, raw[i] / total, supports[i]});
    }
    return PartitionOfUnity(atlas, std::move(entries), region);
}

// Integration

double integrate_box(const DiffForm& w, const Box& box, const IntegrationOptions& options) {
    const CombSpace& space = w.space();
    if (!(box.space() == space)) throw SpaceMismatchError("form and box live on different spaces");
    if (w.degree() != space.n()) {
        throw DegreeError("integral undefined unless deg w equals n = " + std::to_string(space.n()));
    }
    const CompiledExpr f(w.coefficient(MultiIndex::top(space)), space);
    const std::vector<double> base = box.center();
    const std::vector<Axis> axes = box.axes();
    const QuadratureOptions q{options.order, options.cells};
    return options.parallel ? integrate_parallel(f, base, axes, q) : integrate_serial(f, base, axes, q);
}

double integrate_atlas(const DiffForm& w, const PartitionOfUnity& partition, const IntegrationOptions& options) {
    const Atlas& atlas = partition.atlas();
    if (!atlas.hset().contains(w.degree())) {
        throw HSetError("form degree " + std::to_string(w.degree()) + " is not a chart top degree");
    }
    CompensatedSum sum;
    for (const PartitionEntry& e : partition.entries()) {
        const Chart& chart = atlas.charts()[e.chart];
        if (chart.top_degree() != w.degree()) continue;
        const DiffForm local = pullback(chart.to_ambient(), scale_form(e.weight, w));
        // For identity charts the weight vanishes outside its support.
        const Box& domain = chart.is_identity() ? e.support : chart.box();
        sum.add(integrate_box(local, domain, options));
    }
    return sum.value();
}

DiffForm glue_tensor(std::span<const std::pair<std::size_t, DiffForm>> local_fields, const PartitionOfUnity& partition) {
    if (local_fields.empty()) throw DomainError("nothing to glue");
    const int degree = local_fields.front().second.degree();
    for (const auto& [chart, field] : local_fields) {
        if (field.degree() != degree) throw DegreeError("local fields have different degrees");
    }
    DiffForm glued(partition.region().space(), degree);
    for (const PartitionEntry& e : partition.entries()) {
        const auto it = std::find_if(local_fields.begin(), local_fields.end(),
                                     [&](const auto& lf) { return lf.first == e.chart; });
        if (it == local_fields.end()) {
            throw DomainError("no local field for chart " + partition.atlas().charts()[e.chart].name());
        }
        glued = add_forms(glued, scale_form(e.weight, it->second));
    }
    return glued;
}

} // namespace combcalc
