#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "combcalc/calculus.hpp"
#include "combcalc/quadrature.hpp"

namespace combcalc {

// Axis-aligned box: one interval lo < hi per independent coordinate.
class Box {
public:
    // intervals[i] belongs to coordinate position i. Throws DomainError on
    // degenerate, reversed or non-finite intervals.
    Box(CombSpace space, std::vector<std::pair<double, double>> intervals);

    static Box uniform(const CombSpace& space, double lo, double hi);

    const CombSpace& space() const { return space_; }
    const std::pair<double, double>& interval(int position) const {
        return intervals_[static_cast<std::size_t>(position)];
    }
    const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }

    std::vector<Axis> axes() const;
    std::vector<double> center() const;
    bool contains(const Box& other) const;
    bool contains(std::span<const double> coords) const;

private:
    CombSpace space_;
    std::vector<std::pair<double, double>> intervals_;
};

// Smallest box containing all of boxes (same space). Throws DomainError if empty.
Box bounding_box(std::span<const Box> boxes);

// The bump profile exp(-1/(1-t^2)) on (-1, 1), zero elsewhere, and its
// derivatives of any order: order k evaluates P_k(t) / (1-t^2)^(2k) times
// the profile, with P_k built by the recurrence
// P_{k+1} = P_k' s^2 + 4k t s P_k - 2t P_k, s = 1 - t^2.
class BumpProfile final : public UnaryFunction {
public:
    explicit BumpProfile(int derivative_order = 0);

    double operator()(double t) const override;
    std::shared_ptr<const UnaryFunction> derivative() const override;
    std::string name() const override;

    int derivative_order() const { return order_; }

private:
    int order_;
    std::vector<double> poly_; // P_k coefficients, ascending powers of t
};

// Smooth function of the coordinate at position that is positive exactly on
// (lo, hi): the bump profile rescaled to that interval.
Expr interval_bump(const CombSpace& space, int position, double lo, double hi);

// Product of interval bumps over every coordinate of box.
Expr box_bump(const Box& box);

// A chart: a box of chart coordinates and a smooth map from it into the
// ambient space where forms live. Identity charts use the same space for
// both and their image is the box itself.
class Chart {
public:
    static Chart identity(std::string name, Box box);
    // image is the region of the ambient space the chart covers.
    Chart(std::string name, Box box, SmoothMap to_ambient, Box image);

    const std::string& name() const { return name_; }
    const Box& box() const { return box_; }
    const SmoothMap& to_ambient() const { return to_ambient_; }
    const Box& image() const { return image_; }
    bool is_identity() const { return identity_; }
    // n of the chart's model space.
    int top_degree() const { return box_.space().n(); }

private:
    Chart(std::string name, Box box, SmoothMap to_ambient, Box image, bool identity);

    std::string name_;
    Box box_;
    SmoothMap to_ambient_;
    Box image_;
    bool identity_;
};

// Coordinate change from chart `from` to chart `to`, defined on an overlap
// box in `from` coordinates.
struct Transition {
    std::size_t from;
    std::size_t to;
    SmoothMap map;
    Box overlap;
};

class Atlas {
public:
    explicit Atlas(std::vector<Chart> charts, std::vector<Transition> transitions = {});

    const std::vector<Chart>& charts() const { return charts_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    const CombSpace& ambient() const { return charts_.front().image().space(); }
    // The set of chart top degrees on which integration is defined.
    const std::set<int>& hset() const { return hset_; }

private:
    std::vector<Chart> charts_;
    std::vector<Transition> transitions_;
    std::set<int> hset_;
};

// True iff every transition Jacobian determinant is positive at `samples`
// pseudo-random points (fixed seed) of each overlap.
bool check_orientation(const Atlas& atlas, int samples, std::uint64_t seed = 0x5eed);

struct PartitionEntry {
    std::size_t chart;
    Expr weight; // normalized bump g_i
    Box support;
};

class PartitionOfUnity {
public:
    PartitionOfUnity(Atlas atlas, std::vector<PartitionEntry> entries, Box region);

    const Atlas& atlas() const { return atlas_; }
    const std::vector<PartitionEntry>& entries() const { return entries_; }
    const Box& region() const { return region_; }

    // max |sum_i g_i(p) - 1| and min_i g_i(p) over points.
    std::pair<double, double> check(std::span<const std::vector<double>> points) const;

private:
    Atlas atlas_;
    std::vector<PartitionEntry> entries_;
    Box region_;
};

// Cell-centred grid over box with about `budget` points (at least 2 per axis).
std::vector<std::vector<double>> sample_grid(const Box& box, std::size_t budget);

// One bump per chart, supports[i] belonging to chart i and lying inside its
// image; the covered region is the bounding box of the supports. Sides of a
// support that lie on the region boundary do not vanish there. Throws
// CoverageError when some grid point of the region has no positive bump.
PartitionOfUnity build_partition(const Atlas& atlas, std::span<const Box> supports, std::size_t sample_budget = 10000);

struct IntegrationOptions {
    int order = 8;
    int cells = 1;
    bool parallel = true;
};

// Gauss-Legendre integral of the top coefficient of w over box, measure
// prod dx over independent coordinates. Throws DegreeError unless deg w = n.
double integrate_box(const DiffForm& w, const Box& box, const IntegrationOptions& options = {});

// sum over entries of the integral of the pulled-back g_i w. Identity charts
// integrate over the entry's support, other charts over their whole box, so w
// must vanish on the part of such a chart's image outside the region.
// Throws HSetError if deg w is not a chart top degree.
double integrate_atlas(const DiffForm& w, const PartitionOfUnity& partition, const IntegrationOptions& options = {});

// sum_i g_i t_i. local_fields pairs a chart index with the field on it.
DiffForm glue_tensor(std::span<const std::pair<std::size_t, DiffForm>> local_fields, const PartitionOfUnity& partition);

} // namespace combcalc
