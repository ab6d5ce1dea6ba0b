#include "combcalc/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "combcalc/error.hpp"

namespace combcalc {

std::string CoordLabel::name() const {
    if (row == 0) return "x" + std::to_string(col);
    return "x" + std::to_string(row) + "_" + std::to_string(col);
}

CombSpace::CombSpace(std::vector<int> dims, int mhat) : dims_(std::move(dims)), mhat_(mhat) {
    if (dims_.empty()) throw DimensionError("space needs at least one constituent dimension");
    if (dims_.front() <= 0) throw DimensionError("dims must be positive");
    for (std::size_t i = 1; i < dims_.size(); ++i) {
        if (dims_[i] <= dims_[i - 1]) throw DimensionError("dims strictly increasing");
    }
    if (mhat_ < 1 || mhat_ > dims_.front()) {
        throw DimensionError("mhat must satisfy 1 <= mhat <= n_1");
    }
    for (int j = 1; j <= mhat_; ++j) order_.push_back(CoordLabel::shared(j));
    for (int i = 1; i <= m(); ++i) {
        for (int nu = mhat_ + 1; nu <= dims_[static_cast<std::size_t>(i - 1)]; ++nu) {
            order_.push_back(CoordLabel::extra(i, nu));
        }
    }
}

CombSpace CombSpace::euclidean(int n) { return CombSpace({n}, n); }

const CoordLabel& CombSpace::label(int index) const {
    if (index < 0 || index >= n()) throw InvalidLabelError("coordinate index out of range");
    return order_[static_cast<std::size_t>(index)];
}

bool CombSpace::contains(const CoordLabel& l) const {
    if (l.row == 0) return l.col >= 1 && l.col <= mhat_;
    if (l.row < 1 || l.row > m()) return false;
    return l.col > mhat_ && l.col <= dims_[static_cast<std::size_t>(l.row - 1)];
}

int CombSpace::index_of(const CoordLabel& l) const {
    if (!contains(l)) throw InvalidLabelError("coordinate " + l.name() + " is not in " + describe());
    if (l.row == 0) return l.col - 1;
    int index = mhat_;
    for (int i = 1; i < l.row; ++i) index += dims_[static_cast<std::size_t>(i - 1)] - mhat_;
    return index + (l.col - mhat_ - 1);
}

std::string CombSpace::describe() const {
    std::string s = "R~(";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(dims_[i]);
    }
    return s + ") mhat=" + std::to_string(mhat_);
}

CoordMatrix::CoordMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

CoordMatrix::CoordMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) throw DimensionError("matrix entry count does not match shape");
}

namespace {

void require_same_shape(const CoordMatrix& a, const CoordMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("matrix shapes differ");
    }
}

} // namespace

CoordMatrix operator-(const CoordMatrix& a, const CoordMatrix& b) {
    require_same_shape(a, b);
    CoordMatrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = a.data_[k] - b.data_[k];
    return out;
}

CoordMatrix operator+(const CoordMatrix& a, const CoordMatrix& b) {
    require_same_shape(a, b);
    CoordMatrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = a.data_[k] + b.data_[k];
    return out;
}

CoordMatrix operator*(double s, const CoordMatrix& a) {
    CoordMatrix out(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) out.data_[k] = s * a.data_[k];
    return out;
}

Point::Point(CombSpace space, std::vector<double> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
    if (static_cast<int>(coords_.size()) != space_.n()) {
        throw DimensionError("point needs " + std::to_string(space_.n()) + " coordinates");
    }
}

CoordMatrix Point::matrix() const {
    const auto m = static_cast<std::size_t>(space_.m());
    CoordMatrix out(m, static_cast<std::size_t>(space_.cols()));
    const double share = 1.0 / static_cast<double>(m);
    for (int idx = 0; idx < space_.n(); ++idx) {
        const CoordLabel& l = space_.label(idx);
        const double x = coords_[static_cast<std::size_t>(idx)];
        if (l.is_shared()) {
            for (std::size_t i = 0; i < m; ++i) out(i, static_cast<std::size_t>(l.col - 1)) = x * share;
        } else {
            out(static_cast<std::size_t>(l.row - 1), static_cast<std::size_t>(l.col - 1)) = x;
        }
    }
    return out;
}

Point Point::from_matrix(const CombSpace& space, const CoordMatrix& matrix) {
    const auto m = static_cast<std::size_t>(space.m());
    if (matrix.rows() != m || matrix.cols() != static_cast<std::size_t>(space.cols())) {
        throw DimensionError("coordinate matrix must be m x n_m");
    }
    constexpr double tol = 1e-12;
    for (std::size_t i = 0; i < m; ++i) {
        for (auto l = static_cast<std::size_t>(space.dims()[i]); l < matrix.cols(); ++l) {
            if (matrix(i, l) != 0.0) throw DimensionError("coordinate matrix breaks zero padding");
        }
        for (std::size_t l = 0; l < static_cast<std::size_t>(space.mhat()); ++l) {
            if (std::abs(matrix(i, l) - matrix(0, l)) > tol) {
                throw DimensionError("shared columns differ across rows");
            }
        }
    }
    std::vector<double> coords(static_cast<std::size_t>(space.n()));
    for (int idx = 0; idx < space.n(); ++idx) {
        const CoordLabel& l = space.label(idx);
        coords[static_cast<std::size_t>(idx)] =
            l.is_shared() ? matrix(0, static_cast<std::size_t>(l.col - 1)) * static_cast<double>(m)
                          : matrix(static_cast<std::size_t>(l.row - 1), static_cast<std::size_t>(l.col - 1));
    }
    return Point(space, std::move(coords));
}

double inner_product(const CoordMatrix& a, const CoordMatrix& b) {
    require_same_shape(a, b);
    double sum = 0.0;
    const auto ea = a.entries();
    const auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) sum += ea[k] * eb[k];
    return sum;
}

double distance(const Point& p, const Point& q) {
    if (!(p.space() == q.space())) throw SpaceMismatchError("distance between points of different spaces");
    const CoordMatrix diff = p.matrix() - q.matrix();
    return std::sqrt(inner_product(diff, diff));
}

double angle(const Point& p, const Point& q, const Point& u, const Point& v) {
    if (!(p.space() == q.space() && p.space() == u.space() && p.space() == v.space())) {
        throw SpaceMismatchError("angle between points of different spaces");
    }
    const CoordMatrix a = p.matrix() - q.matrix();
    const CoordMatrix b = u.matrix() - v.matrix();
    const double aa = inner_product(a, a);
    const double bb = inner_product(b, b);
    if (aa == 0.0 || bb == 0.0) throw DegenerateVectorError("angle needs nonzero difference vectors");
    double c = inner_product(a, b) / std::sqrt(aa * bb);
    // Only rounding overshoot is clamped; anything larger is a bug upstream.
    if (c > 1.0 && c <= 1.0 + 1e-12) c = 1.0;
    if (c < -1.0 && c >= -1.0 - 1e-12) c = -1.0;
    return std::acos(c);
}

} // namespace combcalc
