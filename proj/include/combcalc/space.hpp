#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace combcalc {

// A coordinate of a combinatorial Euclidean space.
//
// Shared coordinates (those of the common intersection) have row 0 and
// column 1..mhat. Extra coordinates of constituent space i have row i and
// column mhat+1..n_i. Validity is only meaningful relative to a CombSpace.
struct CoordLabel {
    int row = 0;
    int col = 0;

    static constexpr CoordLabel shared(int j) { return {0, j}; }
    static constexpr CoordLabel extra(int i, int nu) { return {i, nu}; }

    bool is_shared() const { return row == 0; }

    // Source-text spelling: "x3" for shared, "x2_4" for extras.
    std::string name() const;

    friend auto operator<=>(const CoordLabel&, const CoordLabel&) = default;
};

// Combinatorial Euclidean space R~(n_1, ..., n_m) whose constituent spaces
// share an mhat-dimensional intersection.
//
// Independent coordinates are ordered shared 1..mhat first, then the extras
// of row 1, row 2, ..., row m. That order is the canonical one for every
// multi-index and point vector in the library.
class CombSpace {
public:
    // Throws DimensionError unless 0 < n_1 < ... < n_m and 1 <= mhat <= n_1.
    CombSpace(std::vector<int> dims, int mhat);

    // Ordinary R^n, realized as m = 1 with every coordinate shared.
    static CombSpace euclidean(int n);

    int m() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int mhat() const { return mhat_; }
    // Independent dimension mhat + sum_i (n_i - mhat).
    int n() const { return static_cast<int>(order_.size()); }
    // Width of the coordinate matrix, n_m.
    int cols() const { return dims_.back(); }

    const std::vector<CoordLabel>& coord_order() const { return order_; }
    const CoordLabel& label(int index) const;

    bool contains(const CoordLabel& label) const;
    // Position of label in coord_order. Throws InvalidLabelError.
    int index_of(const CoordLabel& label) const;

    std::string describe() const;

    friend bool operator==(const CombSpace& a, const CombSpace& b) {
        return a.mhat_ == b.mhat_ && a.dims_ == b.dims_;
    }

private:
    std::vector<int> dims_;
    int mhat_;
    std::vector<CoordLabel> order_;
};

// Dense m x n_m matrix, row-major, 0-based access.
class CoordMatrix {
public:
    CoordMatrix() = default;
    CoordMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    CoordMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    std::span<const double> entries() const { return data_; }

    friend CoordMatrix operator-(const CoordMatrix& a, const CoordMatrix& b);
    friend CoordMatrix operator+(const CoordMatrix& a, const CoordMatrix& b);
    friend CoordMatrix operator*(double s, const CoordMatrix& a);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// A point stored by its independent coordinates in canonical order.
class Point {
public:
    Point(CombSpace space, std::vector<double> coords);

    // Inverse of matrix(). Throws DimensionError when the matrix violates
    // zero padding or shared-column consistency (tolerance 1e-12).
    static Point from_matrix(const CombSpace& space, const CoordMatrix& matrix);

    const CombSpace& space() const { return space_; }
    std::span<const double> coords() const { return coords_; }
    double operator[](int index) const { return coords_[static_cast<std::size_t>(index)]; }
    double at(const CoordLabel& label) const { return coords_[static_cast<std::size_t>(space_.index_of(label))]; }

    // The m x n_m coordinate matrix: shared entries split as x^l / m, zero
    // padding past n_i.
    CoordMatrix matrix() const;

    friend bool operator==(const Point& a, const Point& b) {
        return a.space_ == b.space_ && a.coords_ == b.coords_;
    }

private:
    CombSpace space_;
    std::vector<double> coords_;
};

// Sum_ij a_ij b_ij. Throws DimensionError on shape mismatch.
double inner_product(const CoordMatrix& a, const CoordMatrix& b);

// sqrt <[p]-[q], [p]-[q]>. Throws SpaceMismatchError.
double distance(const Point& p, const Point& q);

// Angle in [0, pi] between the difference matrices [p]-[q] and [u]-[v].
// Throws DegenerateVectorError when either difference is zero.
double angle(const Point& p, const Point& q, const Point& u, const Point& v);

} // namespace combcalc
