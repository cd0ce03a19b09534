#pragma once

#include "iet/scalar.hpp"

#include <vector>

namespace iet {

// Dense square-or-rectangular matrix of big integers, row-major.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static IntMatrix identity(int d);
    // I + E_{row,col}
    static IntMatrix elementary(int d, int row, int col);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Integer& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Integer& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    IntMatrix operator*(const IntMatrix& o) const;
    std::vector<Integer> operator*(const std::vector<Integer>& v) const;
    bool operator==(const IntMatrix& o) const = default;
    IntMatrix transpose() const;
    IntMatrix pow(const Integer& k) const;

    // Greatest column sum of absolute values.
    Integer norm() const;
    Integer max_row_sum() const;
    std::vector<Integer> row_sums() const;
    bool all_positive() const;
    bool nonnegative() const;

    Integer det() const;  // Bareiss, square only
    int rank() const;     // fraction-free elimination
    // Exact inverse of a determinant +-1 matrix.
    IntMatrix inverse_unimodular() const;

    std::vector<double> to_double() const;  // row-major, may overflow to inf

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Integer> a_;
};

// Exact rank / kernel over Q for small systems.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const Rational& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
    int rank() const;
    // Basis of {x : A x = 0}, one vector per free column.
    std::vector<std::vector<Rational>> kernel() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

}  // namespace iet
