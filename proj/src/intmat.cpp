#include "iet/intmat.hpp"

#include "iet/errors.hpp"

#include <utility>

namespace iet {

IntMatrix IntMatrix::identity(int d) {
    IntMatrix m(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::elementary(int d, int row, int col) {
    IntMatrix m = identity(d);
    m(row, col) += 1;
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (cols_ != o.rows_) throw InvariantError("IntMatrix: shape mismatch");
    IntMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Integer& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols_; ++j)
                if (o(k, j) != 0) r(i, j) += a * o(k, j);
        }
    return r;
}

std::vector<Integer> IntMatrix::operator*(const std::vector<Integer>& v) const {
    std::vector<Integer> r(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::pow(const Integer& k) const {
    if (k < 0) throw DomainError("negative matrix power");
    IntMatrix result = identity(rows_), base = *this;
    Integer e = k;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = base * result;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

Integer IntMatrix::norm() const {
    Integer best = 0;
    for (int j = 0; j < cols_; ++j) {
        Integer s = 0;
        for (int i = 0; i < rows_; ++i) s += abs((*this)(i, j));
        if (s > best) best = s;
    }
    return best;
}

Integer IntMatrix::max_row_sum() const {
    Integer best = 0;
    for (const auto& s : row_sums())
        if (s > best) best = s;
    return best;
}

std::vector<Integer> IntMatrix::row_sums() const {
    std::vector<Integer> r(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j);
    return r;
}

bool IntMatrix::all_positive() const {
    for (const auto& x : a_)
        if (x <= 0) return false;
    return true;
}

bool IntMatrix::nonnegative() const {
    for (const auto& x : a_)
        if (x < 0) return false;
    return true;
}

Integer IntMatrix::det() const {
    if (rows_ != cols_) throw InvariantError("det of non-square matrix");
    int n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j));
                mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

int IntMatrix::rank() const {
    IntMatrix m = *this;
    Integer prev = 1;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
        int p = r;
        while (p < rows_ && m(p, c) == 0) ++p;
        if (p == rows_) continue;
        if (p != r)
            for (int j = 0; j < cols_; ++j) std::swap(m(r, j), m(p, j));
        for (int i = r + 1; i < rows_; ++i) {
            for (int j = c + 1; j < cols_; ++j) {
                m(i, j) = m(i, j) * m(r, c) - m(i, c) * m(r, j);
                mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
            }
            m(i, c) = 0;
        }
        prev = m(r, c);
        ++r;
    }
    return r;
}

std::vector<double> IntMatrix::to_double() const {
    std::vector<double> out(a_.size());
    for (size_t i = 0; i < a_.size(); ++i) out[i] = iet::to_double(a_[i]);
    return out;
}

namespace {
// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(std::vector<Rational>& a, int rows, int cols) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = r;
        while (p < rows && a[static_cast<size_t>(p) * cols + c] == 0) ++p;
        if (p == rows) continue;
        if (p != r)
            for (int j = 0; j < cols; ++j) std::swap(a[static_cast<size_t>(r) * cols + j], a[static_cast<size_t>(p) * cols + j]);
        Rational inv = 1 / a[static_cast<size_t>(r) * cols + c];
        for (int j = c; j < cols; ++j) a[static_cast<size_t>(r) * cols + j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            Rational f = a[static_cast<size_t>(i) * cols + c];
            if (f == 0) continue;
            for (int j = c; j < cols; ++j) a[static_cast<size_t>(i) * cols + j] -= f * a[static_cast<size_t>(r) * cols + j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}
}  // namespace

int RatMatrix::rank() const {
    auto a = a_;
    return static_cast<int>(rref(a, rows_, cols_).size());
}

IntMatrix IntMatrix::inverse_unimodular() const {
    if (rows_ != cols_) throw DomainError("inverse of a non-square matrix");
    const int d = rows_;
    std::vector<Rational> a(static_cast<size_t>(d) * 2 * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a[i * 2 * d + j] = Rational((*this)(i, j));
        a[i * 2 * d + d + i] = 1;
    }
    auto pivots = rref(a, d, 2 * d);
    if (static_cast<int>(pivots.size()) < d || pivots[d - 1] != d - 1) throw DomainError("matrix is singular");
    IntMatrix inv(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Rational& q = a[i * 2 * d + d + j];
            if (q.get_den() != 1) throw DomainError("matrix is not unimodular");
            inv(i, j) = q.get_num();
        }
    return inv;
}

std::vector<std::vector<Rational>> RatMatrix::kernel() const {
    auto a = a_;
    auto pivots = rref(a, rows_, cols_);
    std::vector<bool> is_pivot(cols_, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (int f = 0; f < cols_; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols_);
        v[f] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r * cols_ + f];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace iet
