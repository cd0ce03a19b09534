#pragma once

#include "iet/errors.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace iet {

// Truncated Taylor expansion c[0] + c[1] h + ... + c[r] h^r of a function at a point.
template <class T>
class Taylor {
public:
    Taylor() = default;
    explicit Taylor(int order) : c_(static_cast<std::size_t>(order) + 1, T(0)) {}
    Taylor(int order, const T& value) : Taylor(order) { c_[0] = value; }

    // The expansion of h -> x + h.
    static Taylor variable(int order, const T& x) {
        Taylor t(order, x);
        if (order >= 1) t.c_[1] = T(1);
        return t;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    T& operator[](int k) { return c_[k]; }
    const T& operator[](int k) const { return c_[k]; }
    const std::vector<T>& coeffs() const { return c_; }

    // D^k f at the base point.
    T derivative(int k) const {
        T f = c_[k];
        for (int i = 2; i <= k; ++i) f *= T(i);
        return f;
    }

    Taylor& operator+=(const Taylor& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Taylor& operator*=(const T& s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    Taylor& operator+=(const T& s) {
        c_[0] += s;
        return *this;
    }
    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator+(Taylor a, const T& s) { return a += s; }
    friend Taylor operator+(const T& s, Taylor a) { return a += s; }
    friend Taylor operator-(Taylor a, const T& s) {
        a.c_[0] -= s;
        return a;
    }
    friend Taylor operator-(const T& s, const Taylor& a) { return (-a) + s; }
    friend Taylor operator*(Taylor a, const T& s) { return a *= s; }
    friend Taylor operator*(const T& s, Taylor a) { return a *= s; }
    friend Taylor operator/(Taylor a, const T& s) {
        for (auto& x : a.c_) x /= s;
        return a;
    }
    Taylor operator-() const {
        Taylor r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        a.check(b);
        Taylor r(a.order());
        for (int i = 0; i <= a.order(); ++i)
            for (int j = 0; i + j <= a.order(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        return r;
    }

    Taylor reciprocal() const {
        if (c_[0] == T(0)) throw DomainError("Taylor reciprocal of a series vanishing at the base point");
        Taylor r(order());
        r.c_[0] = T(1) / c_[0];
        for (int k = 1; k <= order(); ++k) {
            T s(0);
            for (int j = 1; j <= k; ++j) s += c_[j] * r.c_[k - j];
            r.c_[k] = -s / c_[0];
        }
        return r;
    }
    friend Taylor operator/(const Taylor& a, const Taylor& b) { return a * b.reciprocal(); }

    // Composition outer(inner(h)), where outer is expanded at inner[0].
    static Taylor compose(const Taylor& outer, const Taylor& inner) {
        outer.check(inner);
        const int r = outer.order();
        Taylor shift = inner;
        shift.c_[0] = T(0);
        Taylor result(r, outer.c_[r]);
        // Horner in the shifted inner series
        for (int k = r - 1; k >= 0; --k) {
            result = result * shift;
            result.c_[0] += outer.c_[k];
        }
        return result;
    }

    void check(const Taylor& o) const {
        if (o.c_.size() != c_.size()) throw DomainError("Taylor order mismatch");
    }

private:
    std::vector<T> c_;
};

namespace taylor_detail {
using std::cos;
using std::exp;
using std::log;
using std::sin;
}  // namespace taylor_detail

template <class T>
Taylor<T> exp(const Taylor<T>& a) {
    using taylor_detail::exp;
    const int r = a.order();
    Taylor<T> e(r, exp(a[0]));
    // e' = a' e
    for (int k = 1; k <= r; ++k) {
        T s(0);
        for (int j = 1; j <= k; ++j) s += T(j) * a[j] * e[k - j];
        e[k] = s / T(k);
    }
    return e;
}

template <class T>
Taylor<T> log(const Taylor<T>& a) {
    using taylor_detail::log;
    if (!(a[0] > T(0))) throw DomainError("Taylor log of a nonpositive value");
    const int r = a.order();
    Taylor<T> l(r, log(a[0]));
    // a l' = a'
    for (int k = 1; k <= r; ++k) {
        T s = T(k) * a[k];
        for (int j = 1; j < k; ++j) s -= T(j) * l[j] * a[k - j];
        l[k] = s / (T(k) * a[0]);
    }
    return l;
}

template <class T>
void sincos(const Taylor<T>& a, Taylor<T>& s, Taylor<T>& c) {
    using taylor_detail::cos;
    using taylor_detail::sin;
    const int r = a.order();
    s = Taylor<T>(r, sin(a[0]));
    c = Taylor<T>(r, cos(a[0]));
    for (int k = 1; k <= r; ++k) {
        T ss(0), cc(0);
        for (int j = 1; j <= k; ++j) {
            ss += T(j) * a[j] * c[k - j];
            cc -= T(j) * a[j] * s[k - j];
        }
        s[k] = ss / T(k);
        c[k] = cc / T(k);
    }
}

template <class T>
Taylor<T> sin(const Taylor<T>& a) {
    Taylor<T> s, c;
    sincos(a, s, c);
    return s;
}

template <class T>
Taylor<T> cos(const Taylor<T>& a) {
    Taylor<T> s, c;
    sincos(a, s, c);
    return c;
}

// Compositional inverse of h -> f(h) - f[0], expanded at f[0]. Requires f[1] != 0.
template <class T>
Taylor<T> revert(const Taylor<T>& f) {
    const int r = f.order();
    if (f[1] == T(0)) throw DomainError("Taylor reversion needs a nonzero linear term");
    Taylor<T> shifted = f;
    shifted[0] = T(0);
    Taylor<T> g(r);
    g[1] = T(1) / f[1];
    for (int k = 2; k <= r; ++k) {
        Taylor<T> fg = Taylor<T>::compose(shifted, g);
        g[k] = -fg[k] / f[1];
    }
    return g;
}

template <class T>
Taylor<T> pow(const Taylor<T>& a, int n) {
    Taylor<T> r(a.order(), T(1)), base = a;
    while (n > 0) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return r;
}

}  // namespace iet
