#pragma once

#include "iet/combinatorics.hpp"
#include "iet/induction.hpp"
#include "iet/intmat.hpp"

#include <vector>

namespace iet {

// (d phi)_C = sum over C of eps(v) phi(v); hp is indexed by HalfPoint::index().
template <class S>
std::vector<S> boundary(const SigmaPermutation& sg, const std::vector<S>& hp) {
    if (hp.size() != sg.map.size()) throw DomainError("boundary: one value per half-point required");
    std::vector<S> out(sg.s(), S(0));
    for (int c = 0; c < sg.s(); ++c)
        for (const auto& h : sg.cycles[c]) {
            if (epsilon(h) > 0)
                out[c] += hp[h.index()];
            else
                out[c] -= hp[h.index()];
        }
    return out;
}

// Half-point values of a piecewise function: limits from inside the top intervals.
template <class S>
std::vector<S> half_point_values(const StandardIEM<S>& t, const PiecewiseFunction<S>& f) {
    std::vector<S> hp(2 * t.size());
    for (Letter a = 0; a < t.size(); ++a) {
        hp[HalfPoint{a, Side::L}.index()] = f.value(a, t.top_left(a));
        hp[HalfPoint{a, Side::R}.index()] = f.value(a, t.top_right(a));
    }
    return hp;
}

template <class S>
std::vector<S> boundary(const StandardIEM<S>& t, const PiecewiseFunction<S>& f) {
    return boundary(sigma_and_cycles(t.pi()), half_point_values(t, f));
}

// Matrix of the boundary operator restricted to piecewise constants: s x d.
IntMatrix boundary_matrix(const PermutationPair& p);

// Exact bases. Per-interval polynomials use the local variable x - (left end of the top interval);
// coordinate (a, k) sits at index a * r + k.
struct GammaSpaces {
    int d = 0, g = 0, s = 0, r = 1;
    std::vector<std::vector<Rational>> gamma_r;          // Gamma(r), rd elements
    std::vector<std::vector<Rational>> gamma_partial;    // Im Omega, 2g elements
    std::vector<std::vector<Rational>> gamma_partial_r;  // Gamma_d(r), (2g-1)r+1 elements
};

// Linear conditions d D^i chi = 0 (0 <= i < r) on Gamma(r): rows i * s + C.
RatMatrix boundary_conditions(const PermutationPair& p, const std::vector<Rational>& lengths, int r);

// Throws InvariantError when a dimension formula fails.
GammaSpaces gamma_spaces_exact(const PermutationPair& p, const std::vector<Rational>& lengths, int r);

// Coordinates of x^k o T - x^k in Gamma(r), k < r + 1; origin of I at 0.
std::vector<Rational> coboundary_of_power(const StandardIEM<Rational>& t, int k, int r);

}  // namespace iet
