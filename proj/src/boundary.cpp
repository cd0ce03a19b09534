#include "iet/boundary.hpp"

#include "iet/errors.hpp"

namespace iet {

namespace {

Rational falling(int k, int i) {
    Rational f = 1;
    for (int j = 0; j < i; ++j) f *= k - j;
    return f;
}

Rational power(const Rational& x, int n) {
    Rational p = 1;
    for (int i = 0; i < n; ++i) p *= x;
    return p;
}

Rational binom(int n, int k) {
    Rational b = 1;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

}  // namespace

IntMatrix boundary_matrix(const PermutationPair& p) {
    auto sg = sigma_and_cycles(p);
    IntMatrix m(sg.s(), p.size());
    for (int c = 0; c < sg.s(); ++c)
        for (const auto& h : sg.cycles[c]) m(c, h.letter) += epsilon(h);
    return m;
}

RatMatrix boundary_conditions(const PermutationPair& p, const std::vector<Rational>& lengths, int r) {
    const int d = p.size();
    if (static_cast<int>(lengths.size()) != d) throw DomainError("one length per letter required");
    if (r < 1) throw DomainError("order r must be at least 1");
    auto sg = sigma_and_cycles(p);
    const int s = sg.s();
    RatMatrix m(r * s, r * d);
    for (int i = 0; i < r; ++i)
        for (int c = 0; c < s; ++c)
            for (const auto& h : sg.cycles[c]) {
                const Letter a = h.letter;
                for (int k = i; k < r; ++k) {
                    // D^i t^k at t = 0 (side L) or t = lambda_a (side R)
                    Rational v = h.side == Side::L ? (k == i ? falling(k, i) : Rational(0))
                                                   : falling(k, i) * power(lengths[a], k - i);
                    m(i * s + c, a * r + k) += epsilon(h) * v;
                }
            }
    return m;
}

GammaSpaces gamma_spaces_exact(const PermutationPair& p, const std::vector<Rational>& lengths, int r) {
    GammaSpaces gs;
    gs.d = p.size();
    gs.r = r;
    auto gd = genus_and_marked_points(p);
    gs.g = gd.g;
    gs.s = gd.s;
    for (int i = 0; i < r * gs.d; ++i) {
        std::vector<Rational> e(r * gs.d, Rational(0));
        e[i] = 1;
        gs.gamma_r.push_back(std::move(e));
    }
    // Im Omega: greedy choice of independent columns
    IntMatrix om = omega_int(p);
    for (int j = 0; j < gs.d; ++j) {
        RatMatrix trial(static_cast<int>(gs.gamma_partial.size()) + 1, gs.d);
        for (std::size_t i = 0; i < gs.gamma_partial.size(); ++i)
            for (int a = 0; a < gs.d; ++a) trial(static_cast<int>(i), a) = gs.gamma_partial[i][a];
        for (int a = 0; a < gs.d; ++a) trial(trial.rows() - 1, a) = Rational(om(a, j));
        if (trial.rank() == trial.rows()) {
            std::vector<Rational> col(gs.d);
            for (int a = 0; a < gs.d; ++a) col[a] = Rational(om(a, j));
            gs.gamma_partial.push_back(std::move(col));
        }
    }
    gs.gamma_partial_r = boundary_conditions(p, lengths, r).kernel();
    if (static_cast<int>(gs.gamma_r.size()) != r * gs.d) throw InvariantError("dim Gamma(r) != rd");
    if (static_cast<int>(gs.gamma_partial.size()) != 2 * gs.g) throw InvariantError("rank Omega != 2g");
    if (static_cast<int>(gs.gamma_partial_r.size()) != (2 * gs.g - 1) * r + 1)
        throw InvariantError("dim Gamma_d(r) != (2g-1)r+1");
    return gs;
}

std::vector<Rational> coboundary_of_power(const StandardIEM<Rational>& t, int k, int r) {
    if (k > r) throw DomainError("coboundary_of_power: degree k-1 must be below r");
    const int d = t.size();
    std::vector<Rational> v(r * d, Rational(0));
    for (Letter a = 0; a < d; ++a) {
        const Rational l = t.top_left(a) - t.origin(), b = t.bot_left(a) - t.origin();
        for (int j = 0; j < k; ++j) v[a * r + j] = binom(k, j) * (power(b, k - j) - power(l, k - j));
    }
    return v;
}

}  // namespace iet
