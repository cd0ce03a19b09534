#include <doctest.h>

#include "iet/boundary.hpp"
#include "iet/fixtures.hpp"

#include <boost/math/constants/constants.hpp>

#include <random>

using namespace iet;

namespace {

// Random smooth global function: polynomial plus a trigonometric term, BigFloat.
struct RandomSmooth {
    std::vector<BigFloat> c;
    BigFloat amp, freq, phase;
    explicit RandomSmooth(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 5; ++i) c.emplace_back(u(rng));
        amp = u(rng);
        freq = 1 + 5 * (u(rng) + 1);
        phase = u(rng);
    }
    BigFloat operator()(const BigFloat& x) const {
        BigFloat s(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return s + amp * sin(freq * x + phase);
    }
    BigFloat derivative(const BigFloat& x) const {
        BigFloat s(0);
        for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) s = s * x + k * c[k];
        return s + amp * freq * cos(freq * x + phase);
    }
};

std::vector<PermutationPair> all_vertices_up_to(int dmax) {
    std::vector<PermutationPair> out;
    std::vector<std::pair<std::string, std::string>> seeds{{"AB", "BA"},         {"ABC", "CBA"},
                                                           {"ABCD", "DCBA"},     {"ABCDE", "EDCBA"},
                                                           {"ABCDE", "DCEBA"},   {"ABCDEF", "FEDCBA"},
                                                           {"ABCDEF", "FCEBDA"}};
    for (auto& [t, b] : seeds) {
        if (static_cast<int>(t.size()) > dmax) continue;
        auto diag = build_rauzy_class(PermutationPair::from_rows(t, b));
        out.insert(out.end(), diag.vertices().begin(), diag.vertices().end());
    }
    return out;
}

}  // namespace

TEST_CASE("boundary of continuous functions is invariant under T") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCDE", "EDCBA");
    std::vector<BigFloat> len{BigFloat("0.1371"), BigFloat("0.2503"), BigFloat("0.1799"), BigFloat("0.2113"),
                              BigFloat("0.2214")};
    StandardIEM<BigFloat> t(p, len);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        RandomSmooth psi(rng);
        PiecewiseFunction<BigFloat> f{[psi](Letter, const BigFloat& x) { return psi(x); }};
        PiecewiseFunction<BigFloat> ft{[psi, &t](Letter a, const BigFloat& x) { return psi(x + t.translation(a)); }};
        auto b0 = boundary(t, f), b1 = boundary(t, ft);
        REQUIRE(b0.size() == 2);
        for (std::size_t c = 0; c < b0.size(); ++c) CHECK(abs(b0[c] - b1[c]) < pow2(-200));
        // sum over cycles = sum of (R - L) values = integral of D psi
        BigFloat total(0);
        for (const auto& v : b0) total += v;
        CHECK(abs(total - (psi(t.end()) - psi(t.origin()))) < pow2(-200));
        // the coboundary psi o T - psi has zero boundary
        PiecewiseFunction<BigFloat> cob{[psi, &t](Letter a, const BigFloat& x) {
            return psi(x + t.translation(a)) - psi(x);
        }};
        for (const auto& v : boundary(t, cob)) CHECK(abs(v) < pow2(-200));
    }
    PiecewiseFunction<BigFloat> ident{[](Letter, const BigFloat& x) { return x; }};
    BigFloat total(0);
    for (const auto& v : boundary(t, ident)) total += v;
    CHECK(abs(total - t.total()) < pow2(-240));
}

TEST_CASE("boundary on piecewise constants: kernel Im Omega, image R^Sigma_0") {
    for (const auto& p : all_vertices_up_to(6)) {
        CAPTURE(p.rows_string());
        IntMatrix dm = boundary_matrix(p);
        IntMatrix om = omega_int(p);
        auto gd = genus_and_marked_points(p);
        // d o Omega = 0 and dimensions match exactly
        IntMatrix prod = dm * om;
        CHECK(prod == IntMatrix(dm.rows(), p.size()));
        RatMatrix dr(dm.rows(), dm.cols());
        for (int i = 0; i < dm.rows(); ++i)
            for (int j = 0; j < dm.cols(); ++j) dr(i, j) = Rational(dm(i, j));
        CHECK(static_cast<int>(dr.kernel().size()) == 2 * gd.g);
        CHECK(om.rank() == 2 * gd.g);
        CHECK(dm.rank() == gd.s - 1);
        for (int j = 0; j < dm.cols(); ++j) {
            Integer colsum = 0;
            for (int i = 0; i < dm.rows(); ++i) colsum += dm(i, j);
            CHECK(colsum == 0);
        }
    }
}

TEST_CASE("boundary is preserved by special Birkhoff sums") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    StandardIEM<BigFloat> t(p, {BigFloat("0.1312"), BigFloat("0.2897"), BigFloat("0.2309"), BigFloat("0.3482")});
    auto tr = iterate_rv(t, 10);
    std::mt19937_64 rng(5);
    std::vector<RandomSmooth> pieces;
    for (int a = 0; a < 4; ++a) pieces.emplace_back(rng);
    PiecewiseFunction<BigFloat> phi{[pieces](Letter a, const BigFloat& x) { return pieces[a](x); }};
    auto b0 = boundary(t, phi);
    for (int n = 1; n <= 10; ++n) {
        auto s = special_birkhoff_sum(tr, 0, n, phi);
        auto bn = boundary(tr.levels[n], s);
        REQUIRE(bn.size() == b0.size());
        for (std::size_t c = 0; c < b0.size(); ++c) CHECK(abs(bn[c] - b0[c]) < pow2(-200));
    }
    for (int l = 1; l < 4; ++l) {
        auto sl = special_birkhoff_sum(tr, 0, l, phi);
        auto sn = special_birkhoff_sum(tr, l, l + 7, sl);
        auto bn = boundary(tr.levels[l + 7], sn);
        for (std::size_t c = 0; c < b0.size(); ++c) CHECK(abs(bn[c] - b0[c]) < pow2(-200));
    }
}

TEST_CASE("integral identity for C1 functions") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    StandardIEM<BigFloat> t(p, {BigFloat("0.2"), BigFloat("0.3"), BigFloat("0.1"), BigFloat("0.4")});
    std::mt19937_64 rng(8);
    std::vector<RandomSmooth> pieces;
    for (int a = 0; a < 4; ++a) pieces.emplace_back(rng);
    PiecewiseFunction<BigFloat> phi{[pieces](Letter a, const BigFloat& x) { return pieces[a](x); }};
    BigFloat total(0);
    for (const auto& v : boundary(t, phi)) total += v;
    // integral of D phi over each interval by the fundamental theorem, checked against Gauss-Legendre quadrature
    BigFloat quad(0);
    const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                          0.2369268850561891};
    for (Letter a = 0; a < 4; ++a) {
        const int m = 64;
        BigFloat h = (t.top_right(a) - t.top_left(a)) / m;
        for (int k = 0; k < m; ++k) {
            BigFloat mid = t.top_left(a) + h * (k + BigFloat("0.5"));
            for (int q = 0; q < 5; ++q) quad += h / 2 * gw[q] * pieces[a].derivative(mid + h / 2 * gx[q]);
        }
    }
    CHECK(abs(total - quad) < BigFloat("1e-12"));
}

TEST_CASE("dimension formulas for Gamma(r) and Gamma_d(r)") {
    set_precision_bits(512);
    for (auto name : {"circle-golden", "periodic-genus2"}) {
        CAPTURE(name);
        auto fx = periodic_fixture(name);
        std::vector<Rational> len;
        for (const auto& l : fx.lengths) len.push_back(to_rational(l));
        auto gd = genus_and_marked_points(fx.loop.start);
        for (int r = 1; r <= 3; ++r) {
            auto gs = gamma_spaces_exact(fx.loop.start, len, r);
            CHECK(static_cast<int>(gs.gamma_r.size()) == r * gs.d);
            CHECK(static_cast<int>(gs.gamma_partial_r.size()) == (2 * gd.g - 1) * r + 1);
            CHECK(static_cast<int>(gs.gamma_partial.size()) == 2 * gd.g);
        }
    }
    // d=2: r+1; d=4: dim Gamma(2) = 8, dim Gamma_d(2) = 7
    auto p2 = PermutationPair::from_rows("AB", "BA");
    for (int r = 1; r <= 4; ++r)
        CHECK(gamma_spaces_exact(p2, {Rational(3, 5), Rational(2, 5)}, r).gamma_partial_r.size() ==
              static_cast<std::size_t>(r + 1));
    auto g4 = gamma_spaces_exact(PermutationPair::from_rows("ABCD", "DCBA"),
                                 {Rational(1, 7), Rational(2, 7), Rational(3, 14), Rational(5, 14)}, 2);
    CHECK(g4.gamma_r.size() == 8);
    CHECK(g4.gamma_partial_r.size() == 7);
}

TEST_CASE("coboundaries of powers satisfy the boundary conditions exactly") {
    auto p = PermutationPair::from_rows("ABCDE", "EDCBA");
    std::vector<Rational> len{Rational(3, 31), Rational(7, 31), Rational(5, 31), Rational(9, 31), Rational(7, 31)};
    StandardIEM<Rational> t(p, len);
    for (int r = 1; r <= 4; ++r) {
        auto m = boundary_conditions(p, len, r);
        for (int k = 1; k <= r; ++k) {
            auto v = coboundary_of_power(t, k, r);
            for (int i = 0; i < m.rows(); ++i) {
                Rational s = 0;
                for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
                CHECK(s == 0);
            }
        }
    }
}
