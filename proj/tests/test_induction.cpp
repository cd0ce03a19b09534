#include <doctest.h>

#include "iet/induction.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <random>

using namespace iet;

namespace {

Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi) {
    Rational u(Integer(static_cast<unsigned long>(rng() % 1000003)), Integer(1000003));
    return lo + (hi - lo) * u;
}

// Oracle: continued fraction digits by the Gauss map.
std::vector<long> gauss_digits(BigFloat x, int n) {
    std::vector<long> out;
    for (int i = 0; i < n; ++i) {
        BigFloat inv = 1 / x;
        BigFloat a = floor(inv);
        out.push_back(a.convert_to<long>());
        x = inv - a;
    }
    return out;
}

BigFloat cf_value(const std::vector<long>& digits) {
    BigFloat x = (sqrt(BigFloat(5)) - 1) / 2;  // [0; 1, 1, 1, ...]
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) x = 1 / (BigFloat(*it) + x);
    return x;
}

PermutationPair circle() { return PermutationPair::from_rows("AB", "BA"); }

}  // namespace

TEST_CASE("standard evaluation") {
    set_precision_bits(256);
    Rational w(17, 41);
    StandardIEM<Rational> t(circle(), {1 - w, w});
    CHECK(t(Rational(0)) == w);
    CHECK_THROWS_AS(t(1 - w), DomainError);
    CHECK_THROWS_AS(t(Rational(1)), DomainError);

    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    StandardIEM<Rational> t4(p, {Rational(1, 7), Rational(2, 7), Rational(3, 14), Rational(5, 14)});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        Rational x = random_rational(rng, 0, 1);
        if (t4.is_top_singularity(x)) continue;
        CHECK(t4.inverse(t4(x)) == x);
    }
    // images tile the bottom partition exactly
    for (Letter a = 0; a < 4; ++a) {
        CHECK(t4.top_left(a) + t4.translation(a) == t4.bot_left(a));
        CHECK(t4.top_right(a) + t4.translation(a) == t4.bot_right(a));
    }
}

TEST_CASE("generalized branches: endpoint images and derivative oracles") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    std::vector<BigFloat> len{BigFloat("0.2"), BigFloat("0.3"), BigFloat("0.15"), BigFloat("0.35")};
    std::vector<UnitDiffeo> f(4);
    f[0] = {"sine", 0.2, 1, 1};
    f[1] = {"bump", 0.3, 2, 1};
    f[2] = {"mobius", 0, 1, 1.5};
    f[3] = {"identity", 0, 1, 1};
    auto g = GeneralizedIEM::from_unit_diffeos(p, len, len, f, 4);
    for (Letter a = 0; a < 4; ++a) {
        CHECK(abs(g.expand(a, g.top_left(a), 0)[0] - g.bot_left(a)) < pow2(-240));
        CHECK(abs(g.expand(a, g.top_right(a), 0)[0] - g.bot_right(a)) < pow2(-240));
        // finite differences against the oracle, step 2^-bits/3
        BigFloat h = pow2(-85);
        BigFloat x = (g.top_left(a) * 2 + g.top_right(a)) / 3;
        auto e = g.expand(a, x, 3);
        BigFloat fd1 = (g.expand(a, x + h, 0)[0] - g.expand(a, x - h, 0)[0]) / (2 * h);
        CHECK(abs(fd1 - e.derivative(1)) < pow2(-150));
        auto e1 = g.expand(a, x + h, 3), e0 = g.expand(a, x - h, 3);
        BigFloat fd3 = (e1.derivative(2) - e0.derivative(2)) / (2 * h);
        CHECK(abs(fd3 - e.derivative(3)) < pow2(-150));
    }
}

TEST_CASE("connection detection") {
    set_precision_bits(256);
    StandardIEM<Rational> rot(circle(), {Rational(2, 3), Rational(1, 3)});
    auto rep = detect_connection(rot, 10);
    CHECK(rep.found);
    CHECK(rep.m <= 3);
    auto none = detect_connection(rot, 0);
    CHECK_FALSE(none.found);
    CHECK(none.depth_searched == 0);
}

TEST_CASE("rv_step on the circle and length bookkeeping") {
    set_precision_bits(256);
    Rational w(3, 10);
    StandardIEM<Rational> t(circle(), {1 - w, w});
    auto st = rv_step(t);
    // the long letter A wins; under our labels A is last on the bottom row, so the step is of bottom type
    CHECK(st.arrow.type == ArrowType::Bottom);
    CHECK(st.next.lengths()[0] == 1 - 2 * w);
    CHECK(st.next.lengths()[1] == w);
    IntMatrix b = cocycle_matrix(st.arrow);
    for (int a = 0; a < 2; ++a) {
        Rational s = 0;
        for (int c = 0; c < 2; ++c) s += Rational(b(c, a)) * st.next.lengths()[c];
        CHECK(s == t.lengths()[a]);
    }
}

TEST_CASE("first-return oracle for standard induction") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCDE", "EDCBA");
    std::vector<Rational> len{Rational(1013, 10000), Rational(2311, 10000), Rational(1777, 10000),
                              Rational(1999, 10000), Rational(29, 100)};
    StandardIEM<Rational> t(p, len);
    auto tr = iterate_rv(t, 12);
    std::mt19937_64 rng(5);
    for (int n : {1, 4, 12}) {
        const auto& tn = tr.levels[n];
        IntMatrix b = tr.matrix(0, n);
        auto rs = b.row_sums();
        // lengths: lambda^(0) = B(0,n)^T lambda^(n)
        for (int a = 0; a < 5; ++a) {
            Rational s = 0;
            for (int c = 0; c < 5; ++c) s += Rational(b(c, a)) * tn.lengths()[c];
            CHECK(s == len[a]);
        }
        for (int k = 0; k < 200; ++k) {
            Rational x = random_rational(rng, 0, tn.end());
            if (tn.is_top_singularity(x) || t.is_top_singularity(x)) continue;
            Rational y = x;
            long r = 0;
            do {
                y = t.apply(y, Side::L);
                ++r;
            } while (!(y < tn.end()));
            CHECK(y == tn(x));
            CHECK(Integer(r) == rs[tn.locate_top(x)]);
        }
    }
}

TEST_CASE("generalized rv_step agrees with the first-return oracle") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    std::vector<BigFloat> len{BigFloat("0.21"), BigFloat("0.33"), BigFloat("0.17"), BigFloat("0.29")};
    std::vector<UnitDiffeo> f{{"sine", 0.1, 1, 1}, {"bump", 0.2, 2, 1}, {"mobius", 0, 1, 1.3}, {"sine", -0.15, 1, 1}};
    auto g = GeneralizedIEM::from_unit_diffeos(p, len, len, f, 3);
    GeneralizedIEM cur = g;
    std::mt19937_64 rng(9);
    for (int step = 0; step < 6; ++step) {
        auto st = rv_step(cur);
        const auto& nx = st.next;
        for (int k = 0; k < 1000 / 6; ++k) {
            BigFloat x = nx.origin() + nx.total() * BigFloat(static_cast<double>(rng() % 1000000 + 1) / 1000001.0);
            BigFloat y = x;
            do y = g(y);
            while (y >= nx.end());
            CHECK(abs(y - nx(x)) < pow2(-200));
        }
        cur = nx;
    }
}

TEST_CASE("golden rotation: alternating arrows; Zorich digits match continued fractions") {
    set_precision_bits(256);
    BigFloat om = (sqrt(BigFloat(5)) - 1) / 2;
    StandardIEM<BigFloat> t(circle(), {1 / (1 + om), om / (1 + om)});
    auto tr = iterate_rv(t, 50);
    for (int i = 1; i < 50; ++i) CHECK(tr.arrows[i].type != tr.arrows[i - 1].type);
    for (const auto& z : zorich_accelerate(tr.arrows)) CHECK(z.length == 1);

    std::vector<long> digits{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
    BigFloat x = cf_value(digits);
    auto oracle = gauss_digits(x, 10);
    CHECK(oracle == digits);
    StandardIEM<BigFloat> tx(circle(), {1 / (1 + x), x / (1 + x)});
    long need = 0;
    for (long a : digits) need += a;
    auto trx = iterate_rv(tx, static_cast<int>(need + 5));
    auto z = zorich_accelerate(trx.arrows);
    REQUIRE(z.size() >= 10);
    for (int i = 0; i < 10; ++i) CHECK(static_cast<long>(z[i].length) == digits[i]);
    // grouping then flattening recovers the arrow list
    std::size_t pos = 0;
    for (const auto& s : z) {
        CHECK(s.begin == pos);
        for (std::size_t k = 0; k < s.length; ++k) CHECK(trx.arrows[s.begin + k].winner == s.winner);
        pos += s.length;
    }
    CHECK(pos == trx.arrows.size());

    StandardIEM<Rational> rat(circle(), {Rational(5, 13), Rational(8, 13)});
    CHECK_THROWS_AS(iterate_rv(rat, 100), ConnectionError);
}

TEST_CASE("special Birkhoff sums on piecewise constants") {
    set_precision_bits(256);
    auto p = PermutationPair::from_rows("ABCD", "DCBA");
    StandardIEM<Rational> t(p, {Rational(13, 100), Rational(29, 100), Rational(23, 100), Rational(35, 100)});
    auto tr = iterate_rv(t, 9);
    std::vector<Rational> chi{Rational(3), Rational(-7), Rational(11), Rational(2)};
    PiecewiseFunction<Rational> one{[](Letter, const Rational&) { return Rational(1); }};
    PiecewiseFunction<Rational> pc{[chi](Letter a, const Rational&) { return chi[a]; }};
    for (auto [l, n] : {std::pair{0, 9}, std::pair{2, 7}, std::pair{3, 4}}) {
        IntMatrix b = tr.matrix(l, n);
        auto s1 = special_birkhoff_sum(tr, l, n, one);
        auto s2 = special_birkhoff_sum(tr, l, n, pc);
        const auto& tn = tr.levels[n];
        for (Letter a = 0; a < 4; ++a) {
            Rational mid = (tn.top_left(a) + tn.top_right(a)) / 2;
            CHECK(s1.value(a, mid) == Rational(b.row_sums()[a]));
            Rational expect = 0;
            for (int c = 0; c < 4; ++c) expect += Rational(b(a, c)) * chi[c];
            CHECK(s2.value(a, mid) == expect);
            CHECK(s2.value(a, tn.top_left(a)) == expect);
            CHECK(s2.value(a, tn.top_right(a)) == expect);
        }
    }
    CHECK_THROWS_AS(special_birkhoff_sum(tr, 3, 10, one), DomainError);
}

TEST_CASE("lengths_from_path") {
    set_precision_bits(256);
    // k bottom arrows then one top arrow on the circle: A wins k times, then B
    for (int k = 1; k <= 5; ++k) {
        RauzyPath path{circle(), std::vector<ArrowType>(k, ArrowType::Bottom)};
        path.types.push_back(ArrowType::Top);
        auto t = lengths_from_path<Rational>(path, {Rational(1), Rational(1)});
        CHECK(t.total() == 1);
        Rational ratio = t.lengths()[1] / t.lengths()[0];
        // ratio B/A lies in (1/(k+1), 1/k)
        CHECK(ratio > Rational(1, k + 1));
        CHECK(ratio < Rational(1, k));
        auto tr = iterate_rv(t, k + 1);
        for (int i = 0; i <= k; ++i) CHECK(tr.arrows[i].type == path.types[i]);
    }
}

TEST_CASE("periodic fixtures") {
    set_precision_bits(512);
    RauzyPath loop{circle(), {ArrowType::Top, ArrowType::Bottom}};
    auto fx = make_periodic_fixture(loop);
    BigFloat lam1 = (3 + sqrt(BigFloat(5))) / 2;
    CHECK(abs(fx.perron - lam1) < pow2(-480));
    // lengths proportional to (1, golden) up to labels
    BigFloat phi = (1 + sqrt(BigFloat(5))) / 2;
    BigFloat ratio = fx.lengths[0] > fx.lengths[1] ? fx.lengths[0] / fx.lengths[1] : fx.lengths[1] / fx.lengths[0];
    CHECK(abs(ratio - phi) < pow2(-480));

    auto p4 = PermutationPair::from_rows("ABCD", "DCBA");
    RauzyPath loop4{p4, {ArrowType::Top, ArrowType::Bottom, ArrowType::Top, ArrowType::Bottom, ArrowType::Bottom,
                         ArrowType::Top}};
    if (!(loop4.end() == p4)) {
        // find a short closed complete loop by search
        bool found = false;
        for (int len = 2; len <= 12 && !found; ++len)
            for (unsigned mask = 0; mask < (1u << len) && !found; ++mask) {
                RauzyPath c{p4, {}};
                for (int i = 0; i < len; ++i) c.types.push_back(mask >> i & 1 ? ArrowType::Top : ArrowType::Bottom);
                if (c.end() == p4 && path_completeness(c).complete_count >= 1 &&
                    cocycle_matrix(c).pow(10).all_positive()) {
                    loop4 = c;
                    found = true;
                }
            }
        REQUIRE(found);
    }
    auto f4 = make_periodic_fixture(loop4);
    const int L = static_cast<int>(loop4.types.size());
    auto tr = iterate_rv(f4.iem, 5 * L);
    for (int i = 0; i < 5 * L; ++i) CHECK(tr.arrows[i].type == loop4.types[i % L]);
    const auto& after = tr.levels[L];
    for (int a = 0; a < 4; ++a) CHECK(abs(after.lengths()[a] / after.total() - f4.lengths[a]) < pow2(-400));
    auto rep = detect_connection(f4.iem, 10000);
    CHECK_FALSE(rep.found);
    CHECK(rep.min_gap > 0);
    // seeding with the Perron vector returns the fixture
    auto back = lengths_from_path<BigFloat>(loop4, f4.lengths);
    for (int a = 0; a < 4; ++a) CHECK(abs(back.lengths()[a] - f4.lengths[a]) < pow2(-480));
}
