#include "iet/induction.hpp"

#include <algorithm>

namespace iet {

std::vector<ZorichStep> zorich_accelerate(const std::vector<RauzyArrow>& arrows) {
    std::vector<ZorichStep> out;
    for (std::size_t i = 0; i < arrows.size(); ++i) {
        if (!out.empty() && out.back().winner == arrows[i].winner) {
            ++out.back().length;
            continue;
        }
        out.push_back({arrows[i].winner, arrows[i].type, i, 1});
    }
    return out;
}

std::vector<ZorichStep> zorich_accelerate(const RauzyPath& path) { return zorich_accelerate(path.arrows()); }

template <class S>
StandardIEM<S> lengths_from_path(const RauzyPath& path, std::vector<S> seed) {
    const int d = path.start.size();
    if (static_cast<int>(seed.size()) != d) throw DomainError("seed vector must have one entry per letter");
    for (const auto& v : seed)
        if (!(v > S(0))) throw DomainError("seed vector must be positive");
    IntMatrix b = cocycle_matrix(path);
    for (int attempt = 0; attempt <= 3; ++attempt) {
        std::vector<S> lam(d, S(0));
        S total(0);
        for (int a = 0; a < d; ++a) {
            for (int c = 0; c < d; ++c) lam[a] += scalar_traits<S>::from_integer(b(c, a)) * seed[c];
            total += lam[a];
        }
        for (auto& l : lam) l /= total;
        StandardIEM<S> t(path.start, lam);
        bool ok = true;
        try {
            auto tr = iterate_rv(t, static_cast<int>(path.types.size()));
            for (std::size_t i = 0; i < path.types.size() && ok; ++i) ok = tr.arrows[i].type == path.types[i];
        } catch (const DomainError&) {
            ok = false;
        } catch (const PrecisionError&) {
            ok = false;
        }
        if (ok) return t;
        // move the seed toward the centre of the simplex and retry
        S mean(0);
        for (const auto& v : seed) mean += v;
        mean /= S(d);
        for (auto& v : seed) v = (v + mean) / S(2);
    }
    throw PrecisionError("lengths_from_path: induction does not reproduce the path; raise the precision");
}

template StandardIEM<Rational> lengths_from_path(const RauzyPath&, std::vector<Rational>);
template StandardIEM<BigFloat> lengths_from_path(const RauzyPath&, std::vector<BigFloat>);

PeriodicFixture make_periodic_fixture(const RauzyPath& loop) {
    const int d = loop.start.size();
    if (loop.types.empty() || !(loop.end() == loop.start)) throw DomainError("fixture loop must be a closed path");
    if (path_completeness(loop).complete_count < 1) throw DomainError("fixture loop must be complete");
    IntMatrix b = cocycle_matrix(loop);
    if (!b.pow((d - 1) * (d - 1) + 1).all_positive()) throw DomainError("fixture loop matrix is not primitive");

    unsigned bits = std::max(512u, precision_bits());
    set_precision_bits(bits);
    IntMatrix mt = b.transpose();
    std::vector<BigFloat> v(d, BigFloat(1) / d);
    IntMatrix p = mt;
    const BigFloat tol = pow2(-static_cast<long>(bits) + 8);
    bool converged = false;
    for (int sq = 0; sq < 40 && !converged; ++sq) {
        std::vector<BigFloat> w(d, BigFloat(0));
        BigFloat total(0);
        for (int a = 0; a < d; ++a) {
            for (int c = 0; c < d; ++c) w[a] += BigFloat(p(a, c).get_str()) * v[c];
            total += w[a];
        }
        BigFloat diff(0);
        for (int a = 0; a < d; ++a) {
            w[a] /= total;
            diff = std::max(diff, BigFloat(abs(w[a] - v[a])));
        }
        v = w;
        converged = diff < tol;
        p = p * p;
    }
    if (!converged) throw PrecisionError("Perron iteration did not converge");
    int amax = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    BigFloat mv(0);
    for (int c = 0; c < d; ++c) mv += BigFloat(mt(amax, c).get_str()) * v[c];
    PeriodicFixture f{loop, b, mv / v[amax], v, StandardIEM<BigFloat>(loop.start, v)};
    return f;
}

GeneralizedStepResult rv_step(const GeneralizedIEM& t) {
    const int d = t.size();
    const BigFloat& ut = t.u_top(d - 1);
    const BigFloat& ub = t.u_bot(d - 1);
    if (abs(ut - ub) <= t.tolerance()) throw ConnectionError("u^t_{d-1} = u^b_{d-1}: immediate connection");
    ArrowType type = ut < ub ? ArrowType::Top : ArrowType::Bottom;
    RauzyArrow arrow = make_arrow(t.pi(), type);
    const Letter w = arrow.winner, l = arrow.loser;
    std::vector<BigFloat> top(d), bot(d);
    std::vector<BranchFn> br(d);
    for (Letter a = 0; a < d; ++a) {
        top[a] = t.top_length(a);
        bot[a] = t.bottom_length(a);
        br[a] = t.branch(a);
    }
    BranchFn tw = t.branch(w), tl = t.branch(l);
    BranchFn composed = [tw, tl](const BigFloat& x, int order) {
        Taylor<BigFloat> inner = tl(x, order);
        return Taylor<BigFloat>::compose(tw(inner[0], order), inner);
    };
    if (type == ArrowType::Top) {
        // winner keeps [u^t_{d-1}, u^b_{d-1}); loser's top interval returns through the winner
        BigFloat cut = tw(ub, 0)[0];
        top[w] = ub - ut;
        bot[w] = cut - t.bot_left(w);
        bot[l] = t.bot_right(w) - cut;
        br[l] = composed;
    } else {
        // the right part of the winner's top interval returns through the loser
        BigFloat q = t.branch_inverse(w, ut);
        top[w] = q - t.top_left(w);
        top[l] = t.top_right(w) - q;
        bot[w] = ut - t.bot_left(w);
        br[l] = [tw, tl](const BigFloat& x, int order) {
            Taylor<BigFloat> inner = tw(x, order);
            return Taylor<BigFloat>::compose(tl(inner[0], order), inner);
        };
    }
    GeneralizedIEM next(arrow.target, top, bot, std::move(br), t.max_order(), t.origin());
    for (Letter a = 0; a < d; ++a) next.set_composition_depth(a, t.composition_depth(a));
    next.set_composition_depth(l, t.composition_depth(l) + t.composition_depth(w) + 1);
    if (next.composition_depth(l) > 10000) throw PrecisionError("branch composition depth cap reached");
    return {std::move(next), arrow};
}

}  // namespace iet
