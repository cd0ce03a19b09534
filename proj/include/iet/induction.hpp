#pragma once

#include "iet/combinatorics.hpp"
#include "iet/iem.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace iet {

template <class S>
struct StepResult {
    StandardIEM<S> next;
    RauzyArrow arrow;
};

// One Rauzy-Veech step: first return of T to [u0, max(u^t_{d-1}, u^b_{d-1})).
template <class S>
StepResult<S> rv_step(const StandardIEM<S>& t) {
    const int d = t.size();
    const S& ut = t.u_top(d - 1);
    const S& ub = t.u_bot(d - 1);
    if (ut == ub) throw ConnectionError("u^t_{d-1} = u^b_{d-1}: immediate connection");
    ArrowType type = ut < ub ? ArrowType::Top : ArrowType::Bottom;
    RauzyArrow arrow = make_arrow(t.pi(), type);
    std::vector<S> len = t.lengths();
    len[arrow.winner] -= len[arrow.loser];
    return {StandardIEM<S>(arrow.target, std::move(len), t.origin()), arrow};
}

template <class S>
struct InductionTrace {
    std::vector<StandardIEM<S>> levels;  // levels[0] = T, levels[n] = T^(n)
    std::vector<RauzyArrow> arrows;      // arrows[n] goes from level n to n+1
    int depth() const { return static_cast<int>(arrows.size()); }
    RauzyPath path() const {
        RauzyPath p{levels.front().pi(), {}};
        for (const auto& a : arrows) p.types.push_back(a.type);
        return p;
    }
    std::vector<Letter> winners() const {
        std::vector<Letter> w;
        for (const auto& a : arrows) w.push_back(a.winner);
        return w;
    }
    // B(l, n): product of the arrow matrices from level l to level n.
    IntMatrix matrix(int l, int n) const {
        std::vector<RauzyArrow> seg(arrows.begin() + l, arrows.begin() + n);
        if (seg.empty()) return IntMatrix::identity(levels.front().size());
        return cocycle_matrix(seg);
    }
};

// Precision floor for big-float induction: min length < |I| 2^(-bits+32) aborts.
template <class S>
void check_precision(const StandardIEM<S>& level, const S& total0) {
    if constexpr (!scalar_traits<S>::exact) {
        if (level.min_length() < total0 * pow2(-static_cast<long>(precision_bits()) + 32))
            throw PrecisionError("mantissa exhausted during induction; raise IET_PRECISION_BITS");
    }
}

template <class S>
InductionTrace<S> iterate_rv(const StandardIEM<S>& t, int n_steps) {
    InductionTrace<S> tr;
    tr.levels.push_back(t);
    const S total0 = t.total();
    for (int n = 0; n < n_steps; ++n) {
        auto step = rv_step(tr.levels.back());
        check_precision(step.next, total0);
        tr.arrows.push_back(step.arrow);
        tr.levels.push_back(std::move(step.next));
    }
    return tr;
}

struct ZorichStep {
    Letter winner = 0;
    ArrowType type = ArrowType::Top;
    std::size_t begin = 0, length = 0;  // range of arrow indices
};

std::vector<ZorichStep> zorich_accelerate(const std::vector<RauzyArrow>& arrows);
std::vector<ZorichStep> zorich_accelerate(const RauzyPath& path);

// A function on the closure of each top interval of some level; value(a, x) is the
// limit from inside the interval of letter a.
template <class S>
struct PiecewiseFunction {
    std::function<S(Letter, const S&)> value;
};

// S(l, n) phi for a standard trace. The result is a function at level n.
template <class S>
PiecewiseFunction<S> special_birkhoff_sum(const InductionTrace<S>& tr, int l, int n, PiecewiseFunction<S> phi) {
    if (l < 0 || n > tr.depth() || l > n) throw DomainError("special_birkhoff_sum: level bounds violated");
    const StandardIEM<S>* lo = &tr.levels[l];
    const StandardIEM<S>* hi = &tr.levels[n];
    // itineraries are constant on each level-n interval; read them at midpoints so that
    // rounded orbits of endpoints never select the wrong branch
    auto routes = std::make_shared<std::vector<std::vector<Letter>>>(hi->size());
    for (Letter a = 0; a < hi->size(); ++a) {
        S y = (hi->top_left(a) + hi->top_right(a)) / 2;
        const S& end = hi->end();
        for (long i = 0;; ++i) {
            Letter b = lo->locate_top(y);
            (*routes)[a].push_back(b);
            y = y + lo->translation(b);
            if (y < end) break;
            if (i > (1L << 32)) throw InvariantError("return time overflow");
        }
    }
    return {[lo, routes, phi](Letter a, const S& x) {
        S sum(0), y = x;
        for (Letter b : (*routes)[a]) {
            sum += phi.value(b, y);
            y = y + lo->translation(b);
        }
        return sum;
    }};
}

// Lengths reproducing the path: lambda = B^T v normalized to total 1.
template <class S>
StandardIEM<S> lengths_from_path(const RauzyPath& path, std::vector<S> seed);

struct PeriodicFixture {
    RauzyPath loop;
    IntMatrix b_loop;
    BigFloat perron;                 // leading eigenvalue of b_loop
    std::vector<BigFloat> lengths;   // Perron eigenvector of b_loop^T, total 1
    StandardIEM<BigFloat> iem;
};

// Requires a closed, complete loop with primitive matrix. Uses 512 bits unless more are active.
PeriodicFixture make_periodic_fixture(const RauzyPath& loop);

// Generalized step with composed branches.
struct GeneralizedStepResult {
    GeneralizedIEM next;
    RauzyArrow arrow;
};
GeneralizedStepResult rv_step(const GeneralizedIEM& t);

}  // namespace iet
