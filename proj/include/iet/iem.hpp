#pragma once

#include "iet/combinatorics.hpp"
#include "iet/errors.hpp"
#include "iet/scalar.hpp"
#include "iet/taylor.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace iet {

// Standard interval exchange map on [u0, u0 + |I|), exact (Rational) or big-float.
template <class S>
class StandardIEM {
public:
    StandardIEM() = default;
    StandardIEM(PermutationPair pi, std::vector<S> lengths, S origin = S(0))
        : pi_(std::move(pi)), len_(std::move(lengths)), u0_(std::move(origin)) {
        pi_.require_irreducible();
        if (static_cast<int>(len_.size()) != pi_.size()) throw DomainError("one length per letter required");
        for (auto& l : len_) {
            if constexpr (std::is_same_v<S, Rational>) l.canonicalize();
            if (!(l > S(0))) throw DomainError("lengths must be positive");
        }
        rebuild();
    }

    const PermutationPair& pi() const { return pi_; }
    const std::vector<S>& lengths() const { return len_; }
    int size() const { return pi_.size(); }
    const S& origin() const { return u0_; }
    S total() const { return ut_.back() - u0_; }
    S end() const { return ut_.back(); }

    // u^t_i, u^b_i for 0 <= i <= d.
    const S& u_top(int i) const { return ut_[i]; }
    const S& u_bot(int i) const { return ub_[i]; }

    S top_left(Letter a) const { return ut_[pi_.pos_top(a)]; }
    S top_right(Letter a) const { return ut_[pi_.pos_top(a) + 1]; }
    S bot_left(Letter a) const { return ub_[pi_.pos_bottom(a)]; }
    S bot_right(Letter a) const { return ub_[pi_.pos_bottom(a) + 1]; }
    S translation(Letter a) const { return bot_left(a) - top_left(a); }

    // Point of a half-point on the top partition.
    S u_top(const HalfPoint& h) const { return h.side == Side::L ? top_left(h.letter) : top_right(h.letter); }
    S u_bot(const HalfPoint& h) const { return h.side == Side::L ? bot_left(h.letter) : bot_right(h.letter); }

    bool contains(const S& x) const { return !(x < u0_) && x < end(); }

    // Letter of the top interval containing x. Side::L reads x+0 ([l, r)), Side::R reads x-0 ((l, r]).
    Letter locate_top(const S& x, Side side = Side::L) const { return locate(ut_, x, side, true); }
    Letter locate_bottom(const S& x, Side side = Side::L) const { return locate(ub_, x, side, false); }

    bool is_top_singularity(const S& x) const {
        for (int i = 1; i < size(); ++i)
            if (x == ut_[i]) return true;
        return false;
    }

    S operator()(const S& x) const {
        if constexpr (scalar_traits<S>::exact)
            if (is_top_singularity(x)) throw DomainError("evaluation at the singularity " + scalar_traits<S>::str(x));
        return x + translation(locate_top(x));
    }

    // One-sided evaluation; x may be an endpoint.
    S apply(const S& x, Side side) const { return x + translation(locate_top(x, side)); }

    S inverse(const S& y) const {
        if constexpr (scalar_traits<S>::exact)
            for (int i = 1; i < size(); ++i)
                if (y == ub_[i]) throw DomainError("inverse at the singularity " + scalar_traits<S>::str(y));
        return y - translation(locate_bottom(y));
    }

    S min_length() const {
        S m = len_[0];
        for (const auto& l : len_)
            if (l < m) m = l;
        return m;
    }
    S max_length() const {
        S m = len_[0];
        for (const auto& l : len_)
            if (l > m) m = l;
        return m;
    }

private:
    void rebuild() {
        const int d = size();
        ut_.assign(d + 1, u0_);
        ub_.assign(d + 1, u0_);
        for (int i = 0; i < d; ++i) {
            ut_[i + 1] = ut_[i] + len_[pi_.top(i)];
            ub_[i + 1] = ub_[i] + len_[pi_.bottom(i)];
        }
    }

    Letter locate(const std::vector<S>& u, const S& x, Side side, bool top) const {
        const int d = size();
        bool inside = side == Side::L ? (!(x < u[0]) && x < u[d]) : (u[0] < x && !(u[d] < x));
        if (!inside) throw DomainError("point " + scalar_traits<S>::str(x) + " outside the interval");
        int lo = 0, hi = d;  // find i with u[i] <= x < u[i+1] (or u[i] < x <= u[i+1])
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            bool right = side == Side::L ? !(x < u[mid]) : (u[mid] < x);
            if (right)
                lo = mid;
            else
                hi = mid;
        }
        return top ? pi_.top(lo) : pi_.bottom(lo);
    }

    PermutationPair pi_;
    std::vector<S> len_;
    S u0_{0};
    std::vector<S> ut_, ub_;
};

template <class S>
struct ConnectionReport {
    bool found = false;
    int i = 0, j = 0;  // T^m(u^b_j) = u^t_i, 1-based as singularity indices
    long m = 0;
    long depth_searched = 0;
    S min_gap{0};
    bool has_gap = false;
};

template <class S>
ConnectionReport<S> detect_connection(const StandardIEM<S>& t, long depth) {
    ConnectionReport<S> rep;
    const int d = t.size();
    std::optional<S> tol;
    if constexpr (!scalar_traits<S>::exact) tol = pow2(-static_cast<long>(precision_bits() / 2)) * t.total();
    for (int j = 1; j < d; ++j) {
        S x = t.u_bot(j);
        for (long m = 0; m < depth; ++m) {
            for (int i = 1; i < d; ++i) {
                S gap = scalar_traits<S>::abs(x - t.u_top(i));
                if (!rep.has_gap || gap < rep.min_gap) {
                    rep.min_gap = gap;
                    rep.has_gap = true;
                }
                bool hit = tol ? gap < *tol : gap == S(0);
                if (hit && (!rep.found || m < rep.m)) {
                    rep.found = true;
                    rep.i = i;
                    rep.j = j;
                    rep.m = m;
                }
            }
            if (rep.found && rep.j == j) break;
            x = t.apply(x, Side::L);
        }
    }
    rep.depth_searched = depth;
    if (rep.found) {
        // re-evaluate the witness
        S x = t.u_bot(rep.j);
        for (long m = 0; m < rep.m; ++m) x = t.apply(x, Side::L);
        S gap = scalar_traits<S>::abs(x - t.u_top(rep.i));
        bool ok = tol ? gap < *tol : gap == S(0);
        if (!ok) throw InvariantError("connection witness failed re-evaluation");
    }
    return rep;
}

// One branch of a generalized map: x -> Taylor expansion of T at x to a given order.
using BranchFn = std::function<Taylor<BigFloat>(const BigFloat& x, int order)>;

// Orientation-preserving diffeomorphisms f of [0, 1] with f(0) = 0, f(1) = 1.
struct UnitDiffeo {
    std::string kind = "identity";  // identity | bump | mobius | sine
    double eps = 0;                 // bump/sine amplitude
    int flat = 1;                   // bump: t + eps (t(1-t))^flat
    double a = 1;                   // mobius: a t / (1 + (a-1) t)
    Taylor<BigFloat> operator()(const Taylor<BigFloat>& t) const;
};

class GeneralizedIEM {
public:
    GeneralizedIEM() = default;
    // Branches given explicitly on the closure of each top interval.
    GeneralizedIEM(PermutationPair pi, std::vector<BigFloat> top_lengths, std::vector<BigFloat> bottom_lengths,
                   std::vector<BranchFn> branches, int max_order, BigFloat origin = BigFloat(0));

    // Branch T_a(x) = c_a + mu_a f_a((x - l_a) / lambda_a).
    static GeneralizedIEM from_unit_diffeos(const PermutationPair& pi, const std::vector<BigFloat>& top_lengths,
                                            const std::vector<BigFloat>& bottom_lengths,
                                            const std::vector<UnitDiffeo>& f, int max_order);
    static GeneralizedIEM from_standard(const StandardIEM<BigFloat>& t, int max_order);

    const PermutationPair& pi() const { return pi_; }
    int size() const { return pi_.size(); }
    int max_order() const { return order_; }
    const BigFloat& origin() const { return ut_[0]; }
    BigFloat end() const { return ut_.back(); }
    BigFloat total() const { return ut_.back() - ut_[0]; }
    const BigFloat& u_top(int i) const { return ut_[i]; }
    const BigFloat& u_bot(int i) const { return ub_[i]; }
    BigFloat top_left(Letter a) const { return ut_[pi_.pos_top(a)]; }
    BigFloat top_right(Letter a) const { return ut_[pi_.pos_top(a) + 1]; }
    BigFloat bot_left(Letter a) const { return ub_[pi_.pos_bottom(a)]; }
    BigFloat bot_right(Letter a) const { return ub_[pi_.pos_bottom(a) + 1]; }
    BigFloat top_length(Letter a) const { return top_right(a) - top_left(a); }
    BigFloat bottom_length(Letter a) const { return bot_right(a) - bot_left(a); }
    BigFloat u_top(const HalfPoint& h) const { return h.side == Side::L ? top_left(h.letter) : top_right(h.letter); }
    BigFloat u_bot(const HalfPoint& h) const { return h.side == Side::L ? bot_left(h.letter) : bot_right(h.letter); }
    const BranchFn& branch(Letter a) const { return br_[a]; }
    int composition_depth(Letter a) const { return depth_[a]; }
    void set_composition_depth(Letter a, int depth) { depth_[a] = depth; }

    Letter locate_top(const BigFloat& x, Side side = Side::L) const;
    Letter locate_bottom(const BigFloat& x, Side side = Side::L) const;
    BigFloat operator()(const BigFloat& x) const;
    BigFloat apply(const BigFloat& x, Side side) const;
    // Expansion of the branch of letter a at x in the closure of its top interval.
    Taylor<BigFloat> expand(Letter a, const BigFloat& x, int order) const;
    // Inverse of the branch of letter a: y in the closure of its bottom interval.
    BigFloat branch_inverse(Letter a, const BigFloat& y) const;

    // Conjugate h o T o h^-1 by an increasing diffeomorphism h of the closure of I onto another interval.
    GeneralizedIEM conjugate(const BranchFn& h, int max_order) const;

    // Tolerance tied to the mantissa: |I| 2^-(bits - 16).
    BigFloat tolerance() const;

private:
    PermutationPair pi_;
    std::vector<BigFloat> ut_, ub_;
    std::vector<BranchFn> br_;
    std::vector<int> depth_;
    int order_ = 1;
};

// Increasing-branch inverse by safeguarded Newton on [lo, hi].
BigFloat invert_increasing(const BranchFn& f, const BigFloat& y, BigFloat lo, BigFloat hi);

}  // namespace iet
