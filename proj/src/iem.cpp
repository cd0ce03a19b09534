#include "iet/iem.hpp"

#include <boost/math/constants/constants.hpp>

namespace iet {

namespace {

BigFloat pi_const() { return boost::math::constants::pi<BigFloat>(); }

Letter locate_in(const std::vector<BigFloat>& u, const BigFloat& x, Side side, const std::vector<Letter>& row) {
    const int d = static_cast<int>(row.size());
    bool inside = side == Side::L ? (x >= u[0] && x < u[d]) : (x > u[0] && x <= u[d]);
    if (!inside) throw DomainError("point " + format_decimal(x, 20) + " outside the interval");
    int lo = 0, hi = d;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        bool right = side == Side::L ? x >= u[mid] : x > u[mid];
        if (right)
            lo = mid;
        else
            hi = mid;
    }
    return row[lo];
}

}  // namespace

Taylor<BigFloat> UnitDiffeo::operator()(const Taylor<BigFloat>& t) const {
    if (kind == "identity") return t;
    if (kind == "bump") {
        Taylor<BigFloat> one(t.order(), BigFloat(1));
        return t + pow(t * (one - t), flat) * BigFloat(eps);
    }
    if (kind == "sine") {
        // t + eps sin^2(pi t) / pi
        Taylor<BigFloat> s = sin(t * pi_const());
        return t + s * s * (BigFloat(eps) / pi_const());
    }
    if (kind == "mobius") {
        Taylor<BigFloat> den = t * BigFloat(a - 1) + BigFloat(1);
        return (t * BigFloat(a)) / den;
    }
    throw DomainError("unknown branch family '" + kind + "'");
}

GeneralizedIEM::GeneralizedIEM(PermutationPair pi, std::vector<BigFloat> top_lengths,
                               std::vector<BigFloat> bottom_lengths, std::vector<BranchFn> branches, int max_order,
                               BigFloat origin)
    : pi_(std::move(pi)), br_(std::move(branches)), order_(max_order) {
    pi_.require_irreducible();
    const int d = pi_.size();
    if (static_cast<int>(top_lengths.size()) != d || static_cast<int>(bottom_lengths.size()) != d ||
        static_cast<int>(br_.size()) != d)
        throw DomainError("generalized map needs one top length, bottom length and branch per letter");
    if (max_order < 1) throw DomainError("branch order must be at least 1");
    ut_.assign(d + 1, origin);
    ub_.assign(d + 1, origin);
    for (int i = 0; i < d; ++i) {
        if (!(top_lengths[pi_.top(i)] > 0) || !(bottom_lengths[pi_.bottom(i)] > 0))
            throw DomainError("interval lengths must be positive");
        ut_[i + 1] = ut_[i] + top_lengths[pi_.top(i)];
        ub_[i + 1] = ub_[i] + bottom_lengths[pi_.bottom(i)];
    }
    if (abs(ut_[d] - ub_[d]) > tolerance()) throw DomainError("top and bottom partitions cover different intervals");
    ub_[d] = ut_[d];
    depth_.assign(d, 0);
}

BigFloat GeneralizedIEM::tolerance() const { return pow2(-static_cast<long>(precision_bits()) + 16) * abs(ut_.back() - ut_[0]); }

GeneralizedIEM GeneralizedIEM::from_unit_diffeos(const PermutationPair& pi, const std::vector<BigFloat>& top_lengths,
                                                 const std::vector<BigFloat>& bottom_lengths,
                                                 const std::vector<UnitDiffeo>& f, int max_order) {
    const int d = pi.size();
    if (static_cast<int>(f.size()) != d) throw DomainError("one unit diffeomorphism per letter required");
    // provisional object only to read the endpoint layout
    std::vector<BranchFn> dummy(d, [](const BigFloat& x, int order) { return Taylor<BigFloat>::variable(order, x); });
    GeneralizedIEM layout(pi, top_lengths, bottom_lengths, dummy, max_order);
    std::vector<BranchFn> br;
    for (Letter a = 0; a < d; ++a) {
        BigFloat l = layout.top_left(a), lam = top_lengths[a], c = layout.bot_left(a), mu = bottom_lengths[a];
        UnitDiffeo fa = f[a];
        br.push_back([l, lam, c, mu, fa](const BigFloat& x, int order) {
            Taylor<BigFloat> t = Taylor<BigFloat>::variable(order, x);
            t = (t - l) / lam;
            return fa(t) * mu + c;
        });
    }
    return GeneralizedIEM(pi, top_lengths, bottom_lengths, std::move(br), max_order, BigFloat(0));
}

GeneralizedIEM GeneralizedIEM::from_standard(const StandardIEM<BigFloat>& t, int max_order) {
    std::vector<BranchFn> br;
    for (Letter a = 0; a < t.size(); ++a) {
        BigFloat shift = t.translation(a);
        br.push_back([shift](const BigFloat& x, int order) { return Taylor<BigFloat>::variable(order, x) + shift; });
    }
    return GeneralizedIEM(t.pi(), t.lengths(), t.lengths(), std::move(br), max_order, t.origin());
}

Letter GeneralizedIEM::locate_top(const BigFloat& x, Side side) const { return locate_in(ut_, x, side, pi_.top_row()); }

Letter GeneralizedIEM::locate_bottom(const BigFloat& x, Side side) const {
    return locate_in(ub_, x, side, pi_.bottom_row());
}

Taylor<BigFloat> GeneralizedIEM::expand(Letter a, const BigFloat& x, int order) const {
    if (order > order_) throw DomainError("branch oracle order " + std::to_string(order_) + " is below the request");
    return br_[a](x, order);
}

BigFloat GeneralizedIEM::operator()(const BigFloat& x) const { return br_[locate_top(x)](x, 0)[0]; }

BigFloat GeneralizedIEM::apply(const BigFloat& x, Side side) const { return br_[locate_top(x, side)](x, 0)[0]; }

BigFloat invert_increasing(const BranchFn& f, const BigFloat& y, BigFloat lo, BigFloat hi) {
    BigFloat flo = f(lo, 0)[0], fhi = f(hi, 0)[0];
    if (y <= flo) return lo;
    if (y >= fhi) return hi;
    BigFloat x = lo + (hi - lo) * (y - flo) / (fhi - flo);
    const BigFloat tol = pow2(-static_cast<long>(precision_bits()) + 4) * (abs(hi) + abs(lo) + 1);
    const int max_iter = static_cast<int>(precision_bits()) + 100;
    for (int it = 0; it < max_iter; ++it) {
        Taylor<BigFloat> e = f(x, 1);
        BigFloat r = e[0] - y;
        if (r == 0) return x;
        if (r > 0)
            hi = x;
        else
            lo = x;
        BigFloat nx = e[1] > 0 ? x - r / e[1] : (lo + hi) / 2;
        if (abs(nx - x) <= tol && nx >= lo && nx <= hi) return nx;
        if (!(nx > lo && nx < hi)) nx = (lo + hi) / 2;
        x = nx;
        if (hi - lo <= tol) return (lo + hi) / 2;
    }
    throw PrecisionError("branch inversion did not converge");
}

BigFloat GeneralizedIEM::branch_inverse(Letter a, const BigFloat& y) const {
    return invert_increasing(br_[a], y, top_left(a), top_right(a));
}

GeneralizedIEM GeneralizedIEM::conjugate(const BranchFn& h, int max_order) const {
    const int d = size();
    const BigFloat lo = ut_[0], hi = ut_[d];
    std::vector<BigFloat> top(d), bot(d);
    for (Letter a = 0; a < d; ++a) {
        top[a] = h(top_right(a), 0)[0] - h(top_left(a), 0)[0];
        bot[a] = h(bot_right(a), 0)[0] - h(bot_left(a), 0)[0];
    }
    std::vector<BranchFn> br;
    for (Letter a = 0; a < d; ++a) {
        BranchFn ta = br_[a];
        br.push_back([ta, h, lo, hi](const BigFloat& x, int order) {
            BigFloat y = invert_increasing(h, x, lo, hi);
            Taylor<BigFloat> hy = h(y, order);
            Taylor<BigFloat> hinv = revert(hy);
            hinv[0] = y;
            Taylor<BigFloat> inner = Taylor<BigFloat>::compose(ta(y, order), hinv);
            return Taylor<BigFloat>::compose(h(inner[0], order), inner);
        });
    }
    GeneralizedIEM out(pi_, top, bot, std::move(br), std::min(max_order, order_), h(lo, 0)[0]);
    return out;
}

}  // namespace iet
