#include "iet/jets.hpp"

#include "iet/errors.hpp"
#include "iet/induction.hpp"

#include <limits>
#include <sstream>

namespace iet {

namespace {

BigFloat babs(const BigFloat& x) { return boost::multiprecision::abs(x); }

BigFloat infinity() { return BigFloat(std::numeric_limits<double>::infinity()); }

Jet monomial_conjugator(int r, int m, const BigFloat& b) {
    std::vector<BigFloat> a(r, BigFloat(0));
    a[0] = 1;
    a[m - 1] = b;
    return Jet(a);
}

// Coefficient n of phi^-1 o j o phi with phi = x + b x^m is affine in b; choose b to cancel it.
Jet cancel(const Jet& j, int n, int m, Jet& conj) {
    const int r = j.order();
    const Jet p0 = monomial_conjugator(r, m, BigFloat(0)), p1 = monomial_conjugator(r, m, BigFloat(1));
    const BigFloat c0 = (p0.inverse() * j * p0)[n], c1 = (p1.inverse() * j * p1)[n];
    if (c1 == c0) return j;
    const BigFloat b = -c0 / (c1 - c0);
    const Jet phi = monomial_conjugator(r, m, b);
    conj = conj * phi;
    return phi.inverse() * j * phi;
}

}  // namespace

Jet::Jet(std::vector<BigFloat> a) : t_(static_cast<int>(a.size())) {
    if (a.empty()) throw DomainError("jet order must be at least 1");
    if (!(a[0] > 0)) throw DomainError("jet linear part must be positive");
    for (std::size_t k = 0; k < a.size(); ++k) t_[static_cast<int>(k) + 1] = a[k];
}

Jet Jet::identity(int r) {
    std::vector<BigFloat> a(r, BigFloat(0));
    a[0] = 1;
    return Jet(a);
}

Jet Jet::from_taylor(const Taylor<BigFloat>& t) {
    std::vector<BigFloat> a;
    for (int k = 1; k <= t.order(); ++k) a.push_back(t[k]);
    return Jet(a);
}

Jet Jet::operator*(const Jet& f) const {
    if (order() != f.order()) throw DomainError("jet order mismatch");
    Jet out;
    out.t_ = Taylor<BigFloat>::compose(t_, f.t_);
    out.t_[0] = 0;
    return out;
}

Jet Jet::inverse() const {
    Jet out;
    out.t_ = revert(t_);
    out.t_[0] = 0;
    return out;
}

Jet Jet::pow(int e) const {
    if (e == 1) return *this;
    if (e == -1) return inverse();
    throw DomainError("jet exponent must be +1 or -1");
}

BigFloat Jet::distance(const Jet& o) const {
    if (order() != o.order()) throw DomainError("jet order mismatch");
    BigFloat m = 0;
    for (int k = 1; k <= order(); ++k) { BigFloat e = babs(t_[k] - o.t_[k]); if (e > m) m = e; }
    return m;
}

Jet jet_compose(const Jet& g, const Jet& f) { return g * f; }

std::string NormalForm::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Identity:
            os << "identity";
            break;
        case Kind::Linear:
            os << "linear(" << format_decimal(a1, 20) << ")";
            break;
        case Kind::Parabolic:
            os << "parabolic(k=" << k << ", " << (sign > 0 ? '+' : '-');
            if (has_a) os << ", a=" << format_decimal(a, 20);
            os << ")";
            break;
    }
    return os.str();
}

NormalForm normal_form(const Jet& j, const BigFloat& threshold) {
    const BigFloat thr = threshold < 0 ? pow2(-static_cast<long>(precision_bits()) / 4) : threshold;
    const int r = j.order();
    NormalForm nf;
    nf.conjugator = Jet::identity(r);
    if (babs(j[1] - 1) > thr) {
        nf.kind = NormalForm::Kind::Linear;
        nf.a1 = j[1];
        Jet cur = j;
        for (int n = 2; n <= r; ++n) cur = cancel(cur, n, n, nf.conjugator);
        nf.form = cur;
        return nf;
    }
    int k = 0;
    for (int n = 2; n <= r && k == 0; ++n)
        if (babs(j[n]) > thr) k = n;
    if (k == 0) {
        nf.form = Jet::identity(r);
        return nf;
    }
    nf.kind = NormalForm::Kind::Parabolic;
    nf.k = k;
    nf.sign = j[k] > 0 ? 1 : -1;
    // rescale: (c x)^-1 o j o (c x) has coefficient a_k c^(k-1) at order k
    const BigFloat c = boost::multiprecision::pow(babs(j[k]), BigFloat(-1) / (k - 1));
    std::vector<BigFloat> lin(r, BigFloat(0));
    lin[0] = c;
    nf.conjugator = Jet(lin);
    Jet cur = nf.conjugator.inverse() * j * nf.conjugator;
    for (int n = k + 1; n <= r; ++n)
        if (n != 2 * k - 1) cur = cancel(cur, n, n - k + 1, nf.conjugator);
    nf.form = cur;
    if (2 * k - 1 <= r) {
        nf.has_a = true;
        nf.a = cur[2 * k - 1];
    }
    return nf;
}

BigFloat normal_form_distance(const NormalForm& x, const NormalForm& y) {
    if (x.kind != y.kind) return infinity();
    switch (x.kind) {
        case NormalForm::Kind::Identity:
            return BigFloat(0);
        case NormalForm::Kind::Linear:
            return babs(x.a1 - y.a1);
        case NormalForm::Kind::Parabolic:
            if (x.k != y.k || x.sign != y.sign || x.has_a != y.has_a) return infinity();
            return x.has_a ? babs(x.a - y.a) : BigFloat(0);
    }
    return infinity();
}

std::vector<Jet> branch_jets(const GeneralizedIEM& t, int r) {
    if (r > t.max_order()) throw DomainError("branch derivative oracles stop below the requested jet order");
    std::vector<Jet> out(2 * t.size());
    for (Letter a = 0; a < t.size(); ++a) {
        out[HalfPoint{a, Side::L}.index()] = Jet::from_taylor(t.expand(a, t.top_left(a), r));
        out[HalfPoint{a, Side::R}.index()] = Jet::from_taylor(t.expand(a, t.top_right(a), r));
    }
    return out;
}

InvariantFamily invariant(const GeneralizedIEM& t, int r, int rotate) {
    auto jets = branch_jets(t, r);
    auto sg = sigma_and_cycles(t.pi());
    InvariantFamily fam;
    fam.order = r;
    for (const auto& cyc : sg.cycles) {
        CycleInvariant ci;
        const int n = static_cast<int>(cyc.size());
        for (int i = 0; i < n; ++i) ci.cycle.push_back(cyc[(i + rotate % n + n) % n]);
        ci.jet = Jet::identity(r);
        for (const auto& h : ci.cycle) ci.jet = ci.jet * jets[h.index()].pow(epsilon(h));
        ci.normal = normal_form(ci.jet);
        if (ci.normal.kind != NormalForm::Kind::Identity) fam.trivial = false;
        fam.cycles.push_back(std::move(ci));
    }
    return fam;
}

namespace {

InvarianceReport compare(const InvariantFamily& x, const InvariantFamily& y, const std::vector<int>& match,
                         const BigFloat& tol) {
    InvarianceReport rep;
    for (std::size_t c = 0; c < x.cycles.size(); ++c) {
        BigFloat dd = normal_form_distance(x.cycles[c].normal, y.cycles[match[c]].normal);
        rep.discrepancy.push_back(dd);
        if (dd > rep.max_discrepancy) rep.max_discrepancy = dd;
    }
    rep.equal = rep.max_discrepancy <= tol;
    return rep;
}

}  // namespace

InvarianceReport check_invariance_conjugation(const GeneralizedIEM& t, const BranchFn& h, int r,
                                              const BigFloat& tol) {
    auto x = invariant(t, r);
    auto y = invariant(t.conjugate(h, r), r);
    std::vector<int> match(x.cycles.size());
    for (std::size_t c = 0; c < match.size(); ++c) match[c] = static_cast<int>(c);
    return compare(x, y, match, tol);
}

InvarianceReport check_invariance_rv(const GeneralizedIEM& t, int r, const BigFloat& tol) {
    auto step = rv_step(t);
    auto s0 = sigma_and_cycles(t.pi()), s1 = sigma_and_cycles(step.next.pi());
    const int n = static_cast<int>(s0.map.size());
    std::vector<int> pre0(n), pre1(n);
    for (int v = 0; v < n; ++v) {
        pre0[s0.map[v]] = v;
        pre1[s1.map[v]] = v;
    }
    // the half-point whose predecessor and successor both change moves to another cycle
    std::vector<bool> mover(n);
    for (int v = 0; v < n; ++v) mover[v] = s0.map[v] != s1.map[v] && pre0[v] != pre1[v];
    std::vector<int> match(s0.s(), -1);
    for (int c = 0; c < s0.s(); ++c)
        for (const auto& h : s0.cycles[c])
            if (!mover[h.index()]) {
                match[c] = s1.cycle_of[h.index()];
                break;
            }
    for (int m : match)
        if (m < 0) throw InvariantError("cycle identification across the Rauzy-Veech step failed");
    return compare(invariant(t, r), invariant(step.next, r), match, tol);
}

std::vector<BigFloat> boundary_log_slope(const GeneralizedIEM& t) {
    auto sg = sigma_and_cycles(t.pi());
    std::vector<BigFloat> out(sg.s(), BigFloat(0));
    for (int c = 0; c < sg.s(); ++c)
        for (const auto& h : sg.cycles[c]) {
            BigFloat dt = t.expand(h.letter, t.u_top(h), 1)[1];
            if (!(dt > 0)) throw DomainError("DT must be positive for log DT");
            out[c] += epsilon(h) * log(dt);
        }
    return out;
}

}  // namespace iet
