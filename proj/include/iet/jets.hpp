#pragma once

#include "iet/combinatorics.hpp"
#include "iet/iem.hpp"
#include "iet/scalar.hpp"
#include "iet/taylor.hpp"

#include <string>
#include <vector>

namespace iet {

// r-jet at 0 of an orientation-preserving germ fixing 0: a_1 x + ... + a_r x^r, a_1 > 0.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::vector<BigFloat> a);  // a[0] = a_1
    static Jet identity(int r);
    // Jet at 0 of h -> f(h) - f(0), given the expansion of f at a point.
    static Jet from_taylor(const Taylor<BigFloat>& t);

    int order() const { return t_.order(); }
    const BigFloat& operator[](int k) const { return t_[k]; }  // k >= 1
    const Taylor<BigFloat>& series() const { return t_; }

    Jet operator*(const Jet& f) const;  // this o f
    Jet inverse() const;
    Jet pow(int e) const;               // e in {-1, 1}
    BigFloat distance(const Jet& o) const;  // max coefficient difference

private:
    Taylor<BigFloat> t_;
};

Jet jet_compose(const Jet& g, const Jet& f);

struct NormalForm {
    enum class Kind { Identity, Linear, Parabolic };
    Kind kind = Kind::Identity;
    BigFloat a1 = 1;     // linear part
    int k = 0;           // contact order (parabolic)
    int sign = 0;        // +1 or -1 (parabolic)
    BigFloat a = 0;      // coefficient of x^(2k-1), zero when 2k-1 > r
    bool has_a = false;
    Jet form;            // the normal form itself
    Jet conjugator;      // form = conjugator^-1 o j o conjugator
    std::string str() const;
};

// Coefficients below `threshold` count as zero; default 2^(-bits/4).
NormalForm normal_form(const Jet& j, const BigFloat& threshold = BigFloat(-1));
// Max parameter discrepancy, +inf when the kinds or contact data differ.
BigFloat normal_form_distance(const NormalForm& x, const NormalForm& y);

// j(T, v) for every half-point, indexed by HalfPoint::index().
std::vector<Jet> branch_jets(const GeneralizedIEM& t, int r);

struct CycleInvariant {
    std::vector<HalfPoint> cycle;  // sigma order, starting at the base point
    Jet jet;
    NormalForm normal;
};

struct InvariantFamily {
    int order = 0;
    std::vector<CycleInvariant> cycles;  // in the order of sigma_and_cycles
    bool trivial = true;
};

// rotate shifts the base point along each cycle (the class does not depend on it).
InvariantFamily invariant(const GeneralizedIEM& t, int r, int rotate = 0);

struct InvarianceReport {
    std::vector<BigFloat> discrepancy;  // per cycle of the first family
    BigFloat max_discrepancy = 0;
    bool equal = false;
};

// Conjugation by an increasing diffeomorphism h of the closure of I.
InvarianceReport check_invariance_conjugation(const GeneralizedIEM& t, const BranchFn& h, int r,
                                              const BigFloat& tol);
// One Rauzy-Veech step; cycles are matched through the half-points that keep their cycle.
InvarianceReport check_invariance_rv(const GeneralizedIEM& t, int r, const BigFloat& tol);

// (d log DT)_C = sum over C of eps(v) log DT(u^t(v)).
std::vector<BigFloat> boundary_log_slope(const GeneralizedIEM& t);

}  // namespace iet
