// Acceptance suite: one PASS/FAIL line per criterion.

#include "iet/boundary.hpp"
#include "iet/cocycle.hpp"
#include "iet/cohomology.hpp"
#include "iet/combinatorics.hpp"
#include "iet/fixtures.hpp"
#include "iet/jets.hpp"
#include "iet/linearizer.hpp"
#include "iet/suspension.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#ifndef IET_GOLDEN_DIR
#define IET_GOLDEN_DIR "tests/golden"
#endif

using namespace iet;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// ---------- shared fixtures

struct SolverSetup {
    PeriodicFixture fx;
    OseledetsSplitting split;
    std::unique_ptr<CohomologySolver> solver;
    std::unique_ptr<GlueSolver> glue;
};

SolverSetup& solver_setup(const std::string& name, int cheb_degree) {
    static std::map<std::pair<std::string, int>, SolverSetup> cache;
    auto key = std::make_pair(name, cheb_degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    set_precision_bits(512);
    SolverSetup s{periodic_fixture(name), {}, nullptr, nullptr};
    s.split = fixture_splitting(s.fx, 200);
    CohomologyOptions opt;
    opt.cheb_degree = cheb_degree;
    s.solver = std::make_unique<CohomologySolver>(build_tower(s.fx.iem), s.split, opt);
    s.glue = std::make_unique<GlueSolver>(*s.solver);
    return cache.emplace(key, std::move(s)).first->second;
}

std::string letters(int d) {
    std::string s;
    for (int i = 0; i < d; ++i) s.push_back(static_cast<char>('A' + i));
    return s;
}

// Every vertex of every Rauzy class with d <= dmax, seeded from all irreducible bottom rows.
std::vector<PermutationPair> all_vertices(int dmax) {
    std::set<PermutationPair> seen;
    std::vector<PermutationPair> out;
    for (int d = 2; d <= dmax; ++d) {
        const std::string top = letters(d);
        std::string bot = top;
        do {
            auto p = PermutationPair::from_rows(top, bot);
            if (!p.irreducible() || seen.count(p)) continue;
            auto cls = build_rauzy_class(p);
            for (const auto& v : cls.vertices())
                if (seen.insert(v).second) out.push_back(v);
        } while (std::next_permutation(bot.begin(), bot.end()));
    }
    return out;
}

// ---------- oracles

// Rows as strings, one character per letter.
std::pair<std::string, std::string> row_strings(const PermutationPair& p) {
    std::string t, b;
    for (int i = 0; i < p.size(); ++i) {
        t += p.name(p.top(i));
        b += p.name(p.bottom(i));
    }
    return {t, b};
}

// Omega from the rows: +1 when a precedes b on top and follows it on the bottom.
std::vector<std::vector<long long>> omega_oracle(const std::string& top, const std::string& bot) {
    const int d = static_cast<int>(top.size());
    std::string alpha = top;
    std::sort(alpha.begin(), alpha.end());
    std::vector<std::vector<long long>> m(d, std::vector<long long>(d, 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto ti = top.find(alpha[i]), tj = top.find(alpha[j]);
            auto bi = bot.find(alpha[i]), bj = bot.find(alpha[j]);
            if (ti < tj && bi > bj) m[i][j] = 1;
            if (ti > tj && bi < bj) m[i][j] = -1;
        }
    return m;
}

// Fraction-free (Bareiss) rank over the integers.
int bareiss_rank(std::vector<std::vector<long long>> m) {
    const int rows = static_cast<int>(m.size()), cols = rows ? static_cast<int>(m[0].size()) : 0;
    long long prev = 1;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (int i = r + 1; i < rows; ++i) {
            for (int j = c + 1; j < cols; ++j) m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            m[i][c] = 0;
        }
        prev = m[r][c];
        ++r;
    }
    return r;
}

// Number of cycles of the endpoint permutation, read off the row strings.
int sigma_cycle_count(const std::string& top, const std::string& bot) {
    const int d = static_cast<int>(top.size());
    auto idx = [](char c, bool right) { return 2 * (c - 'A') + (right ? 1 : 0); };
    std::vector<int> next(2 * d);
    for (int i = 0; i < d; ++i) {
        char a = top[i];
        next[idx(a, true)] = i + 1 < d ? idx(top[i + 1], false) : idx(bot[d - 1], true);
        int j = static_cast<int>(bot.find(a));
        next[idx(a, false)] = j > 0 ? idx(bot[j - 1], true) : idx(top[0], false);
    }
    std::vector<bool> seen(2 * d, false);
    int cycles = 0;
    for (int s = 0; s < 2 * d; ++s) {
        if (seen[s]) continue;
        ++cycles;
        for (int h = s; !seen[h]; h = next[h]) seen[h] = true;
    }
    return cycles;
}

// Characteristic polynomial by Faddeev-LeVerrier, exact; c[d] = 1.
std::vector<Rational> charpoly(const IntMatrix& a) {
    const int d = a.rows();
    std::vector<Rational> c(d + 1);
    c[d] = 1;
    std::vector<Rational> m(d * d, Rational(0));
    for (int k = 1; k <= d; ++k) {
        std::vector<Rational> nm(d * d, Rational(0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Rational s = 0;
                for (int l = 0; l < d; ++l) s += Rational(a(i, l)) * m[l * d + j];
                nm[i * d + j] = s + (i == j ? c[d - k + 1] : Rational(0));
            }
        m = nm;
        Rational tr = 0;
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) tr += Rational(a(i, l)) * m[l * d + i];
        c[d - k] = -tr / k;
    }
    return c;
}

// Sorted log-moduli of the roots, by Durand-Kerner.
std::vector<double> log_moduli(const IntMatrix& b) {
    auto c = charpoly(b);
    const int d = static_cast<int>(c.size()) - 1;
    using C = std::complex<long double>;
    auto eval = [&](C z) {
        C s = 0;
        for (int k = d; k >= 0; --k) s = s * z + C(static_cast<long double>(to_double(c[k])));
        return s;
    };
    std::vector<C> z(d);
    for (int i = 0; i < d; ++i) z[i] = std::pow(C(0.4L, 0.9L), i);
    for (int it = 0; it < 2000; ++it)
        for (int i = 0; i < d; ++i) {
            C den = 1;
            for (int j = 0; j < d; ++j)
                if (j != i) den *= z[i] - z[j];
            z[i] -= eval(z[i]) / den;
        }
    std::vector<double> out;
    for (auto r : z) out.push_back(static_cast<double>(std::log(std::abs(r))));
    std::sort(out.rbegin(), out.rend());
    return out;
}

// Random smooth global function: polynomial plus a trigonometric term.
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
};

// ---------- 1

void combinatorial_identities(Outcome& out) {
    auto verts = all_vertices(6);
    int worst = 0;
    for (const auto& v : verts) {
        auto [top, bot] = row_strings(v);
        const int d = v.size();
        const int rank = bareiss_rank(omega_oracle(top, bot));
        const int s = sigma_cycle_count(top, bot);
        const auto gs = genus_and_marked_points(v);
        bool ok = rank % 2 == 0 && d == rank + s - 1 && gs.g == rank / 2 && gs.s == s && omega_int(v).rank() == rank;
        if (!ok) ++worst;
    }
    out.detail << verts.size() << " vertices, d <= 6, identity violations " << worst;
    out.require(worst == 0, "d = 2g + s - 1 with g = rank/2");
    out.require(verts.size() > 500, "vertex count");
}

// ---------- 2

void boundary_suite(Outcome& out) {
    set_precision_bits(256);
    const BigFloat tol = pow2(-200);
    // (1) continuous functions
    auto p = PermutationPair::from_rows("ABCDE", "EDCBA");
    StandardIEM<BigFloat> t(p, {BigFloat("0.1371"), BigFloat("0.2503"), BigFloat("0.1799"), BigFloat("0.2113"),
                                BigFloat("0.2214")});
    std::mt19937_64 rng(21);
    BigFloat worst1 = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RandomSmooth psi(rng);
        PiecewiseFunction<BigFloat> f{[psi](Letter, const BigFloat& x) { return psi(x); }};
        PiecewiseFunction<BigFloat> ft{[psi, &t](Letter a, const BigFloat& x) { return psi(x + t.translation(a)); }};
        auto b0 = boundary(t, f), b1 = boundary(t, ft);
        for (std::size_t c = 0; c < b0.size(); ++c) worst1 = std::max<BigFloat>(worst1, abs(b0[c] - b1[c]));
    }
    out.require(worst1 < tol, "boundary of psi o T");

    // (2) exact ranks on every vertex with d <= 6
    int bad = 0;
    auto verts = all_vertices(6);
    for (const auto& v : verts) {
        IntMatrix dm = boundary_matrix(v);
        IntMatrix om = omega_int(v);
        auto gd = genus_and_marked_points(v);
        bool ok = dm * om == IntMatrix(dm.rows(), v.size());          // Im Omega in the kernel
        ok = ok && v.size() - dm.rank() == om.rank() && om.rank() == 2 * gd.g;  // equal dimensions
        ok = ok && dm.rank() == gd.s - 1;                                  // image has the dimension of R^Sigma_0
        for (int j = 0; j < dm.cols(); ++j) {
            Integer colsum = 0;
            for (int i = 0; i < dm.rows(); ++i) colsum += dm(i, j);
            ok = ok && colsum == 0;                                        // image inside R^Sigma_0
        }
        if (!ok) ++bad;
    }
    out.require(bad == 0, "kernel and image ranks");

    // (4) special Birkhoff sums over 10 levels
    auto p4 = PermutationPair::from_rows("ABCD", "DCBA");
    StandardIEM<BigFloat> t4(p4, {BigFloat("0.1312"), BigFloat("0.2897"), BigFloat("0.2309"), BigFloat("0.3482")});
    auto tr = iterate_rv(t4, 10);
    std::vector<RandomSmooth> pieces;
    for (int a = 0; a < 4; ++a) pieces.emplace_back(rng);
    PiecewiseFunction<BigFloat> phi{[pieces](Letter a, const BigFloat& x) { return pieces[a](x); }};
    auto b0 = boundary(t4, phi);
    BigFloat worst4 = 0;
    for (int n = 1; n <= 10; ++n) {
        auto bn = boundary(tr.levels[n], special_birkhoff_sum(tr, 0, n, phi));
        for (std::size_t c = 0; c < b0.size(); ++c) worst4 = std::max<BigFloat>(worst4, abs(bn[c] - b0[c]));
    }
    out.require(worst4 < tol, "boundary of special Birkhoff sums");
    out.detail << "psi o T: " << fmt(to_double(worst1)) << ", ranks on " << verts.size() << " vertices: " << bad
               << " failures, S(0,n) over 10 levels: " << fmt(to_double(worst4)) << " (tolerance 2^-200)";
}

// ---------- 3

void dimension_formulas(Outcome& out) {
    set_precision_bits(512);
    for (auto name : {"circle-golden", "periodic-genus2"}) {
        auto fx = periodic_fixture(name);
        std::vector<Rational> len;
        for (const auto& l : fx.lengths) len.push_back(to_rational(l));
        const int g = genus_and_marked_points(fx.loop.start).g;
        const int d = fx.loop.start.size();
        for (int r = 1; r <= 3; ++r) {
            auto gs = gamma_spaces_exact(fx.loop.start, len, r);
            out.require(static_cast<int>(gs.gamma_r.size()) == r * d, std::string(name) + " dim Gamma(r)");
            out.require(static_cast<int>(gs.gamma_partial_r.size()) == (2 * g - 1) * r + 1,
                        std::string(name) + " dim Gamma_d(r)");
        }
        out.detail << name << " (d=" << d << ", g=" << g << ") rd and (2g-1)r+1 for r=1..3; ";
    }
    auto& s = solver_setup("periodic-genus2", CohomologyOptions{}.cheb_degree);
    const int g = s.solver->genus();
    std::vector<Rational> len;
    for (const auto& l : s.fx.lengths) len.push_back(to_rational(l));
    for (int r = 1; r <= 2; ++r) {
        const int dim_partial =
            static_cast<int>(gamma_spaces_exact(s.fx.iem.pi(), len, r + 1).gamma_partial_r.size());
        Eigen::MatrixXd basis = s.solver->gamma_t_basis(r + 1);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
        const double smax = svd.singularValues()(0);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-8 * smax) ++rank;
        out.require(rank == s.solver->gamma_t_dim(r + 1), "Gamma_T basis rank");
        const int quotient = dim_partial - rank;
        out.require(quotient == g + r * (2 * g - 2), "quotient dimension");
        out.detail << "r=" << r << ": dim Gamma_d(r+1)/Gamma_T(r+1) = " << quotient << "; ";
    }
}

// ---------- 4

void lyapunov_oracle(Outcome& out) {
    auto loop = fixture_loop("periodic-genus2");
    const std::size_t L = loop.types.size();
    auto lm = log_moduli(cocycle_matrix(loop));
    auto s = lyapunov_and_stable_space(ArrowRuns::from_path(repeat_loop(loop, 200), L), {L});
    double worst = 0;
    out.require(s.per_period.size() == lm.size(), "spectrum size");
    for (std::size_t i = 0; i < lm.size() && i < s.per_period.size(); ++i)
        worst = std::max(worst, std::abs(s.per_period[i] - lm[i]) / std::abs(lm[i]));
    out.require(worst < 1e-4, "relative error 1e-4");
    out.require(s.stable_dim == 2, "dim Gamma_s = 2");
    out.detail << "max relative error " << fmt(worst) << " after 200 periods, dim Gamma_s = " << s.stable_dim;
}

// ---------- 5

void roth_diagnostics(Outcome& out) {
    set_precision_bits(512);
    for (auto name : {"circle-golden", "periodic-genus2", "vertex-d5-s2"}) {
        auto fx = periodic_fixture(name);
        const std::size_t L = fx.loop.types.size();
        auto f = factor_minimal_complete(repeat_loop(fx.loop, 60));
        auto a = roth_condition_a(f);
        bool ratio_ok = true;
        for (std::size_t i = 0; i < a.ratio.size(); ++i) ratio_ok = ratio_ok && a.ratio[i] <= 3.0 / (i + 1.0);
        out.require(ratio_ok, std::string(name) + " ratio_a <= 3/n");

        auto lm = log_moduli(fx.b_loop);
        const double expect = 1 - lm[1] / lm[0];
        auto b = roth_condition_b(factor_minimal_complete(repeat_loop(fx.loop, 30)), fx.lengths);
        const double theta_err = std::abs(b.theta_fit - expect) / std::abs(expect);
        out.require(theta_err < 0.01, std::string(name) + " theta within 1%");

        auto split = lyapunov_and_stable_space(ArrowRuns::from_path(repeat_loop(fx.loop, 60), L), {L});
        auto c = roth_condition_c(f, split.stable_dim);
        double tail = 0;
        for (int l = 30; l <= c.sampled; ++l)
            tail = std::max({tail, c.restrict_ratio[l - 1], c.quotient_ratio[l - 1]});
        out.require(c.sampled >= 30 && tail < 0.05, std::string(name) + " condition (c) tail");

        auto pos = positivity_window_check(factor_minimal_complete(repeat_loop(fx.loop, 20)));
        out.require(pos.ok && pos.window == static_cast<std::size_t>(std::max(1, 2 * f.d - 3)),
                    std::string(name) + " positivity window");
        out.detail << name << ": theta err " << fmt(theta_err) << ", (c) tail " << fmt(tail) << "; ";
    }
    auto lv = roth_condition_a(factor_minimal_complete(liouville_runs(10)));
    out.require(lv.tail_max > 0.5 && !lv.consistent, "liouville rejected by (a)");
    out.detail << "liouville (a) tail " << fmt(lv.tail_max);
}

// ---------- 6

double sup_on_grid(const std::function<double(double)>& f, const LevelGeom& g, int n) {
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(f(g.origin + (i + 0.5) * (g.end - g.origin) / n)));
    return m;
}

// Per-interval cubic plus a sine, corrected by a common linear term so that the boundary vanishes (s = 1).
SmoothPiecewise random_kernel_phi(const LevelGeom& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    const int d = g.size();
    std::vector<std::array<double, 6>> p(d);
    for (auto& q : p)
        for (auto& v : q) v = u(rng);
    auto raw = [p, left = g.left](Letter a, double x, int k) {
        const double t = x - left[a];
        const auto& q = p[a];
        const double w = 2 + 3 * (q[5] + 1);
        double poly[4] = {q[0] + q[1] * t + q[2] * t * t + q[3] * t * t * t, q[1] + 2 * q[2] * t + 3 * q[3] * t * t,
                          2 * q[2] + 6 * q[3] * t, 6 * q[3]};
        double trig = q[4] * std::pow(w, k) * std::sin(w * t + k * std::numbers::pi / 2);
        return (k < 4 ? poly[k] : 0.0) + trig;
    };
    double bd = 0;
    for (Letter a = 0; a < d; ++a) bd += raw(a, g.right[a], 0) - raw(a, g.left[a], 0);
    const double beta = -bd / (g.end - g.origin);
    return {d, 8, [raw, beta, left = g.left](Letter a, double x, int k) {
                double lin = k == 0 ? beta * (x - left[a]) : k == 1 ? beta : 0.0;
                return raw(a, x, k) + lin;
            }};
}

// sup |phi| + sup |D phi| + the tau-Hoelder constant of D phi, per interval on a grid.
double c1tau_norm(const SmoothPiecewise& phi, const LevelGeom& g, double tau, int n = 160) {
    double s0 = 0, s1 = 0, h = 0;
    for (Letter a = 0; a < g.size(); ++a) {
        std::vector<double> x(n + 1), dv(n + 1);
        for (int i = 0; i <= n; ++i) {
            x[i] = g.left[a] + (g.right[a] - g.left[a]) * i / n;
            s0 = std::max(s0, std::abs(phi.eval(a, x[i], 0)));
            dv[i] = phi.eval(a, x[i], 1);
            s1 = std::max(s1, std::abs(dv[i]));
        }
        for (int i = 0; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) h = std::max(h, std::abs(dv[j] - dv[i]) / std::pow(x[j] - x[i], tau));
    }
    return s0 + s1 + h;
}

void cohomological_solver(Outcome& out) {
    auto& s = solver_setup("periodic-genus2", CohomologyOptions{}.cheb_degree);
    const auto& g = s.solver->tower().base();
    const double len = g.end - g.origin;
    auto psi0 = [len](double x, int k) {
        return std::pow(2 * std::numbers::pi / len, k) * std::sin(2 * std::numbers::pi * x / len + k * std::numbers::pi / 2);
    };
    auto sol = s.solver->solve(coboundary_of(g, psi0, 4));
    const double err = sup_on_grid([&](double x) { return sol.psi(x) - (psi0(x, 0) - psi0(g.origin, 0)); }, g, 10000);
    out.require(err < 1e-6 && sol.chi.norm() < 1e-8, "manufactured coboundary");
    out.detail << "coboundary: psi err " << fmt(err) << ", |chi| " << fmt(sol.chi.norm());

    double gu = 0, gs_chi = 0, gs_psi = 0;
    for (int j = 0; j < s.solver->genus(); ++j) {
        Eigen::VectorXd u = s.solver->gamma_u().col(j);
        gu = std::max(gu, (s.solver->solve(from_gamma(g, u, 1)).chi - u).norm());
        Eigen::VectorXd st = s.solver->gamma_s().col(j);
        auto ss = s.solver->solve(from_gamma(g, st, 1));
        gs_chi = std::max(gs_chi, ss.chi.norm());
        gs_psi = std::max(gs_psi, sup_on_grid(ss.psi_derivs[0], g, 3000));
    }
    out.require(gu < 1e-8, "Gamma_u returns itself");
    out.require(gs_chi < 1e-8 && gs_psi < 10, "Gamma_s gives chi = 0 and bounded psi");
    out.detail << "; Gamma_u " << fmt(gu) << ", Gamma_s |chi| " << fmt(gs_chi) << " sup|psi| " << fmt(gs_psi);

    bool rejected = false;
    try {
        s.solver->solve(SmoothPiecewise{g.size(), 4, [](Letter, double x, int k) { return k == 0 ? x : k == 1 ? 1.0 : 0.0; }});
    } catch (const DomainError&) {
        rejected = true;
    }
    out.require(rejected, "nonzero boundary rejected");

    // bounded-ratio golden
    std::ifstream in(std::string(IET_GOLDEN_DIR) + "/cohomology_bound.json");
    out.require(static_cast<bool>(in), "golden file present");
    if (!in) return;
    auto golden = nlohmann::json::parse(in);
    const double tau = golden.at("tau").get<double>();
    std::mt19937_64 rng(golden.at("seed").get<unsigned>());
    double ratio = 0;
    for (int i = 0; i < golden.at("samples").get<int>(); ++i) {
        auto phi = random_kernel_phi(g, rng);
        auto si = s.solver->solve(phi);
        ratio = std::max(ratio, sup_on_grid(si.psi_derivs[0], g, 1000) / c1tau_norm(phi, g, tau));
    }
    const double bound = golden.at("ratio_bound").get<double>();
    out.require(ratio <= bound, "bounded ratio below the golden constant");
    out.detail << "; sup|psi|/|phi|_C1+tau " << fmt(ratio) << " (golden " << fmt(bound) << ")";
}

// ---------- 7

BigFloat coeff_scale(const Jet& j) {
    BigFloat m = 1;
    for (int k = 1; k <= j.order(); ++k)
        if (abs(j[k]) > m) m = abs(j[k]);
    return m;
}

std::vector<BigFloat> generic_lengths(int d, int shift) {
    std::vector<BigFloat> len;
    BigFloat total = 0;
    for (int a = 0; a < d; ++a) {
        len.push_back(BigFloat(1) / (a + 2) + sqrt(BigFloat(a + 2 + shift)) / 10);
        total += len.back();
    }
    for (auto& x : len) x /= total;
    return len;
}

// D f at 0 and at 1 for the unit families.
std::pair<BigFloat, BigFloat> unit_slopes(const UnitDiffeo& f) {
    if (f.kind == "mobius") return {BigFloat(f.a), BigFloat(1) / BigFloat(f.a)};
    if (f.kind == "bump" && f.flat == 1) return {BigFloat(1) + BigFloat(f.eps), BigFloat(1) - BigFloat(f.eps)};
    return {BigFloat(1), BigFloat(1)};
}

void jet_invariant(Outcome& out) {
    set_precision_bits(256);
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1, 1), pos(0.5, 2.0);
    auto random_jet = [&] {
        std::vector<BigFloat> a(5);
        a[0] = BigFloat(pos(rng));
        for (int k = 1; k < 5; ++k) a[k] = BigFloat(u(rng));
        return Jet(a);
    };
    BigFloat worst = 0;
    const Jet id = Jet::identity(5);
    for (int trial = 0; trial < 1000; ++trial) {
        Jet f = random_jet(), g = random_jet(), h = random_jet();
        Jet lhs = (f * g) * h, rhs = f * (g * h);
        worst = std::max<BigFloat>(worst, lhs.distance(rhs) / (coeff_scale(lhs) + coeff_scale(rhs)));
        worst = std::max<BigFloat>(worst, (f * f.inverse()).distance(id) / coeff_scale(f.inverse()));
        worst = std::max<BigFloat>(worst, (f.inverse() * f).distance(id) / coeff_scale(f.inverse()));
        worst = std::max<BigFloat>(worst, std::max<BigFloat>((f * id).distance(f), (id * f).distance(f)) / coeff_scale(f));
    }
    out.require(worst < pow2(-200), "group axioms");
    out.detail << "axioms " << fmt(to_double(worst));

    bool trivial = true;
    for (auto [top, bot] : {std::pair{"ABCD", "DCBA"}, std::pair{"ABCDE", "EDCBA"}, std::pair{"ABCDE", "DCEBA"}}) {
        auto pi = PermutationPair::from_rows(top, bot);
        auto len = generic_lengths(pi.size(), 0);
        trivial = trivial && invariant(GeneralizedIEM::from_standard(StandardIEM<BigFloat>(pi, len), 5), 5).trivial;
        for (int r = 1; r <= 4; ++r) {
            std::vector<UnitDiffeo> f(pi.size());
            for (int a = 0; a < pi.size(); ++a) f[a] = {"bump", 0.1 + 0.02 * a, r + 1, 1};
            trivial = trivial && invariant(GeneralizedIEM::from_unit_diffeos(pi, len, len, f, r), r).trivial;
        }
    }
    out.require(trivial, "trivial for standard maps and flat deformations");

    BranchFn h = [](const BigFloat& x, int order) {
        auto t = Taylor<BigFloat>::variable(order, x);
        auto s = sin(t * boost::math::constants::pi<BigFloat>());
        return t + s * s * BigFloat("0.05");
    };
    const BigFloat tol("1e-10");
    BigFloat conj = 0, step = 0;
    struct Case {
        const char *top, *bot;
        int ts, bs;
        std::vector<UnitDiffeo> f;
    };
    std::vector<Case> cases{
        {"ABCD", "DCBA", 0, 0, {{"sine", 0.2, 1, 1}, {"bump", 0.3, 2, 1}, {"mobius", 0, 1, 1.5}, {"identity", 0, 1, 1}}},
        {"ABCDE", "DCEBA", 2, 5,
         {{"mobius", 0, 1, 1.7}, {"sine", 0.1, 1, 1}, {"mobius", 0, 1, 0.6}, {"bump", 0.2, 1, 1}, {"identity", 0, 1, 1}}},
    };
    BigFloat linear = 0;
    for (const auto& cs : cases) {
        const int d = static_cast<int>(cs.f.size());
        auto lt = generic_lengths(d, cs.ts), lb = generic_lengths(d, cs.bs);
        auto pi = PermutationPair::from_rows(cs.top, cs.bot);
        auto g = GeneralizedIEM::from_unit_diffeos(pi, lt, lb, cs.f, 3);
        auto rc = check_invariance_conjugation(g, h, 3, tol);
        auto rv = check_invariance_rv(g, 3, tol);
        out.require(rc.equal && rv.equal, std::string(cs.top) + " invariance");
        conj = std::max<BigFloat>(conj, rc.max_discrepancy);
        step = std::max<BigFloat>(step, rv.max_discrepancy);

        // D T = (mu / lambda) D f at the ends of each branch
        auto fam = invariant(g, 3);
        auto sg = sigma_and_cycles(pi);
        for (std::size_t c = 0; c < fam.cycles.size(); ++c) {
            BigFloat expect = 0;
            for (const auto& hp : sg.cycles[c]) {
                auto [d0, d1] = unit_slopes(cs.f[hp.letter]);
                BigFloat dt = lb[hp.letter] / lt[hp.letter] * (hp.side == Side::L ? d0 : d1);
                expect += epsilon(hp) * log(dt);
            }
            linear = std::max<BigFloat>(linear, abs(log(fam.cycles[c].jet[1]) - expect));
        }
    }
    out.require(linear < BigFloat("1e-12"), "linear part equals boundary of log DT");
    out.detail << "; trivial " << (trivial ? "yes" : "no") << ", conjugation " << fmt(to_double(conj)) << ", RV step "
               << fmt(to_double(step)) << ", linear part " << fmt(to_double(linear));
}

// ---------- 8

void suspension_round_trip(Outcome& out) {
    std::mt19937_64 rng(12);
    int exact = 0, total = 0;
    for (auto [top, bot] : {std::pair{"AB", "BA"}, std::pair{"ABCD", "DCBA"}, std::pair{"ABCDE", "EDCBA"},
                            std::pair{"ABCDE", "DCEBA"}, std::pair{"ABCDEF", "FCEBDA"}}) {
        auto pi = PermutationPair::from_rows(top, bot);
        std::vector<Rational> len;
        for (int a = 0; a < pi.size(); ++a)
            len.emplace_back(Integer(static_cast<unsigned long>(rng() % 1000003 + 1000)), Integer(1000003));
        StandardIEM<Rational> t(pi, len);
        auto s = suspend(t);
        auto rm = vertical_return_map(s, base_segment(s));
        ++total;
        if (rm.map.pi() == t.pi() && rm.map.lengths() == t.lengths() && rm.map.origin() == t.origin()) ++exact;
    }
    out.require(exact == total, "exact round trip");

    set_precision_bits(512);
    auto fx = periodic_fixture("periodic-genus2");
    const int p = static_cast<int>(fx.loop.types.size());
    AppendixCOptions opt;
    opt.n_max = 100000;
    auto dg = appendix_c_diagnostics(fx.iem, opt);
    std::vector<double> n, sep, cov;
    for (const auto& r : dg.orbit) {
        n.push_back(static_cast<double>(r.n));
        sep.push_back(r.separation);
        cov.push_back(r.covering);
    }
    const double ss = loglog_slope(n, sep, 1000), cs = loglog_slope(n, cov, 1000);
    out.require(std::abs(ss + 1) < 0.1, "separation slope");
    out.require(std::abs(cs + 1) < 0.1, "covering slope");
    double worst_ratio = 0;
    int periods = 0;
    for (const auto& r : dg.levels)
        if (r.n % p == 0 && r.n / p >= 30) {
            worst_ratio = std::max(worst_ratio, std::abs(r.entrance_ratio - 1));
            ++periods;
        }
    out.require(periods > 0 && worst_ratio < 0.1, "entrance-time ratio");
    out.detail << exact << "/" << total << " exact round trips; separation slope " << fmt(ss) << ", covering slope "
               << fmt(cs) << ", entrance ratio within " << fmt(worst_ratio) << " of 1 over " << periods << " periods";
}

// ---------- 9

double binomial(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

GeneralizedIEM bump_family(const StandardIEM<BigFloat>& t0, const std::vector<double>& amp, double t) {
    std::vector<UnitDiffeo> f;
    for (double a : amp) f.push_back({"bump", a * t, 8, 1});
    return GeneralizedIEM::from_unit_diffeos(t0.pi(), t0.lengths(), t0.lengths(), f, 6);
}

// The derivative in t of the bump family: amp_a lambda_a (s (1 - s))^8 in the unit variable s.
SmoothPiecewise bump_direction(const LevelGeom& g, const std::vector<double>& amp) {
    std::vector<double> c(17, 0.0);
    for (int j = 0; j <= 8; ++j) c[8 + j] = (j % 2 ? -1.0 : 1.0) * binomial(8, j);
    auto poly = [c](double s, int k) {
        double v = 0;
        for (int j = 16; j >= k; --j) {
            double f = c[j];
            for (int i = 0; i < k; ++i) f *= j - i;
            v = v * s + f;
        }
        return v;
    };
    return {g.size(), 6, [g, amp, poly](Letter a, double x, int k) {
                const double lam = g.right[a] - g.left[a];
                return amp[a] * lam * poly((x - g.left[a]) / lam, k) / std::pow(lam, k);
            }};
}

void circle_and_conjugacy(Outcome& out) {
    const double w = golden_mean();
    const auto f = sine_family(w, 0.01);
    auto r = linearize_circle(f, {.grid = 1024});
    const double off = conjugacy_residual(f, r.h, r.t, 4096);
    out.require(r.converged && r.residual_sup < 1e-8 && off < 1e-8, "golden eps = 0.01");
    auto bad = linearize_circle(sine_family(w, 0.2), {.grid = 1024});
    out.require(bad.flagged(), "eps = 0.2 flagged");
    out.detail << "circle: " << r.iterations << " iterations, off-grid residual " << fmt(off) << ", eps = 0.2 flagged "
               << (bad.flagged() ? "yes" : "no");

    auto& s = solver_setup("periodic-genus2", 40);
    const auto& b = s.glue->base();
    const auto t0 = GeneralizedIEM::from_standard(s.fx.iem, 6);
    std::vector<BigFloat> ut;
    for (int i = 0; i <= s.fx.iem.size(); ++i) ut.push_back(s.fx.iem.u_top(i));
    double scale = 0;
    for (int k = 0; k <= 1000; ++k) {
        double x = b.origin + (b.end - b.origin) * k / 1000, v = 1;
        for (const auto& u : ut) v *= std::pow(x - to_double(u), 3);
        scale = std::max(scale, std::abs(v));
    }
    const BigFloat eps = BigFloat(0.005 / scale);
    BranchFn h0 = [ut, eps](const BigFloat& x, int order) {
        Taylor<BigFloat> v(order, BigFloat(1));
        auto var = Taylor<BigFloat>::variable(order, x);
        for (const auto& u : ut) v = v * pow(var - u, 3);
        return var + v * eps;
    };
    auto tt = t0.conjugate(h0, 6);
    auto hd = IntervalDiffeo::from_function(b.origin, b.end, 2048,
                                            [&](double x, int k) { return to_double(h0(BigFloat(x), 3).derivative(k)); });
    auto res = iem_glue_residuals(tt, hd, *s.glue);
    auto rid = iem_glue_residuals(tt, IntervalDiffeo::identity(b.origin, b.end, 2048), *s.glue);
    out.require(res.sup() < 1e-6, "manufactured conjugate pair");
    out.require(rid.sup() > 1e-3, "identity is not a conjugacy of the pair");
    out.detail << "; manufactured pair residual " << fmt(res.sup()) << " (identity " << fmt(rid.sup()) << ")";

    const std::vector<double> amp{0.3, -0.2, 0.25, 0.15};
    auto lin = glue_linearization(bump_direction(b, amp), *s.glue);
    const double dt = 1e-3;
    auto plus = glue_fixed_point(bump_family(s.fx.iem, amp, dt), *s.glue);
    auto minus = glue_fixed_point(bump_family(s.fx.iem, amp, -dt), *s.glue);
    auto rp = iem_glue_residuals(bump_family(s.fx.iem, amp, dt), plus.h, *s.glue);
    auto rm = iem_glue_residuals(bump_family(s.fx.iem, amp, -dt), minus.h, *s.glue);
    double worst = 0;
    for (std::size_t i = 0; i < lin.values.size(); ++i)
        worst = std::max(worst, std::abs((rp.values[i] - rm.values[i]) / (2 * dt) - lin.values[i]));
    const double rel = worst / lin.sup();
    out.require(plus.converged && minus.converged && lin.sup() > 1e-3 && rel < 1e-4, "finite-difference linearization");
    out.detail << ", finite-difference mismatch " << fmt(rel) << " relative";
}

struct Criterion {
    const char* name;
    double budget;  // seconds, 0 when none is stated
    void (*run)(Outcome&);
};

}  // namespace

int main() {
    const Criterion all[] = {
        {"combinatorial identities", 5, combinatorial_identities},
        {"boundary operator suite", 30, boundary_suite},
        {"dimension formulas", 0, dimension_formulas},
        {"Lyapunov oracle equivalence", 60, lyapunov_oracle},
        {"Roth diagnostics", 0, roth_diagnostics},
        {"cohomological solver", 120, cohomological_solver},
        {"jet invariant", 0, jet_invariant},
        {"suspension round trip and rates", 120, suspension_round_trip},
        {"circle linearizer and conjugacy system", 0, circle_and_conjugacy},
    };
    int failed = 0, k = 0;
    for (const auto& c : all) {
        ++k;
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0 && secs > c.budget) out.require(false, "runtime over " + fmt(c.budget) + " s");
        if (!out.pass) ++failed;
        std::printf("%s %d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", k, c.name, out.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
