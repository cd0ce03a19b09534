#include "io.hpp"

#include "iet/boundary.hpp"
#include "iet/cocycle.hpp"
#include "iet/cohomology.hpp"
#include "iet/combinatorics.hpp"
#include "iet/errors.hpp"
#include "iet/fixtures.hpp"
#include "iet/induction.hpp"
#include "iet/jets.hpp"
#include "iet/linearizer.hpp"
#include "iet/suspension.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

using namespace iet;
using namespace iet::cli;

namespace {

struct Options {
    std::string iem, fixture, seed_pi, pi, phi, out, json_out;
    long steps = 0;
    int depth = 60;
    int periods = 200;
    int order = 1;
    int gamma_order = 0;
    int jet_order = 3;
    int rotate = 0;
    int samples = 0;
    bool zorich = false;
    bool check_return = false;
    bool list = false;
    double burn_in = 0.5;
    unsigned seed = 1;
    std::size_t max_vertices = 100000;
    long n_max = 100000;
    int per_decade = 20;
    int max_levels = 400;
    std::string omega = "golden";
    double eps = 0.01;
    int grid = 1024;
    int max_iter = 200;
    double ball = 0.05;
    std::vector<double> amp;
    double iem_eps = 1e-3;
    int iem_grid = 2048;
    int iem_max_iter = 50;
    int flat = 8;
    double c0 = 0, c1 = 0;
    int cheb_degree = CohomologyOptions{}.cheb_degree;
    std::string name;
};

// ----- inputs

const std::string kNoSource = "one of --iem or --fixture is required";

void require_known_fixture(const std::string& name) {
    for (const auto& n : fixture_names())
        if (n == name) return;
    std::string all;
    for (const auto& n : fixture_names()) all += " " + n;
    throw ParseError("unknown fixture '" + name + "'; available:" + all);
}

// A path of arrows together with what is known about where it came from.
struct PathData {
    ArrowRuns runs;
    std::size_t period = 0;
    std::optional<std::vector<BigFloat>> lengths;  // level-0 lengths when a map is behind the path
};

template <class S>
RauzyPath induce(const StandardIEM<S>& t, long max_steps, const std::function<bool(const RauzyPath&)>& enough) {
    RauzyPath path{t.pi(), {}};
    StandardIEM<S> cur = t;
    const S total0 = t.total();
    for (long n = 0; n < max_steps; ++n) {
        if (enough && n % 16 == 0 && enough(path)) break;
        auto step = rv_step(cur);
        check_precision(step.next, total0);
        path.types.push_back(step.arrow.type);
        cur = std::move(step.next);
    }
    return path;
}

std::vector<BigFloat> lengths_of(const IemInput& in) { return in.real.lengths(); }

RauzyPath induce_input(const IemInput& in, long max_steps, const std::function<bool(const RauzyPath&)>& enough = {}) {
    if (in.numeric == Numeric::Rational) return induce(in.exact, max_steps, enough);
    return induce(in.real, max_steps, enough);
}

// Periodic fixture named on the command line or exported with its loop.
std::optional<PeriodicFixture> periodic_source(const Options& o) {
    if (!o.fixture.empty()) {
        require_known_fixture(o.fixture);
        if (!is_periodic_fixture(o.fixture)) return std::nullopt;
        return periodic_fixture(o.fixture);
    }
    if (o.iem.empty()) throw ParseError(kNoSource);
    auto in = read_iem(o.iem);
    if (in.loop.empty()) return std::nullopt;
    return make_periodic_fixture(parse_loop(in.real.pi(), in.loop));
}

StandardIEM<BigFloat> map_source(const Options& o) {
    if (!o.fixture.empty()) {
        require_known_fixture(o.fixture);
        if (!is_periodic_fixture(o.fixture)) throw DomainError("fixture '" + o.fixture + "' has no lengths");
        return periodic_fixture(o.fixture).iem;
    }
    if (o.iem.empty()) throw ParseError(kNoSource);
    return read_iem(o.iem).real;
}

// ----- rauzy

int cmd_rauzy(const Options& o) {
    auto p = read_pi(read_json(o.seed_pi), "");
    p.require_irreducible();
    auto dg = build_rauzy_class(p, o.max_vertices);
    std::ostringstream os;
    os << "vertices: " << dg.vertices().size() << "\n";
    os << "arrows: " << dg.arrows().size() << "\n";
    Json j = {{"vertices", Json::array()}, {"arrows", Json::array()}};
    for (std::size_t v = 0; v < dg.vertices().size(); ++v) {
        const auto& q = dg.vertices()[v];
        auto gs = genus_and_marked_points(q);
        os << "v" << v << "  " << q.rows_string() << "  g=" << gs.g << " s=" << gs.s << "\n";
        j["vertices"].push_back({{"index", v}, {"pi", write_pi(q)}, {"g", gs.g}, {"s", gs.s}});
    }
    for (std::size_t k = 0; k < dg.arrows().size(); ++k) {
        const auto& e = dg.arrows()[k];
        const auto& q = dg.vertices()[e.source];
        os << "v" << e.source << " -" << to_string(e.type) << "-> v" << e.target << "  winner " << q.name(e.winner)
           << " loser " << q.name(e.loser) << "\n";
        j["arrows"].push_back({{"source", e.source},
                               {"target", e.target},
                               {"type", to_string(e.type)},
                               {"winner", q.name(e.winner)},
                               {"loser", q.name(e.loser)}});
    }
    std::cout << os.str();
    if (!o.json_out.empty()) write_json(o.json_out, j);
    return 0;
}

// ----- induct

template <class S>
Json trace_json(const StandardIEM<S>& t, long steps, bool zorich) {
    auto tr = iterate_rv(t, static_cast<int>(steps));
    Json levels = Json::array(), arrows = Json::array();
    for (int n = 0; n <= tr.depth(); ++n) {
        const auto& l = tr.levels[n];
        Json len = Json::array();
        for (const auto& x : l.lengths()) len.push_back(scalar_traits<S>::str(x));
        levels.push_back({{"n", n}, {"pi", write_pi(l.pi())}, {"lengths", len}});
    }
    for (int n = 0; n < tr.depth(); ++n) {
        const auto& a = tr.arrows[n];
        arrows.push_back({{"n", n},
                          {"type", to_string(a.type)},
                          {"winner", a.source.name(a.winner)},
                          {"loser", a.source.name(a.loser)}});
    }
    Json j = {{"numeric", scalar_traits<S>::exact ? "rational" : "bigfloat"},
              {"depth", tr.depth()},
              {"levels", levels},
              {"arrows", arrows}};
    if (zorich) {
        Json z = Json::array();
        for (const auto& s : zorich_accelerate(tr.arrows))
            z.push_back({{"type", to_string(s.type)},
                         {"winner", tr.levels.front().pi().name(s.winner)},
                         {"begin", s.begin},
                         {"length", s.length}});
        j["zorich"] = z;
    }
    return j;
}

int cmd_induct(const Options& o) {
    const long steps = o.steps > 0 ? o.steps : 20;
    Json j;
    if (!o.iem.empty()) {
        auto in = read_iem(o.iem);
        j = in.numeric == Numeric::Rational ? trace_json(in.exact, steps, o.zorich) : trace_json(in.real, steps, o.zorich);
    } else {
        j = trace_json(map_source(o), steps, o.zorich);
    }
    write_json(o.out, j);
    return 0;
}

// ----- lyapunov

PathData path_for_lyapunov(const Options& o) {
    PathData pd;
    if (!o.fixture.empty()) {
        require_known_fixture(o.fixture);
        if (!is_periodic_fixture(o.fixture)) {
            pd.runs = liouville_runs(o.steps > 0 ? static_cast<int>(o.steps) : 10);
            return pd;
        }
        auto fx = periodic_fixture(o.fixture);
        pd.period = fx.loop.types.size();
        pd.runs = ArrowRuns::from_path(repeat_loop(fx.loop, o.periods), pd.period);
        pd.lengths = fx.lengths;
        return pd;
    }
    if (o.iem.empty()) throw ParseError(kNoSource);
    auto in = read_iem(o.iem);
    auto path = induce_input(in, o.steps > 0 ? o.steps : 4000);
    pd.runs = ArrowRuns::from_path(path);
    pd.lengths = lengths_of(in);
    return pd;
}

int cmd_lyapunov(const Options& o) {
    auto pd = path_for_lyapunov(o);
    LyapunovOptions lo;
    lo.period = pd.period;
    lo.burn_in = o.burn_in;
    lo.seed = o.seed;
    auto s = lyapunov_and_stable_space(pd.runs, lo);
    const int d = pd.runs.start.size();
    std::ostringstream os;
    os << "step";
    for (int i = 1; i <= d; ++i) os << ",exponent_" << i;
    os << ",residual\n";
    for (const auto& r : s.history) {
        os << r.step;
        for (int i = 0; i < d; ++i) os << ',' << (i < static_cast<int>(r.exponents.size()) ? num(r.exponents[i]) : "nan");
        os << ',' << num(r.residual) << "\n";
    }
    write_text(o.out, os.str());
    Json summary = {{"exponents", Json::array()}, {"per_period", Json::array()}, {"stable_dim", s.stable_dim},
                    {"omega_residual", num(s.omega_residual)}, {"sum_residual", num(s.sum_residual)}};
    for (double x : s.exponents) summary["exponents"].push_back(num(x));
    for (double x : s.per_period) summary["per_period"].push_back(num(x));
    if (!o.json_out.empty()) write_json(o.json_out, summary);
    else std::cerr << summary.dump() << "\n";
    return 0;
}

// ----- roth

// Enough complete factors for `rows` rows: condition (a) reads one factor ahead and condition (c)
// spends the last third of the factors on backward frames.
int factors_needed(int rows) { return rows + (rows + 1) / 2 + 2; }

PathData path_for_roth(const Options& o, int need) {
    PathData pd;
    if (!o.fixture.empty()) {
        require_known_fixture(o.fixture);
        if (!is_periodic_fixture(o.fixture)) {
            for (int blocks = 4; blocks <= 24; ++blocks) {
                pd.runs = liouville_runs(blocks);
                if (static_cast<int>(factor_minimal_complete(pd.runs).factors.size()) >= need) return pd;
            }
            return pd;
        }
        auto fx = periodic_fixture(o.fixture);
        pd.period = fx.loop.types.size();
        pd.lengths = fx.lengths;
        for (int periods = 8;; periods *= 2) {
            auto path = repeat_loop(fx.loop, periods);
            if (path_completeness(path).complete_count >= need || periods > (1 << 20)) {
                pd.runs = ArrowRuns::from_path(path, pd.period);
                return pd;
            }
        }
    }
    if (o.iem.empty()) throw ParseError(kNoSource);
    auto in = read_iem(o.iem);
    auto path = induce_input(in, o.steps > 0 ? o.steps : 1000000,
                             [need](const RauzyPath& p) { return path_completeness(p).complete_count >= need; });
    pd.runs = ArrowRuns::from_path(path);
    pd.lengths = lengths_of(in);
    return pd;
}

int cmd_roth(const Options& o) {
    if (o.depth < 1) throw ParseError("--depth must be positive");
    const int need = factors_needed(o.depth);
    auto pd = path_for_roth(o, need);
    auto f = factor_minimal_complete(pd.runs);
    if (static_cast<int>(f.factors.size()) < o.depth + 1)
        throw DomainError("only " + std::to_string(f.factors.size()) + " complete factors available for depth " +
                          std::to_string(o.depth));
    LyapunovOptions lo;
    lo.period = pd.period;
    lo.seed = o.seed;
    auto split = lyapunov_and_stable_space(pd.runs, lo);
    auto a = roth_condition_a(f);
    std::optional<RothB> b;
    if (pd.lengths) b = roth_condition_b(f, *pd.lengths);
    auto c = roth_condition_c(f, split.stable_dim, o.seed);
    auto rows = roth_report(f, a, b ? &*b : nullptr, split.stable_dim, &c);
    std::ostringstream os;
    os << "n,norm_Z,norm_B,ratio_a,theta_hat,stable_dim,sigma_c_restrict,sigma_c_quotient\n";
    for (int i = 0; i < o.depth; ++i) {
        const auto& r = rows[i];
        os << r.n << ',' << r.norm_z.get_str() << ',' << r.norm_b.get_str() << ',' << num(r.ratio_a) << ','
           << num(r.theta_hat) << ',' << r.stable_dim << ',' << num(r.sigma_c_restrict) << ','
           << num(r.sigma_c_quotient) << "\n";
    }
    write_text(o.out, os.str());
    auto pos = positivity_window_check(f);
    Json summary = {{"factors", f.factors.size()},
                    {"condition_a", {{"tail_max", num(a.tail_max)}, {"verdict", a.verdict}}},
                    {"condition_c", {{"restrict_tail", num(c.restrict_tail)}, {"quotient_tail", num(c.quotient_tail)}}},
                    {"positivity", {{"ok", pos.ok}, {"window", pos.window}}},
                    {"stable_dim", split.stable_dim}};
    if (b) summary["condition_b"] = {{"theta_fit", num(b->theta_fit)}};
    if (!o.json_out.empty()) write_json(o.json_out, summary);
    else std::cerr << summary.dump() << "\n";
    return 0;
}

// ----- boundary

int cmd_boundary(const Options& o) {
    PermutationPair p;
    std::optional<IemInput> in;
    if (!o.iem.empty()) {
        in = read_iem(o.iem);
        p = in->real.pi();
    } else if (!o.pi.empty()) {
        p = read_pi(read_json(o.pi), "");
    } else {
        throw ParseError("one of --pi or --iem is required");
    }
    p.require_irreducible();
    auto sg = sigma_and_cycles(p);
    auto gs = genus_and_marked_points(p);
    Json cycles = Json::array();
    for (const auto& c : sg.cycles) {
        Json cj = Json::array();
        for (const auto& h : c) cj.push_back(half_point_name(p, h));
        cycles.push_back(cj);
    }
    auto bm = boundary_matrix(p);
    Json mat = Json::array();
    for (int i = 0; i < bm.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < bm.cols(); ++k) row.push_back(bm(i, k).get_str());
        mat.push_back(row);
    }
    Json j = {{"pi", write_pi(p)}, {"d", p.size()}, {"g", gs.g}, {"s", gs.s}, {"rank_omega", omega_int(p).rank()},
              {"cycles", cycles}, {"boundary_matrix", mat}};
    if (in && o.gamma_order >= 1) {
        if (in->numeric != Numeric::Rational) throw DomainError("--order needs rational lengths");
        auto sp = gamma_spaces_exact(p, in->exact.lengths(), o.gamma_order);
        j["gamma"] = {{"r", o.gamma_order},
                      {"dim_gamma_r", sp.gamma_r.size()},
                      {"dim_im_omega", sp.gamma_partial.size()},
                      {"dim_gamma_boundary_r", sp.gamma_partial_r.size()}};
    }
    write_json(o.out, j);
    return 0;
}

// ----- cohomology and the conjugacy system

struct SolverSetup {
    StandardIEM<BigFloat> map;
    OseledetsSplitting split;
    std::unique_ptr<CohomologySolver> solver;
};

SolverSetup make_solver(const Options& o) {
    SolverSetup s;
    CohomologyOptions opt;
    opt.cheb_degree = o.cheb_degree;
    if (auto fx = periodic_source(o)) {
        s.map = fx->iem;
        s.split = fixture_splitting(*fx, o.periods);
        s.solver = std::make_unique<CohomologySolver>(build_tower(s.map), s.split, opt);
        return s;
    }
    s.map = map_source(o);
    auto tower = build_tower(s.map);
    RauzyPath path{s.map.pi(), {}};
    for (const auto& a : tower.arrows) path.types.push_back(a.type);
    LyapunovOptions lo;
    lo.seed = o.seed;
    s.split = lyapunov_and_stable_space(ArrowRuns::from_path(path), lo);
    s.solver = std::make_unique<CohomologySolver>(std::move(tower), s.split, opt);
    return s;
}

// {"phi": {"A": ["c0", "c1", ...], ...}}: per-letter polynomial in x - left(a).
SmoothPiecewise read_phi(const std::string& path, const LevelGeom& g) {
    auto j = read_json(path);
    const auto& pj = member(j, "phi", "");
    std::vector<std::vector<double>> coef(g.size());
    for (Letter a = 0; a < g.size(); ++a) {
        const std::string ptr = "/phi/" + g.pi.name(a);
        const auto& cj = member(pj, g.pi.name(a), "/phi");
        if (!cj.is_array()) schema_error(ptr, "expected an array of coefficients");
        for (std::size_t k = 0; k < cj.size(); ++k)
            coef[a].push_back(to_double(read_rational(cj[k], ptr + "/" + std::to_string(k))));
    }
    return {g.size(), 16, [g, coef](Letter a, double x, int k) {
                const auto& c = coef[a];
                const double s = x - g.left[a];
                double v = 0;
                for (int j = static_cast<int>(c.size()) - 1; j >= k; --j) {
                    double f = c[j];
                    for (int i = 0; i < k; ++i) f *= j - i;
                    v = v * s + f;
                }
                return v;
            }};
}

int cmd_cohomology(const Options& o) {
    if (o.phi.empty()) throw ParseError("--phi is required");
    auto s = make_solver(o);
    const auto& base = s.solver->tower().base();
    auto phi = read_phi(o.phi, base);
    auto sol = o.order == 1 ? s.solver->solve(phi) : s.solver->solve_higher(phi, o.order);
    Json chi = Json::array(), bd = Json::array();
    for (int i = 0; i < sol.chi.size(); ++i) chi.push_back(num(sol.chi[i]));
    for (double x : s.solver->boundary(phi)) bd.push_back(num(x));
    Json j = {{"order", sol.order},
              {"genus", s.solver->genus()},
              {"boundary", bd},
              {"chi", chi},
              {"residual_sup", num(sol.residual_sup)},
              {"levels_used", sol.levels_used},
              {"converged", sol.converged}};
    if (sol.nu) {
        Json nu = Json::array();
        for (double x : *sol.nu) nu.push_back(num(x));
        j["nu"] = nu;
    } else {
        j["nu"] = nullptr;
    }
    if (o.samples > 0) {
        Json pts = Json::array();
        for (int k = 0; k < o.samples; ++k) {
            const double x = base.origin + (base.end - base.origin) * (k + 0.5) / o.samples;
            pts.push_back({num(x), num(sol.psi(x))});
        }
        j["psi"] = pts;
    }
    write_json(o.out, j);
    return sol.converged ? 0 : 2;
}

int cmd_linearize_circle(const Options& o) {
    const double omega = o.omega == "golden" ? golden_mean() : to_double(parse_rational(o.omega));
    LinearizeOptions lo;
    lo.grid = o.grid;
    lo.max_iter = o.max_iter;
    lo.ball = o.ball;
    auto r = linearize_circle(sine_family(omega, o.eps), lo);
    if (!o.out.empty()) write_text(o.out, r.csv());
    Json w = Json::array();
    for (const auto& s : r.warnings) w.push_back(s);
    Json j = {{"omega", num(omega)},
              {"eps", num(o.eps)},
              {"grid", o.grid},
              {"converged", r.converged},
              {"flagged", r.flagged()},
              {"inside_ball", r.inside_ball},
              {"diophantine", r.diophantine},
              {"iterations", r.iterations},
              {"t", num(r.t)},
              {"residual_sup", num(r.residual_sup)},
              {"grid_residual", num(r.grid_residual)},
              {"warnings", w},
              {"note", r.note}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_linearize_iem(const Options& o) {
    auto s = make_solver(o);
    GlueSolver gs(*s.solver);
    const int d = s.map.size();
    std::vector<double> amp = o.amp;
    if (amp.empty()) amp.assign(d, 1.0);
    if (static_cast<int>(amp.size()) != d) throw ParseError("--amp needs one value per letter");
    std::vector<UnitDiffeo> f;
    for (double a : amp) f.push_back({"bump", a * o.iem_eps, o.flat, 1});
    auto tt = GeneralizedIEM::from_unit_diffeos(s.map.pi(), s.map.lengths(), s.map.lengths(), f, 6);
    auto fp = glue_fixed_point(tt, gs, o.c0, o.c1, o.iem_grid, o.iem_max_iter);
    auto res = iem_glue_residuals(tt, fp.h, gs);
    Json rows = Json::array();
    for (std::size_t i = 0; i < res.values.size(); ++i)
        rows.push_back({{"label", res.labels[i]}, {"value", num(res.values[i])}, {"redundant", static_cast<bool>(res.redundant[i])}});
    Json j = {{"eps", num(o.iem_eps)},
              {"fixed_point", {{"iterations", fp.iterations}, {"increment", num(fp.increment)}, {"converged", fp.converged}}},
              {"r", res.r},
              {"d_star", res.d_star},
              {"independent", res.independent},
              {"one_cycle", res.one_cycle},
              {"sup", num(res.sup())},
              {"residuals", rows}};
    write_json(o.out, j);
    return 0;
}

// ----- invariant

GeneralizedIEM read_generalized(const Options& o, const StandardIEM<BigFloat>& base, int order) {
    if (o.iem.empty()) return GeneralizedIEM::from_standard(base, order);
    auto j = read_json(o.iem);
    if (!j.contains("branches")) return GeneralizedIEM::from_standard(base, order);
    const auto& p = base.pi();
    const auto& bj = j["branches"];
    std::vector<UnitDiffeo> f(p.size());
    for (Letter a = 0; a < p.size(); ++a) {
        if (!bj.contains(p.name(a))) continue;
        const std::string ptr = "/branches/" + p.name(a);
        const auto& e = bj[p.name(a)];
        auto& u = f[a];
        u.kind = member(e, "kind", ptr).get<std::string>();
        if (u.kind != "identity" && u.kind != "bump" && u.kind != "mobius" && u.kind != "sine")
            schema_error(ptr + "/kind", "expected identity, bump, mobius or sine");
        if (e.contains("eps")) u.eps = to_double(read_rational(e["eps"], ptr + "/eps"));
        if (e.contains("a")) u.a = to_double(read_rational(e["a"], ptr + "/a"));
        if (e.contains("flat")) {
            if (!e["flat"].is_number_integer()) schema_error(ptr + "/flat", "expected an integer");
            u.flat = e["flat"].get<int>();
        }
    }
    std::vector<BigFloat> bottom = base.lengths();
    if (j.contains("bottom_lengths")) {
        const auto& lj = j["bottom_lengths"];
        if (!lj.is_array() || static_cast<int>(lj.size()) != p.size())
            schema_error("/bottom_lengths", "one length per letter required");
        for (Letter a = 0; a < p.size(); ++a) bottom[a] = read_bigfloat(lj[a], "/bottom_lengths/" + std::to_string(a));
    }
    return GeneralizedIEM::from_unit_diffeos(p, base.lengths(), bottom, f, order);
}

int cmd_invariant(const Options& o) {
    auto base = map_source(o);
    const int r = std::max(1, o.jet_order);
    auto t = read_generalized(o, base, r + 1);
    auto fam = invariant(t, r, o.rotate);
    Json cycles = Json::array();
    for (const auto& c : fam.cycles) {
        Json hp = Json::array(), jet = Json::array();
        for (const auto& h : c.cycle) hp.push_back(half_point_name(t.pi(), h));
        for (int k = 1; k <= c.jet.order(); ++k) jet.push_back(format_decimal(c.jet[k], 30));
        cycles.push_back({{"cycle", hp}, {"jet", jet}, {"normal_form", c.normal.str()}});
    }
    Json slope = Json::array();
    for (const auto& x : boundary_log_slope(t)) slope.push_back(format_decimal(x, 30));
    write_json(o.out, {{"order", fam.order}, {"trivial", fam.trivial}, {"cycles", cycles}, {"boundary_log_slope", slope}});
    return 0;
}

// ----- suspend

template <class S>
Json suspension_json(const StandardIEM<S>& t, bool check_return) {
    auto surf = suspend(t);
    Json poly = Json::array(), tau = Json::array(), marked = Json::array();
    for (const auto& v : surf.polygon()) poly.push_back({scalar_traits<S>::str(v.x), scalar_traits<S>::str(v.y)});
    for (long x : surf.tau()) tau.push_back(x);
    for (const auto& m : surf.marked_points()) {
        Json c = Json::array();
        for (const auto& h : m.cycle) c.push_back(half_point_name(t.pi(), h));
        marked.push_back({{"kappa", m.kappa}, {"cycle", c}});
    }
    Json j = {{"genus", surf.genus()},
              {"tau", tau},
              {"polygon", poly},
              {"marked_points", marked},
              {"area", scalar_traits<S>::str(surf.area())},
              {"pairing_area", scalar_traits<S>::str(surf.pairing_area())}};
    if (check_return) {
        auto rm = vertical_return_map(surf, base_segment(surf));
        Json len = Json::array();
        for (const auto& x : rm.map.lengths()) len.push_back(scalar_traits<S>::str(x));
        bool same = rm.map.pi() == t.pi() && rm.map.lengths() == t.lengths();
        j["return_map"] = {{"pi", write_pi(rm.map.pi())}, {"lengths", len}, {"equals_original", same}};
    }
    return j;
}

int cmd_suspend(const Options& o) {
    Json j;
    if (!o.iem.empty()) {
        auto in = read_iem(o.iem);
        j = in.numeric == Numeric::Rational ? suspension_json(in.exact, o.check_return)
                                            : suspension_json(in.real, o.check_return);
    } else {
        j = suspension_json(map_source(o), o.check_return);
    }
    write_json(o.out, j);
    return 0;
}

// ----- appendixc

int cmd_appendixc(const Options& o) {
    auto t = map_source(o);
    AppendixCOptions ao;
    ao.n_max = o.n_max;
    ao.per_decade = o.per_decade;
    ao.max_levels = o.max_levels;
    auto diag = appendix_c_diagnostics(t, ao);
    write_text(o.out, diag.csv());
    std::vector<double> n, sep, cov;
    for (const auto& r : diag.orbit) {
        n.push_back(static_cast<double>(r.n));
        sep.push_back(r.separation);
        cov.push_back(r.covering);
    }
    const double x_min = std::sqrt(static_cast<double>(o.n_max));
    Json j = {{"separation_slope", num(loglog_slope(n, sep, x_min))},
              {"covering_slope", num(loglog_slope(n, cov, x_min))},
              {"truncated", diag.truncated},
              {"note", diag.note}};
    if (!o.json_out.empty()) write_json(o.json_out, j);
    else std::cerr << j.dump() << "\n";
    return 0;
}

// ----- fixture

int cmd_fixture(const Options& o) {
    if (o.list || o.name.empty()) {
        for (const auto& n : fixture_names()) std::cout << n << (is_periodic_fixture(n) ? "" : "  (path only)") << "\n";
        return 0;
    }
    require_known_fixture(o.name);
    if (!is_periodic_fixture(o.name)) throw DomainError("fixture '" + o.name + "' is a path without lengths");
    auto fx = periodic_fixture(o.name);
    Json len = Json::array();
    for (const auto& x : fx.lengths) len.push_back(write_bigfloat(x));
    write_json(o.out, {{"name", o.name},
                       {"numeric", "bigfloat"},
                       {"pi", write_pi(fx.loop.start)},
                       {"lengths", len},
                       {"loop", loop_string(fx.loop)}});
    return 0;
}

void add_source(CLI::App* c, Options& o) {
    c->add_option("--iem", o.iem, "map as JSON");
    c->add_option("--fixture", o.fixture, "built-in fixture name");
}

}  // namespace

int main(int argc, char** argv) {
    set_precision_bits(default_precision_bits());
    Options o;
    CLI::App app{"Rauzy-Veech renormalization of interval exchange maps.\nIET_PRECISION_BITS sets the mantissa (default 256).", "iet"};
    app.require_subcommand(1);

    auto* rauzy = app.add_subcommand("rauzy", "Rauzy class of a permutation pair");
    rauzy->add_option("--seed-pi", o.seed_pi, "permutation pair JSON")->required();
    rauzy->add_option("--max-vertices", o.max_vertices, "vertex budget");
    rauzy->add_option("--json", o.json_out, "also write the diagram as JSON");

    auto* induct = app.add_subcommand("induct", "Rauzy-Veech induction trace as JSON");
    add_source(induct, o);
    induct->add_option("--steps", o.steps, "number of steps (20)");
    induct->add_flag("--zorich", o.zorich, "add the Zorich acceleration");
    induct->add_option("--out", o.out, "output JSON (stdout)");

    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponents; CSV step,exponent_1..d,residual");
    add_source(lyap, o);
    lyap->add_option("--steps", o.steps, "induction steps for --iem, blocks for the liouville fixture");
    lyap->add_option("--periods", o.periods, "loop repetitions for periodic fixtures (200)");
    lyap->add_option("--burn-in", o.burn_in, "discarded fraction");
    lyap->add_option("--seed", o.seed, "random frame seed");
    lyap->add_option("--out", o.out, "output CSV (stdout)");
    lyap->add_option("--summary", o.json_out, "summary JSON (stderr)");

    auto* roth = app.add_subcommand("roth", "Roth-type diagnostics per complete factor as CSV");
    add_source(roth, o);
    roth->add_option("--depth", o.depth, "rows (60)");
    roth->add_option("--steps", o.steps, "induction step budget for --iem");
    roth->add_option("--seed", o.seed, "random frame seed");
    roth->add_option("--out", o.out, "output CSV (stdout)");
    roth->add_option("--summary", o.json_out, "summary JSON (stderr)");

    auto* bnd = app.add_subcommand("boundary", "sigma-cycles, genus and boundary operator");
    bnd->add_option("--pi", o.pi, "permutation pair JSON");
    bnd->add_option("--iem", o.iem, "map JSON; with --order also the exact Gamma dimensions");
    bnd->add_option("--order", o.gamma_order, "r for the Gamma(r) dimensions");
    bnd->add_option("--out", o.out, "output JSON (stdout)");

    auto* coh = app.add_subcommand("cohomology", "solve phi = chi + psi o T - psi");
    add_source(coh, o);
    coh->add_option("--phi", o.phi, "per-letter polynomial coefficients JSON")->required();
    coh->add_option("--order", o.order, "smoothness order r (1)");
    coh->add_option("--samples", o.samples, "psi samples in the output");
    coh->add_option("--cheb-degree", o.cheb_degree, "Chebyshev degree of the level tables");
    coh->add_option("--periods", o.periods, "loop repetitions for the splitting");
    coh->add_option("--seed", o.seed, "random frame seed");
    coh->add_option("--out", o.out, "output JSON (stdout)");

    auto* inv = app.add_subcommand("invariant", "jet invariant along the sigma-cycles");
    add_source(inv, o);
    inv->add_option("--order", o.jet_order, "jet order r (3)");
    inv->add_option("--rotate", o.rotate, "base point shift along each cycle");
    inv->add_option("--out", o.out, "output JSON (stdout)");

    auto* susp = app.add_subcommand("suspend", "canonical suspension");
    add_source(susp, o);
    susp->add_flag("--return", o.check_return, "also compute the vertical first return to the base");
    susp->add_option("--out", o.out, "output JSON (stdout)");

    auto* appc = app.add_subcommand("appendixc", "orbit separation, covering and entrance-time diagnostics");
    add_source(appc, o);
    appc->add_option("--N", o.n_max, "largest orbit length");
    appc->add_option("--per-decade", o.per_decade, "samples per decade");
    appc->add_option("--max-levels", o.max_levels, "induction levels");
    appc->add_option("--out", o.out, "output CSV (stdout)");
    appc->add_option("--summary", o.json_out, "slope summary JSON (stderr)");

    auto* lin = app.add_subcommand("linearize", "circle linearizer or conjugacy residuals of a deformed map");
    lin->require_subcommand(1);
    auto* circ = lin->add_subcommand("circle", "x + omega + eps sin 2 pi x");
    circ->add_option("--omega", o.omega, "rotation number: golden, p/q or decimal");
    circ->add_option("--eps", o.eps, "perturbation amplitude");
    circ->add_option("--grid", o.grid, "grid size, a power of two");
    circ->add_option("--max-iter", o.max_iter, "iteration cap");
    circ->add_option("--ball", o.ball, "perturbation norm threshold");
    circ->add_option("--out", o.out, "iteration history CSV");
    auto* liem = lin->add_subcommand("iem", "residuals of the conjugacy system at a bump deformation");
    add_source(liem, o);
    liem->add_option("--eps", o.iem_eps, "deformation parameter (1e-3)");
    liem->add_option("--amp", o.amp, "per-letter bump amplitudes")->delimiter(',');
    liem->add_option("--flat", o.flat, "bump flatness at the endpoints");
    liem->add_option("--c0", o.c0, "free parameter c0");
    liem->add_option("--c1", o.c1, "free parameter c1");
    liem->add_option("--grid", o.iem_grid, "cells of the conjugacy (2048)");
    liem->add_option("--max-iter", o.iem_max_iter, "fixed point iteration cap (50)");
    liem->add_option("--cheb-degree", o.cheb_degree, "Chebyshev degree of the cohomology tables");
    liem->add_option("--periods", o.periods, "loop repetitions for the splitting");
    liem->add_option("--out", o.out, "output JSON (stdout)");

    auto* fix = app.add_subcommand("fixture", "list or export built-in fixtures");
    fix->add_option("--name", o.name, "fixture to export");
    fix->add_flag("--list", o.list, "list names");
    fix->add_option("--out", o.out, "output JSON (stdout)");

    if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
        std::cerr << "iet: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "iet: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*rauzy) return cmd_rauzy(o);
        if (*induct) return cmd_induct(o);
        if (*lyap) return cmd_lyapunov(o);
        if (*roth) return cmd_roth(o);
        if (*bnd) return cmd_boundary(o);
        if (*coh) return cmd_cohomology(o);
        if (*inv) return cmd_invariant(o);
        if (*susp) return cmd_suspend(o);
        if (*appc) return cmd_appendixc(o);
        if (*circ) return cmd_linearize_circle(o);
        if (*liem) return cmd_linearize_iem(o);
        if (*fix) return cmd_fixture(o);
    } catch (const ParseError& e) {
        std::cerr << "iet: parse error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "iet: domain error: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionError& e) {
        std::cerr << "iet: precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "iet: internal error: " << e.what() << "\n";
        return 4;
    }
    std::cerr << app.help();
    return 1;
}
