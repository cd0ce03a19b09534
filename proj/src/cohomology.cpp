#include "iet/cohomology.hpp"

#include "iet/errors.hpp"
#include "iet/induction.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace iet {

namespace {

struct Cheb {
    double a = 0, b = 1;
    std::vector<double> c;

    double operator()(double x) const {
        const double t = (2 * x - a - b) / (b - a), t2 = 2 * t;
        double b1 = 0, b2 = 0;
        for (std::size_t k = c.size() - 1; k >= 1; --k) {
            double b0 = t2 * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }
};

class ChebFitter {
public:
    explicit ChebFitter(int degree) : n_(degree + 1), cos_(static_cast<std::size_t>(n_) * n_), nodes_(n_) {
        for (int j = 0; j < n_; ++j) {
            nodes_[j] = std::cos(M_PI * (j + 0.5) / n_);
            for (int k = 0; k < n_; ++k) cos_[k * n_ + j] = std::cos(M_PI * k * (j + 0.5) / n_);
        }
    }

    template <class F>
    Cheb fit(F f, double a, double b) const {
        std::vector<double> v(n_);
        for (int j = 0; j < n_; ++j) v[j] = f(0.5 * (a + b) + 0.5 * (b - a) * nodes_[j]);
        Cheb ch{a, b, std::vector<double>(n_)};
        for (int k = 0; k < n_; ++k) {
            double s = 0;
            for (int j = 0; j < n_; ++j) s += cos_[k * n_ + j] * v[j];
            ch.c[k] = 2.0 * s / n_;
        }
        ch.c[0] *= 0.5;
        return ch;
    }

private:
    int n_;
    std::vector<double> cos_, nodes_;
};

double falling(int k, int i) {
    double f = 1;
    for (int j = 0; j < i; ++j) f *= k - j;
    return f;
}

double factorial(int n) { return falling(n, n); }

double binom(int n, int k) { return falling(n, k) / factorial(k); }

// D^i of the per-interval polynomial of letter a at local variable t.
double gamma_value(const Eigen::VectorXd& coeffs, int r, Letter a, double t, int i) {
    double s = 0;
    for (int k = r - 1; k >= i; --k) s = s * t + coeffs[a * r + k] * falling(k, i);
    return s;
}

}  // namespace

SmoothPiecewise SmoothPiecewise::derivative() const {
    if (smoothness < 1) throw DomainError("derivative of a function of class C^0");
    auto f = eval;
    return {d, smoothness - 1, [f](Letter a, double x, int k) { return f(a, x, k + 1); }};
}

SmoothPiecewise SmoothPiecewise::operator-(const SmoothPiecewise& o) const {
    auto f = eval, g = o.eval;
    return {d, std::min(smoothness, o.smoothness), [f, g](Letter a, double x, int k) { return f(a, x, k) - g(a, x, k); }};
}

SmoothPiecewise SmoothPiecewise::operator+(const SmoothPiecewise& o) const {
    auto f = eval, g = o.eval;
    return {d, std::min(smoothness, o.smoothness), [f, g](Letter a, double x, int k) { return f(a, x, k) + g(a, x, k); }};
}

SmoothPiecewise SmoothPiecewise::operator*(double c) const {
    auto f = eval;
    return {d, smoothness, [f, c](Letter a, double x, int k) { return c * f(a, x, k); }};
}

Letter LevelGeom::locate(double x) const {
    for (int i = 0; i + 1 < size(); ++i)
        if (x < right[pi.top(i)]) return pi.top(i);
    return pi.top(size() - 1);
}

LevelGeom to_geom(const StandardIEM<BigFloat>& t) {
    LevelGeom g;
    g.pi = t.pi();
    const int d = t.size();
    g.left.resize(d);
    g.right.resize(d);
    g.shift.resize(d);
    for (Letter a = 0; a < d; ++a) {
        g.left[a] = to_double(t.top_left(a));
        g.right[a] = to_double(t.top_right(a));
        g.shift[a] = to_double(t.translation(a));
    }
    g.origin = to_double(t.origin());
    g.end = to_double(t.end());
    return g;
}

Tower build_tower(const StandardIEM<BigFloat>& t, double rel_size, int max_depth) {
    Tower tw;
    tw.levels.push_back(to_geom(t));
    tw.b.push_back(IntMatrix::identity(t.size()));
    const BigFloat total0 = t.total(), target = total0 * BigFloat(rel_size);
    StandardIEM<BigFloat> cur = t;
    while (tw.depth() < max_depth && !(cur.total() < target)) {
        auto step = rv_step(cur);
        check_precision(step.next, total0);
        tw.b.push_back(cocycle_matrix(step.arrow) * tw.b.back());
        tw.arrows.push_back(step.arrow);
        cur = std::move(step.next);
        tw.levels.push_back(to_geom(cur));
    }
    return tw;
}

SmoothPiecewise coboundary_of(const LevelGeom& g, std::function<double(double, int)> f, int smoothness) {
    auto shift = g.shift;
    return {g.size(), smoothness, [f, shift](Letter a, double x, int k) { return f(x + shift[a], k) - f(x, k); }};
}

SmoothPiecewise from_gamma(const LevelGeom& g, const Eigen::VectorXd& coeffs, int r) {
    if (coeffs.size() != r * g.size()) throw DomainError("from_gamma: expected r * d coordinates");
    auto left = g.left;
    return {g.size(), 1 << 20, [coeffs, r, left](Letter a, double x, int k) {
                return k >= r ? 0.0 : gamma_value(coeffs, r, a, x - left[a], k);
            }};
}

struct CohomologySolver::Tables {
    std::vector<std::vector<std::shared_ptr<const Cheb>>> g;  // [level][letter] = S(0, level) phi
    std::vector<Eigen::VectorXd> offset;                      // subtracted from g[level], if present
    double at(int l, Letter a, double y) const { return (*g[l][a])(y) - (offset.empty() ? 0.0 : offset[l][a]); }
};

CohomologySolver::CohomologySolver(Tower tower, const OseledetsSplitting& split, CohomologyOptions opt)
    : tower_(std::move(tower)), opt_(opt) {
    const auto& pi = tower_.base().pi;
    const int d = pi.size();
    g_ = genus_and_marked_points(pi).g;
    if (split.stable_dim != g_)
        throw DomainError("unsupported: dim Gamma_s = " + std::to_string(split.stable_dim) + " but g = " +
                          std::to_string(g_) + " (not of restricted Roth type)");
    if (tower_.depth() < 1) throw DomainError("cohomology solver needs at least one induction step");
    gs_.resize(d, g_);
    for (int j = 0; j < g_; ++j) gs_.col(j) = split.stable_basis[j];
    gs_ = Eigen::HouseholderQR<Eigen::MatrixXd>(gs_).householderQ() * Eigen::MatrixXd::Identity(d, g_);
    // Gamma_u: orthogonal complement of Gamma_s inside Im Omega
    Eigen::MatrixXd om = to_eigen(omega_int(pi));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(om, Eigen::ComputeFullU);
    Eigen::MatrixXd im = svd.matrixU().leftCols(2 * g_);
    Eigen::MatrixXd rest = im - gs_ * (gs_.transpose() * im);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(rest, Eigen::ComputeThinU);
    gu_ = svd2.matrixU().leftCols(g_);
}

std::vector<double> CohomologySolver::boundary(const SmoothPiecewise& phi, int derivative) const {
    const auto& b = tower_.base();
    auto sg = sigma_and_cycles(b.pi);
    std::vector<double> out(sg.s(), 0.0);
    for (int c = 0; c < sg.s(); ++c)
        for (const auto& h : sg.cycles[c]) {
            double v = phi.eval(h.letter, h.side == Side::L ? b.left[h.letter] : b.right[h.letter], derivative);
            out[c] += epsilon(h) * v;
        }
    return out;
}

std::shared_ptr<const CohomologySolver::Tables> CohomologySolver::build_tables(const SmoothPiecewise& phi) const {
    static thread_local std::unique_ptr<ChebFitter> fitter;
    static thread_local int fitter_degree = -1;
    if (fitter_degree != opt_.cheb_degree) {
        fitter = std::make_unique<ChebFitter>(opt_.cheb_degree);
        fitter_degree = opt_.cheb_degree;
    }
    auto t = std::make_shared<Tables>();
    const auto& b = tower_.base();
    const int d = b.size();
    t->g.emplace_back(d);
    for (Letter a = 0; a < d; ++a)
        t->g[0][a] = std::make_shared<Cheb>(
            fitter->fit([&](double x) { return phi(a, x); }, b.left[a], b.right[a]));
    for (int l = 0; l < tower_.depth(); ++l) {
        const auto& lo = tower_.levels[l];
        const auto& hi = tower_.levels[l + 1];
        const Letter los = tower_.arrows[l].loser;
        std::vector<std::shared_ptr<const Cheb>> next = t->g[l];
        const double mid = 0.5 * (hi.left[los] + hi.right[los]);
        const Letter b1 = lo.locate(mid);
        const double s1 = lo.shift[b1];
        const Letter b2 = lo.locate(mid + s1);
        const Cheb& c1 = *t->g[l][b1];
        const Cheb& c2 = *t->g[l][b2];
        next[los] = std::make_shared<Cheb>(
            fitter->fit([&](double y) { return c1(y) + c2(y + s1); }, hi.left[los], hi.right[los]));
        t->g.push_back(std::move(next));
    }
    return t;
}

Eigen::VectorXd CohomologySolver::level_means(const Tables& t) const {
    const auto& top = tower_.levels.back();
    const int d = top.size();
    Eigen::VectorXd v(d);
    for (Letter a = 0; a < d; ++a) {
        const Cheb& c = *t.g.back()[a];
        double integral = boost::math::quadrature::gauss<double, 20>::integrate(c, top.left[a], top.right[a]);
        v[a] = integral / (top.right[a] - top.left[a]);
    }
    return v;
}

std::function<double(double)> CohomologySolver::descent(std::shared_ptr<const Tables> t) const {
    const Tower* tw = &tower_;
    return [t, tw](double x) {
        double psi = 0;
        for (int l = 0; l < tw->depth(); ++l) {
            if (x < tw->levels[l + 1].end) continue;
            const auto& lo = tw->levels[l];
            const auto& arrow = tw->arrows[l];
            const Letter los = arrow.loser;
            if (arrow.type == ArrowType::Top) {
                const double y = x - lo.shift[los];
                psi += t->at(l, los, y);
                x = y;
            } else {
                psi -= t->at(l, los, x);
                x += lo.shift[los];
            }
        }
        return psi;
    };
}

double CohomologySolver::residual(const SmoothPiecewise& phi, const Eigen::VectorXd& chi, int r,
                                  const std::function<double(double)>& psi, int derivative) const {
    const auto& b = tower_.base();
    const int n = opt_.grid;
    const double h = (b.end - b.origin) / n;
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        const double x = b.origin + (i + 0.5) * h;
        const Letter a = b.locate(x);
        const double v = phi.eval(a, x, derivative) - gamma_value(chi, r, a, x - b.left[a], derivative) -
                         (psi(x + b.shift[a]) - psi(x));
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

std::optional<std::vector<double>> CohomologySolver::read_nu(const SmoothPiecewise& phi,
                                                             const CohomologySolution& s) const {
    const auto& b = tower_.base();
    auto sg = sigma_and_cycles(b.pi);
    double scale = 1;
    for (Letter a = 0; a < b.size(); ++a)
        scale = std::max({scale, std::abs(phi(a, b.left[a])), std::abs(phi(a, b.right[a]))});
    for (Letter a = 0; a < b.size(); ++a)
        if (std::abs(phi(a, b.left[a])) > opt_.nu_tolerance * scale ||
            std::abs(phi(a, b.right[a])) > opt_.nu_tolerance * scale)
            return std::nullopt;
    if (s.chi.norm() > 1e-8 * scale) return std::nullopt;
    std::vector<double> nu(sg.s());
    for (int c = 0; c < sg.s(); ++c) {
        double lo = 1e300, hi = -1e300;
        for (const auto& h : sg.cycles[c]) {
            double v = s.psi(h.side == Side::L ? b.left[h.letter] : b.right[h.letter]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        // psi jumps along the cycle: phi is not a coboundary of a continuous function
        if (hi - lo > opt_.nu_tolerance * (1 + std::abs(hi))) return std::nullopt;
        nu[c] = 0.5 * (lo + hi);
    }
    const double ref = nu[sg.cycle_of[HalfPoint{b.pi.t_alpha(), Side::L}.index()]];
    for (auto& v : nu) v -= ref;
    return nu;
}

CohomologySolution CohomologySolver::solve(const SmoothPiecewise& phi) const {
    const auto& b = tower_.base();
    const int d = b.size();
    if (phi.d != d) throw DomainError("phi has the wrong number of intervals");
    {
        auto bd = boundary(phi);
        double scale = 1, worst = 0;
        for (Letter a = 0; a < d; ++a) scale = std::max({scale, std::abs(phi(a, b.left[a])), std::abs(phi(a, b.right[a]))});
        for (double v : bd) worst = std::max(worst, std::abs(v));
        if (worst > opt_.boundary_tolerance * scale)
            throw DomainError("not in kernel of boundary: |d phi| = " + std::to_string(worst));
    }
    CohomologySolution sol;
    sol.order = 1;
    sol.levels_used = tower_.depth();

    // fit the level-N means by B(N) on Gamma_u + Gamma_s and keep the Gamma_u part; a second pass
    // on phi - chi refines chi below the rounding of the first
    Eigen::MatrixXd basis(d, 2 * g_);
    basis << gu_, gs_;
    const Eigen::MatrixXd m = to_eigen(tower_.b.back()) * basis;
    auto fit = [&](const SmoothPiecewise& f, std::shared_ptr<const Tables>& t) {
        t = build_tables(f);
        Eigen::VectorXd c = m.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(level_means(*t));
        return Eigen::VectorXd(gu_ * c.head(g_));
    };
    std::shared_ptr<const Tables> t;
    Eigen::VectorXd chi1 = fit(phi, t);
    Eigen::VectorXd chi2 = fit(phi - from_gamma(b, chi1, 1), t);
    // chi2 enters through B(0, l) chi2 per level, not through the level-0 values
    auto t2 = std::make_shared<Tables>(*t);
    for (int l = 0; l <= tower_.depth(); ++l) t2->offset.push_back(to_eigen(tower_.b[l]) * chi2);
    sol.chi = chi1 + chi2;
    sol.psi_derivs.push_back(descent(t2));
    sol.residual_sup = residual(phi, sol.chi, 1, sol.psi_derivs[0]);
    sol.residual_by_order = {sol.residual_sup};

    double c1 = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const double x = b.origin + (i + 0.5) * (b.end - b.origin) / n;
        const Letter a = b.locate(x);
        double s = std::abs(phi(a, x));
        if (phi.smoothness >= 1) s += std::abs(phi.eval(a, x, 1));
        c1 = std::max(c1, s);
    }
    sol.converged = sol.residual_sup < opt_.tolerance * (1 + c1);
    sol.nu = read_nu(phi, sol);
    return sol;
}

std::function<double(double)> CohomologySolver::primitive(const std::function<double(double)>& f) const {
    const auto& b = tower_.base();
    const int m = opt_.primitive_cells;
    const double o = b.origin, h = (b.end - b.origin) / m;
    auto fv = std::make_shared<std::vector<double>>(m + 1);
    auto pv = std::make_shared<std::vector<double>>(m + 1, 0.0);
    for (int i = 0; i <= m; ++i) (*fv)[i] = f(o + i * h);
    for (int i = 0; i < m; ++i) {
        const double mid = f(o + (i + 0.5) * h);
        (*pv)[i + 1] = (*pv)[i] + h / 6 * ((*fv)[i] + 4 * mid + (*fv)[i + 1]);
    }
    // cubic Hermite from values and derivatives at the nodes
    return [fv, pv, o, h, m](double x) {
        double u = (x - o) / h;
        int i = std::clamp(static_cast<int>(std::floor(u)), 0, m - 1);
        const double s = u - i, s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * (*pv)[i] + (s3 - 2 * s2 + s) * h * (*fv)[i] + (-2 * s3 + 3 * s2) * (*pv)[i + 1] +
               (s3 - s2) * h * (*fv)[i + 1];
    };
}

void CohomologySolver::prepare_stable_potentials() const {
    if (!stable_prims_.empty()) return;
    const auto& b = tower_.base();
    for (int s = 0; s < g_; ++s) {
        auto sol = solve(from_gamma(b, gs_.col(s), 1));
        stable_prims_.push_back({sol.psi_derivs[0]});
    }
}

Eigen::MatrixXd CohomologySolver::gamma_t_basis(int r) const {
    if (r < 1) throw DomainError("order r must be at least 1");
    prepare_stable_potentials();
    const auto& b = tower_.base();
    const int d = b.size();
    for (auto& prims : stable_prims_)
        while (static_cast<int>(prims.size()) < r) prims.push_back(primitive(prims.back()));
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(r * d, g_ + r - 1);
    for (int s = 0; s < g_; ++s)
        for (Letter a = 0; a < d; ++a) {
            const double l = b.left[a], bl = b.left[a] + b.shift[a];
            for (int j = 0; j + 1 < r; ++j)
                e(a * r + j, s) = (stable_prims_[s][r - 1 - j](bl) - stable_prims_[s][r - 1 - j](l)) / factorial(j);
            e(a * r + r - 1, s) = gs_(a, s) / factorial(r - 1);
        }
    for (int k = 1; k < r; ++k)
        for (Letter a = 0; a < d; ++a) {
            const double l = b.left[a] - b.origin, bl = l + b.shift[a];
            for (int j = 0; j < k; ++j)
                e(a * r + j, g_ + k - 1) = binom(k, j) * (std::pow(bl, k - j) - std::pow(l, k - j));
        }
    return e;
}

int CohomologySolver::gamma_t_dim(int r) const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gamma_t_basis(r));
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-9 * sv[0]) ++rank;
    return rank;
}

double CohomologySolver::potential(int r, int j, double x, int i) const {
    if (j < g_) return stable_prims_[j][r - 1 - i](x);
    const int k = j - g_ + 1;
    if (i > k) return 0;
    return falling(k, i) * std::pow(x - tower_.base().origin, k - i);
}

CohomologySolution CohomologySolver::solve_rec(const SmoothPiecewise& phi, int r) const {
    if (r == 1) return solve(phi);
    const auto& b = tower_.base();
    const int d = b.size();
    if (phi.smoothness < r) throw DomainError("phi must be of class C^r for order r");
    for (int i = 0; i < r; ++i) {
        auto bd = boundary(phi, i);
        for (double v : bd)
            if (std::abs(v) > opt_.boundary_tolerance * (1 + std::abs(v)))
                throw DomainError("not in kernel of boundary at derivative order " + std::to_string(i));
    }
    auto sub = solve_rec(phi.derivative(), r - 1);
    auto big_psi = primitive(sub.psi_derivs[0]);

    Eigen::VectorXd chi(r * d);
    for (Letter a = 0; a < d; ++a) {
        for (int k = 1; k < r; ++k) chi[a * r + k] = sub.chi[a * (r - 1) + k - 1] / k;
        chi[a * r] = phi(a, b.left[a]) - big_psi(b.left[a] + b.shift[a]) + big_psi(b.left[a]);
    }
    Eigen::MatrixXd e = gamma_t_basis(r);
    Eigen::VectorXd alpha = e.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(chi);

    CohomologySolution sol;
    sol.order = r;
    sol.levels_used = tower_.depth();
    sol.chi = chi - e * alpha;
    for (int i = 0; i < r; ++i) {
        std::function<double(double)> base = i == 0 ? big_psi : sub.psi_derivs[i - 1];
        sol.psi_derivs.push_back([this, base, alpha, r, i](double x) {
            double v = base(x);
            for (int j = 0; j < alpha.size(); ++j) v += alpha[j] * potential(r, j, x, i);
            return v;
        });
    }
    for (int i = 0; i < r; ++i) sol.residual_by_order.push_back(residual(phi, sol.chi, r, sol.psi_derivs[i], i));
    sol.residual_sup = *std::max_element(sol.residual_by_order.begin(), sol.residual_by_order.end());
    double c1 = 0;
    for (Letter a = 0; a < d; ++a)
        for (int i = 0; i <= 1; ++i)
            c1 = std::max(c1, std::abs(phi.eval(a, 0.5 * (b.left[a] + b.right[a]), i)));
    sol.converged = sol.residual_sup < opt_.tolerance * (1 + c1);
    return sol;
}

CohomologySolution CohomologySolver::solve_higher(const SmoothPiecewise& phi, int r) const {
    if (r < 1) throw DomainError("order r must be at least 1");
    return solve_rec(phi, r);
}

std::vector<double> CohomologySolver::special_sum_sup(const SmoothPiecewise& phi, int samples) const {
    auto t = build_tables(phi);
    std::vector<double> out;
    for (int l = 0; l <= tower_.depth(); ++l) {
        const auto& lv = tower_.levels[l];
        double m = 0;
        for (Letter a = 0; a < lv.size(); ++a)
            for (int k = 0; k < samples; ++k) {
                const double x = lv.left[a] + (k + 0.5) / samples * (lv.right[a] - lv.left[a]);
                m = std::max(m, std::abs((*t->g[l][a])(x)));
            }
        out.push_back(m);
    }
    return out;
}

}  // namespace iet
