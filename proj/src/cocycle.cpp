#include "iet/cocycle.hpp"

#include "iet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace iet {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Thin QR with nonnegative diagonal.
void qr(const Eigen::MatrixXd& a, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
    Eigen::HouseholderQR<Eigen::MatrixXd> h(a);
    q = h.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    r = h.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (int i = 0; i < r.rows(); ++i)
        if (r(i, i) < 0) {
            r.row(i) *= -1;
            q.col(i) *= -1;
        }
}

Eigen::MatrixXd random_frame(int d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = g(rng);
    Eigen::MatrixXd q, r;
    qr(a, q, r);
    return q;
}

double op_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

// Product kept as (matrix of unit norm, log scale).
struct ScaledProduct {
    Eigen::MatrixXd m;
    double log_scale = 0;
    void normalize() {
        double n = op_norm(m);
        if (n > 0) {
            m /= n;
            log_scale += std::log(n);
        }
    }
    double log_norm() const { return log_scale + std::log(op_norm(m)); }
};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Step {
    IntMatrix m;
    Integer begin, end;
};

std::vector<Step> run_steps(const ArrowRuns& runs) {
    std::vector<Step> out;
    PermutationPair p = runs.start;
    Integer pos = 0;
    for (const auto& [t, k] : runs.runs) {
        auto r = run_matrix(p, t, k);
        out.push_back({std::move(r.matrix), pos, pos + k});
        pos += k;
        p = r.end;
    }
    return out;
}

}  // namespace

Eigen::MatrixXd to_eigen(const IntMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) e(i, j) = to_double(m(i, j));
    return e;
}

double log_norm(const IntMatrix& m) { return log_abs(m.norm()); }

ArrowRuns ArrowRuns::from_path(const RauzyPath& path, std::size_t period) {
    ArrowRuns r{path.start, {}};
    for (std::size_t i = 0; i < path.types.size(); ++i) {
        bool cut = period > 0 && i % period == 0;
        if (!r.runs.empty() && r.runs.back().first == path.types[i] && !cut)
            r.runs.back().second += 1;
        else
            r.runs.emplace_back(path.types[i], Integer(1));
    }
    return r;
}

Integer ArrowRuns::length() const {
    Integer n = 0;
    for (const auto& run : runs) n += run.second;
    return n;
}

RauzyPath ArrowRuns::flatten() const {
    RauzyPath p{start, {}};
    for (const auto& [t, k] : runs) {
        if (k > Integer(1L << 30)) throw DomainError("run too long to flatten");
        p.types.insert(p.types.end(), k.get_ui(), t);
    }
    return p;
}

Factorization factor_minimal_complete(const ArrowRuns& runs) {
    const int d = runs.start.size();
    Factorization f;
    f.d = d;
    PermutationPair p = runs.start;
    std::set<Letter> seen;
    IntMatrix z = IntMatrix::identity(d), b = IntMatrix::identity(d);
    Integer pos = 0, begin = 0;
    for (const auto& [t, k0] : runs.runs) {
        Integer k = k0;
        while (k > 0) {
            Letter w = p.winner(t);
            Integer take = k;
            bool completes = !seen.count(w) && static_cast<int>(seen.size()) == d - 1;
            if (completes) take = 1;
            auto r = run_matrix(p, t, take);
            z = r.matrix * z;
            p = r.end;
            pos += take;
            k -= take;
            seen.insert(w);
            if (completes) {
                b = z * b;
                f.factors.push_back({begin, pos, z, b});
                z = IntMatrix::identity(d);
                seen.clear();
                begin = pos;
            }
        }
    }
    for (Letter a = 0; a < d; ++a)
        if (!seen.count(a)) f.missing_in_tail.push_back(a);
    f.tail_length = pos - begin;
    return f;
}

Factorization factor_minimal_complete(const RauzyPath& path) {
    return factor_minimal_complete(ArrowRuns::from_path(path));
}

RothA roth_condition_a(const Factorization& f, double threshold) {
    RothA r;
    const std::size_t n = f.factors.size();
    if (n < 3) {
        r.verdict = "insufficient data";
        return r;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        r.ratio.push_back(log_norm(f.factors[i + 1].z) / log_norm(f.factors[i].b));
    r.sufficient = true;
    const std::size_t half = r.ratio.size() / 2;
    r.tail_max = *std::max_element(r.ratio.begin() + half, r.ratio.end());
    bool decreasing = r.ratio.back() <= r.ratio[half];
    r.consistent = r.tail_max < threshold && decreasing;
    r.verdict = r.consistent ? "consistent with (a)" : "not consistent with (a)";
    return r;
}

RothB roth_condition_b(const Factorization& f, const std::vector<BigFloat>& lengths) {
    const int d = f.d;
    if (static_cast<int>(lengths.size()) != d) throw DomainError("roth (b): one length per letter required");
    // orthonormal basis of the complement of lambda
    std::vector<std::vector<BigFloat>> basis;
    {
        std::vector<std::vector<BigFloat>> vs;
        BigFloat nl(0);
        for (const auto& l : lengths) nl += l * l;
        std::vector<BigFloat> u(d);
        for (int a = 0; a < d; ++a) u[a] = lengths[a] / sqrt(nl);
        vs.push_back(u);
        for (int e = 0; e < d && static_cast<int>(vs.size()) < d; ++e) {
            std::vector<BigFloat> v(d, BigFloat(0));
            v[e] = 1;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : vs) {
                    BigFloat dot(0);
                    for (int a = 0; a < d; ++a) dot += q[a] * v[a];
                    for (int a = 0; a < d; ++a) v[a] -= dot * q[a];
                }
            BigFloat nv(0);
            for (const auto& x : v) nv += x * x;
            if (nv < BigFloat("1e-6")) continue;
            for (auto& x : v) x /= sqrt(nv);
            vs.push_back(v);
        }
        basis.assign(vs.begin() + 1, vs.end());
    }
    RothB r;
    std::vector<double> xs;
    for (const auto& fac : f.factors) {
        BigFloat best(0);
        for (const auto& q : basis) {
            BigFloat col(0);
            for (int i = 0; i < d; ++i) {
                BigFloat s(0);
                for (int j = 0; j < d; ++j) s += BigFloat(fac.b(i, j).get_str()) * q[j];
                col += abs(s);
            }
            best = std::max(best, col);
        }
        double lr = to_double(BigFloat(log(best)));
        double lb = log_norm(fac.b);
        r.log_norm_restricted.push_back(lr);
        r.theta.push_back(1 - lr / lb);
        xs.push_back(lb);
    }
    const std::size_t half = xs.size() / 2;
    if (xs.size() - half >= 2) {
        std::vector<double> x(xs.begin() + half, xs.end()), y(r.log_norm_restricted.begin() + half,
                                                             r.log_norm_restricted.end());
        r.theta_fit = 1 - slope(x, y);
    } else {
        r.theta_fit = r.theta.empty() ? kNaN : r.theta.back();
    }
    return r;
}

OseledetsSplitting lyapunov_and_stable_space(const ArrowRuns& runs, const LyapunovOptions& opt) {
    const int d = runs.start.size();
    auto steps = run_steps(runs);
    if (steps.empty()) throw DomainError("lyapunov: empty path");
    OseledetsSplitting out;

    // averaging window [w0, w1) in arrows
    const Integer total = runs.length();
    Integer w0, w1 = total;
    long periods = 0;
    if (opt.period > 0) {
        Integer per(static_cast<unsigned long>(opt.period));
        Integer nper = total / per;
        Integer p0 = Integer(static_cast<long>(std::floor(to_double(nper) * opt.burn_in)));
        if (p0 >= nper) p0 = nper - 1;
        w0 = p0 * per;
        w1 = nper * per;
        periods = Integer(nper - p0).get_si();
    } else {
        w0 = Integer(static_cast<long>(std::floor(to_double(total) * opt.burn_in)));
    }

    Eigen::MatrixXd q = random_frame(d, opt.seed), qn, r;
    std::vector<double> cum(d, 0.0), win(d, 0.0);
    IntMatrix b = IntMatrix::identity(d);
    double lb0 = 0, lb1 = 0;
    bool started = false;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        if (!started && steps[s].begin >= w0) {
            lb0 = log_norm(b);
            started = true;
        }
        qr(to_eigen(steps[s].m) * q, qn, r);
        q = qn;
        b = steps[s].m * b;
        bool in_window = steps[s].begin >= w0 && steps[s].end <= w1;
        for (int i = 0; i < d; ++i) {
            double l = std::log(r(i, i));
            cum[i] += l;
            if (in_window) win[i] += l;
        }
        if (steps[s].end == w1) lb1 = log_norm(b);
        double lb = log_norm(b);
        OseledetsSplitting::Row row{s + 1, {}, 0};
        double sum = 0;
        for (int i = 0; i < d; ++i) {
            row.exponents.push_back(lb > 0 ? cum[i] / lb : kNaN);
            sum += cum[i];
        }
        row.residual = lb > 0 ? std::abs(sum) / lb : kNaN;
        out.history.push_back(std::move(row));
    }
    if (!started || lb1 <= lb0) throw DomainError("lyapunov: averaging window is empty");
    double sum = 0;
    for (int i = 0; i < d; ++i) {
        out.exponents.push_back(win[i] / (lb1 - lb0));
        if (periods > 0) out.per_period.push_back(win[i] / static_cast<double>(periods));
        sum += win[i];
    }
    out.sum_residual = std::abs(sum) / (lb1 - lb0);
    std::sort(out.exponents.rbegin(), out.exponents.rend());
    std::sort(out.per_period.rbegin(), out.per_period.rend());
    out.stable_dim = static_cast<int>(
        std::count_if(out.exponents.begin(), out.exponents.end(), [&](double e) { return e < -opt.tau_min; }));

    // stable space: the most expanded directions of B^-1, by backward iteration
    Eigen::MatrixXd p = random_frame(d, opt.seed + 7919);
    for (std::size_t s = steps.size(); s-- > 0;) {
        qr(to_eigen(steps[s].m.inverse_unimodular()) * p, qn, r);
        p = qn;
    }
    for (int i = 0; i < out.stable_dim; ++i) out.stable_basis.push_back(p.col(i));

    Eigen::MatrixXd om = to_eigen(omega_int(runs.start));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> cq(om);
    cq.setThreshold(1e-9);
    Eigen::MatrixXd img = (cq.householderQ() * Eigen::MatrixXd::Identity(d, d)).leftCols(cq.rank());
    for (const auto& v : out.stable_basis)
        out.omega_residual = std::max(out.omega_residual, (v - img * (img.transpose() * v)).norm());
    return out;
}

RothC roth_condition_c(const Factorization& f, int stable_dim, unsigned seed) {
    const int d = f.d;
    const int ds = stable_dim, dq = d - stable_dim;
    const std::size_t n = f.factors.size();
    RothC out;
    out.restrict_ratio.assign(n, kNaN);
    out.quotient_ratio.assign(n, kNaN);
    if (n < 3) return out;
    // backward frames: Z_j^-1 Q_j = Q_{j-1} R_j
    std::vector<Eigen::MatrixXd> rs(n + 1);
    Eigen::MatrixXd q = random_frame(d, seed), qn, r;
    for (std::size_t j = n; j >= 1; --j) {
        qr(to_eigen(f.factors[j - 1].z.inverse_unimodular()) * q, qn, r);
        rs[j] = r;
        q = qn;
    }
    const std::size_t last = n - n / 3;
    double rmax_tail = 0, qmax_tail = 0;
    for (std::size_t l = 1; l <= last; ++l) {
        const double lb = log_norm(f.factors[l - 1].b);
        double worst_s = 0, worst_q = 0;
        ScaledProduct s{Eigen::MatrixXd::Identity(ds, ds)}, qi{Eigen::MatrixXd::Identity(dq, dq)};
        for (std::size_t k = l; k-- > 0;) {
            const Eigen::MatrixXd& rk = rs[k + 1];
            if (ds > 0) {
                Eigen::MatrixXd r11 = rk.topLeftCorner(ds, ds);
                s.m = s.m * r11.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(ds, ds));
                s.normalize();
                worst_s = std::max(worst_s, s.log_norm());
            }
            if (dq > 0) {
                qi.m = rk.bottomRightCorner(dq, dq) * qi.m;
                qi.normalize();
                worst_q = std::max(worst_q, qi.log_norm());
            }
        }
        out.restrict_ratio[l - 1] = lb > 0 ? worst_s / lb : 0;
        out.quotient_ratio[l - 1] = lb > 0 ? worst_q / lb : 0;
        ++out.sampled;
        if (l > last / 2) {
            rmax_tail = std::max(rmax_tail, out.restrict_ratio[l - 1]);
            qmax_tail = std::max(qmax_tail, out.quotient_ratio[l - 1]);
        }
    }
    out.restrict_tail = rmax_tail;
    out.quotient_tail = qmax_tail;
    return out;
}

PositivityReport positivity_window_check(const Factorization& f) {
    PositivityReport rep;
    rep.window = static_cast<std::size_t>(std::max(1, 2 * f.d - 3));
    if (f.factors.size() < rep.window) return rep;
    rep.sufficient = true;
    for (std::size_t i = 0; i + rep.window <= f.factors.size(); ++i) {
        IntMatrix m = f.factors[i].z;
        for (std::size_t j = 1; j < rep.window; ++j) m = f.factors[i + j].z * m;
        if (!m.all_positive()) {
            rep.offending = i;
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

std::vector<RothRow> roth_report(const Factorization& f, const RothA& a, const RothB* b, int stable_dim,
                                 const RothC* c) {
    std::vector<RothRow> rows;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
        RothRow r{i + 1, f.factors[i].z.norm(), f.factors[i].b.norm(), kNaN, kNaN, stable_dim, kNaN, kNaN};
        if (i < a.ratio.size()) r.ratio_a = a.ratio[i];
        if (b && i < b->theta.size()) r.theta_hat = b->theta[i];
        if (c && i < c->restrict_ratio.size()) {
            r.sigma_c_restrict = c->restrict_ratio[i];
            r.sigma_c_quotient = c->quotient_ratio[i];
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace iet
