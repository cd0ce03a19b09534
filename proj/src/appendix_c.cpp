#include "iet/errors.hpp"
#include "iet/induction.hpp"
#include "iet/intmat.hpp"
#include "iet/suspension.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace iet {

namespace {

std::vector<long> sample_points(long n_max, int per_decade) {
    std::set<long> out;
    for (int k = 0;; ++k) {
        long n = static_cast<long>(std::ceil(std::pow(10.0, static_cast<double>(k) / per_decade)));
        if (n > n_max) break;
        out.insert(n);
    }
    out.insert(n_max);
    return {out.begin(), out.end()};
}

// Covering radius of a growing point set in [lo, hi]: half the largest interior gap or a full end gap.
class Coverage {
public:
    Coverage(double lo, double hi) : lo_(lo), hi_(hi) {
        pts_.insert(lo);
        pts_.insert(hi);
        eff_.insert(hi - lo);
    }
    void insert(double x) {
        auto [it, fresh] = pts_.insert(x);
        if (!fresh) return;
        double a = *std::prev(it), b = *std::next(it);
        eff_.erase(eff_.find(effective(a, b)));
        eff_.insert(effective(a, x));
        eff_.insert(effective(x, b));
    }
    double radius() const { return *eff_.rbegin(); }

private:
    double effective(double a, double b) const { return (a == lo_ || b == hi_) ? b - a : (b - a) / 2; }
    double lo_, hi_;
    std::set<double> pts_;
    std::multiset<double> eff_;
};

std::string num(double x) {
    if (!std::isfinite(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

std::string AppendixCDiagnostics::csv() const {
    std::ostringstream os;
    os << "N_or_n,separation,covering,entrance_ratio,balance_ratio\n";
    for (const auto& r : orbit) os << r.n << ',' << num(r.separation) << ',' << num(r.covering) << ",,\n";
    for (const auto& r : levels) os << r.n << ",,," << num(r.entrance_ratio) << ',' << num(r.balance_ratio) << '\n';
    return os.str();
}

AppendixCDiagnostics appendix_c_diagnostics(const StandardIEM<BigFloat>& t, const AppendixCOptions& opt) {
    if (opt.n_max < 1) throw DomainError("N must be positive");
    const int d = t.size();
    const BigFloat total = t.total();
    const BigFloat tol = total * pow2(-static_cast<long>(precision_bits()) + 32);
    AppendixCDiagnostics out;

    // orbits of the bottom singularities against the top singularities
    {
        auto samples = sample_points(opt.n_max, opt.per_decade);
        std::vector<BigFloat> p;
        for (int i = 1; i < d; ++i) p.push_back(t.u_bot(i));
        Coverage cov(to_double(t.origin()), to_double(t.end()));
        double sep = std::numeric_limits<double>::infinity();
        std::size_t next = 0;
        for (long l = 0; l < opt.n_max && !out.truncated; ++l) {
            for (auto& x : p) {
                for (int j = 1; j < d; ++j) {
                    BigFloat gap = abs(x - t.u_top(j));
                    if (gap <= tol) {
                        out.truncated = true;
                        out.note = "connection: T^" + std::to_string(l) + "(u^b) meets u^t_" + std::to_string(j);
                    }
                    sep = std::min(sep, to_double(gap));
                }
                cov.insert(to_double(x));
                x = t(x);
            }
            if (out.truncated) break;
            if (next < samples.size() && samples[next] == l + 1) {
                out.orbit.push_back({l + 1, sep, cov.radius()});
                ++next;
            }
        }
    }

    // entrance times through the induction: a point outside I^(n+1) lies in the part cut off, which one
    // branch of T^(n) (winner side forward, loser side backward) sends inside
    std::vector<BigFloat> fwd, bwd;
    std::vector<Integer> ef(d - 1, 0), eb(d - 1, 0);
    for (int i = 1; i < d; ++i) {
        fwd.push_back(t.u_bot(i));
        bwd.push_back(t.u_top(i));
    }
    IntMatrix b = IntMatrix::identity(d);
    StandardIEM<BigFloat> cur = t;
    // length errors grow like |B(n)|^2 ulp, so stop well before half the mantissa
    const BigFloat floor = total * pow2(-static_cast<long>(precision_bits()) / 4);
    for (int n = 0; n < opt.max_levels; ++n) {
        StepResult<BigFloat> step;
        try {
            step = rv_step(cur);
        } catch (const ConnectionError& e) {
            out.truncated = true;
            out.note = std::string("connection at level ") + std::to_string(n) + ": " + e.what();
            break;
        }
        const BigFloat& cut = step.next.end();
        auto rows = b.row_sums();
        const Letter at = cur.pi().alpha_t(), ab = cur.pi().alpha_b();
        for (int i = 0; i < d - 1; ++i) {
            if (!(fwd[i] < cut)) {
                if (cur.locate_top(fwd[i]) != at) throw InvariantError("forward entrance left the cut strip");
                ef[i] += rows[at];
                fwd[i] += cur.translation(at);
            }
            if (!(bwd[i] < cut)) {
                if (cur.locate_bottom(bwd[i]) != ab) throw InvariantError("backward entrance left the cut strip");
                eb[i] += rows[ab];
                bwd[i] -= cur.translation(ab);
            }
        }
        for (int j = 0; j < d; ++j) b(step.arrow.loser, j) += b(step.arrow.winner, j);
        cur = std::move(step.next);

        LevelRow row;
        row.n = n + 1;
        row.log_norm = log_abs(b.norm());
        Integer r_min = ef[0];
        for (int i = 0; i < d - 1; ++i) {
            if (ef[i] < r_min) r_min = ef[i];
            if (eb[i] < r_min) r_min = eb[i];
        }
        row.log_entrance = r_min > 0 ? log_abs(r_min) : -std::numeric_limits<double>::infinity();
        row.entrance_ratio = r_min > 0 && row.log_norm > 0 ? row.log_entrance / row.log_norm
                                                            : std::numeric_limits<double>::quiet_NaN();
        row.balance_ratio = to_double(cur.max_length() / cur.min_length());
        out.levels.push_back(row);
        if (cur.total() < floor) break;
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double x_min) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < x_min || !(x[i] > 0) || !(y[i] > 0)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 2) throw DomainError("loglog_slope needs at least two points");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace iet
