#include "iet/linearizer.hpp"

#include "iet/combinatorics.hpp"
#include "iet/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace iet {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> forward(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    std::copy(v.begin(), v.end(), in);
    fftw_execute(p);
    std::vector<std::complex<double>> c(n / 2 + 1);
    for (int q = 0; q <= n / 2; ++q) c[q] = {out[q][0] / n, out[q][1] / n};
    fftw_destroy_plan(p);
    fftw_free(in);
    fftw_free(out);
    return c;
}

std::vector<double> backward(const std::vector<std::complex<double>>& c, int n) {
    fftw_complex* in = fftw_alloc_complex(n / 2 + 1);
    double* out = fftw_alloc_real(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE);
    for (int q = 0; q <= n / 2; ++q) {
        std::complex<double> v = q < static_cast<int>(c.size()) ? c[q] : 0.0;
        in[q][0] = v.real();
        in[q][1] = v.imag();
    }
    fftw_execute(p);
    std::vector<double> v(out, out + n);
    fftw_destroy_plan(p);
    fftw_free(in);
    fftw_free(out);
    return v;
}

// Chebyshev series on [lo, hi] from n + 1 Lobatto samples (type-I DCT), with derivatives up to 3.
class ChebSeries {
public:
    ChebSeries(const std::function<double(double)>& f, double lo, double hi, int n) : lo_(lo), hi_(hi) {
        double* buf = fftw_alloc_real(n + 1);
        fftw_plan p = fftw_plan_r2r_1d(n + 1, buf, buf, FFTW_REDFT00, FFTW_ESTIMATE);
        for (int j = 0; j <= n; ++j) {
            const double t = std::cos(std::numbers::pi * j / n);
            buf[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
        }
        fftw_execute(p);
        std::vector<double> a(buf, buf + n + 1);
        fftw_destroy_plan(p);
        fftw_free(buf);
        for (auto& v : a) v /= n;
        a.front() /= 2;
        a.back() /= 2;
        c_.push_back(a);
        for (int k = 1; k <= 3; ++k) c_.push_back(differentiate(c_.back()));
    }

    double operator()(double x, int k = 0) const {
        if (k > 3) throw DomainError("Chebyshev table holds derivatives up to order 3");
        const double t = (2 * x - lo_ - hi_) / (hi_ - lo_);
        const auto& a = c_[k];
        double b1 = 0, b2 = 0;
        for (int j = static_cast<int>(a.size()) - 1; j >= 1; --j) {
            const double b0 = 2 * t * b1 - b2 + a[j];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + a[0];
    }

private:
    std::vector<double> differentiate(const std::vector<double>& a) const {
        const int n = static_cast<int>(a.size()) - 1;
        std::vector<double> b(a.size(), 0.0);
        if (n >= 1) b[n - 1] = 2 * n * a[n];
        for (int k = n - 1; k >= 1; --k) b[k - 1] = (k + 1 < n ? b[k + 1] : 0.0) + 2 * k * a[k];
        b[0] /= 2;
        const double scale = 2 / (hi_ - lo_);
        for (auto& v : b) v *= scale;
        return b;
    }

    double lo_, hi_;
    std::vector<std::vector<double>> c_;
};

// Cubic Hermite on the cell [x0, x0 + dx] at relative position s.
double hermite(double f0, double d0, double f1, double d1, double dx, double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * dx * d0 + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * dx * d1;
}

// Exact integral of the Hermite cubic over one cell.
double hermite_integral(double f0, double d0, double f1, double d1, double dx) {
    return dx / 2 * (f0 + f1) + dx * dx / 12 * (d0 - d1);
}

// Samples with derivatives on G + 1 equispaced nodes of [lo, hi].
struct HermiteTable {
    double lo = 0, hi = 1;
    int g = 0;
    std::vector<double> f, df;
    double operator()(double x) const {
        const double dx = (hi - lo) / g;
        double u = (x - lo) / dx;
        int i = std::clamp(static_cast<int>(std::floor(u)), 0, g - 1);
        return hermite(f[i], df[i], f[i + 1], df[i + 1], dx, u - i);
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------- grid functions

GridFunction::GridFunction(std::vector<double> samples) : v_(std::move(samples)) {
    if (!power_of_two(size())) throw DomainError("grid size must be a power of two, got " + std::to_string(size()));
}

GridFunction GridFunction::sample(int g, const std::function<double(double)>& f) {
    std::vector<double> v(g);
    for (int k = 0; k < g; ++k) v[k] = f(static_cast<double>(k) / g);
    return GridFunction(std::move(v));
}

std::vector<std::complex<double>> GridFunction::spectrum() const { return forward(v_); }

GridFunction GridFunction::from_spectrum(const std::vector<std::complex<double>>& c, int g) {
    return GridFunction(backward(c, g));
}

double GridFunction::mean() const {
    double s = 0;
    for (double x : v_) s += x;
    return s / size();
}

double GridFunction::sup() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double GridFunction::eval(double x) const {
    const auto c = spectrum();
    const int n = size();
    const std::complex<double> z = std::polar(1.0, kTwoPi * x);
    std::complex<double> w = z, acc = 0;
    for (int q = 1; q < n / 2; ++q) {
        acc += c[q] * w;
        w *= z;
    }
    // w = z^(n/2) here; the Nyquist term is c cos(pi n x)
    return c[0].real() + 2 * acc.real() + c[n / 2].real() * std::cos(std::numbers::pi * n * x);
}

GridFunction GridFunction::derivative(int k) const {
    auto c = spectrum();
    const int n = size();
    // coefficients at the rounding floor would be amplified by (2 pi q)^k
    double top = 0;
    for (int q = 1; q <= n / 2; ++q) top = std::max(top, std::abs(c[q]));
    const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(top, std::abs(c[0]));
    for (int q = 0; q <= n / 2; ++q) {
        if (k > 0 && std::abs(c[q]) <= floor) c[q] = 0;
        c[q] *= std::pow(std::complex<double>(0, kTwoPi * q), k);
    }
    c[n / 2] = 0;
    if (k > 0) c[0] = 0;
    return from_spectrum(c, n);
}

GridFunction GridFunction::primitive() const {
    auto c = spectrum();
    const int n = size();
    c[0] = 0;
    c[n / 2] = 0;
    for (int q = 1; q < n / 2; ++q) c[q] /= std::complex<double>(0, kTwoPi * q);
    return from_spectrum(c, n);
}

GridFunction GridFunction::shifted(double w) const {
    auto c = spectrum();
    const int n = size();
    for (int q = 1; q < n / 2; ++q) c[q] *= std::polar(1.0, kTwoPi * q * w);
    c[n / 2] = c[n / 2].real() * std::cos(std::numbers::pi * n * w);
    return from_spectrum(c, n);
}

GridFunction GridFunction::resampled(int g) const {
    if (!power_of_two(g)) throw DomainError("grid size must be a power of two, got " + std::to_string(g));
    const auto c = spectrum();
    const int n = size();
    std::vector<std::complex<double>> out(g / 2 + 1, 0.0);
    const int m = std::min(n, g) / 2;
    for (int q = 0; q < m; ++q) out[q] = c[q];
    if (g > n)
        out[n / 2] = c[n / 2].real() / 2;  // cos term split between +-n/2
    else
        out[g / 2] = 2 * c[g / 2].real();
    return from_spectrum(out, g);
}

double GridFunction::tail_energy() const {
    const auto c = spectrum();
    const int n = size();
    double total = 0, tail = 0;
    for (int q = 1; q <= n / 2; ++q) {
        const double e = std::norm(c[q]);
        total += e;
        if (q > n / 4) tail += e;
    }
    if (total < 1e-300) return 0;
    return tail / total;
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
    std::vector<double> v(v_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(v_[i]);
    return GridFunction(std::move(v));
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    if (o.size() != size()) throw DomainError("grid sizes differ");
    auto v = v_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v_[i];
    return GridFunction(std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const { return *this + o * -1.0; }

GridFunction GridFunction::operator*(const GridFunction& o) const {
    if (o.size() != size()) throw DomainError("grid sizes differ");
    auto v = v_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= o.v_[i];
    return GridFunction(std::move(v));
}

GridFunction GridFunction::operator*(double c) const {
    return map([c](double x) { return c * x; });
}

GridFunction GridFunction::operator+(double c) const {
    return map([c](double x) { return c + x; });
}

// ---------------------------------------------------------------- circle maps

double CircleMap::schwarzian(double x) const {
    const double d1 = 1 + p(x, 1), d2 = p(x, 2), d3 = p(x, 3);
    return d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
}

CircleMap sine_family(double omega, double eps) {
    return {omega, [eps](double x, int k) {
                return eps * std::pow(kTwoPi, k) * std::sin(kTwoPi * x + k * std::numbers::pi / 2);
            }};
}

double golden_mean() { return (std::sqrt(5.0) - 1) / 2; }

double perturbation_norm(const CircleMap& f, int g) {
    double m = 0;
    for (int k = 0; k <= 5; ++k)
        for (int i = 0; i < g; ++i) m = std::max(m, std::abs(f.p(static_cast<double>(i) / g, k)) / std::pow(kTwoPi, k));
    return m;
}

GridFunction schwarzian(const GridFunction& p) {
    const GridFunction d1 = p.derivative(1), d2 = p.derivative(2), d3 = p.derivative(3);
    std::vector<double> s(p.size());
    for (int k = 0; k < p.size(); ++k) {
        const double dh = 1 + d1[k];
        if (!(dh > 0)) throw DomainError("Schwarzian of a map with Dh <= 0 at x = " + fmt(p.node(k)));
        s[k] = d3[k] / dh - 1.5 * (d2[k] / dh) * (d2[k] / dh);
    }
    return GridFunction(std::move(s));
}

long diophantine_violation(double omega, const Diophantine& dio, long q_max) {
    for (long q = 1; q <= q_max; ++q) {
        const double p = std::round(q * omega);
        if (std::abs(omega - p / q) < dio.gamma * std::pow(static_cast<double>(q), -2 - dio.tau)) return q;
    }
    return 0;
}

GridFunction rotation_cohomology_solve(const GridFunction& phi, double omega) {
    auto c = phi.spectrum();
    const int n = phi.size();
    const double floor = std::ldexp(1.0, -26);  // half the double mantissa
    int worst_q = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n / 2; ++q) {
        const std::complex<double> div = std::polar(1.0, kTwoPi * q * omega) - 1.0;
        if (std::abs(div) < worst) {
            worst = std::abs(div);
            worst_q = q;
        }
        c[q] /= div;
    }
    if (worst < floor)
        throw PrecisionError("ill-conditioned cohomological equation: |exp(2 pi i q omega) - 1| = " + fmt(worst) +
                             " at q = " + std::to_string(worst_q));
    c[0] = 0;
    c[n / 2] = 0;
    return GridFunction::from_spectrum(c, n);
}

GridFunction reconstruct_circle(const GridFunction& psi, double* c0) {
    const int n = psi.size();
    const GridFunction rhs0 = psi + (-psi.mean());
    GridFunction nl = GridFunction::constant(n, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    bool done = false;
    for (int it = 0; it < 500 && !done; ++it) {
        GridFunction sq = nl * nl;
        GridFunction next = (rhs0 + (sq + (-sq.mean())) * 0.5).primitive();
        double diff = (next - nl).sup();
        nl = next;
        if (!std::isfinite(diff) || nl.sup() > 1e3)
            throw DomainError("Riccati iteration diverges: psi is outside the ball where P is defined");
        if (diff <= 1e-14 * (1 + nl.sup()) || (it > 3 && diff >= prev && diff < 1e-11)) done = true;
        prev = diff;
    }
    if (!done) throw DomainError("Riccati iteration does not converge");
    if (c0) *c0 = -0.5 * (nl * nl).mean();
    GridFunction n1 = nl.primitive();
    GridFunction e = n1.map([](double x) { return std::exp(x); });
    e = e * (1 / e.mean());
    return (e + (-1.0)).primitive();
}

double conjugacy_residual(const CircleMap& f, const GridFunction& h, double t, int points) {
    double m = 0;
    for (int j = 0; j < points; ++j) {
        const double x = (j + 0.5) / points;
        const double px = h.eval(x);
        const double v = px + f.p(x + px, 0) - h.eval(x + f.omega) - t;
        m = std::max(m, std::abs(v));
    }
    return m;
}

std::string LinearizationResult::csv() const {
    std::ostringstream os;
    os << "iter,increment,residual\n";
    char buf[96];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof buf, "%d,%.6e,%.6e\n", r.iter, r.increment, r.residual);
        os << buf;
    }
    return os.str();
}

LinearizationResult linearize_circle(const CircleMap& f, const LinearizeOptions& opt) {
    const int g = opt.grid;
    if (!power_of_two(g)) throw DomainError("grid size must be a power of two, got " + std::to_string(g));
    LinearizationResult res;
    const double norm = perturbation_norm(f, g);
    res.inside_ball = norm <= opt.ball;
    if (!res.inside_ball) res.warnings.push_back("perturbation norm " + fmt(norm) + " exceeds " + fmt(opt.ball));
    if (long q = diophantine_violation(f.omega, opt.dio, g / 2)) {
        res.diophantine = false;
        res.warnings.push_back("omega violates the diophantine condition at q = " + std::to_string(q));
    }

    GridFunction p = GridFunction::constant(g, 0.0);
    bool warned = false;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const GridFunction dp = p.derivative();
        std::vector<double> phi(g);
        for (int k = 0; k < g; ++k) {
            const double dh = 1 + dp[k];
            phi[k] = f.schwarzian(p.node(k) + p[k]) * dh * dh;
        }
        if (!std::all_of(phi.begin(), phi.end(), [](double v) { return std::isfinite(v); })) {
            res.note = "Phi(F, h) is not finite at iteration " + std::to_string(it);
            break;
        }
        GridFunction psi = rotation_cohomology_solve(GridFunction(std::move(phi)), f.omega);
        GridFunction next;
        try {
            next = reconstruct_circle(psi);
        } catch (const DomainError& e) {
            res.note = std::string(e.what()) + " at iteration " + std::to_string(it);
            break;
        }
        const GridFunction dn = next.derivative();
        double min_dh = std::numeric_limits<double>::infinity();
        for (int k = 0; k < g; ++k) min_dh = std::min(min_dh, 1 + dn[k]);
        if (!(min_dh > 0)) {
            res.note = "Dh <= 0 at iteration " + std::to_string(it) + " (min " + fmt(min_dh) + ")";
            break;
        }
        if (!warned && !next.resolved()) {
            res.warnings.push_back("under-resolved conjugacy: tail energy " + fmt(next.tail_energy()));
            warned = true;
        }
        const double inc = (next - p).sup();
        p = next;

        // F o h - h o R_omega on the grid
        const GridFunction ps = p.shifted(f.omega);
        std::vector<double> diff(g);
        for (int k = 0; k < g; ++k) diff[k] = p[k] + f.p(p.node(k) + p[k], 0) - ps[k];
        const GridFunction dg(std::move(diff));
        const double t = dg.mean();
        res.history.push_back({it, inc, (dg + (-t)).sup()});
        res.t = t;
        if (!std::isfinite(inc)) {
            res.note = "increment is not finite";
            break;
        }
        if (inc < opt.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.h = p;
    res.iterations = static_cast<int>(res.history.size());
    if (res.history.empty()) {
        res.residual_sup = res.grid_residual = std::numeric_limits<double>::infinity();
        res.converged = false;
        return res;
    }
    if (!res.converged && res.note.empty()) res.note = "no convergence after " + std::to_string(opt.max_iter) + " iterations";
    res.grid_residual = res.history.back().residual;
    res.residual_sup = conjugacy_residual(f, p, res.t, 4 * g);
    if (!p.resolved()) {
        res.converged = false;
        res.note = "under-resolved: tail energy " + fmt(p.tail_energy()) + " of the conjugacy";
    }
    return res;
}

// ---------------------------------------------------------------- interval diffeomorphisms

IntervalDiffeo IntervalDiffeo::identity(double lo, double hi, int g) {
    return from_function(lo, hi, g, [](double x, int k) { return k == 0 ? x : k == 1 ? 1.0 : 0.0; });
}

IntervalDiffeo IntervalDiffeo::from_function(double lo, double hi, int g, const std::function<double(double, int)>& f) {
    if (g < 2 || !(hi > lo)) throw DomainError("interval grid needs lo < hi and at least 2 cells");
    IntervalDiffeo h;
    h.lo_ = lo;
    h.hi_ = hi;
    h.g_ = g;
    for (int k = 0; k <= g; ++k) {
        const double x = h.node(k);
        const double d1 = f(x, 1), d2 = f(x, 2), d3 = f(x, 3);
        if (!(d1 > 0)) throw DomainError("Dh <= 0 at x = " + fmt(x));
        h.h_.push_back(f(x, 0));
        h.n1_.push_back(std::log(d1));
        h.n_.push_back(d2 / d1);
        h.dn_.push_back(d3 / d1 - (d2 / d1) * (d2 / d1));
    }
    return h;
}

int IntervalDiffeo::cell(double x, double& s) const {
    const double u = (x - lo_) / (hi_ - lo_) * g_;
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, g_ - 1);
    s = u - i;
    return i;
}

double IntervalDiffeo::operator()(double x) const {
    double s;
    const int i = cell(x, s);
    const double dx = (hi_ - lo_) / g_;
    return hermite(h_[i], std::exp(n1_[i]), h_[i + 1], std::exp(n1_[i + 1]), dx, s);
}

double IntervalDiffeo::log_derivative(double x) const {
    double s;
    const int i = cell(x, s);
    return hermite(n1_[i], n_[i], n1_[i + 1], n_[i + 1], (hi_ - lo_) / g_, s);
}

double IntervalDiffeo::nonlinearity(double x) const {
    double s;
    const int i = cell(x, s);
    return hermite(n_[i], dn_[i], n_[i + 1], dn_[i + 1], (hi_ - lo_) / g_, s);
}

double IntervalDiffeo::derivative(double x) const { return std::exp(log_derivative(x)); }

std::vector<double> IntervalDiffeo::schwarzian() const {
    std::vector<double> s(h_.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = dn_[k] - 0.5 * n_[k] * n_[k];
    return s;
}

double IntervalDiffeo::distance(const IntervalDiffeo& o) const {
    double m = 0;
    for (int k = 0; k <= g_; ++k) {
        const double x = node(k);
        const double v = (o.g_ == g_ && o.lo_ == lo_ && o.hi_ == hi_) ? o.h_[k] : o(x);
        m = std::max(m, std::abs(h_[k] - v));
    }
    return m;
}

IntervalDiffeo reconstruct_from_schwarzian(const std::function<double(double)>& psi, double c0, double c1, double lo,
                                           double hi, int g) {
    if (g < 2 || !(hi > lo)) throw DomainError("interval grid needs lo < hi and at least 2 cells");
    IntervalDiffeo h;
    h.lo_ = lo;
    h.hi_ = hi;
    h.g_ = g;
    const double dx = (hi - lo) / g;
    std::vector<double> pn(g + 1), pm(g);
    for (int k = 0; k <= g; ++k) pn[k] = psi(h.node(k));
    for (int k = 0; k < g; ++k) pm[k] = psi(lo + (k + 0.5) * dx);

    auto rhs = [c0](double p, double n) { return p + c0 + 0.5 * n * n; };
    h.n_.assign(g + 1, 0.0);
    h.n_[0] = c1;
    for (int k = 0; k < g; ++k) {
        const double n = h.n_[k];
        const double k1 = rhs(pn[k], n);
        const double k2 = rhs(pm[k], n + 0.5 * dx * k1);
        const double k3 = rhs(pm[k], n + 0.5 * dx * k2);
        const double k4 = rhs(pn[k + 1], n + dx * k3);
        h.n_[k + 1] = n + dx / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!std::isfinite(h.n_[k + 1]) || std::abs(h.n_[k + 1]) > 1e6)
            throw DomainError("Riccati solution blows up near x = " + fmt(h.node(k + 1)) +
                              ": (psi, c0, c1) outside the ball where P is defined");
    }
    h.dn_.resize(g + 1);
    for (int k = 0; k <= g; ++k) h.dn_[k] = rhs(pn[k], h.n_[k]);

    h.n1_.assign(g + 1, 0.0);
    for (int k = 0; k < g; ++k)
        h.n1_[k + 1] = h.n1_[k] + hermite_integral(h.n_[k], h.dn_[k], h.n_[k + 1], h.dn_[k + 1], dx);
    std::vector<double> e(g + 1);
    for (int k = 0; k <= g; ++k) e[k] = std::exp(h.n1_[k]);
    double integral = 0;
    for (int k = 0; k < g; ++k) integral += hermite_integral(e[k], e[k] * h.n_[k], e[k + 1], e[k + 1] * h.n_[k + 1], dx);
    const double shift = -std::log(integral / (hi - lo));
    for (int k = 0; k <= g; ++k) {
        h.n1_[k] += shift;
        e[k] = std::exp(h.n1_[k]);
    }
    h.h_.assign(g + 1, lo);
    for (int k = 0; k < g; ++k)
        h.h_[k + 1] = h.h_[k] + hermite_integral(e[k], e[k] * h.n_[k], e[k + 1], e[k + 1] * h.n_[k + 1], dx);
    if (std::abs(h.h_[g] - hi) > 1e-9 * (hi - lo)) throw InvariantError("reconstructed h misses the right end");
    h.h_[g] = hi;
    return h;
}

// ---------------------------------------------------------------- gluing system

GlueSolver::GlueSolver(const CohomologySolver& solver) : solver_(&solver) {
    const auto& b = base();
    const int d = b.size();
    const Eigen::MatrixXd& gu = solver.gamma_u();
    const Eigen::MatrixXd& gs = solver.gamma_s();
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(d);
    Eigen::VectorXd lam(d);
    for (Letter a = 0; a < d; ++a) lam[a] = b.right[a] - b.left[a];
    // zero-integral part of Gamma_u
    Eigen::VectorXd v = gu.transpose() * lam;
    const Eigen::MatrixXd vm = v;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vm);
    Eigen::MatrixXd q = qr.householderQ();
    basis_ = gu * q.rightCols(gu.cols() - 1);
    p_s_ = [](double) { return 0.0; };
    one_bd_ = solver.boundary(from_gamma(b, one, 1));
    double bd = 0;
    for (double x : one_bd_) bd = std::max(bd, std::abs(x));
    if (bd > 1e-12) {
        // several cycles: the constant lies outside Gamma_u + Gamma_s and is fixed by the boundary of phi
        constant_in_kernel_ = false;
        return;
    }
    one_u_ = gu * (gu.transpose() * one);
    const Eigen::VectorXd one_s = one - one_u_;
    if ((one_s - gs * (gs.transpose() * one_s)).norm() > 1e-8 * std::sqrt(d))
        throw InvariantError("the constant function is not in Gamma_u + Gamma_s");
    if (one_s.norm() > 1e-12) p_s_ = solver.solve(from_gamma(b, one_s, 1)).psi_derivs.front();
}

GlueSolver::Split GlueSolver::split(const SmoothPiecewise& phi) const {
    const auto& b = base();
    const int d = b.size();
    Split out;
    if (!constant_in_kernel_) {
        auto bd = solver_->boundary(phi);
        double num = 0, den = 0, scale = 1;
        for (std::size_t c = 0; c < bd.size(); ++c) {
            num += bd[c] * one_bd_[c];
            den += one_bd_[c] * one_bd_[c];
        }
        out.mean = num / den;
        for (Letter a = 0; a < d; ++a) scale = std::max({scale, std::abs(phi(a, b.left[a])), std::abs(phi(a, b.right[a]))});
        for (std::size_t c = 0; c < bd.size(); ++c)
            if (std::abs(bd[c] - out.mean * one_bd_[c]) > 1e-8 * scale)
                throw DomainError("boundary of phi is not a multiple of the boundary of the constant");
        auto sol = solver_->solve(phi - from_gamma(b, Eigen::VectorXd::Constant(d, out.mean), 1));
        out.l1 = basis_.transpose() * sol.chi;
        out.chi = basis_ * out.l1;
        out.l0 = sol.psi_derivs.front();
        out.residual = sol.residual_sup;
        return out;
    }
    auto sol = solver_->solve(phi);
    Eigen::VectorXd lam(d);
    for (Letter a = 0; a < d; ++a) lam[a] = b.right[a] - b.left[a];
    out.mean = lam.dot(sol.chi) / lam.dot(one_u_);
    out.chi = sol.chi - out.mean * one_u_;
    out.l1 = basis_.transpose() * out.chi;
    const double c = out.mean;
    auto psi = sol.psi_derivs.front();
    auto ps = p_s_;
    out.l0 = [psi, ps, c](double x) { return psi(x) - c * ps(x); };
    out.residual = sol.residual_sup;
    return out;
}

SmoothPiecewise schwarzian_pullback(const GeneralizedIEM& tt, const IntervalDiffeo& h, const LevelGeom& base,
                                    int degree) {
    const int d = base.size();
    if (tt.size() != d) throw DomainError("deformation and base map have different alphabets");
    std::vector<std::shared_ptr<const ChebSeries>> tab;
    for (Letter a = 0; a < d; ++a) {
        auto f = [&](double x) {
            const Taylor<BigFloat> t = tt.expand(a, BigFloat(h(x)), 3);
            const double c1 = to_double(t[1]), c2 = to_double(t[2]), c3 = to_double(t[3]);
            const double st = 6 * c3 / c1 - 6 * (c2 / c1) * (c2 / c1);
            const double dh = h.derivative(x);
            return st * dh * dh;
        };
        tab.push_back(std::make_shared<ChebSeries>(f, base.left[a], base.right[a], degree));
    }
    return {d, 3, [tab](Letter a, double x, int k) { return (*tab[a])(x, k); }};
}

double GlueResiduals::sup() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> GlueResiduals::block(const std::string& prefix) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].rfind(prefix, 0) == 0) out.push_back(values[i]);
    return out;
}

namespace {

GlueResiduals assemble(const LevelGeom& b, int r, const std::function<double(double)>& fix,
                       const std::function<double(double)>& logdh, const std::function<double(double)>& dlogdh,
                       const Eigen::VectorXd& l1) {
    if (r != 3) throw DomainError("only r = 3 is implemented for the conjugacy equations");
    const auto& pi = b.pi;
    const int d = pi.size();
    const auto sg = sigma_and_cycles(pi);
    const auto gd = genus_and_marked_points(pi);
    auto at = [&](const HalfPoint& v) { return v.side == Side::L ? b.left[v.letter] : b.right[v.letter]; };

    GlueResiduals out;
    out.r = r;
    out.d_star = (2 * r + 1) * (gd.g - 1) + gd.s;
    const HalfPoint bl{pi.b_alpha(), Side::L}, tr{pi.alpha_t(), Side::R}, tl{pi.t_alpha(), Side::L};
    out.one_cycle = sg.cycle_of[bl.index()] == sg.cycle_of[tr.index()];

    for (int i = 1; i < d; ++i) {
        const double u = b.left[pi.top(i)];
        out.labels.push_back("fix u" + std::to_string(i));
        out.values.push_back(fix(u));
        out.redundant.push_back(false);
    }
    // one redundant matching equation per cycle free of the special half-points
    std::vector<HalfPoint> ups;
    for (int i = 0; i < d; ++i)
        if (pi.top(i) != pi.b_alpha()) ups.push_back({pi.top(i), Side::L});
    std::vector<bool> red(ups.size(), false);
    std::vector<bool> done(sg.s(), false);
    done[sg.cycle_of[bl.index()]] = true;
    if (!out.one_cycle) done[sg.cycle_of[tr.index()]] = true;
    for (std::size_t j = 0; j < ups.size(); ++j) {
        const int c = sg.cycle_of[ups[j].index()];
        if (!out.one_cycle && ups[j] == tl) {
            red[j] = true;
            continue;
        }
        if (!done[c]) {
            red[j] = true;
            done[c] = true;
        }
    }
    for (int c = 0; c < sg.s(); ++c)
        if (!done[c]) throw InvariantError("a sigma-cycle carries no matching equation");
    for (int block = 0; block < 2; ++block)
        for (std::size_t j = 0; j < ups.size(); ++j) {
            const HalfPoint v = ups[j], w = sg.apply(v);
            const auto& f = block == 0 ? logdh : dlogdh;
            out.labels.push_back(std::string(block == 0 ? "logDh " : "DlogDh ") + pi.name(v.letter) + ".L");
            out.values.push_back(f(at(v)) - f(at(w)));
            out.redundant.push_back(red[j]);
        }
    for (int j = 0; j < l1.size(); ++j) {
        out.labels.push_back("L1 " + std::to_string(j));
        out.values.push_back(l1[j]);
        out.redundant.push_back(false);
    }
    out.independent = static_cast<int>(std::count(out.redundant.begin(), out.redundant.end(), false));
    if (out.independent != out.d_star + 2)
        throw InvariantError("conjugacy system has " + std::to_string(out.independent) + " independent equations, expected " +
                             std::to_string(out.d_star + 2));
    return out;
}

}  // namespace

GlueResiduals iem_glue_residuals(const GeneralizedIEM& tt, const IntervalDiffeo& h, const GlueSolver& gs, int r) {
    if (r != 3) throw DomainError("only r = 3 is implemented for the conjugacy equations");
    const auto& b = gs.base();
    const auto sp = gs.split(schwarzian_pullback(tt, h, b));
    return assemble(
        b, r, [&](double u) { return h(u) - u; }, [&](double u) { return h.log_derivative(u); },
        [&](double u) { return h.nonlinearity(u); }, sp.l1);
}

GlueFixedPoint glue_fixed_point(const GeneralizedIEM& tt, const GlueSolver& gs, double c0, double c1, int grid,
                                int max_iter, double tol) {
    const auto& b = gs.base();
    GlueFixedPoint out;
    out.h = IntervalDiffeo::identity(b.origin, b.end, grid);
    out.increment = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        const auto sp = gs.split(schwarzian_pullback(tt, out.h, b));
        IntervalDiffeo next = reconstruct_from_schwarzian(sp.l0, c0, c1, b.origin, b.end, grid);
        out.increment = next.distance(out.h);
        out.h = std::move(next);
        out.iterations = it;
        if (out.increment < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

GlueResiduals glue_linearization(const SmoothPiecewise& dphi, const GlueSolver& gs, double dc0, double dc1, int grid,
                                 int r) {
    if (dphi.smoothness < 3) throw DomainError("the linearized system needs dphi of class C^3");
    const auto& b = gs.base();
    const auto sp = gs.split(dphi.derivative().derivative().derivative());
    const double lo = b.origin, hi = b.end, dx = (hi - lo) / grid;
    // D^2 dh = dN = dc1 + int (L0 + dc0); dh vanishes at both ends
    std::vector<double> f3(grid + 1), n(grid + 1, dc1);
    for (int k = 0; k <= grid; ++k) f3[k] = sp.l0(lo + k * dx) + dc0;
    for (int k = 0; k < grid; ++k) {
        const double mid = sp.l0(lo + (k + 0.5) * dx) + dc0;
        n[k + 1] = n[k] + dx / 6 * (f3[k] + 4 * mid + f3[k + 1]);
    }
    std::vector<double> p1(grid + 1, 0.0), p2(grid + 1, 0.0);
    for (int k = 0; k < grid; ++k) p1[k + 1] = p1[k] + hermite_integral(n[k], f3[k], n[k + 1], f3[k + 1], dx);
    for (int k = 0; k < grid; ++k) p2[k + 1] = p2[k] + hermite_integral(p1[k], n[k], p1[k + 1], n[k + 1], dx);
    const double slope = -p2[grid] / (hi - lo);
    HermiteTable dh{lo, hi, grid, p2, p1}, ddh{lo, hi, grid, p1, n}, d2dh{lo, hi, grid, n, f3};
    for (int k = 0; k <= grid; ++k) {
        dh.f[k] += slope * k * dx;
        dh.df[k] += slope;
        ddh.f[k] += slope;
    }
    return assemble(b, r, dh, ddh, d2dh, sp.l1);
}

}  // namespace iet
