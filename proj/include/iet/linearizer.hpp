#pragma once

#include "iet/cohomology.hpp"
#include "iet/iem.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace iet {

// G samples of a 1-periodic function at x_k = k / G, G a power of two. Values between nodes are those of
// the trigonometric interpolant.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::vector<double> samples);
    static GridFunction sample(int g, const std::function<double(double)>& f);
    static GridFunction constant(int g, double c) { return GridFunction(std::vector<double>(g, c)); }

    int size() const { return static_cast<int>(v_.size()); }
    const std::vector<double>& values() const { return v_; }
    double operator[](int k) const { return v_[k]; }
    double node(int k) const { return static_cast<double>(k) / size(); }

    // c_q for 0 <= q <= G/2, f(x) = sum over |q| <= G/2 of c_q e^(2 pi i q x) with c_-q = conj(c_q).
    std::vector<std::complex<double>> spectrum() const;
    static GridFunction from_spectrum(const std::vector<std::complex<double>>& c, int g);

    double mean() const;
    double sup() const;
    double eval(double x) const;  // direct sum, independent of the FFT path
    GridFunction derivative(int k = 1) const;
    GridFunction primitive() const;       // mean-zero primitive of f - mean(f)
    GridFunction shifted(double w) const;  // x -> f(x + w)
    GridFunction resampled(int g) const;   // zero padding or truncation of the spectrum
    // Share of the energy of f - mean(f) carried by |q| > G/4.
    double tail_energy() const;
    bool resolved(double tol = 1e-8) const { return tail_energy() <= tol; }

    GridFunction map(const std::function<double(double)>& f) const;
    GridFunction operator+(const GridFunction& o) const;
    GridFunction operator-(const GridFunction& o) const;
    GridFunction operator*(const GridFunction& o) const;
    GridFunction operator*(double c) const;
    GridFunction operator+(double c) const;

private:
    std::vector<double> v_;
};

// Lift F(x) = x + omega + p(x) of a circle map, p 1-periodic.
struct CircleMap {
    double omega = 0;
    std::function<double(double, int)> p;  // D^k p, k <= 5

    double operator()(double x) const { return x + omega + p(x, 0); }
    double derivative(double x, int k) const { return (k == 1 ? 1.0 : 0.0) + p(x, k); }
    double schwarzian(double x) const;
};

// x + omega + eps sin 2 pi x.
CircleMap sine_family(double omega, double eps);
double golden_mean();
// max over k <= 5 of sup |D^k p| / (2 pi)^k on a grid of g points.
double perturbation_norm(const CircleMap& f, int g = 1024);

// Schwarzian of h(x) = x + p(x) from the spectral derivatives of p. Throws DomainError if Dh <= 0.
GridFunction schwarzian(const GridFunction& p);

struct Diophantine {
    double gamma = 0.1;
    double tau = 0.5;
};
// |omega - p/q| >= gamma q^(-2-tau) for 1 <= q <= q_max; returns the first failing q or 0.
long diophantine_violation(double omega, const Diophantine& dio, long q_max);

// Mean-zero psi with phi = mean(phi) + psi o R_omega - psi. Throws PrecisionError on a divisor below
// 2^(-26), naming the worst q.
GridFunction rotation_cohomology_solve(const GridFunction& phi, double omega);

// Periodic part of the h with Sh - mean(Sh) = psi and mean(h - id) = 0. The Riccati equation
// DN = psi + c0 + N^2 / 2 is solved spectrally for mean-zero N, c0 being the solvability constant
// -mean(N^2) / 2. Throws DomainError when the iteration does not converge.
GridFunction reconstruct_circle(const GridFunction& psi, double* c0 = nullptr);

struct LinearizeOptions {
    int grid = 1024;
    int max_iter = 200;
    double tolerance = 1e-12;  // C0 increment
    double ball = 0.05;        // perturbation_norm threshold
    Diophantine dio;
};

struct IterationRow {
    int iter = 0;
    double increment = 0;
    double residual = 0;  // sup over the grid of |F o h - h o R_omega - t|
};

struct LinearizationResult {
    GridFunction h;  // periodic part of the conjugacy
    double t = 0;
    int iterations = 0;
    double residual_sup = 0;   // off-grid, 4G points
    double grid_residual = 0;
    bool converged = false;
    bool inside_ball = true;
    bool diophantine = true;
    std::vector<IterationRow> history;
    std::vector<std::string> warnings;
    std::string note;

    bool flagged() const { return !converged || !inside_ball || residual_sup > 1e-8; }
    std::string csv() const;
};

// F = R_t o h o R_omega o h^-1 by the fixed point h <- P(L(Phi(F, h))), Phi(F, h) = (SF o h)(Dh)^2.
LinearizationResult linearize_circle(const CircleMap& f, const LinearizeOptions& opt = {});

// sup |F(h(x)) - h(x + omega) - t| at `points` points offset from every grid node.
double conjugacy_residual(const CircleMap& f, const GridFunction& h, double t, int points);

// Increasing diffeomorphism h of [lo, hi] onto itself, stored on G + 1 equispaced nodes as
// h, N1 = log Dh, N = D log Dh and DN; piecewise cubic Hermite in between.
class IntervalDiffeo {
public:
    IntervalDiffeo() = default;
    static IntervalDiffeo identity(double lo, double hi, int g);
    // f(x, k) = D^k h for k <= 3.
    static IntervalDiffeo from_function(double lo, double hi, int g, const std::function<double(double, int)>& f);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int cells() const { return g_; }
    double node(int k) const { return lo_ + (hi_ - lo_) * k / g_; }

    double operator()(double x) const;
    double log_derivative(double x) const;  // N1
    double nonlinearity(double x) const;    // N
    double derivative(double x) const;      // Dh
    std::vector<double> schwarzian() const;  // DN - N^2 / 2 at the nodes
    double distance(const IntervalDiffeo& o) const;  // sup of |h - o| at the nodes

private:
    friend IntervalDiffeo reconstruct_from_schwarzian(const std::function<double(double)>&, double, double, double,
                                                      double, int);
    int cell(double x, double& s) const;
    double lo_ = 0, hi_ = 1;
    int g_ = 0;
    std::vector<double> h_, n1_, n_, dn_;
};

// Inverse of h -> (Sh - Sh(lo), Sh(lo), D log Dh(lo)): DN = psi + c0 + N^2 / 2 with N(lo) = c1 by RK4, then
// N1 the primitive of N whose exponential has mean 1 and h = lo + int exp(N1).
IntervalDiffeo reconstruct_from_schwarzian(const std::function<double(double)>& psi, double c0, double c1, double lo,
                                           double hi, int g);

// phi = mean + L1(phi) + L0(phi) o T0 - L0(phi), with L1 in the part of Gamma_u of zero integral and
// L0(u0) = 0, on top of the order-1 solver. With several sigma-cycles the constant can fall outside
// Gamma_u + Gamma_s; then the mean is read from the boundary of phi and the integral direction of Gamma_u
// is dropped with it.
class GlueSolver {
public:
    explicit GlueSolver(const CohomologySolver& solver);

    struct Split {
        double mean = 0;
        Eigen::VectorXd l1;    // coordinates in an orthonormal basis of the zero-integral part of Gamma_u
        Eigen::VectorXd chi;   // L1(phi) in Gamma
        std::function<double(double)> l0;
        double residual = 0;
    };
    Split split(const SmoothPiecewise& phi) const;

    const CohomologySolver& solver() const { return *solver_; }
    const LevelGeom& base() const { return solver_->tower().base(); }
    int l1_dim() const { return static_cast<int>(basis_.cols()); }

private:
    const CohomologySolver* solver_;
    bool constant_in_kernel_ = true;
    std::vector<double> one_bd_;      // boundary of the constant 1
    Eigen::VectorXd one_u_;           // Gamma_u part of the constant 1
    Eigen::MatrixXd basis_;           // d x (g - 1)
    std::function<double(double)> p_s_;  // potential of the Gamma_s part of 1
};

// Phi(t, h) = (S T_t o h)(Dh)^2 on the top intervals of the base map, tabulated per letter.
SmoothPiecewise schwarzian_pullback(const GeneralizedIEM& tt, const IntervalDiffeo& h, const LevelGeom& base,
                                    int degree = 64);

// Stacked residuals of the conjugacy equations h(u^t_i) = u^t_i, matching of log Dh and D log Dh across
// sigma, and L1(Phi(t, h)) = 0.
struct GlueResiduals {
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<bool> redundant;  // implied by the other equations
    bool one_cycle = true;        // (alpha_t, R) and (b_alpha, L) lie on one sigma-cycle
    int r = 3;
    int d_star = 0;
    int independent = 0;  // d* + 2

    double sup() const;
    std::vector<double> block(const std::string& prefix) const;
};

// Only r = 3 is available (the L1 part uses the order-1 solver).
GlueResiduals iem_glue_residuals(const GeneralizedIEM& tt, const IntervalDiffeo& h, const GlueSolver& gs, int r = 3);

struct GlueFixedPoint {
    IntervalDiffeo h;
    int iterations = 0;
    double increment = 0;
    bool converged = false;
};

// h = P(L0(Phi(t, h)), c0, c1) by iteration from the identity.
GlueFixedPoint glue_fixed_point(const GeneralizedIEM& tt, const GlueSolver& gs, double c0 = 0, double c1 = 0,
                                int grid = 2048, int max_iter = 50, double tol = 1e-12);

// The system linearized at (0, id, 0, 0) along dphi = Delta T(dt) and (dc0, dc1); dphi needs class C^3.
GlueResiduals glue_linearization(const SmoothPiecewise& dphi, const GlueSolver& gs, double dc0 = 0, double dc1 = 0,
                                 int grid = 2048, int r = 3);

}  // namespace iet
