#pragma once

#include "iet/cocycle.hpp"
#include "iet/combinatorics.hpp"
#include "iet/iem.hpp"
#include "iet/intmat.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace iet {

// Function on the top intervals of a level-0 map, with derivative oracles up to `smoothness`.
struct SmoothPiecewise {
    int d = 0;
    int smoothness = 1;
    std::function<double(Letter, double, int)> eval;  // (letter, x, derivative order)

    double operator()(Letter a, double x) const { return eval(a, x, 0); }
    SmoothPiecewise derivative() const;
    SmoothPiecewise operator-(const SmoothPiecewise& o) const;
    SmoothPiecewise operator*(double c) const;
    SmoothPiecewise operator+(const SmoothPiecewise& o) const;
};

// Double-precision geometry of one level.
struct LevelGeom {
    PermutationPair pi;
    std::vector<double> left, right, shift;
    double origin = 0, end = 0;

    int size() const { return pi.size(); }
    Letter locate(double x) const;
    double apply(double x) const { return x + shift[locate(x)]; }
};
LevelGeom to_geom(const StandardIEM<BigFloat>& t);

struct Tower {
    std::vector<LevelGeom> levels;
    std::vector<RauzyArrow> arrows;
    std::vector<IntMatrix> b;  // b[l] = B(0, l)
    int depth() const { return static_cast<int>(arrows.size()); }
    const LevelGeom& base() const { return levels.front(); }
};
// Induces until the interval shrinks below rel_size |I| or max_depth steps.
Tower build_tower(const StandardIEM<BigFloat>& t, double rel_size = 1e-10, int max_depth = 20000);

// Global continuous function x -> f(x, k) turned into its coboundary f o T - f.
SmoothPiecewise coboundary_of(const LevelGeom& g, std::function<double(double, int)> f, int smoothness);
// Per-interval polynomial with coordinates (a, k) at a * r + k in the variable x - left(a).
SmoothPiecewise from_gamma(const LevelGeom& g, const Eigen::VectorXd& coeffs, int r);

struct CohomologyOptions {
    int grid = 10000;              // residual sample points
    int cheb_degree = 28;
    int primitive_cells = 16384;   // grid for primitives in the higher-order solver
    double tolerance = 1e-6;       // relative to 1 + |phi|_C1
    double boundary_tolerance = 1e-8;
    double nu_tolerance = 1e-6;
};

struct CohomologySolution {
    int order = 1;
    Eigen::VectorXd chi;                       // coordinates in Gamma(r)
    std::vector<std::function<double(double)>> psi_derivs;  // D^j psi, j < order
    double residual_sup = 0;
    std::vector<double> residual_by_order;
    int levels_used = 0;
    bool converged = false;
    std::optional<std::vector<double>> nu;     // per cycle, zero at the cycle of the first top letter

    double psi(double x) const { return psi_derivs.front()(x); }
};

class CohomologySolver {
public:
    // Requires stable_dim == g (restricted case).
    CohomologySolver(Tower tower, const OseledetsSplitting& split, CohomologyOptions opt = {});

    const Tower& tower() const { return tower_; }
    int genus() const { return g_; }
    const Eigen::MatrixXd& gamma_s() const { return gs_; }  // d x g, orthonormal
    const Eigen::MatrixXd& gamma_u() const { return gu_; }  // d x g, orthonormal, orthogonal to gamma_s

    std::vector<double> boundary(const SmoothPiecewise& phi, int derivative = 0) const;

    CohomologySolution solve(const SmoothPiecewise& phi) const;
    CohomologySolution solve_higher(const SmoothPiecewise& phi, int r) const;

    // Columns span Gamma_T(r) inside Gamma(r); potentials give the functions whose coboundaries they are.
    Eigen::MatrixXd gamma_t_basis(int r) const;
    int gamma_t_dim(int r) const;

    // sup over the level-l intervals of |S(0, l) phi|, l = 0 .. depth.
    std::vector<double> special_sum_sup(const SmoothPiecewise& phi, int samples = 8) const;

    double residual(const SmoothPiecewise& phi, const Eigen::VectorXd& chi, int r,
                    const std::function<double(double)>& psi, int derivative = 0) const;

private:
    struct Tables;
    std::shared_ptr<const Tables> build_tables(const SmoothPiecewise& phi) const;
    Eigen::VectorXd level_means(const Tables& t) const;
    std::function<double(double)> descent(std::shared_ptr<const Tables> t) const;

    CohomologySolution solve_rec(const SmoothPiecewise& phi, int r) const;
    // D^i of the potential of basis column j of gamma_t_basis(r).
    double potential(int r, int j, double x, int i) const;
    std::function<double(double)> primitive(const std::function<double(double)>& f) const;
    std::optional<std::vector<double>> read_nu(const SmoothPiecewise& phi, const CohomologySolution& s) const;
    void prepare_stable_potentials() const;

    Tower tower_;
    CohomologyOptions opt_;
    int g_ = 0;
    Eigen::MatrixXd gs_, gu_;
    mutable std::vector<std::vector<std::function<double(double)>>> stable_prims_;  // [s][j] = Psi_{s, j}
};

}  // namespace iet
