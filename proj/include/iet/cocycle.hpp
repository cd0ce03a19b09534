#pragma once

#include "iet/combinatorics.hpp"
#include "iet/intmat.hpp"
#include "iet/scalar.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace iet {

// Run-length form of a path: consecutive arrows of one type share a winner.
struct ArrowRuns {
    PermutationPair start;
    std::vector<std::pair<ArrowType, Integer>> runs;

    // Runs are also cut at multiples of `period` arrows when period > 0.
    static ArrowRuns from_path(const RauzyPath& path, std::size_t period = 0);
    Integer length() const;
    RauzyPath flatten() const;  // only for moderate lengths
};

struct CompleteFactor {
    Integer begin, end;  // arrow range [begin, end)
    IntMatrix z;         // Z(n)
    IntMatrix b;         // B(n) = Z(n) ... Z(1)
};

struct Factorization {
    int d = 0;
    std::vector<CompleteFactor> factors;
    std::vector<Letter> missing_in_tail;
    Integer tail_length;
};

Factorization factor_minimal_complete(const ArrowRuns& runs);
Factorization factor_minimal_complete(const RauzyPath& path);

double log_norm(const IntMatrix& m);

struct RothA {
    std::vector<double> ratio;  // ratio[n-1] = log|Z(n+1)| / log|B(n)|, n = 1 .. N-1
    double tail_max = 0;        // max over the last half
    bool sufficient = false;
    bool consistent = false;
    std::string verdict;
};
RothA roth_condition_a(const Factorization& f, double threshold = 0.25);

struct RothB {
    std::vector<double> theta;               // theta[n-1] = 1 - log|B(n)|_{Gamma_0}| / log|B(n)|
    std::vector<double> log_norm_restricted;
    double theta_fit = 0;                    // 1 - slope over the last half of the levels
};
// lengths: the length vector at level 0; Gamma_0 is its orthogonal complement.
RothB roth_condition_b(const Factorization& f, const std::vector<BigFloat>& lengths);

struct LyapunovOptions {
    std::size_t period = 0;  // arrows per period, 0 if the path is not periodic
    double burn_in = 0.5;    // fraction of steps discarded before averaging
    double tau_min = 0.05;
    unsigned seed = 1;
};

struct OseledetsSplitting {
    std::vector<double> exponents;   // per unit log|B|, decreasing
    std::vector<double> per_period;  // per period, decreasing; empty without a period
    struct Row {
        std::size_t step;
        std::vector<double> exponents;
        double residual;
    };
    std::vector<Row> history;        // running estimates per Zorich step
    int stable_dim = 0;
    std::vector<Eigen::VectorXd> stable_basis;  // orthonormal, level 0
    double omega_residual = 0;       // distance of the stable basis from Im Omega
    double sum_residual = 0;         // |sum of exponents|
};
OseledetsSplitting lyapunov_and_stable_space(const ArrowRuns& runs, const LyapunovOptions& opt = {});

struct RothC {
    std::vector<double> restrict_ratio;  // indexed by l - 1; NaN where not sampled
    std::vector<double> quotient_ratio;
    double restrict_tail = 0, quotient_tail = 0;
    int sampled = 0;
};
// stable_dim from the Lyapunov splitting; the last third of the factors only seeds the backward frames.
RothC roth_condition_c(const Factorization& f, int stable_dim, unsigned seed = 1);

struct PositivityReport {
    bool sufficient = false;
    bool ok = false;
    std::size_t window = 0;
    std::size_t offending = 0;  // first factor of a failing window
};
PositivityReport positivity_window_check(const Factorization& f);

struct RothRow {
    std::size_t n;
    Integer norm_z, norm_b;
    double ratio_a, theta_hat;
    int stable_dim;
    double sigma_c_restrict, sigma_c_quotient;
};
std::vector<RothRow> roth_report(const Factorization& f, const RothA& a, const RothB* b, int stable_dim,
                                 const RothC* c);

Eigen::MatrixXd to_eigen(const IntMatrix& m);

}  // namespace iet
