#pragma once

#include "iet/combinatorics.hpp"
#include "iet/iem.hpp"
#include "iet/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iet {

template <class S>
struct Point2 {
    S x, y;
};

// Marked point of the suspension: one sigma-cycle with its cone angle 2 pi kappa.
struct MarkedPoint {
    std::vector<HalfPoint> cycle;
    int kappa = 0;
    std::vector<int> top_vertices;     // indices 0..d on the top line
    std::vector<int> bottom_vertices;  // indices 0..d on the bottom line
};

// Canonical suspension with zeta_a = lambda_a + i tau_a, tau_a = pi_b(a) - pi_t(a).
// The polygon is {(x, y) : bottom(x) < y < top(x)}; the top side of a is glued to its bottom side.
template <class S>
class TranslationSurface {
public:
    TranslationSurface() = default;
    explicit TranslationSurface(StandardIEM<S> t);

    const StandardIEM<S>& base() const { return t_; }
    const PermutationPair& pi() const { return t_.pi(); }
    int size() const { return t_.size(); }
    int genus() const { return g_; }
    const std::vector<long>& tau() const { return tau_; }
    const std::vector<Point2<S>>& top_line() const { return top_; }
    const std::vector<Point2<S>>& bottom_line() const { return bot_; }
    // Counterclockwise, 2d vertices: bottom line left to right, then top line right to left.
    std::vector<Point2<S>> polygon() const;
    // Translation taking the top side of a onto its bottom side.
    Point2<S> gluing(Letter a) const;
    const std::vector<MarkedPoint>& marked_points() const { return marked_; }
    int marked_point_of_top_vertex(int k) const { return top_mp_[k]; }
    int marked_point_of_bottom_vertex(int k) const { return bot_mp_[k]; }

    S top_height(const S& x) const;
    S bottom_height(const S& x) const;

    S area() const;          // shoelace
    S pairing_area() const;  // -lambda^T Omega tau

private:
    StandardIEM<S> t_;
    std::vector<long> tau_;
    std::vector<Point2<S>> top_, bot_;
    std::vector<MarkedPoint> marked_;
    std::vector<int> top_mp_, bot_mp_;
    int g_ = 0;
};

template <class S>
TranslationSurface<S> suspend(const StandardIEM<S>& t) {
    return TranslationSurface<S>(t);
}

template <class S>
struct HorizontalSegment {
    S x0, x1, y;
};

// Base segment [origin, end) at height 0.
template <class S>
HorizontalSegment<S> base_segment(const TranslationSurface<S>& s) {
    return {s.base().origin(), s.base().end(), S(0)};
}

enum class Verdict { Good, Bad, Unknown };
std::string verdict_name(Verdict v);

template <class S>
struct VerticalTrace {
    enum class End { MarkedPoint, Segment, Depth };
    End end = End::Depth;
    bool upward = true;
    int marked_point = -1;
    std::vector<S> xs;  // x of each vertical piece, in order
};

template <class S>
struct GoodPositionSegment {
    HorizontalSegment<S> segment;
    bool endpoints_distinct = false;
    Verdict condition1 = Verdict::Unknown;  // every traced upward separatrix meets the segment
    Verdict condition2 = Verdict::Unknown;  // each endpoint is in Sigma or joined to it off the segment
    Verdict verdict = Verdict::Unknown;
    std::vector<int> endpoint_marked_point{-1, -1};            // endpoint itself in Sigma
    std::vector<std::optional<VerticalTrace<S>>> endpoint_witness{std::nullopt, std::nullopt};
    std::vector<VerticalTrace<S>> separatrices;                // one per interior bottom vertex
};

template <class S>
GoodPositionSegment<S> good_position_check(const TranslationSurface<S>& s, const HorizontalSegment<S>& seg,
                                           int depth = 1000);

template <class S>
struct ReturnMap {
    StandardIEM<S> map;
    std::vector<Letter> first_side;  // per letter of map: first top side crossed
    std::vector<long> steps;         // per letter: sides crossed before returning
};

// First return of the upward vertical flow. Letters are inherited from first_side when it is injective
// and covers the alphabet, otherwise named A, B, ... in top order.
template <class S>
ReturnMap<S> vertical_return_map(const TranslationSurface<S>& s, const HorizontalSegment<S>& seg,
                                 bool require_good_position = true, int depth = 1000);

// Appendix C diagnostics for a big-float map.
struct AppendixCOptions {
    long n_max = 100000;
    int per_decade = 20;
    int max_levels = 400;
};

struct OrbitRow {
    long n = 0;
    double separation = 0, covering = 0;
};

struct LevelRow {
    int n = 0;
    double log_norm = 0;       // log |B(n)|
    double log_entrance = 0;   // log of min over i of r^b_i(n), r^t_i(n)
    double entrance_ratio = 0;
    double balance_ratio = 0;
};

struct AppendixCDiagnostics {
    std::vector<OrbitRow> orbit;
    std::vector<LevelRow> levels;
    bool truncated = false;
    std::string note;
    std::string csv() const;
};

AppendixCDiagnostics appendix_c_diagnostics(const StandardIEM<BigFloat>& t, const AppendixCOptions& opt = {});

// Least-squares slope of log y against log x over the points with x >= x_min.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double x_min = 0);

}  // namespace iet
