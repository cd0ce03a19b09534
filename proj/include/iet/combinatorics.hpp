#pragma once

#include "iet/intmat.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace iet {

using Letter = int;  // index into the frozen alphabet

enum class ArrowType { Top, Bottom };
enum class Side { L, R };

const char* to_string(ArrowType t);
ArrowType parse_arrow_type(const std::string& s);

// A point of the 2d-element set A x {L, R}. Ordered lexicographically.
struct HalfPoint {
    Letter letter = 0;
    Side side = Side::L;
    int index() const { return 2 * letter + (side == Side::R ? 1 : 0); }
    static HalfPoint from_index(int i) { return {i / 2, i % 2 ? Side::R : Side::L}; }
    auto operator<=>(const HalfPoint&) const = default;
};

// Sign attached to a half-point by the boundary operator: L -> -1, R -> +1.
inline int epsilon(const HalfPoint& h) { return h.side == Side::R ? 1 : -1; }

class PermutationPair {
public:
    PermutationPair() = default;
    // pi_top, pi_bottom are 1-based positions, parallel to the alphabet.
    PermutationPair(std::vector<std::string> alphabet, std::vector<int> pi_top, std::vector<int> pi_bottom);
    // Rows written as strings of one-character letters, e.g. ("ABCD", "DCBA").
    // The alphabet is the sorted set of characters.
    static PermutationPair from_rows(const std::string& top, const std::string& bottom);

    int size() const { return static_cast<int>(top_.size()); }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::string& name(Letter a) const { return alphabet_[a]; }
    Letter letter(const std::string& name) const;

    // 0-based row access.
    Letter top(int pos) const { return top_[pos]; }
    Letter bottom(int pos) const { return bot_[pos]; }
    int pos_top(Letter a) const { return pos_top_[a]; }
    int pos_bottom(Letter a) const { return pos_bot_[a]; }
    const std::vector<Letter>& top_row() const { return top_; }
    const std::vector<Letter>& bottom_row() const { return bot_; }

    // 1-based arrays parallel to the alphabet.
    std::vector<int> pi_top() const;
    std::vector<int> pi_bottom() const;

    Letter alpha_t() const { return top_.back(); }   // last on top
    Letter alpha_b() const { return bot_.back(); }   // last on bottom
    Letter t_alpha() const { return top_.front(); }  // first on top
    Letter b_alpha() const { return bot_.front(); }  // first on bottom

    Letter winner(ArrowType t) const { return t == ArrowType::Top ? alpha_t() : alpha_b(); }
    Letter loser(ArrowType t) const { return t == ArrowType::Top ? alpha_b() : alpha_t(); }

    bool irreducible() const;
    void require_irreducible() const;

    PermutationPair rauzy_step(ArrowType t) const;
    // Inverse of rauzy_step(t): returns p with p.rauzy_step(t) == *this.
    PermutationPair rauzy_step_inverse(ArrowType t) const;

    std::string rows_string() const;  // "A B C D / D C B A"

    bool operator==(const PermutationPair& o) const { return top_ == o.top_ && bot_ == o.bot_ && alphabet_ == o.alphabet_; }
    // Lexicographic on (pi_top, pi_bottom).
    bool operator<(const PermutationPair& o) const;

private:
    void rebuild_positions();

    std::vector<std::string> alphabet_;
    std::vector<Letter> top_, bot_;
    std::vector<int> pos_top_, pos_bot_;
};

struct RauzyArrow {
    PermutationPair source, target;
    ArrowType type = ArrowType::Top;
    Letter winner = 0, loser = 0;
};

RauzyArrow make_arrow(const PermutationPair& p, ArrowType t);

class RauzyDiagram {
public:
    struct Edge {
        int source = 0, target = 0;
        ArrowType type = ArrowType::Top;
        Letter winner = 0, loser = 0;
    };

    const std::vector<PermutationPair>& vertices() const { return vertices_; }
    const std::vector<Edge>& arrows() const { return arrows_; }
    int index_of(const PermutationPair& p) const;  // -1 if absent
    // Outgoing arrow of the given type from vertex v.
    const Edge& out(int v, ArrowType t) const { return arrows_[2 * v + (t == ArrowType::Top ? 0 : 1)]; }

private:
    friend RauzyDiagram build_rauzy_class(const PermutationPair&, std::size_t);
    std::vector<PermutationPair> vertices_;
    std::vector<Edge> arrows_;
    std::map<PermutationPair, int> index_;
};

RauzyDiagram build_rauzy_class(const PermutationPair& seed, std::size_t vertex_budget = 100000);

struct SigmaPermutation {
    std::vector<int> map;                 // half-point index -> half-point index
    std::vector<std::vector<HalfPoint>> cycles;  // each starts at its smallest element
    std::vector<int> cycle_of;            // half-point index -> cycle number
    int s() const { return static_cast<int>(cycles.size()); }
    HalfPoint apply(HalfPoint h) const { return HalfPoint::from_index(map[h.index()]); }
};

SigmaPermutation sigma_and_cycles(const PermutationPair& p);

// Omega[a][b] in {-1, 0, 1}.
std::vector<std::vector<int>> omega_matrix(const PermutationPair& p);
IntMatrix omega_int(const PermutationPair& p);

struct GenusData {
    int g = 0, s = 0;
};
GenusData genus_and_marked_points(const PermutationPair& p);

// A path in a Rauzy diagram: a start vertex and a list of arrow types.
struct RauzyPath {
    PermutationPair start;
    std::vector<ArrowType> types;

    std::vector<RauzyArrow> arrows() const;
    PermutationPair end() const;
    std::vector<Letter> winners() const;
};

IntMatrix cocycle_matrix(const RauzyArrow& a);
// Product B_{a_l} ... B_{a_1}; arrows must be consecutive.
IntMatrix cocycle_matrix(const std::vector<RauzyArrow>& path);
IntMatrix cocycle_matrix(const RauzyPath& path);

// k consecutive arrows of one type starting at p; fast for huge k.
struct RunResult {
    IntMatrix matrix;
    PermutationPair end;
};
RunResult run_matrix(const PermutationPair& p, ArrowType t, const Integer& k);

struct Completeness {
    int complete_count = 0;
    std::vector<std::size_t> cuts;          // exclusive end index of each complete factor
    std::vector<Letter> missing_in_tail;    // letters that never won after the last cut
};
Completeness path_completeness(int d, const std::vector<Letter>& winners);
Completeness path_completeness(const RauzyPath& path);

}  // namespace iet
