#include "iet/combinatorics.hpp"

#include "iet/errors.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace iet {

const char* to_string(ArrowType t) { return t == ArrowType::Top ? "top" : "bottom"; }

ArrowType parse_arrow_type(const std::string& s) {
    if (s == "top" || s == "t" || s == "T") return ArrowType::Top;
    if (s == "bottom" || s == "b" || s == "B") return ArrowType::Bottom;
    throw ParseError("arrow type must be 'top' or 'bottom', got '" + s + "'");
}

PermutationPair::PermutationPair(std::vector<std::string> alphabet, std::vector<int> pi_top, std::vector<int> pi_bottom)
    : alphabet_(std::move(alphabet)) {
    const int d = static_cast<int>(alphabet_.size());
    if (d < 2) throw DomainError("alphabet needs at least 2 letters");
    if (static_cast<int>(pi_top.size()) != d || static_cast<int>(pi_bottom.size()) != d)
        throw DomainError("pi_top/pi_bottom must be parallel to the alphabet");
    std::set<std::string> names(alphabet_.begin(), alphabet_.end());
    if (static_cast<int>(names.size()) != d) throw DomainError("alphabet symbols must be distinct");
    top_.assign(d, -1);
    bot_.assign(d, -1);
    for (int a = 0; a < d; ++a) {
        int pt = pi_top[a], pb = pi_bottom[a];
        if (pt < 1 || pt > d || pb < 1 || pb > d) throw DomainError("positions must lie in 1..d");
        if (top_[pt - 1] != -1 || bot_[pb - 1] != -1) throw DomainError("pi_top/pi_bottom must be bijections");
        top_[pt - 1] = a;
        bot_[pb - 1] = a;
    }
    rebuild_positions();
}

PermutationPair PermutationPair::from_rows(const std::string& top, const std::string& bottom) {
    std::vector<char> letters(top.begin(), top.end());
    std::sort(letters.begin(), letters.end());
    std::vector<std::string> alphabet;
    for (char c : letters) alphabet.emplace_back(1, c);
    if (bottom.size() != top.size()) throw DomainError("rows of different length");
    const int d = static_cast<int>(alphabet.size());
    std::vector<int> pt(d, 0), pb(d, 0);
    for (int i = 0; i < d; ++i) {
        auto it = std::find(letters.begin(), letters.end(), top[i]);
        pt[it - letters.begin()] = i + 1;
        auto jt = std::find(letters.begin(), letters.end(), bottom[i]);
        if (jt == letters.end()) throw DomainError("bottom row uses a letter missing from the top row");
        pb[jt - letters.begin()] = i + 1;
    }
    return PermutationPair(std::move(alphabet), pt, pb);
}

void PermutationPair::rebuild_positions() {
    const int d = size();
    pos_top_.assign(d, 0);
    pos_bot_.assign(d, 0);
    for (int i = 0; i < d; ++i) {
        pos_top_[top_[i]] = i;
        pos_bot_[bot_[i]] = i;
    }
}

Letter PermutationPair::letter(const std::string& name) const {
    for (int a = 0; a < size(); ++a)
        if (alphabet_[a] == name) return a;
    throw DomainError("unknown letter '" + name + "'");
}

std::vector<int> PermutationPair::pi_top() const {
    std::vector<int> r(size());
    for (int a = 0; a < size(); ++a) r[a] = pos_top_[a] + 1;
    return r;
}

std::vector<int> PermutationPair::pi_bottom() const {
    std::vector<int> r(size());
    for (int a = 0; a < size(); ++a) r[a] = pos_bot_[a] + 1;
    return r;
}

bool PermutationPair::irreducible() const {
    const int d = size();
    // top^-1({1..k}) == bottom^-1({1..k}) iff max bottom position among the first k top letters is k-1.
    int max_bot = -1;
    for (int k = 1; k < d; ++k) {
        max_bot = std::max(max_bot, pos_bot_[top_[k - 1]]);
        if (max_bot == k - 1) return false;
    }
    return true;
}

void PermutationPair::require_irreducible() const {
    if (!irreducible()) throw DomainError("combinatorial data " + rows_string() + " is reducible");
}

PermutationPair PermutationPair::rauzy_step(ArrowType t) const {
    PermutationPair r = *this;
    if (t == ArrowType::Top) {
        // loser (last on bottom) moves to just after the winner on the bottom row
        Letter w = alpha_t(), l = alpha_b();
        r.bot_.pop_back();
        auto it = std::find(r.bot_.begin(), r.bot_.end(), w);
        r.bot_.insert(it + 1, l);
    } else {
        Letter w = alpha_b(), l = alpha_t();
        r.top_.pop_back();
        auto it = std::find(r.top_.begin(), r.top_.end(), w);
        r.top_.insert(it + 1, l);
    }
    r.rebuild_positions();
    return r;
}

PermutationPair PermutationPair::rauzy_step_inverse(ArrowType t) const {
    PermutationPair r = *this;
    std::vector<Letter>& row = t == ArrowType::Top ? r.bot_ : r.top_;
    Letter w = t == ArrowType::Top ? alpha_t() : alpha_b();
    auto it = std::find(row.begin(), row.end(), w);
    if (it + 1 == row.end()) throw DomainError("rauzy_step_inverse: no arrow of this type ends at " + rows_string());
    Letter l = *(it + 1);
    row.erase(it + 1);
    row.push_back(l);
    r.rebuild_positions();
    return r;
}

std::string PermutationPair::rows_string() const {
    std::string s;
    for (int i = 0; i < size(); ++i) s += (i ? " " : "") + alphabet_[top_[i]];
    s += " / ";
    for (int i = 0; i < size(); ++i) s += (i ? " " : "") + alphabet_[bot_[i]];
    return s;
}

bool PermutationPair::operator<(const PermutationPair& o) const {
    if (alphabet_ != o.alphabet_) return alphabet_ < o.alphabet_;
    if (pos_top_ != o.pos_top_) return pos_top_ < o.pos_top_;
    return pos_bot_ < o.pos_bot_;
}

RauzyArrow make_arrow(const PermutationPair& p, ArrowType t) {
    return RauzyArrow{p, p.rauzy_step(t), t, p.winner(t), p.loser(t)};
}

int RauzyDiagram::index_of(const PermutationPair& p) const {
    auto it = index_.find(p);
    return it == index_.end() ? -1 : it->second;
}

RauzyDiagram build_rauzy_class(const PermutationPair& seed, std::size_t vertex_budget) {
    seed.require_irreducible();
    std::set<PermutationPair> seen{seed};
    std::deque<PermutationPair> queue{seed};
    while (!queue.empty()) {
        PermutationPair p = queue.front();
        queue.pop_front();
        for (ArrowType t : {ArrowType::Top, ArrowType::Bottom}) {
            PermutationPair q = p.rauzy_step(t);
            if (seen.insert(q).second) {
                if (seen.size() > vertex_budget)
                    throw DomainError("Rauzy class exceeds the vertex budget of " + std::to_string(vertex_budget));
                queue.push_back(q);
            }
        }
    }
    RauzyDiagram g;
    g.vertices_.assign(seen.begin(), seen.end());
    for (int i = 0; i < static_cast<int>(g.vertices_.size()); ++i) g.index_[g.vertices_[i]] = i;
    for (int i = 0; i < static_cast<int>(g.vertices_.size()); ++i) {
        const PermutationPair& p = g.vertices_[i];
        for (ArrowType t : {ArrowType::Top, ArrowType::Bottom})
            g.arrows_.push_back({i, g.index_.at(p.rauzy_step(t)), t, p.winner(t), p.loser(t)});
    }
    return g;
}

SigmaPermutation sigma_and_cycles(const PermutationPair& p) {
    const int d = p.size();
    SigmaPermutation s;
    s.map.assign(2 * d, -1);
    for (Letter a = 0; a < d; ++a) {
        HalfPoint right{a, Side::R}, left{a, Side::L}, img;
        if (a != p.alpha_t())
            img = {p.top(p.pos_top(a) + 1), Side::L};
        else
            img = {p.alpha_b(), Side::R};
        s.map[right.index()] = img.index();
        if (a != p.b_alpha())
            img = {p.bottom(p.pos_bottom(a) - 1), Side::R};
        else
            img = {p.t_alpha(), Side::L};
        s.map[left.index()] = img.index();
    }
    std::vector<int> hits(2 * d, 0);
    for (int v : s.map) ++hits[v];
    for (int h : hits)
        if (h != 1) throw InvariantError("sigma is not a permutation for " + p.rows_string());
    s.cycle_of.assign(2 * d, -1);
    for (int start = 0; start < 2 * d; ++start) {
        if (s.cycle_of[start] != -1) continue;
        std::vector<HalfPoint> cyc;
        int c = static_cast<int>(s.cycles.size());
        for (int h = start; s.cycle_of[h] == -1; h = s.map[h]) {
            s.cycle_of[h] = c;
            cyc.push_back(HalfPoint::from_index(h));
        }
        s.cycles.push_back(std::move(cyc));
    }
    return s;
}

std::vector<std::vector<int>> omega_matrix(const PermutationPair& p) {
    const int d = p.size();
    std::vector<std::vector<int>> om(d, std::vector<int>(d, 0));
    for (Letter a = 0; a < d; ++a)
        for (Letter b = 0; b < d; ++b) {
            bool top_before = p.pos_top(a) < p.pos_top(b);
            bool bot_before = p.pos_bottom(a) < p.pos_bottom(b);
            if (top_before && !bot_before && a != b) om[a][b] = 1;
            else if (!top_before && bot_before && a != b) om[a][b] = -1;
        }
    return om;
}

IntMatrix omega_int(const PermutationPair& p) {
    auto om = omega_matrix(p);
    const int d = p.size();
    IntMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = om[i][j];
    return m;
}

GenusData genus_and_marked_points(const PermutationPair& p) {
    p.require_irreducible();
    int rank = omega_int(p).rank();
    if (rank % 2) throw InvariantError("odd rank of Omega for " + p.rows_string());
    GenusData gd{rank / 2, sigma_and_cycles(p).s()};
    if (p.size() != 2 * gd.g + gd.s - 1)
        throw InvariantError("d != 2g+s-1 for " + p.rows_string());
    return gd;
}

std::vector<RauzyArrow> RauzyPath::arrows() const {
    std::vector<RauzyArrow> out;
    out.reserve(types.size());
    PermutationPair p = start;
    for (ArrowType t : types) {
        out.push_back(make_arrow(p, t));
        p = out.back().target;
    }
    return out;
}

PermutationPair RauzyPath::end() const {
    PermutationPair p = start;
    for (ArrowType t : types) p = p.rauzy_step(t);
    return p;
}

std::vector<Letter> RauzyPath::winners() const {
    std::vector<Letter> w;
    w.reserve(types.size());
    PermutationPair p = start;
    for (ArrowType t : types) {
        w.push_back(p.winner(t));
        p = p.rauzy_step(t);
    }
    return w;
}

IntMatrix cocycle_matrix(const RauzyArrow& a) {
    return IntMatrix::elementary(a.source.size(), a.loser, a.winner);
}

IntMatrix cocycle_matrix(const std::vector<RauzyArrow>& path) {
    if (path.empty()) throw DomainError("empty path has no start vertex");
    const int d = path.front().source.size();
    IntMatrix b = IntMatrix::identity(d);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0 && !(path[i].source == path[i - 1].target))
            throw DomainError("path arrows " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not consecutive");
        // left-multiply by I + E_{loser,winner}: row loser += row winner
        const RauzyArrow& a = path[i];
        for (int j = 0; j < d; ++j) b(a.loser, j) += b(a.winner, j);
    }
    return b;
}

IntMatrix cocycle_matrix(const RauzyPath& path) {
    const int d = path.start.size();
    IntMatrix b = IntMatrix::identity(d);
    PermutationPair p = path.start;
    for (ArrowType t : path.types) {
        Letter w = p.winner(t), l = p.loser(t);
        for (int j = 0; j < d; ++j) b(l, j) += b(w, j);
        p = p.rauzy_step(t);
    }
    return b;
}

RunResult run_matrix(const PermutationPair& p, ArrowType t, const Integer& k) {
    if (k < 0) throw DomainError("negative run length");
    const int d = p.size();
    // letters after the winner in the opposite row cycle with period m
    Letter w = p.winner(t);
    int m = t == ArrowType::Top ? d - 1 - p.pos_bottom(w) : d - 1 - p.pos_top(w);
    RauzyPath cyc{p, std::vector<ArrowType>(m, t)};
    IntMatrix c = cocycle_matrix(cyc);
    Integer q = k / m;
    long rem = static_cast<long>(Integer(k % m).get_si());
    RauzyPath tail{p, std::vector<ArrowType>(rem, t)};
    return {cocycle_matrix(tail) * c.pow(q), tail.end()};
}

Completeness path_completeness(int d, const std::vector<Letter>& winners) {
    Completeness c;
    std::vector<bool> won(d, false);
    int count = 0;
    for (std::size_t i = 0; i < winners.size(); ++i) {
        if (!won[winners[i]]) {
            won[winners[i]] = true;
            ++count;
        }
        if (count == d) {
            c.cuts.push_back(i + 1);
            std::fill(won.begin(), won.end(), false);
            count = 0;
        }
    }
    c.complete_count = static_cast<int>(c.cuts.size());
    for (Letter a = 0; a < d; ++a)
        if (!won[a]) c.missing_in_tail.push_back(a);
    return c;
}

Completeness path_completeness(const RauzyPath& path) { return path_completeness(path.start.size(), path.winners()); }

}  // namespace iet
