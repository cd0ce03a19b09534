#include "iet/suspension.hpp"

#include "iet/errors.hpp"

#include <algorithm>

namespace iet {

namespace {

template <class S>
bool same(const S& a, const S& b, const S& scale) {
    if constexpr (scalar_traits<S>::exact) {
        (void)scale;
        return a == b;
    } else {
        return scalar_traits<S>::abs(a - b) <= scale * pow2(-static_cast<long>(precision_bits()) + 32);
    }
}

template <class S>
S interpolate(const std::vector<Point2<S>>& line, const S& x) {
    const int d = static_cast<int>(line.size()) - 1;
    int k = 0;
    while (k + 1 < d && !(x < line[k + 1].x)) ++k;
    const auto& p = line[k];
    const auto& q = line[k + 1];
    return p.y + (x - p.x) * (q.y - p.y) / (q.x - p.x);
}

std::string letter_name(int i) {
    if (i < 26) return std::string(1, static_cast<char>('A' + i));
    return "L" + std::to_string(i);
}

}  // namespace

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Good:
            return "good";
        case Verdict::Bad:
            return "bad";
        case Verdict::Unknown:
            return "unknown";
    }
    return "unknown";
}

template <class S>
TranslationSurface<S>::TranslationSurface(StandardIEM<S> t) : t_(std::move(t)) {
    const auto& p = t_.pi();
    const int d = p.size();
    tau_.resize(d);
    for (Letter a = 0; a < d; ++a) tau_[a] = p.pos_bottom(a) - p.pos_top(a);
    top_.resize(d + 1);
    bot_.resize(d + 1);
    long yt = 0, yb = 0;
    for (int k = 0; k <= d; ++k) {
        top_[k] = {t_.u_top(k), S(yt)};
        bot_[k] = {t_.u_bot(k), S(yb)};
        if (k < d) {
            yt += tau_[p.top(k)];
            yb += tau_[p.bottom(k)];
        }
    }
    for (int k = 1; k < d; ++k)
        if (!(top_[k].y > 0) || !(bot_[k].y < 0))
            throw DomainError("invalid suspension data: the canonical heights do not separate the polygonal lines; "
                              "use another representative of the Rauzy class");

    auto sg = sigma_and_cycles(p);
    marked_.resize(sg.s());
    for (int c = 0; c < sg.s(); ++c) marked_[c].cycle = sg.cycles[c];
    top_mp_.resize(d + 1);
    bot_mp_.resize(d + 1);
    for (int k = 0; k <= d; ++k) {
        HalfPoint ht = k < d ? HalfPoint{p.top(k), Side::L} : HalfPoint{p.top(d - 1), Side::R};
        HalfPoint hb = k < d ? HalfPoint{p.bottom(k), Side::L} : HalfPoint{p.bottom(d - 1), Side::R};
        top_mp_[k] = sg.cycle_of[ht.index()];
        bot_mp_[k] = sg.cycle_of[hb.index()];
        marked_[top_mp_[k]].top_vertices.push_back(k);
        marked_[bot_mp_[k]].bottom_vertices.push_back(k);
        if (k > 0 && k < d) ++marked_[bot_mp_[k]].kappa;
    }
    auto gs = genus_and_marked_points(p);
    g_ = gs.g;
    int excess = 0;
    for (const auto& m : marked_) excess += m.kappa - 1;
    if (gs.s != sg.s() || d != 2 * g_ + gs.s - 1 || excess != 2 * g_ - 2)
        throw InvariantError("cone angle bookkeeping failed");
}

template <class S>
std::vector<Point2<S>> TranslationSurface<S>::polygon() const {
    std::vector<Point2<S>> out(bot_.begin(), bot_.end());
    for (int k = size() - 1; k >= 1; --k) out.push_back(top_[k]);
    return out;
}

template <class S>
Point2<S> TranslationSurface<S>::gluing(Letter a) const {
    const auto& p = pi();
    return {bot_[p.pos_bottom(a)].x - top_[p.pos_top(a)].x, bot_[p.pos_bottom(a)].y - top_[p.pos_top(a)].y};
}

template <class S>
S TranslationSurface<S>::top_height(const S& x) const {
    return interpolate(top_, x);
}

template <class S>
S TranslationSurface<S>::bottom_height(const S& x) const {
    return interpolate(bot_, x);
}

template <class S>
S TranslationSurface<S>::area() const {
    auto poly = polygon();
    S twice(0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return twice / 2;
}

template <class S>
S TranslationSurface<S>::pairing_area() const {
    auto om = omega_matrix(pi());
    S sum(0);
    for (Letter a = 0; a < size(); ++a)
        for (Letter b = 0; b < size(); ++b)
            if (om[a][b] != 0) sum -= t_.lengths()[a] * S(om[a][b] * tau_[b]);
    return sum;
}

namespace {

template <class S>
struct Tracer {
    const TranslationSurface<S>& s;
    const HorizontalSegment<S>& seg;
    S scale;

    bool eq(const S& a, const S& b) const { return same(a, b, scale); }
    bool inside(const S& x) const { return seg.x0 < x && x < seg.x1 && !eq(x, seg.x0) && !eq(x, seg.x1); }

    int vertex_at(const std::vector<Point2<S>>& line, const S& x) const {
        for (int k = 0; k < static_cast<int>(line.size()); ++k)
            if (eq(line[k].x, x)) return k;
        return -1;
    }
    Letter side_at(bool top, const S& x) const {
        const auto& line = top ? s.top_line() : s.bottom_line();
        int k = 0;
        while (k + 2 < static_cast<int>(line.size()) && !(x < line[k + 1].x)) ++k;
        return top ? s.pi().top(k) : s.pi().bottom(k);
    }

    VerticalTrace<S> trace(S x, S y, bool upward, int depth) const {
        VerticalTrace<S> tr;
        tr.upward = upward;
        const auto& t = s.base();
        for (int step = 0; step < depth; ++step) {
            tr.xs.push_back(x);
            if (upward) {
                S ytop = s.top_height(x);
                if (inside(x) && y < seg.y && seg.y < ytop) {
                    tr.end = VerticalTrace<S>::End::Segment;
                    return tr;
                }
                int k = vertex_at(s.top_line(), x);
                if (k >= 0) {
                    tr.end = VerticalTrace<S>::End::MarkedPoint;
                    tr.marked_point = s.marked_point_of_top_vertex(k);
                    return tr;
                }
                x = x + t.translation(side_at(true, x));
                y = s.bottom_height(x);
            } else {
                S ybot = s.bottom_height(x);
                if (inside(x) && ybot < seg.y && seg.y < y) {
                    tr.end = VerticalTrace<S>::End::Segment;
                    return tr;
                }
                int k = vertex_at(s.bottom_line(), x);
                if (k >= 0) {
                    tr.end = VerticalTrace<S>::End::MarkedPoint;
                    tr.marked_point = s.marked_point_of_bottom_vertex(k);
                    return tr;
                }
                x = x - t.translation(side_at(false, x));
                y = s.top_height(x);
            }
        }
        tr.end = VerticalTrace<S>::End::Depth;
        return tr;
    }
};

template <class S>
void require_inside(const TranslationSurface<S>& s, const HorizontalSegment<S>& seg) {
    if (!(seg.x0 < seg.x1)) throw DomainError("segment endpoints must satisfy x0 < x1");
    const auto& t = s.base();
    if (seg.x0 < t.origin() || t.end() < seg.x1) throw DomainError("segment leaves the polygon");
    std::vector<S> xs{seg.x0, seg.x1};
    for (int k = 0; k <= s.size(); ++k) {
        for (const S& v : {t.u_top(k), t.u_bot(k)})
            if (seg.x0 < v && v < seg.x1) xs.push_back(v);
    }
    std::sort(xs.begin(), xs.end());
    auto strictly = [&](const S& x) { return s.bottom_height(x) < seg.y && seg.y < s.top_height(x); };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool end = i == 0 || i + 1 == xs.size();
        if (end) {
            if (s.bottom_height(xs[i]) > seg.y || s.top_height(xs[i]) < seg.y)
                throw DomainError("segment leaves the polygon");
        } else if (!strictly(xs[i])) {
            throw DomainError("segment leaves the polygon");
        }
        if (i + 1 < xs.size() && !strictly((xs[i] + xs[i + 1]) / 2)) throw DomainError("segment leaves the polygon");
    }
}

Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::Bad || b == Verdict::Bad) return Verdict::Bad;
    if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
    return Verdict::Good;
}

}  // namespace

template <class S>
GoodPositionSegment<S> good_position_check(const TranslationSurface<S>& s, const HorizontalSegment<S>& seg,
                                           int depth) {
    require_inside(s, seg);
    Tracer<S> tr{s, seg, s.base().total()};
    GoodPositionSegment<S> out;
    out.segment = seg;
    out.endpoints_distinct = seg.x0 < seg.x1 && !tr.eq(seg.x0, seg.x1);

    out.condition2 = Verdict::Good;
    for (int e = 0; e < 2; ++e) {
        const S& x = e == 0 ? seg.x0 : seg.x1;
        for (int k = 0; k <= s.size(); ++k) {
            if (tr.eq(s.top_line()[k].x, x) && tr.eq(s.top_line()[k].y, seg.y))
                out.endpoint_marked_point[e] = s.marked_point_of_top_vertex(k);
            if (tr.eq(s.bottom_line()[k].x, x) && tr.eq(s.bottom_line()[k].y, seg.y))
                out.endpoint_marked_point[e] = s.marked_point_of_bottom_vertex(k);
        }
        if (out.endpoint_marked_point[e] >= 0) continue;
        Verdict v = Verdict::Bad;
        for (bool up : {true, false}) {
            auto w = tr.trace(x, seg.y, up, depth);
            if (w.end == VerticalTrace<S>::End::MarkedPoint) {
                out.endpoint_witness[e] = w;
                v = Verdict::Good;
                break;
            }
            if (w.end == VerticalTrace<S>::End::Depth) v = Verdict::Unknown;
        }
        out.condition2 = combine(out.condition2, v);
    }

    out.condition1 = Verdict::Good;
    for (int k = 1; k < s.size(); ++k) {
        auto w = tr.trace(s.bottom_line()[k].x, s.bottom_line()[k].y, true, depth);
        if (w.end == VerticalTrace<S>::End::MarkedPoint) out.condition1 = Verdict::Bad;
        if (w.end == VerticalTrace<S>::End::Depth) out.condition1 = combine(out.condition1, Verdict::Unknown);
        out.separatrices.push_back(std::move(w));
    }
    out.verdict = out.endpoints_distinct ? combine(out.condition1, out.condition2) : Verdict::Bad;
    return out;
}

template <class S>
ReturnMap<S> vertical_return_map(const TranslationSurface<S>& s, const HorizontalSegment<S>& seg,
                                 bool require_good_position, int depth) {
    require_inside(s, seg);
    if (require_good_position) {
        auto gp = good_position_check(s, seg, depth);
        if (gp.verdict == Verdict::Bad) throw DomainError("segment is not in good position");
    }
    const auto& t = s.base();
    const int d = s.size();
    Tracer<S> tr{s, seg, t.total()};

    struct Piece {
        S a, b, shift;
        Letter first;
        long steps;
        bool a_sep, b_sep;  // boundary leaf already passed through a marked point
    };
    std::vector<Piece> live{{seg.x0, seg.x1, S(0), -1, 0, false, false}}, done;
    long budget = 50000000;
    auto empty = [&](const S& a, const S& b) { return !(a < b) || tr.eq(a, b); };
    auto connection = [&](const S& x) {
        throw ConnectionError("vertical connection avoiding the segment through x = " + scalar_traits<S>::str(x));
    };

    while (!live.empty()) {
        std::vector<Piece> next;
        for (auto& p : live) {
            // split below the top line at the vertices
            std::vector<Piece> parts;
            Piece cur = p;
            for (int k = 0; k <= d; ++k) {
                const S& v = t.u_top(k);
                // the corners bound the polygon; a leaf along them has length zero
                const bool interior = k > 0 && k < d;
                if (tr.eq(v, cur.a)) {
                    if (cur.a_sep && interior) connection(v);
                    cur.a_sep = true;
                } else if (tr.eq(v, cur.b)) {
                    if (cur.b_sep && interior) connection(v);
                    cur.b_sep = true;
                } else if (cur.a < v && v < cur.b) {
                    Piece left = cur;
                    left.b = v;
                    left.b_sep = true;
                    parts.push_back(left);
                    cur.a = v;
                    cur.a_sep = true;
                }
            }
            parts.push_back(cur);
            for (auto& q : parts) {
                Letter side = tr.side_at(true, (q.a + q.b) / 2);
                S dx = t.translation(side);
                if (q.steps == 0) q.first = side;
                q.a += dx;
                q.b += dx;
                q.shift += dx;
                ++q.steps;
                if (--budget < 0) throw InvariantError("vertical return map did not close within the step budget");
                // leaves from the bottom line through the segment return
                S lo = q.a < seg.x0 ? seg.x0 : q.a;
                S hi = seg.x1 < q.b ? seg.x1 : q.b;
                if (!empty(lo, hi)) {
                    Piece in = q;
                    in.a = lo;
                    in.b = hi;
                    done.push_back(in);
                }
                if (!empty(q.a, seg.x0) && q.a < seg.x0) {
                    Piece out = q;
                    out.b = seg.x0 < q.b ? seg.x0 : q.b;
                    if (seg.x0 < q.b) out.b_sep = false;
                    next.push_back(out);
                }
                if (!empty(seg.x1, q.b) && seg.x1 < q.b) {
                    Piece out = q;
                    out.a = seg.x1 < q.a ? q.a : seg.x1;
                    if (q.a < seg.x1) out.a_sep = false;
                    next.push_back(out);
                }
            }
        }
        live = std::move(next);
    }

    for (auto& p : done) {
        p.a -= p.shift;
        p.b -= p.shift;
    }
    std::sort(done.begin(), done.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    // no merging: adjacent pieces with equal translation are separated by a marked point of angle 2 pi
    const std::vector<Piece>& pieces = done;
    if (!tr.eq(pieces.front().a, seg.x0) || !tr.eq(pieces.back().b, seg.x1))
        throw InvariantError("return map pieces do not cover the segment");
    for (std::size_t i = 1; i < pieces.size(); ++i)
        if (!tr.eq(pieces[i - 1].b, pieces[i].a)) throw InvariantError("return map pieces do not tile the segment");

    const int m = static_cast<int>(pieces.size());
    std::vector<int> by_image(m);
    for (int i = 0; i < m; ++i) by_image[i] = i;
    std::sort(by_image.begin(), by_image.end(),
              [&](int x, int y) { return pieces[x].a + pieces[x].shift < pieces[y].a + pieces[y].shift; });

    std::vector<Letter> label(m);
    bool inherit = m == d;
    std::vector<bool> seen(d, false);
    for (int i = 0; inherit && i < m; ++i) {
        if (seen[pieces[i].first]) inherit = false;
        seen[pieces[i].first] = true;
    }
    std::vector<std::string> alphabet;
    if (inherit) {
        alphabet = t.pi().alphabet();
        for (int i = 0; i < m; ++i) label[i] = pieces[i].first;
    } else {
        for (int i = 0; i < m; ++i) {
            alphabet.push_back(letter_name(i));
            label[i] = i;
        }
    }
    std::vector<int> pt(m), pb(m);
    std::vector<S> len(m);
    ReturnMap<S> out;
    out.first_side.resize(m);
    out.steps.resize(m);
    for (int i = 0; i < m; ++i) {
        pt[label[i]] = i + 1;
        len[label[i]] = pieces[i].b - pieces[i].a;
        out.first_side[label[i]] = pieces[i].first;
        out.steps[label[i]] = pieces[i].steps;
    }
    for (int j = 0; j < m; ++j) pb[label[by_image[j]]] = j + 1;
    out.map = StandardIEM<S>(PermutationPair(alphabet, pt, pb), len, seg.x0);
    return out;
}

template class TranslationSurface<Rational>;
template class TranslationSurface<BigFloat>;
template GoodPositionSegment<Rational> good_position_check(const TranslationSurface<Rational>&,
                                                           const HorizontalSegment<Rational>&, int);
template GoodPositionSegment<BigFloat> good_position_check(const TranslationSurface<BigFloat>&,
                                                           const HorizontalSegment<BigFloat>&, int);
template ReturnMap<Rational> vertical_return_map(const TranslationSurface<Rational>&, const HorizontalSegment<Rational>&,
                                                 bool, int);
template ReturnMap<BigFloat> vertical_return_map(const TranslationSurface<BigFloat>&, const HorizontalSegment<BigFloat>&,
                                                 bool, int);

}  // namespace iet
