#include "iet/fixtures.hpp"

#include "iet/errors.hpp"

namespace iet {

std::vector<std::string> fixture_names() { return {"circle-golden", "periodic-genus2", "vertex-d5-s2", "liouville"}; }

bool is_periodic_fixture(const std::string& name) { return name != "liouville"; }

RauzyPath parse_loop(const PermutationPair& start, const std::string& types) {
    RauzyPath p{start, {}};
    for (char c : types) {
        if (c == 't')
            p.types.push_back(ArrowType::Top);
        else if (c == 'b')
            p.types.push_back(ArrowType::Bottom);
        else
            throw ParseError(std::string("arrow type must be 't' or 'b', got '") + c + "'");
    }
    return p;
}

std::string loop_string(const RauzyPath& path) {
    std::string s;
    for (auto t : path.types) s += t == ArrowType::Top ? 't' : 'b';
    return s;
}

RauzyPath fixture_loop(const std::string& name) {
    if (name == "circle-golden") return parse_loop(PermutationPair::from_rows("AB", "BA"), "tb");
    if (name == "periodic-genus2") return parse_loop(PermutationPair::from_rows("ABCD", "DCBA"), "ttbtbbtb");
    if (name == "vertex-d5-s2") return parse_loop(PermutationPair::from_rows("ABCDE", "EDCBA"), "ttbbtbtbbbtb");
    throw DomainError("unknown periodic fixture '" + name + "'");
}

RauzyPath repeat_loop(const RauzyPath& loop, int times) {
    RauzyPath p{loop.start, {}};
    for (int i = 0; i < times; ++i) p.types.insert(p.types.end(), loop.types.begin(), loop.types.end());
    return p;
}

OseledetsSplitting fixture_splitting(const PeriodicFixture& fx, int periods) {
    LyapunovOptions opt;
    opt.period = fx.loop.types.size();
    return lyapunov_and_stable_space(ArrowRuns::from_path(repeat_loop(fx.loop, periods), opt.period), opt);
}

PeriodicFixture periodic_fixture(const std::string& name) { return make_periodic_fixture(fixture_loop(name)); }

ArrowRuns liouville_runs(int blocks) {
    ArrowRuns r{PermutationPair::from_rows("AB", "BA"), {}};
    for (int k = 1; k <= blocks; ++k) {
        Integer len = 1;
        mpz_mul_2exp(len.get_mpz_t(), len.get_mpz_t(), 1UL << k);
        r.runs.emplace_back(k % 2 ? ArrowType::Bottom : ArrowType::Top, len);
    }
    return r;
}

}  // namespace iet
