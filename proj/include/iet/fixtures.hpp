#pragma once

#include "iet/cocycle.hpp"
#include "iet/induction.hpp"

#include <string>
#include <vector>

namespace iet {

// Built-in fixtures:
//   circle-golden    AB/BA, loop (top, bottom)
//   periodic-genus2  ABCD/DCBA, loop ttbtbbtb
//   vertex-d5-s2     ABCDE/EDCBA, loop ttbbtbtbbbtb (g = 2, s = 2)
//   liouville        AB/BA, runs of length 2^(2^k) alternating in type
std::vector<std::string> fixture_names();
bool is_periodic_fixture(const std::string& name);
RauzyPath fixture_loop(const std::string& name);
PeriodicFixture periodic_fixture(const std::string& name);
ArrowRuns liouville_runs(int blocks);

// Loop written as a string of 't' and 'b'.
RauzyPath parse_loop(const PermutationPair& start, const std::string& types);
std::string loop_string(const RauzyPath& path);

RauzyPath repeat_loop(const RauzyPath& loop, int times);

// Oseledets splitting of a periodic fixture from `periods` repetitions of its loop.
OseledetsSplitting fixture_splitting(const PeriodicFixture& fx, int periods = 200);

}  // namespace iet
