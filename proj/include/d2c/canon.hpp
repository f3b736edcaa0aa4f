#pragma once

#include <set>
#include <string>

#include "d2c/sim.hpp"

namespace d2c {

// Constants fixed by the scenario: program text, D0, node ids, input pool.
std::set<std::string> rigid_constants(const Scenario&);

// Deterministic serialization of a configuration (not renaming-invariant).
std::string encode_config(const GlobalConfig&);

struct CanonicalConfig {
    std::string encoding;
    auto operator<=>(const CanonicalConfig&) const = default;
};

// Canonical form up to bijective renaming of non-rigid constants: the
// minimal encoding over all relabelings of the non-rigid constants to
// #k0, #k1, ... Exact for up to 8 non-rigid constants, greedy beyond
// (greedy is still deterministic, merely coarser at deduplication).
CanonicalConfig canonicalize(const GlobalConfig&, const std::set<std::string>& rigid);

}  // namespace d2c
