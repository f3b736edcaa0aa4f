// The two compilations between propositional lazy-bounded DDSs and CFSMs:
// dds_to_cfsm pairs each message reception with a read transition followed by
// a chain of writes through fresh auxiliary states; cfsm_to_dds emits the
// three-node simulator/activator/terminator gadget.

#pragma once

#include <stdexcept>

#include "d2c/cfsm.hpp"
#include "d2c/scenario.hpp"

namespace d2c {

struct BoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ReductionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requires a propositional transport signature and a lazy-bounded scenario;
// the bound b caps the non-rigid constants a local state may mention
// (BoundExceeded otherwise). Node states are the local configurations
// (state DB + previous message) discovered by construction-time exploration;
// targets are all non-auxiliary states. Autonomous policies are supported
// only with a singleton input pool.
CfsmFile dds_to_cfsm(const Scenario&, int bound_b);

// Single-node machine -> closed-input queue-channel scenario with three
// nodes (sim, act, ter) whose sometimes-termination coincides with the
// machine's reachability of an empty-channel target configuration.
Scenario cfsm_to_dds(const Cfsm&, const TargetSet&);

}  // namespace d2c
