// Global DRTS semantics: configurations, the c-step successor relation,
// termination detection, seeded random walks, and trace replay.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "d2c/eval.hpp"
#include "d2c/scenario.hpp"

namespace d2c {

struct ChannelInstance {
    ChannelKind kind = ChannelKind::queue;
    // Queue order for queue channels; kept sorted for multiset channels.
    std::vector<GroundAtom> contents;

    bool empty() const { return contents.empty(); }
    size_t size() const { return contents.size(); }
    // Atoms a transition may consume: the head for a queue, each distinct
    // element for a multiset.
    std::vector<GroundAtom> consumable() const;
    void add(const GroundAtom&);
    void remove(const GroundAtom&);  // head (queue) / one copy (multiset)

    bool operator==(const ChannelInstance&) const = default;
};

struct GlobalConfig {
    std::map<std::string, FactSet> node_state;
    std::map<std::string, std::optional<LabeledMessage>> node_prev_msg;
    std::map<std::pair<std::string, std::string>, ChannelInstance> channels;

    bool operator==(const GlobalConfig&) const = default;
};

struct Transition {
    std::pair<std::string, std::string> edge;  // (sender, destination)
    GroundAtom consumed;
    int input_index = 0;
    // Index into the deterministic list of (step outcome x queue-emission
    // interleaving) pairs for this (edge, consumed, input).
    int outcome_index = 0;
    ChoiceWitness witness;
};

// Evaluation context of one node; the scenario must outlive it.
EvalContext make_context(const Scenario&, const std::string& node);

GlobalConfig initial_config(const Scenario&);
bool is_terminated(const GlobalConfig&);

// All c-step successors, deterministically ordered by (edge, consumed
// message, input index, outcome index). Under the autonomous policy the
// run's fixed input must be supplied; interactive ranges over the pool;
// closed uses the empty input.
std::vector<std::pair<Transition, GlobalConfig>> successors(
    const Scenario&, const GlobalConfig&, std::optional<int> autonomous_input = std::nullopt);

struct Trace {
    std::vector<Transition> steps;
    std::optional<int> autonomous_input;
};

// Uniform pseudorandom walk, reproducible for a given seed; stops at
// termination or after max_steps transitions. Autonomous runs draw their
// fixed input from the same generator.
Trace run(const Scenario&, uint64_t seed, int max_steps);

// Applies a trace from the initial configuration; throws ScenarioError if a
// step does not match any successor.
GlobalConfig replay(const Scenario&, const Trace&);

std::string write_trace_text(const Trace&);
Trace read_trace_text(std::string_view);
std::string trace_to_json(const Trace&);

std::string to_string(const GlobalConfig&);

}  // namespace d2c
