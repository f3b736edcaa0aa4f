// Communicating finite state machines over the same channel structures as
// the DRTS: per-node automata with read/write transitions over a finite
// 0-ary message alphabet, and bounded reachability of empty-channel target
// configurations.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "d2c/scenario.hpp"
#include "d2c/termcheck.hpp"

namespace d2c {

struct CfsmTransition {
    std::string from;
    bool is_read = true;                        // read(edge, msg) / write(edge, msg)
    std::pair<std::string, std::string> edge;   // directed channel
    std::string msg;
    std::string to;

    auto operator<=>(const CfsmTransition&) const = default;
};

struct CfsmNode {
    std::vector<std::string> states;
    std::string initial;
    std::set<std::string> auxiliary;            // initial is never auxiliary
    std::vector<CfsmTransition> transitions;
};

struct Cfsm {
    Network network;
    std::set<std::string> alphabet;
    std::map<std::string, CfsmNode> per_node;
    // Messages pending at start, per directed channel; empty by default.
    // dds_to_cfsm seeds every self-loop with start.
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> initial_channels;
};

struct TargetSet {
    // Reached when every node sits in an accepting state, no node is in an
    // auxiliary state, and all channels are empty.
    std::map<std::string, std::set<std::string>> accepting;
};

std::vector<Diagnostic> validate_cfsm(const Cfsm&, const TargetSet&);

struct CfsmMove {
    std::string node;
    CfsmTransition transition;
};

struct CfsmVerdict {
    VerdictKind kind = VerdictKind::unknown;
    long configs_explored = 0;
    long frontier_peak = 0;
    std::optional<std::vector<CfsmMove>> witness;
};

// BFS reachability of the target set; verdict semantics as in termcheck.
CfsmVerdict cfsm_reach(const Cfsm&, const TargetSet&, ChannelKind, const SearchBudget&);

std::string write_cfsm_text(const Cfsm&, const TargetSet&);
struct CfsmFile {
    Cfsm machine;
    TargetSet targets;
};
CfsmFile load_cfsm_text(std::string_view text, const std::string& source = "<text>");
CfsmFile load_cfsm_file(const std::string& path);

std::string cfsm_verdict_to_json(const CfsmVerdict&);
std::string cfsm_verdict_report_text(const CfsmVerdict&);

}  // namespace d2c
