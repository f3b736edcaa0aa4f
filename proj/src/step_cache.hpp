// Internal: successor computation parameterized over the local-step function,
// plus a memoizing wrapper. Search workloads revisit the same (node, local
// state, message) triples constantly; step() is pure, so caching is exact.

#pragma once

#include <functional>
#include <unordered_map>

#include "d2c/eval.hpp"
#include "d2c/sim.hpp"

namespace d2c::detail {

using StepFn = std::function<std::vector<StepOutcome>(
    const std::string& node, const FactSet& input, const FactSet& prev_state,
    const std::optional<LabeledMessage>& prev_msg, const LabeledMessage& msg)>;

std::vector<std::pair<Transition, GlobalConfig>> successors_impl(const Scenario&,
                                                                 const GlobalConfig&,
                                                                 std::optional<int> autonomous_input,
                                                                 const StepFn&);

// Emission interleavings of one outcome as flat (destination, message) lists:
// all per-destination orders for queue channels, the sorted order for
// multiset channels.
std::vector<std::vector<std::pair<std::string, GroundAtom>>> emission_orders(const StepOutcome&,
                                                                              ChannelKind);

class StepCache {
  public:
    explicit StepCache(const Scenario& sc) : sc_(&sc) {}

    StepFn fn() {
        return [this](const std::string& node, const FactSet& input, const FactSet& prev_state,
                      const std::optional<LabeledMessage>& prev_msg, const LabeledMessage& msg) {
            std::string key;
            key.reserve(512);
            auto add_atom = [&key](const GroundAtom& a) {
                key += a.pred;
                for (const auto& arg : a.args) {
                    key += ',';
                    key += arg;
                }
                key += ';';
            };
            key += node;
            key += '\x01';
            for (const auto& f : input) add_atom(f);
            key += '\x01';
            for (const auto& f : prev_state) add_atom(f);
            key += '\x01';
            if (prev_msg) {
                add_atom(prev_msg->fact);
                key += prev_msg->label;
            }
            key += '\x01';
            add_atom(msg.fact);
            key += msg.label;
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
            EvalContext ctx = make_context(*sc_, node);
            auto outcomes = step(ctx, input, prev_state, prev_msg, msg);
            return cache_.emplace(std::move(key), std::move(outcomes)).first->second;
        };
    }

  private:
    const Scenario* sc_;
    std::unordered_map<std::string, std::vector<StepOutcome>> cache_;
};

}  // namespace d2c::detail
