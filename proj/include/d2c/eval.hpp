// Local step evaluation: one node, one incoming message, all non-deterministic
// outcomes of the stratified fix-point with choice predicates.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2c/ast.hpp"
#include "d2c/fact.hpp"
#include "d2c/validate.hpp"

namespace d2c {

struct EvalContext {
    const Program* program = nullptr;
    const Stratification* strata = nullptr;
    std::string self_id;
    std::vector<std::string> neighbors;  // graph neighbors, self excluded
};

// One functional-dependency selection per choice rule: rule index ->
// (domain tuple -> range tuple), restricted to domains that actually fired.
struct ChoiceWitness {
    std::map<int, std::map<std::vector<std::string>, std::vector<std::string>>> selected;

    auto operator<=>(const ChoiceWitness&) const = default;
    std::string to_string() const;
};

struct StepOutcome {
    FactSet new_state;                     // includes my_name / my_neighbor
    std::set<LabeledMessage> outgoing;     // label = recipient
    ChoiceWitness witness;

    auto operator<=>(const StepOutcome&) const = default;
};

struct RecipientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChoiceScopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All outcomes of one computation step, sorted. Exactly one outcome when no
// choice rule fires; one per maximal FD-consistent selection otherwise.
// Throws RecipientError if a transport head is labeled with a node that is
// neither the node itself nor one of its neighbors.
std::vector<StepOutcome> step(const EvalContext& ctx,
                              const FactSet& input,
                              const FactSet& prev_state,
                              const std::optional<LabeledMessage>& prev_msg,
                              const LabeledMessage& msg);

// The paper's stdb / trdbtup projections of an outcome.
const FactSet& stdb(const StepOutcome&);
std::set<GroundAtom> trdbtup(const StepOutcome&, const std::string& recipient);

}  // namespace d2c
