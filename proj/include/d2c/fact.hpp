#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace d2c {

// A ground relational fact. Ordering is lexicographic on (pred, args), which
// fixes the iteration order of every FactSet and with it the determinism of
// everything built on top.
struct GroundAtom {
    std::string pred;
    std::vector<std::string> args;

    auto operator<=>(const GroundAtom&) const = default;
    std::string to_string() const;
};

using FactSet = std::set<GroundAtom>;

// A transport fact in flight. For an incoming message the label names the
// sender; for an outgoing one it names the recipient.
struct LabeledMessage {
    GroundAtom fact;
    std::string label;

    auto operator<=>(const LabeledMessage&) const = default;
    std::string to_string() const;  // "fact@label"
};

std::string to_string(const FactSet&);
std::set<std::string> fact_constants(const FactSet&);

}  // namespace d2c
