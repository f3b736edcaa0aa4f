#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "d2c/ast.hpp"

namespace d2c {

struct Diagnostic {
    enum class Kind { signature, safety, stratification, choice, scenario };
    Kind kind = Kind::signature;
    int line = 0, column = 0;
    std::string message;

    std::string format() const;
};

struct SignatureDecls {
    std::map<std::string, int> state, transport, input;
};

// Assigns atom kinds and fills the program's signature maps. With `declared`
// null, kinds are inferred; otherwise every predicate must be consistent with
// the declarations. `neighbor/1` is rewritten to `my_neighbor/1`. Reports
// arity clashes, cross-signature clashes, unlabeled transport atoms, and
// labels on non-transport atoms.
std::vector<Diagnostic> resolve_signatures(Program&, const SignatureDecls* declared);

struct SafetyError {
    std::vector<std::string> unsafe_vars;
};

// ok iff every variable of the rule (head, constraints, choice, negative
// literals) occurs in a positive non-choice body literal.
std::optional<SafetyError> check_safety(const Rule&);

struct Stratification {
    std::map<std::string, int> level;  // state predicate -> stratum
    int num_levels = 1;
};

struct StratificationError {
    std::string cycle;  // human-readable description of a negative cycle
};

// Stratifies the current-step state-predicate dependency graph. prev-scoped,
// transport, and input literals impose no edges.
std::variant<Stratification, StratificationError> stratify(const Program&);

struct NotPropositional {
    std::vector<std::pair<std::string, int>> offenders;
};

// ok iff every transport predicate is 0-ary.
std::optional<NotPropositional> check_plb(const Program&);

// Full static validation after signature resolution: reserved heads, label
// placement, negative current-step transport literals, prev-scoped input or
// choice, choice variable coverage and disjointness, safety. Does not
// stratify; call stratify separately.
std::vector<Diagnostic> validate_program(const Program&);

}  // namespace d2c
