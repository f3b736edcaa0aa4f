// D2C rule language: abstract syntax.
//
// Rules have the shape
//     H if L1, ..., Ln  prev Ln+1, ..., Lm, T1 != T1', ...
// where H is a state or transport atom, the Li are literals over the three
// signatures (state / transport / input), `prev` opens a window onto the
// previous computation step, and the trailing inequalities constrain terms.
// A body may carry at most one choice predicate, which non-deterministically
// enforces a functional dependency among rule variables.

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace d2c {

enum class TermKind { variable, constant };

struct Term {
    TermKind kind = TermKind::constant;
    std::string text;

    bool is_var() const { return kind == TermKind::variable; }
    auto operator<=>(const Term&) const = default;
};

Term make_var(std::string name);
Term make_const(std::string name);

enum class AtomKind { state, transport, input };

struct Atom {
    std::string pred;
    std::vector<Term> args;
    std::optional<Term> label;  // present iff the atom is transport
    AtomKind kind = AtomKind::state;  // resolved by signature resolution
    int line = 0, column = 0;

    int arity() const { return static_cast<int>(args.size()); }
    bool operator==(const Atom& o) const {
        return pred == o.pred && args == o.args && label == o.label;
    }
};

struct Literal {
    Atom atom;
    bool negative = false;
    bool prev_scoped = false;

    bool operator==(const Literal& o) const {
        return atom == o.atom && negative == o.negative && prev_scoped == o.prev_scoped;
    }
};

struct ChoicePredicate {
    std::vector<std::string> domain_vars;  // may be empty (FD with empty domain)
    std::vector<std::string> range_vars;   // non-empty
    bool operator==(const ChoicePredicate&) const = default;
};

// An inequality lhs != rhs.
struct Constraint {
    Term lhs, rhs;
    bool operator==(const Constraint&) const = default;
};

struct Rule {
    Atom head;
    std::vector<Literal> body_current;
    std::vector<Literal> body_prev;
    std::vector<Constraint> constraints;
    std::optional<ChoicePredicate> choice;
    bool choice_in_prev = false;  // recorded by the parser, rejected at validation
    int line = 0, column = 0;

    bool operator==(const Rule& o) const {
        return head == o.head && body_current == o.body_current && body_prev == o.body_prev &&
               constraints == o.constraints && choice == o.choice;
    }
};

// Predicate name -> arity, one map per signature. The three signatures are
// disjoint by name; my_name/1 and my_neighbor/1 live in the state signature,
// start/0 in the transport signature, and none of them may head a rule.
struct Program {
    std::vector<Rule> rules;
    std::map<std::string, int> state_sig;
    std::map<std::string, int> transport_sig;
    std::map<std::string, int> input_sig;

    bool operator==(const Program& o) const { return rules == o.rules; }
};

inline const std::string kMyName = "my_name";
inline const std::string kMyNeighbor = "my_neighbor";
inline const std::string kStart = "start";

// Canonical surface syntax; parse(pretty_print(p)) reproduces p's rules.
std::string pretty_print(const Term&);
std::string pretty_print(const Atom&);
std::string pretty_print(const Literal&);
std::string pretty_print(const Rule&);
std::string pretty_print(const Program&);

// Variables of a rule in first-occurrence order (head, current body, prev
// body, constraints, choice).
std::vector<std::string> rule_variables(const Rule&);
// Constants mentioned anywhere in the program text.
std::set<std::string> program_constants(const Program&);

}  // namespace d2c
