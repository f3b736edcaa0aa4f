#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "d2c/ast.hpp"
#include "d2c/fact.hpp"

namespace d2c {

struct ParseError {
    int line = 0;
    int column = 0;
    std::string token;
    std::string message;

    std::string format() const;
};

using ParseResult = std::variant<Program, ParseError>;

// Parses a D2C program and resolves predicate kinds by inference (labeled
// atoms are transport, atoms under prev or heading rules are state, the rest
// default to input). Scenario files re-resolve against declared signatures.
ParseResult parse_program(std::string_view text);

// Syntax only: rules with unresolved atom kinds and empty signature maps.
ParseResult parse_program_raw(std::string_view text);

// Parses a sequence of ground facts ("p(a,b). q." ...), as used by scenario
// init/input sections.
std::variant<std::vector<GroundAtom>, ParseError> parse_fact_list(std::string_view text);

}  // namespace d2c
