// Test-only oracles, independent of the implementation paths they check:
//  - maze reachability by plain BFS over the position graph;
//  - a grounding-based step evaluator that enumerates FD-consistent firing
//    subsets directly (the engine enumerates selection functions instead);
//  - configuration isomorphism by trying every bijection;
//  - scenario/maze generators for the property suites.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "d2c/eval.hpp"
#include "d2c/scenario.hpp"
#include "d2c/sim.hpp"

namespace d2c::test {

// --- mazes ----------------------------------------------------------------

struct Maze {
    std::vector<std::string> positions;
    // (from, to, direction); at most one direction name per position.
    std::vector<std::tuple<std::string, std::string, std::string>> paths;
    std::string start;
    std::string exit;
};

bool maze_exit_reachable(const Maze&);
Maze random_maze(std::mt19937_64& rng, int max_positions);

// The paper's two games over a given maze, as scenario file text.
std::string example1_scenario(const Maze&);
std::string example2_scenario(const Maze&,
                              const std::vector<std::pair<std::string, std::string>>& cards);

// --- independent step oracle ------------------------------------------------

std::vector<StepOutcome> oracle_step(const EvalContext& ctx, const FactSet& input,
                                     const FactSet& prev_state,
                                     const std::optional<LabeledMessage>& prev_msg,
                                     const LabeledMessage& msg);

// --- isomorphism ------------------------------------------------------------

// Tries every bijection between the non-rigid constants of the two configs.
bool configs_isomorphic(const GlobalConfig&, const GlobalConfig&,
                        const std::set<std::string>& rigid);

// --- random scenarios -------------------------------------------------------

// Small valid PLB scenario (1-2 nodes, propositional transport, closed or
// interactive), drawn from safe rule templates.
std::string random_plb_scenario(std::mt19937_64& rng);

// Scenario whose D0 carries relational data over fresh constants that never
// appear in the program text (for renaming properties).
std::string random_relational_scenario(std::mt19937_64& rng);

// Renames constants through the map, leaving unmapped constants alone.
GlobalConfig rename_config(const GlobalConfig&, const std::map<std::string, std::string>&);

}  // namespace d2c::test
