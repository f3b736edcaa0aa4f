#pragma once

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

// Undirected network with an implicit self-loop on every node.
struct Network {
    std::vector<std::string> nodes;  // sorted, unique
    std::set<std::pair<std::string, std::string>> edges;  // normalized first < second

    bool has_node(const std::string& n) const;
    std::vector<std::string> neighbors(const std::string& n) const;
    // Both directions of every edge plus one channel per self-loop, sorted.
    std::vector<std::pair<std::string, std::string>> directed_channels() const;

    bool operator==(const Network&) const = default;
};

enum class ChannelKind { queue, multiset };
enum class InputPolicy { closed, interactive, autonomous };

std::string to_string(ChannelKind);
std::string to_string(InputPolicy);

struct Scenario {
    Program program;
    Stratification strata;
    Network network;
    FactSet initial_state;               // D0, shared by every node
    ChannelKind channel_kind = ChannelKind::queue;
    InputPolicy policy = InputPolicy::closed;
    std::vector<FactSet> input_pool;     // {∅} under the closed policy
    std::string source_path;
};

struct ScenarioError : std::runtime_error {
    std::vector<Diagnostic> diagnostics;
    explicit ScenarioError(std::vector<Diagnostic> diags);
};

// Scenario file: sections network/signatures/channel/policy/init/inputs/
// program. Throws ScenarioError with the collected diagnostics.
Scenario load_scenario_text(std::string_view text, const std::string& base_dir = ".",
                            const std::string& source_path = "<text>");
Scenario load_scenario_file(const std::string& path);

// Re-runs all static checks on an already-built scenario (used by the
// compilers, whose output must itself validate).
std::vector<Diagnostic> validate_scenario(const Scenario&);

std::string write_scenario_text(const Scenario&);

}  // namespace d2c
