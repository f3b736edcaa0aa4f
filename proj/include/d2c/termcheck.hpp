// Sometimes-termination checking by breadth-first exploration of canonical
// configurations. Complete decision on finite canonical spaces, semi-decision
// in general; budgets turn exhaustion into UNKNOWN, never into a wrong answer.

#pragma once

#include <functional>
#include <optional>

#include "d2c/canon.hpp"
#include "d2c/sim.hpp"

namespace d2c {

struct SearchBudget {
    std::optional<long> max_configs;
    std::optional<int> max_channel;  // per-channel message cap; triggering it degrades verdicts
    std::optional<int> max_depth;
};

enum class VerdictKind { terminates, not_reachable, unknown };
std::string to_string(VerdictKind);

struct Verdict {
    VerdictKind kind = VerdictKind::unknown;
    long configs_explored = 0;
    long frontier_peak = 0;
    std::optional<Trace> witness;  // TERMINATES only; replays to an all-empty config
};

using ConfigObserver = std::function<void(const GlobalConfig&)>;

// BFS over canonical configurations. TERMINATES returns a shortest witness,
// deterministically tie-broken; NOT_REACHABLE certifies full exhaustion with
// no budget cap triggered; UNKNOWN otherwise. Under the autonomous policy the
// check is existential over the input pool. Results are independent of the
// thread count. The observer, when given, sees every distinct configuration
// as it is first discovered.
Verdict check_sometimes_termination(const Scenario&, const SearchBudget&, int threads = 1,
                                    const ConfigObserver& observer = {});

std::string verdict_to_json(const Verdict&);
std::string verdict_report_text(const Verdict&);

}  // namespace d2c
