#include "d2c/termcheck.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "step_cache.hpp"

namespace d2c {

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::terminates: return "TERMINATES";
        case VerdictKind::not_reachable: return "NOT_REACHABLE";
        case VerdictKind::unknown: return "UNKNOWN";
    }
    return "?";
}

namespace {

struct SearchNode {
    int parent = -1;
    Transition via;
};

Verdict search_one(const Scenario& sc, const SearchBudget& budget, int threads,
                   const ConfigObserver& observer, std::optional<int> fixed_input) {
    const std::set<std::string> rigid = rigid_constants(sc);
    Verdict v;
    bool cut = false;  // budget or cap triggered somewhere

    GlobalConfig init = initial_config(sc);
    std::unordered_map<std::string, int> visited;
    std::vector<SearchNode> nodes;
    visited.emplace(canonicalize(init, rigid).encoding, 0);
    nodes.push_back({});
    v.configs_explored = 1;
    v.frontier_peak = 1;
    if (observer) observer(init);

    auto make_witness = [&](int idx) {
        Trace tr;
        tr.autonomous_input = fixed_input;
        for (int at = idx; at > 0; at = nodes[at].parent) tr.steps.push_back(nodes[at].via);
        std::reverse(tr.steps.begin(), tr.steps.end());
        return tr;
    };
    if (is_terminated(init)) {
        v.kind = VerdictKind::terminates;
        v.witness = make_witness(0);
        return v;
    }

    std::vector<std::pair<GlobalConfig, int>> frontier;
    frontier.emplace_back(std::move(init), 0);

    if (threads < 1) threads = 1;
    std::vector<detail::StepCache> caches;
    caches.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) caches.emplace_back(sc);

    long depth = 0;
    while (!frontier.empty()) {
        if (budget.max_depth && depth >= *budget.max_depth) {
            cut = true;
            break;
        }
        // Expand the whole level; merge in frontier order so results do not
        // depend on the thread count.
        std::vector<std::vector<std::pair<Transition, GlobalConfig>>> expanded(frontier.size());
        auto expand_range = [&](int tid, size_t lo, size_t hi) {
            auto stepfn = caches[static_cast<size_t>(tid)].fn();
            for (size_t i = lo; i < hi; ++i)
                expanded[i] = detail::successors_impl(sc, frontier[i].first, fixed_input, stepfn);
        };
        if (threads == 1 || frontier.size() < 2) {
            expand_range(0, 0, frontier.size());
        } else {
            size_t chunk = (frontier.size() + static_cast<size_t>(threads) - 1) /
                           static_cast<size_t>(threads);
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) {
                size_t lo = static_cast<size_t>(t) * chunk;
                size_t hi = std::min(frontier.size(), lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(expand_range, t, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        std::vector<std::pair<GlobalConfig, int>> next_frontier;
        for (size_t i = 0; i < frontier.size(); ++i) {
            int parent_idx = frontier[i].second;
            for (auto& [t, cfg] : expanded[i]) {
                if (budget.max_channel) {
                    bool over = false;
                    for (const auto& [edge, ch] : cfg.channels)
                        if (static_cast<int>(ch.size()) > *budget.max_channel) {
                            over = true;
                            break;
                        }
                    if (over) {
                        cut = true;
                        continue;
                    }
                }
                std::string enc = canonicalize(cfg, rigid).encoding;
                auto [it, fresh] = visited.emplace(std::move(enc), static_cast<int>(nodes.size()));
                if (!fresh) continue;
                nodes.push_back({parent_idx, t});
                ++v.configs_explored;
                if (observer) observer(cfg);
                if (is_terminated(cfg)) {
                    v.kind = VerdictKind::terminates;
                    v.witness = make_witness(static_cast<int>(nodes.size()) - 1);
                    v.frontier_peak = std::max<long>(v.frontier_peak,
                                                     static_cast<long>(next_frontier.size()));
                    return v;
                }
                if (budget.max_configs && v.configs_explored > *budget.max_configs) {
                    v.kind = VerdictKind::unknown;
                    return v;
                }
                next_frontier.emplace_back(std::move(cfg), static_cast<int>(nodes.size()) - 1);
            }
        }
        frontier = std::move(next_frontier);
        v.frontier_peak = std::max<long>(v.frontier_peak, static_cast<long>(frontier.size()));
        ++depth;
    }
    v.kind = cut ? VerdictKind::unknown : VerdictKind::not_reachable;
    return v;
}

}  // namespace

Verdict check_sometimes_termination(const Scenario& sc, const SearchBudget& budget, int threads,
                                    const ConfigObserver& observer) {
    if (sc.policy != InputPolicy::autonomous)
        return search_one(sc, budget, threads, observer, std::nullopt);

    // Existential over the pool: one terminating run under any fixed input.
    Verdict agg;
    agg.kind = VerdictKind::not_reachable;
    for (size_t i = 0; i < sc.input_pool.size(); ++i) {
        Verdict v = search_one(sc, budget, threads, observer, static_cast<int>(i));
        agg.configs_explored += v.configs_explored;
        agg.frontier_peak = std::max(agg.frontier_peak, v.frontier_peak);
        if (v.kind == VerdictKind::terminates) {
            agg.kind = v.kind;
            agg.witness = v.witness;
            return agg;
        }
        if (v.kind == VerdictKind::unknown) agg.kind = VerdictKind::unknown;
    }
    return agg;
}

std::string verdict_to_json(const Verdict& v) {
    nlohmann::json j;
    j["verdict"] = to_string(v.kind);
    j["configsExplored"] = v.configs_explored;
    j["frontierPeak"] = v.frontier_peak;
    if (v.witness) j["witness"] = nlohmann::json::parse(trace_to_json(*v.witness));
    return j.dump();
}

std::string verdict_report_text(const Verdict& v) {
    std::ostringstream os;
    os << "verdict: " << to_string(v.kind) << "\n";
    os << "configs explored: " << v.configs_explored << "\n";
    os << "frontier peak: " << v.frontier_peak << "\n";
    if (v.witness) os << "witness length: " << v.witness->steps.size() << "\n";
    return os.str();
}

}  // namespace d2c
