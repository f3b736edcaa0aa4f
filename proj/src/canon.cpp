#include "d2c/canon.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace d2c {

std::set<std::string> rigid_constants(const Scenario& sc) {
    std::set<std::string> out = program_constants(sc.program);
    for (const auto& c : fact_constants(sc.initial_state)) out.insert(c);
    for (const auto& n : sc.network.nodes) out.insert(n);
    for (const auto& fs : sc.input_pool)
        for (const auto& c : fact_constants(fs)) out.insert(c);
    return out;
}

namespace {

void encode_atom(std::string& os, const GroundAtom& a) {
    os += a.pred;
    for (const auto& arg : a.args) {
        os += ',';
        os += arg;
    }
}

void encode_into(std::string& os, const GlobalConfig& cfg) {
    for (const auto& [n, st] : cfg.node_state) {
        os += 'N';
        os += n;
        os += '{';
        for (const auto& f : st) {
            encode_atom(os, f);
            os += ';';
        }
        const auto& pm = cfg.node_prev_msg.at(n);
        os += "}<";
        if (pm) {
            encode_atom(os, pm->fact);
            os += '@';
            os += pm->label;
        }
        os += '>';
    }
    for (const auto& [edge, ch] : cfg.channels) {
        os += 'C';
        os += edge.first;
        os += '>';
        os += edge.second;
        os += '[';
        for (const auto& m : ch.contents) {
            encode_atom(os, m);
            os += ';';
        }
        os += ']';
    }
}

void collect_non_rigid(const GlobalConfig& cfg, const std::set<std::string>& rigid,
                       std::vector<std::string>& order) {
    auto see = [&](const std::string& c) {
        if (rigid.count(c)) return;
        if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    };
    for (const auto& [n, st] : cfg.node_state) {
        for (const auto& f : st)
            for (const auto& a : f.args) see(a);
        const auto& pm = cfg.node_prev_msg.at(n);
        if (pm) {
            for (const auto& a : pm->fact.args) see(a);
            see(pm->label);
        }
    }
    for (const auto& [edge, ch] : cfg.channels)
        for (const auto& m : ch.contents)
            for (const auto& a : m.args) see(a);
}

GlobalConfig rename_config(const GlobalConfig& cfg,
                           const std::map<std::string, std::string>& ren) {
    auto map_const = [&](const std::string& c) {
        auto it = ren.find(c);
        return it == ren.end() ? c : it->second;
    };
    auto map_atom = [&](const GroundAtom& a) {
        GroundAtom out{a.pred, {}};
        out.args.reserve(a.args.size());
        for (const auto& arg : a.args) out.args.push_back(map_const(arg));
        return out;
    };
    GlobalConfig out;
    for (const auto& [n, st] : cfg.node_state) {
        FactSet fs;
        for (const auto& f : st) fs.insert(map_atom(f));
        out.node_state[n] = std::move(fs);
        const auto& pm = cfg.node_prev_msg.at(n);
        if (pm)
            out.node_prev_msg[n] = LabeledMessage{map_atom(pm->fact), map_const(pm->label)};
        else
            out.node_prev_msg[n] = std::nullopt;
    }
    for (const auto& [edge, ch] : cfg.channels) {
        ChannelInstance inst;
        inst.kind = ch.kind;
        if (ch.kind == ChannelKind::queue) {
            for (const auto& m : ch.contents) inst.contents.push_back(map_atom(m));
        } else {
            for (const auto& m : ch.contents) inst.add(map_atom(m));
        }
        out.channels[edge] = std::move(inst);
    }
    return out;
}

}  // namespace

std::string encode_config(const GlobalConfig& cfg) {
    std::string os;
    os.reserve(512);
    encode_into(os, cfg);
    return os;
}

CanonicalConfig canonicalize(const GlobalConfig& cfg, const std::set<std::string>& rigid) {
    std::vector<std::string> nonrigid;
    collect_non_rigid(cfg, rigid, nonrigid);
    if (nonrigid.empty()) return {encode_config(cfg)};

    auto placeholder = [](size_t i) { return "#k" + std::to_string(i); };
    if (nonrigid.size() <= 8) {
        // Exact: minimum encoding over all relabelings.
        std::vector<size_t> perm(nonrigid.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::string best;
        do {
            std::map<std::string, std::string> ren;
            for (size_t i = 0; i < nonrigid.size(); ++i) ren[nonrigid[i]] = placeholder(perm[i]);
            std::string enc = encode_config(rename_config(cfg, ren));
            if (best.empty() || enc < best) best = std::move(enc);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return {std::move(best)};
    }
    // Greedy fallback: first-occurrence relabeling. Deterministic but may
    // distinguish some isomorphic configurations (extra work, never wrong
    // verdicts).
    std::map<std::string, std::string> ren;
    for (size_t i = 0; i < nonrigid.size(); ++i) ren[nonrigid[i]] = placeholder(i);
    return {encode_config(rename_config(cfg, ren))};
}

}  // namespace d2c
