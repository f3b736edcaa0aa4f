#include "d2c/cfsm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "lexer.hpp"

namespace d2c {

std::vector<Diagnostic> validate_cfsm(const Cfsm& m, const TargetSet& targets) {
    std::vector<Diagnostic> diags;
    auto err = [&](std::string msg) {
        diags.push_back({Diagnostic::Kind::scenario, 0, 0, std::move(msg)});
    };
    auto channels = m.network.directed_channels();
    auto has_channel = [&](const std::pair<std::string, std::string>& e) {
        return std::binary_search(channels.begin(), channels.end(), e);
    };
    for (const auto& n : m.network.nodes) {
        auto it = m.per_node.find(n);
        if (it == m.per_node.end()) {
            err("node " + n + " has no machine");
            continue;
        }
        const CfsmNode& nd = it->second;
        std::set<std::string> states(nd.states.begin(), nd.states.end());
        if (states.size() != nd.states.size()) err("node " + n + " lists a state twice");
        if (!states.count(nd.initial)) err("node " + n + ": initial state is not a state");
        if (nd.auxiliary.count(nd.initial)) err("node " + n + ": the initial state is auxiliary");
        for (const auto& a : nd.auxiliary)
            if (!states.count(a)) err("node " + n + ": auxiliary '" + a + "' is not a state");
        for (const auto& t : nd.transitions) {
            if (!states.count(t.from) || !states.count(t.to))
                err("node " + n + ": transition references an unknown state");
            if (!m.alphabet.count(t.msg))
                err("node " + n + ": message '" + t.msg + "' is not in the alphabet");
            if (!has_channel(t.edge))
                err("node " + n + ": transition edge (" + t.edge.first + "," + t.edge.second +
                    ") is not a channel");
            else if (t.is_read && t.edge.second != n)
                err("node " + n + " cannot read from channel (" + t.edge.first + "," +
                    t.edge.second + ")");
            else if (!t.is_read && t.edge.first != n)
                err("node " + n + " cannot write to channel (" + t.edge.first + "," +
                    t.edge.second + ")");
        }
    }
    for (const auto& [n, acc] : targets.accepting) {
        auto it = m.per_node.find(n);
        if (it == m.per_node.end()) {
            err("targets reference unknown node " + n);
            continue;
        }
        std::set<std::string> states(it->second.states.begin(), it->second.states.end());
        for (const auto& q : acc) {
            if (!states.count(q)) err("target state '" + q + "' is not a state of node " + n);
            if (it->second.auxiliary.count(q))
                err("target state '" + q + "' of node " + n + " is auxiliary");
        }
    }
    for (const auto& [edge, msgs] : m.initial_channels) {
        if (!has_channel(edge))
            err("initial contents given for nonexistent channel (" + edge.first + "," +
                edge.second + ")");
        for (const auto& msg : msgs)
            if (!m.alphabet.count(msg))
                err("initial channel message '" + msg + "' is not in the alphabet");
    }
    return diags;
}

namespace {

struct CfsmConfig {
    std::map<std::string, std::string> node_state;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> channels;

    std::string encode() const {
        std::ostringstream os;
        for (const auto& [n, q] : node_state) os << n << "=" << q << ";";
        for (const auto& [e, msgs] : channels) {
            os << e.first << ">" << e.second << "[";
            for (const auto& m : msgs) os << m << ",";
            os << "]";
        }
        return os.str();
    }
};

void channel_add(std::vector<std::string>& chan, const std::string& msg, ChannelKind kind) {
    if (kind == ChannelKind::queue)
        chan.push_back(msg);
    else
        chan.insert(std::upper_bound(chan.begin(), chan.end(), msg), msg);
}

bool channel_take(std::vector<std::string>& chan, const std::string& msg, ChannelKind kind) {
    if (chan.empty()) return false;
    if (kind == ChannelKind::queue) {
        if (chan.front() != msg) return false;
        chan.erase(chan.begin());
        return true;
    }
    auto it = std::lower_bound(chan.begin(), chan.end(), msg);
    if (it == chan.end() || *it != msg) return false;
    chan.erase(it);
    return true;
}

bool at_target(const Cfsm& m, const TargetSet& targets, const CfsmConfig& c) {
    for (const auto& [e, msgs] : c.channels)
        if (!msgs.empty()) return false;
    for (const auto& [n, q] : c.node_state) {
        const CfsmNode& nd = m.per_node.at(n);
        if (nd.auxiliary.count(q)) return false;
        auto it = targets.accepting.find(n);
        if (it == targets.accepting.end() || !it->second.count(q)) return false;
    }
    return true;
}

}  // namespace

CfsmVerdict cfsm_reach(const Cfsm& m, const TargetSet& targets, ChannelKind kind,
                       const SearchBudget& budget) {
    CfsmVerdict v;
    bool cut = false;

    CfsmConfig init;
    for (const auto& n : m.network.nodes) init.node_state[n] = m.per_node.at(n).initial;
    for (const auto& e : m.network.directed_channels()) init.channels[e] = {};
    for (const auto& [e, msgs] : m.initial_channels)
        for (const auto& msg : msgs) channel_add(init.channels[e], msg, kind);

    struct Node {
        int parent = -1;
        CfsmMove via;
    };
    std::unordered_map<std::string, int> visited;
    std::vector<Node> nodes;
    visited.emplace(init.encode(), 0);
    nodes.push_back({});
    v.configs_explored = 1;
    v.frontier_peak = 1;

    auto make_witness = [&](int idx) {
        std::vector<CfsmMove> w;
        for (int at = idx; at > 0; at = nodes[at].parent) w.push_back(nodes[at].via);
        std::reverse(w.begin(), w.end());
        return w;
    };
    if (at_target(m, targets, init)) {
        v.kind = VerdictKind::terminates;
        v.witness = make_witness(0);
        return v;
    }

    std::vector<std::pair<CfsmConfig, int>> frontier;
    frontier.emplace_back(std::move(init), 0);
    long depth = 0;
    while (!frontier.empty()) {
        if (budget.max_depth && depth >= *budget.max_depth) {
            cut = true;
            break;
        }
        std::vector<std::pair<CfsmConfig, int>> next_frontier;
        for (auto& [cfg, idx] : frontier) {
            for (const auto& [n, q] : cfg.node_state) {
                const CfsmNode& nd = m.per_node.at(n);
                for (const auto& t : nd.transitions) {
                    if (t.from != q) continue;
                    CfsmConfig next = cfg;
                    if (t.is_read) {
                        if (!channel_take(next.channels[t.edge], t.msg, kind)) continue;
                    } else {
                        channel_add(next.channels[t.edge], t.msg, kind);
                        if (budget.max_channel &&
                            static_cast<int>(next.channels[t.edge].size()) > *budget.max_channel) {
                            cut = true;
                            continue;
                        }
                    }
                    next.node_state[n] = t.to;
                    auto [it, fresh] =
                        visited.emplace(next.encode(), static_cast<int>(nodes.size()));
                    if (!fresh) continue;
                    nodes.push_back({idx, CfsmMove{n, t}});
                    ++v.configs_explored;
                    if (at_target(m, targets, next)) {
                        v.kind = VerdictKind::terminates;
                        v.witness = make_witness(static_cast<int>(nodes.size()) - 1);
                        return v;
                    }
                    if (budget.max_configs && v.configs_explored > *budget.max_configs) {
                        v.kind = VerdictKind::unknown;
                        return v;
                    }
                    next_frontier.emplace_back(std::move(next), static_cast<int>(nodes.size()) - 1);
                }
            }
        }
        frontier = std::move(next_frontier);
        v.frontier_peak = std::max<long>(v.frontier_peak, static_cast<long>(frontier.size()));
        ++depth;
    }
    v.kind = cut ? VerdictKind::unknown : VerdictKind::not_reachable;
    return v;
}

std::string write_cfsm_text(const Cfsm& m, const TargetSet& targets) {
    std::ostringstream os;
    os << "cfsm {\n  nodes: ";
    for (size_t i = 0; i < m.network.nodes.size(); ++i)
        os << (i ? ", " : "") << m.network.nodes[i];
    os << ";\n";
    if (!m.network.edges.empty()) {
        os << "  edges: ";
        bool first = true;
        for (const auto& [a, b] : m.network.edges) {
            os << (first ? "" : ", ") << a << " -- " << b;
            first = false;
        }
        os << ";\n";
    }
    os << "  alphabet: ";
    bool first = true;
    for (const auto& msg : m.alphabet) {
        os << (first ? "" : ", ") << msg;
        first = false;
    }
    os << ";\n";
    for (const auto& [e, msgs] : m.initial_channels) {
        if (msgs.empty()) continue;
        os << "  init " << e.first << " -> " << e.second << " {";
        for (const auto& msg : msgs) os << " " << msg;
        os << " }\n";
    }
    for (const auto& [n, nd] : m.per_node) {
        os << "  node " << n << " {\n    states: ";
        for (size_t i = 0; i < nd.states.size(); ++i) {
            os << (i ? ", " : "") << nd.states[i];
            if (nd.auxiliary.count(nd.states[i])) os << " aux";
        }
        os << ";\n    initial: " << nd.initial << ";\n";
        for (const auto& t : nd.transitions) {
            os << "    trans " << t.from << " ";
            if (t.is_read)
                os << "read " << t.msg << " from " << t.edge.first;
            else
                os << "write " << t.msg << " to " << t.edge.second;
            os << " -> " << t.to << ";\n";
        }
        os << "  }\n";
    }
    os << "  targets {\n";
    for (const auto& [n, acc] : targets.accepting) {
        os << "    " << n << ":";
        bool f = true;
        for (const auto& q : acc) {
            os << (f ? " " : ", ") << q;
            f = false;
        }
        os << ";\n";
    }
    os << "  }\n}\n";
    return os.str();
}

CfsmFile load_cfsm_text(std::string_view text, const std::string& source) {
    using lex::Cursor;
    using lex::Tok;
    auto toks = lex::tokenize(text);
    Cursor c{&toks};
    auto bad = [&](const std::string& msg) -> ScenarioError {
        return ScenarioError({Diagnostic{Diagnostic::Kind::scenario, c.peek().line,
                                         c.peek().column, source + ": " + msg}});
    };
    auto ident = [&](const char* what) {
        if (!c.at(Tok::ident)) throw bad(std::string("expected ") + what);
        return c.next().text;
    };
    CfsmFile f;
    if (!c.accept_ident("cfsm") || !c.accept(Tok::lbrace)) throw bad("expected 'cfsm {'");
    while (!c.accept(Tok::rbrace)) {
        if (c.accept_ident("nodes")) {
            if (!c.accept(Tok::colon)) throw bad("expected ':'");
            f.machine.network.nodes.push_back(ident("a node"));
            while (c.accept(Tok::comma)) f.machine.network.nodes.push_back(ident("a node"));
            if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
        } else if (c.accept_ident("edges")) {
            if (!c.accept(Tok::colon)) throw bad("expected ':'");
            if (!c.at(Tok::semicolon)) {
                while (true) {
                    std::string a = ident("a node");
                    if (!c.accept(Tok::dashdash)) throw bad("expected '--'");
                    std::string b = ident("a node");
                    f.machine.network.edges.insert({std::min(a, b), std::max(a, b)});
                    if (!c.accept(Tok::comma)) break;
                }
            }
            if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
        } else if (c.accept_ident("alphabet")) {
            if (!c.accept(Tok::colon)) throw bad("expected ':'");
            if (!c.at(Tok::semicolon)) {
                f.machine.alphabet.insert(ident("a message"));
                while (c.accept(Tok::comma)) f.machine.alphabet.insert(ident("a message"));
            }
            if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
        } else if (c.accept_ident("init")) {
            std::string a = ident("a node");
            if (!c.accept(Tok::arrow)) throw bad("expected '->'");
            std::string b = ident("a node");
            if (!c.accept(Tok::lbrace)) throw bad("expected '{'");
            auto& msgs = f.machine.initial_channels[{a, b}];
            while (!c.accept(Tok::rbrace)) msgs.push_back(ident("a message"));
        } else if (c.accept_ident("node")) {
            std::string n = ident("a node");
            CfsmNode nd;
            if (!c.accept(Tok::lbrace)) throw bad("expected '{'");
            while (!c.accept(Tok::rbrace)) {
                if (c.accept_ident("states")) {
                    if (!c.accept(Tok::colon)) throw bad("expected ':'");
                    while (true) {
                        std::string q = ident("a state");
                        nd.states.push_back(q);
                        if (c.accept_ident("aux")) nd.auxiliary.insert(q);
                        if (!c.accept(Tok::comma)) break;
                    }
                    if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
                } else if (c.accept_ident("initial")) {
                    if (!c.accept(Tok::colon)) throw bad("expected ':'");
                    nd.initial = ident("a state");
                    if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
                } else if (c.accept_ident("trans")) {
                    CfsmTransition t;
                    t.from = ident("a state");
                    if (c.accept_ident("read")) {
                        t.is_read = true;
                        t.msg = ident("a message");
                        if (!c.accept_ident("from")) throw bad("expected 'from'");
                        t.edge = {ident("a node"), n};
                    } else if (c.accept_ident("write")) {
                        t.is_read = false;
                        t.msg = ident("a message");
                        if (!c.accept_ident("to")) throw bad("expected 'to'");
                        t.edge = {n, ident("a node")};
                    } else {
                        throw bad("expected 'read' or 'write'");
                    }
                    if (!c.accept(Tok::arrow)) throw bad("expected '->'");
                    t.to = ident("a state");
                    if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
                    nd.transitions.push_back(std::move(t));
                } else {
                    throw bad("expected 'states', 'initial', or 'trans'");
                }
            }
            f.machine.per_node[n] = std::move(nd);
        } else if (c.accept_ident("targets")) {
            if (!c.accept(Tok::lbrace)) throw bad("expected '{'");
            while (!c.accept(Tok::rbrace)) {
                std::string n = ident("a node");
                if (!c.accept(Tok::colon)) throw bad("expected ':'");
                auto& acc = f.targets.accepting[n];
                if (!c.at(Tok::semicolon)) {
                    acc.insert(ident("a state"));
                    while (c.accept(Tok::comma)) acc.insert(ident("a state"));
                }
                if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
            }
        } else {
            throw bad("unknown cfsm entry");
        }
    }
    std::sort(f.machine.network.nodes.begin(), f.machine.network.nodes.end());
    f.machine.network.nodes.erase(
        std::unique(f.machine.network.nodes.begin(), f.machine.network.nodes.end()),
        f.machine.network.nodes.end());
    auto diags = validate_cfsm(f.machine, f.targets);
    if (!diags.empty()) throw ScenarioError(std::move(diags));
    return f;
}

CfsmFile load_cfsm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError(
            {Diagnostic{Diagnostic::Kind::scenario, 0, 0, "cannot open cfsm file '" + path + "'"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_cfsm_text(ss.str(), path);
}

std::string cfsm_verdict_to_json(const CfsmVerdict& v) {
    nlohmann::json j;
    j["verdict"] = to_string(v.kind) == "TERMINATES" ? "REACHABLE" : to_string(v.kind);
    j["configsExplored"] = v.configs_explored;
    j["frontierPeak"] = v.frontier_peak;
    if (v.witness) {
        nlohmann::json w = nlohmann::json::array();
        for (const auto& mv : *v.witness) {
            nlohmann::json jm;
            jm["node"] = mv.node;
            jm["action"] = mv.transition.is_read ? "read" : "write";
            jm["msg"] = mv.transition.msg;
            jm["from"] = mv.transition.edge.first;
            jm["to"] = mv.transition.edge.second;
            jm["source"] = mv.transition.from;
            jm["target"] = mv.transition.to;
            w.push_back(std::move(jm));
        }
        j["witness"] = std::move(w);
    }
    return j.dump();
}

std::string cfsm_verdict_report_text(const CfsmVerdict& v) {
    std::ostringstream os;
    os << "verdict: " << (v.kind == VerdictKind::terminates ? "REACHABLE" : to_string(v.kind))
       << "\n";
    os << "configs explored: " << v.configs_explored << "\n";
    os << "frontier peak: " << v.frontier_peak << "\n";
    if (v.witness) os << "witness length: " << v.witness->size() << "\n";
    return os.str();
}

}  // namespace d2c
