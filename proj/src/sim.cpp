#include "d2c/sim.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "d2c/parser.hpp"
#include "lexer.hpp"
#include "step_cache.hpp"
#include "json.hpp"

namespace d2c {

std::vector<GroundAtom> ChannelInstance::consumable() const {
    if (contents.empty()) return {};
    if (kind == ChannelKind::queue) return {contents.front()};
    std::vector<GroundAtom> out;
    for (const auto& a : contents)
        if (out.empty() || !(out.back() == a)) out.push_back(a);
    return out;
}

void ChannelInstance::add(const GroundAtom& a) {
    if (kind == ChannelKind::queue) {
        contents.push_back(a);
    } else {
        contents.insert(std::upper_bound(contents.begin(), contents.end(), a), a);
    }
}

void ChannelInstance::remove(const GroundAtom& a) {
    if (kind == ChannelKind::queue) {
        if (contents.empty() || !(contents.front() == a))
            throw ScenarioError({Diagnostic{Diagnostic::Kind::scenario, 0, 0,
                                            "queue head is not '" + a.to_string() + "'"}});
        contents.erase(contents.begin());
        return;
    }
    auto it = std::lower_bound(contents.begin(), contents.end(), a);
    if (it == contents.end() || !(*it == a))
        throw ScenarioError({Diagnostic{Diagnostic::Kind::scenario, 0, 0,
                                        "message '" + a.to_string() + "' is not in the channel"}});
    contents.erase(it);
}

EvalContext make_context(const Scenario& sc, const std::string& node) {
    EvalContext ctx;
    ctx.program = &sc.program;
    ctx.strata = &sc.strata;
    ctx.self_id = node;
    ctx.neighbors = sc.network.neighbors(node);
    return ctx;
}

GlobalConfig initial_config(const Scenario& sc) {
    GlobalConfig cfg;
    for (const auto& n : sc.network.nodes) {
        FactSet st = sc.initial_state;
        st.insert(GroundAtom{kMyName, {n}});
        for (const auto& m : sc.network.neighbors(n)) st.insert(GroundAtom{kMyNeighbor, {m}});
        cfg.node_state[n] = std::move(st);
        cfg.node_prev_msg[n] = std::nullopt;
    }
    for (const auto& ch : sc.network.directed_channels()) {
        ChannelInstance inst;
        inst.kind = sc.channel_kind;
        if (ch.first == ch.second) inst.contents.push_back(GroundAtom{kStart, {}});
        cfg.channels[ch] = std::move(inst);
    }
    return cfg;
}

bool is_terminated(const GlobalConfig& cfg) {
    for (const auto& [edge, ch] : cfg.channels)
        if (!ch.empty()) return false;
    return true;
}

namespace detail {

std::vector<std::vector<std::pair<std::string, GroundAtom>>> emission_orders(
    const StepOutcome& o, ChannelKind kind) {
    std::map<std::string, std::vector<GroundAtom>> per_dest;
    for (const auto& m : o.outgoing) per_dest[m.label].push_back(m.fact);
    for (auto& [dest, msgs] : per_dest) std::sort(msgs.begin(), msgs.end());

    std::vector<std::vector<std::pair<std::string, GroundAtom>>> combos;
    combos.emplace_back();
    for (auto& [dest, msgs] : per_dest) {
        std::vector<std::vector<GroundAtom>> orders;
        if (kind == ChannelKind::multiset) {
            orders.push_back(msgs);
        } else {
            std::vector<GroundAtom> perm = msgs;
            do {
                orders.push_back(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        std::vector<std::vector<std::pair<std::string, GroundAtom>>> next;
        for (const auto& base : combos)
            for (const auto& ord : orders) {
                auto ext = base;
                for (const auto& m : ord) ext.emplace_back(dest, m);
                next.push_back(std::move(ext));
            }
        combos = std::move(next);
    }
    return combos;
}

std::vector<std::pair<Transition, GlobalConfig>> successors_impl(const Scenario& sc,
                                                                 const GlobalConfig& cfg,
                                                                 std::optional<int> autonomous_input,
                                                                 const StepFn& stepfn) {
    std::vector<int> input_indices;
    switch (sc.policy) {
        case InputPolicy::closed: input_indices = {0}; break;
        case InputPolicy::interactive:
            for (size_t i = 0; i < sc.input_pool.size(); ++i)
                input_indices.push_back(static_cast<int>(i));
            break;
        case InputPolicy::autonomous:
            if (!autonomous_input)
                throw ScenarioError({Diagnostic{Diagnostic::Kind::scenario, 0, 0,
                                                "autonomous policy requires the run's fixed input"}});
            input_indices = {*autonomous_input};
            break;
    }

    std::vector<std::pair<Transition, GlobalConfig>> out;
    for (const auto& [edge, chan] : cfg.channels) {
        const auto& [src, dst] = edge;
        for (const GroundAtom& consumed : chan.consumable()) {
            for (int ii : input_indices) {
                LabeledMessage incoming{consumed, src};
                std::vector<StepOutcome> outcomes =
                    stepfn(dst, sc.input_pool[static_cast<size_t>(ii)], cfg.node_state.at(dst),
                           cfg.node_prev_msg.at(dst), incoming);
                int oi = 0;
                for (const auto& o : outcomes) {
                    for (const auto& order : emission_orders(o, sc.channel_kind)) {
                        GlobalConfig next = cfg;
                        next.node_state[dst] = o.new_state;
                        next.node_prev_msg[dst] = incoming;
                        next.channels[edge].remove(consumed);
                        for (const auto& [dest, msg] : order)
                            next.channels[{dst, dest}].add(msg);
                        Transition t;
                        t.edge = edge;
                        t.consumed = consumed;
                        t.input_index = ii;
                        t.outcome_index = oi;
                        t.witness = o.witness;
                        out.emplace_back(std::move(t), std::move(next));
                        ++oi;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace detail

std::vector<std::pair<Transition, GlobalConfig>> successors(const Scenario& sc,
                                                            const GlobalConfig& cfg,
                                                            std::optional<int> autonomous_input) {
    detail::StepFn plain = [&sc](const std::string& node, const FactSet& input,
                                 const FactSet& prev_state,
                                 const std::optional<LabeledMessage>& prev_msg,
                                 const LabeledMessage& msg) {
        EvalContext ctx = make_context(sc, node);
        return step(ctx, input, prev_state, prev_msg, msg);
    };
    return detail::successors_impl(sc, cfg, autonomous_input, plain);
}

Trace run(const Scenario& sc, uint64_t seed, int max_steps) {
    std::mt19937_64 rng(seed);
    Trace trace;
    std::optional<int> fixed;
    if (sc.policy == InputPolicy::autonomous) {
        std::uniform_int_distribution<size_t> pick(0, sc.input_pool.size() - 1);
        fixed = static_cast<int>(pick(rng));
        trace.autonomous_input = fixed;
    }
    GlobalConfig cfg = initial_config(sc);
    for (int i = 0; i < max_steps; ++i) {
        if (is_terminated(cfg)) break;
        auto succ = successors(sc, cfg, fixed);
        if (succ.empty()) break;
        std::uniform_int_distribution<size_t> pick(0, succ.size() - 1);
        auto& [t, next] = succ[pick(rng)];
        trace.steps.push_back(t);
        cfg = next;
    }
    return trace;
}

GlobalConfig replay(const Scenario& sc, const Trace& trace) {
    GlobalConfig cfg = initial_config(sc);
    int n = 0;
    for (const auto& want : trace.steps) {
        ++n;
        auto succ = successors(sc, cfg, trace.autonomous_input);
        bool found = false;
        for (auto& [t, next] : succ) {
            if (t.edge == want.edge && t.consumed == want.consumed &&
                t.input_index == want.input_index && t.outcome_index == want.outcome_index) {
                cfg = next;
                found = true;
                break;
            }
        }
        if (!found)
            throw ScenarioError({Diagnostic{
                Diagnostic::Kind::scenario, 0, 0,
                "trace step " + std::to_string(n) + " does not match any successor"}});
    }
    return cfg;
}

std::string write_trace_text(const Trace& trace) {
    std::ostringstream os;
    os << "trace {\n";
    if (trace.autonomous_input) os << "  autonomous_input " << *trace.autonomous_input << ";\n";
    for (const auto& s : trace.steps) {
        os << "  step (" << s.edge.first << " -> " << s.edge.second << ") consume "
           << s.consumed.to_string() << " input " << s.input_index << " outcome "
           << s.outcome_index << ";\n";
    }
    os << "}\n";
    return os.str();
}

Trace read_trace_text(std::string_view text) {
    using lex::Cursor;
    using lex::Tok;
    auto toks = lex::tokenize(text);
    Cursor c{&toks};
    auto bad = [&](const std::string& msg) -> ScenarioError {
        return ScenarioError({Diagnostic{Diagnostic::Kind::scenario, c.peek().line,
                                         c.peek().column, "trace: " + msg}});
    };
    Trace tr;
    if (!c.accept_ident("trace") || !c.accept(Tok::lbrace)) throw bad("expected 'trace {'");
    while (!c.accept(Tok::rbrace)) {
        if (c.accept_ident("autonomous_input")) {
            if (!c.at(Tok::integer)) throw bad("expected an index");
            tr.autonomous_input = std::stoi(c.next().text);
            if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
            continue;
        }
        if (!c.accept_ident("step")) throw bad("expected 'step'");
        Transition t;
        if (!c.accept(Tok::lparen)) throw bad("expected '('");
        if (!c.at(Tok::ident)) throw bad("expected a node");
        t.edge.first = c.next().text;
        if (!c.accept(Tok::arrow)) throw bad("expected '->'");
        if (!c.at(Tok::ident)) throw bad("expected a node");
        t.edge.second = c.next().text;
        if (!c.accept(Tok::rparen)) throw bad("expected ')'");
        if (!c.accept_ident("consume")) throw bad("expected 'consume'");
        if (!c.at(Tok::ident)) throw bad("expected a message predicate");
        t.consumed.pred = c.next().text;
        if (c.accept(Tok::lparen)) {
            while (true) {
                if (!c.at(Tok::ident) && !c.at(Tok::integer)) throw bad("expected a constant");
                t.consumed.args.push_back(c.next().text);
                if (c.accept(Tok::rparen)) break;
                if (!c.accept(Tok::comma)) throw bad("expected ','");
            }
        }
        if (!c.accept_ident("input")) throw bad("expected 'input'");
        if (!c.at(Tok::integer)) throw bad("expected an input index");
        t.input_index = std::stoi(c.next().text);
        if (!c.accept_ident("outcome")) throw bad("expected 'outcome'");
        if (!c.at(Tok::integer)) throw bad("expected an outcome index");
        t.outcome_index = std::stoi(c.next().text);
        if (!c.accept(Tok::semicolon)) throw bad("expected ';'");
        tr.steps.push_back(std::move(t));
    }
    return tr;
}

std::string trace_to_json(const Trace& trace) {
    nlohmann::json j;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json js;
        js["from"] = s.edge.first;
        js["to"] = s.edge.second;
        js["consumed"] = s.consumed.to_string();
        js["input"] = s.input_index;
        js["outcome"] = s.outcome_index;
        std::string w = s.witness.to_string();
        if (!w.empty()) js["witness"] = w;
        j["steps"].push_back(std::move(js));
    }
    if (trace.autonomous_input) j["autonomousInput"] = *trace.autonomous_input;
    return j.dump();
}

std::string to_string(const GlobalConfig& cfg) {
    std::ostringstream os;
    for (const auto& [n, st] : cfg.node_state) {
        os << "node " << n << ": " << to_string(st);
        const auto& pm = cfg.node_prev_msg.at(n);
        if (pm) os << "  [prev " << pm->to_string() << "]";
        os << "\n";
    }
    for (const auto& [edge, ch] : cfg.channels) {
        os << "channel " << edge.first << " -> " << edge.second << ": [";
        for (size_t i = 0; i < ch.contents.size(); ++i)
            os << (i ? ", " : "") << ch.contents[i].to_string();
        os << "]\n";
    }
    return os.str();
}

}  // namespace d2c
