#include "d2c/reductions.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "d2c/eval.hpp"
#include "d2c/sim.hpp"
#include "step_cache.hpp"

namespace d2c {

namespace {

// A node's local view: state DB plus the previously received message.
struct LocalState {
    FactSet state;
    std::optional<LabeledMessage> prev_msg;
};

std::string encode_local(const LocalState& ls) {
    std::string s = to_string(ls.state);
    s += "|";
    s += ls.prev_msg ? ls.prev_msg->to_string() : std::string("-");
    return s;
}

// Greedy canonical relabeling of non-rigid constants by first occurrence over
// the sorted fact traversal.
LocalState canonicalize_local(const LocalState& ls, const std::set<std::string>& rigid) {
    std::map<std::string, std::string> ren;
    int next = 0;
    auto name_for = [&](const std::string& c) -> const std::string& {
        auto [it, fresh] = ren.emplace(c, "");
        if (fresh) it->second = "#c" + std::to_string(next++);
        return it->second;
    };
    for (const auto& f : ls.state)
        for (const auto& a : f.args)
            if (!rigid.count(a)) name_for(a);
    if (ls.prev_msg)
        for (const auto& a : ls.prev_msg->fact.args)
            if (!rigid.count(a)) name_for(a);
    if (ren.empty()) return ls;
    LocalState out;
    for (const auto& f : ls.state) {
        GroundAtom g{f.pred, {}};
        for (const auto& a : f.args) g.args.push_back(rigid.count(a) ? a : name_for(a));
        out.state.insert(std::move(g));
    }
    if (ls.prev_msg) {
        LabeledMessage pm = *ls.prev_msg;
        for (auto& a : pm.fact.args)
            if (!rigid.count(a)) a = name_for(a);
        out.prev_msg = std::move(pm);
    }
    return out;
}

int non_rigid_count(const FactSet& fs, const std::set<std::string>& rigid) {
    std::set<std::string> seen;
    for (const auto& c : fact_constants(fs))
        if (!rigid.count(c)) seen.insert(c);
    return static_cast<int>(seen.size());
}

constexpr int kMaxLocalStates = 50000;

}  // namespace

CfsmFile dds_to_cfsm(const Scenario& sc, int bound_b) {
    if (auto np = check_plb(sc.program)) {
        std::ostringstream os;
        os << "transport signature is not propositional:";
        for (const auto& [pred, ar] : np->offenders) os << " " << pred << "/" << ar;
        throw ReductionError(os.str());
    }
    std::vector<int> inputs;
    if (sc.policy == InputPolicy::interactive) {
        for (size_t i = 0; i < sc.input_pool.size(); ++i) inputs.push_back(static_cast<int>(i));
    } else {
        if (sc.policy == InputPolicy::autonomous && sc.input_pool.size() > 1)
            throw ReductionError(
                "autonomous policy with more than one pool input has no per-node finite-control "
                "encoding; run the construction once per pool element instead");
        inputs.push_back(0);
    }

    const std::set<std::string> rigid = rigid_constants(sc);

    CfsmFile out;
    out.machine.network = sc.network;
    for (const auto& [pred, ar] : sc.program.transport_sig) out.machine.alphabet.insert(pred);
    for (const auto& n : sc.network.nodes) out.machine.initial_channels[{n, n}] = {kStart};

    for (const auto& node : sc.network.nodes) {
        EvalContext ctx = make_context(sc, node);
        CfsmNode machine;

        std::vector<std::string> senders = sc.network.neighbors(node);
        senders.push_back(node);
        std::sort(senders.begin(), senders.end());

        std::map<std::string, std::string> state_name;  // local encoding -> q name
        std::vector<LocalState> states;
        std::vector<std::string> names;  // aligned with `states`
        std::deque<int> work;
        auto intern = [&](const LocalState& raw) {
            LocalState canon = canonicalize_local(raw, rigid);
            std::string enc = encode_local(canon);
            auto it = state_name.find(enc);
            if (it != state_name.end()) return it->second;
            if (static_cast<int>(states.size()) >= kMaxLocalStates)
                throw ReductionError("node " + node + " exceeds " +
                                     std::to_string(kMaxLocalStates) + " local states");
            std::string name = "q" + std::to_string(states.size());
            state_name.emplace(std::move(enc), name);
            states.push_back(std::move(canon));
            names.push_back(name);
            machine.states.push_back(name);
            work.push_back(static_cast<int>(states.size()) - 1);
            return name;
        };

        LocalState init;
        init.state = sc.initial_state;
        init.state.insert(GroundAtom{kMyName, {node}});
        for (const auto& m : sc.network.neighbors(node))
            init.state.insert(GroundAtom{kMyNeighbor, {m}});
        machine.initial = intern(init);

        int aux_counter = 0;
        while (!work.empty()) {
            int idx = work.front();
            work.pop_front();
            // intern() may grow `states`; copy the local view.
            LocalState cur = states[static_cast<size_t>(idx)];
            std::string q = names[static_cast<size_t>(idx)];
            for (const auto& sender : senders) {
                for (const auto& msg_name : out.machine.alphabet) {
                    LabeledMessage incoming{GroundAtom{msg_name, {}}, sender};
                    for (int ii : inputs) {
                        auto outcomes = step(ctx, sc.input_pool[static_cast<size_t>(ii)],
                                             cur.state, cur.prev_msg, incoming);
                        for (const auto& o : outcomes) {
                            int fresh = non_rigid_count(o.new_state, rigid);
                            if (fresh > bound_b)
                                throw BoundExceeded("node " + node + ": a reachable state DB uses " +
                                                    std::to_string(fresh) +
                                                    " non-rigid constants, exceeding bound " +
                                                    std::to_string(bound_b));
                            std::string q2 = intern(LocalState{o.new_state, incoming});
                            // One read + write chain per emission interleaving,
                            // with one fresh auxiliary state per written message.
                            for (const auto& order :
                                 detail::emission_orders(o, sc.channel_kind)) {
                                std::vector<std::string> chain;
                                for (size_t k = 0; k < order.size(); ++k) {
                                    std::string aux = "h" + std::to_string(aux_counter++);
                                    machine.states.push_back(aux);
                                    machine.auxiliary.insert(aux);
                                    chain.push_back(aux);
                                }
                                std::string read_to = chain.empty() ? q2 : chain.front();
                                machine.transitions.push_back(
                                    CfsmTransition{q, true, {sender, node}, msg_name, read_to});
                                for (size_t k = 0; k < order.size(); ++k) {
                                    std::string to = k + 1 < chain.size() ? chain[k + 1] : q2;
                                    machine.transitions.push_back(
                                        CfsmTransition{chain[k], false, {node, order[k].first},
                                                       order[k].second.pred, to});
                                }
                            }
                        }
                    }
                }
            }
        }
        for (const auto& qn : machine.states)
            if (!machine.auxiliary.count(qn)) out.targets.accepting[node].insert(qn);
        out.machine.per_node[node] = std::move(machine);
    }

    auto diags = validate_cfsm(out.machine, out.targets);
    if (!diags.empty())
        throw ReductionError("internal: generated machine invalid: " + diags.front().format());
    return out;
}

namespace {

std::string sanitize(const std::string& name, const char* prefix) {
    std::string out = prefix;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    return out;
}

}  // namespace

Scenario cfsm_to_dds(const Cfsm& machine, const TargetSet& targets) {
    if (machine.network.nodes.size() != 1)
        throw ReductionError("the simulator construction takes a single-node machine; got " +
                             std::to_string(machine.network.nodes.size()) + " nodes");
    const std::string& n0 = machine.network.nodes.front();
    const CfsmNode& fsm = machine.per_node.at(n0);

    std::ostringstream os;
    os << "network {\n  nodes: act, sim, ter;\n  edges: act -- sim, sim -- ter;\n}\n";

    std::vector<std::string> msgs(machine.alphabet.begin(), machine.alphabet.end());
    os << "signatures {\n";
    os << "  state: bool/1, create/1, cur/1, decide/1, done/0, fire_read/1, fire_write/2, "
          "moved/0, recv/1, role_act/1, role_sim/1, role_ter/1, stopCreation/0, stopped/0, "
          "stuck/0, target/1, trans_read/3, trans_write/3, wake/0;\n";
    os << "  transport: wakeUp/0, stop/0";
    for (const auto& m : msgs) os << ", " << sanitize(m, "m_") << "/0";
    os << ";\n  input: ;\n}\n";
    os << "channel: queue;\npolicy: closed;\n";

    os << "init {\n";
    os << "  role_act(act). role_sim(sim). role_ter(ter).\n";
    os << "  bool(true). bool(false).\n";
    os << "  cur(" << sanitize(fsm.initial, "s_") << ").\n";
    if (auto it = targets.accepting.find(n0); it != targets.accepting.end())
        for (const auto& q : it->second) os << "  target(" << sanitize(q, "s_") << ").\n";
    for (const auto& t : fsm.transitions) {
        os << "  " << (t.is_read ? "trans_read" : "trans_write") << "(" << sanitize(t.from, "s_")
           << "," << sanitize(t.msg, "m_") << "," << sanitize(t.to, "s_") << ").\n";
    }
    os << "}\n";

    os << "program {\n";
    os << "  % persistent relations\n";
    os << "  role_act(X) if prev role_act(X).\n";
    os << "  role_sim(X) if prev role_sim(X).\n";
    os << "  role_ter(X) if prev role_ter(X).\n";
    os << "  bool(X) if prev bool(X).\n";
    os << "  trans_read(X,Y,Z) if prev trans_read(X,Y,Z).\n";
    os << "  trans_write(X,Y,Z) if prev trans_write(X,Y,Z).\n";
    os << "  target(X) if prev target(X).\n";
    os << "  done if prev done.\n";
    os << "  stuck if prev stuck.\n";
    os << "  stopCreation if prev stopCreation.\n";
    os << "  stopped if prev stopped.\n";
    os << "  % simulator: alphabet reception and activation kinds\n";
    for (const auto& m : msgs)
        os << "  recv(" << sanitize(m, "m_") << ") if " << sanitize(m, "m_") << "@X, my_name(X).\n";
    os << "  wake if wakeUp@X, my_neighbor(X), role_act(X).\n";
    os << "  % simulator: one machine transition per activation\n";
    os << "  fire_read(Q2) if recv(M), trans_read(Q,M,Q2), choice(Q2) prev cur(Q), not stuck, "
          "not done.\n";
    os << "  fire_write(M,Q2) if wake, trans_write(Q,M,Q2), choice(M,Q2) prev cur(Q), not stuck, "
          "not done.\n";
    os << "  moved if recv(M), trans_read(Q,M,Q2) prev cur(Q), not stuck, not done.\n";
    os << "  moved if wake, trans_write(Q,M,Q2) prev cur(Q), not stuck, not done.\n";
    os << "  cur(Q) if fire_read(Q).\n";
    os << "  cur(Q) if fire_write(M,Q).\n";
    os << "  cur(Q) if not moved prev cur(Q).\n";
    os << "  % consuming a machine message without a matching read poisons the run\n";
    os << "  stuck if recv(M), not moved.\n";
    for (const auto& m : msgs)
        os << "  " << sanitize(m, "m_") << "@X if fire_write(" << sanitize(m, "m_")
           << ",Q), my_name(X).\n";
    os << "  wakeUp@X if my_name(X), stuck.\n";
    os << "  % simulator: nondeterministic success declaration\n";
    os << "  decide(Y) if my_name(X), role_sim(X), cur(Q), target(Q), bool(Y), choice(Y) prev "
          "not done, not stuck.\n";
    os << "  done if decide(true).\n";
    os << "  stop@Y if decide(true), my_neighbor(Y), role_ter(Y).\n";
    os << "  % activator\n";
    os << "  create(Y) if my_name(X), role_act(X), bool(Y), choice(Y) prev not stopCreation.\n";
    os << "  stopCreation if create(false).\n";
    os << "  wakeUp@X if my_name(X), create(true).\n";
    os << "  wakeUp@Y if wakeUp@X, my_name(X), my_neighbor(Y), create(true), X != Y.\n";
    os << "  wakeUp@Y if start@X, my_name(X), my_neighbor(Y), create(true), X != Y.\n";
    os << "  % terminator\n";
    os << "  wakeUp@X if my_name(X), role_ter(X) prev not stopped.\n";
    os << "  stopped if stop@X, my_neighbor(X).\n";
    os << "}\n";

    return load_scenario_text(os.str(), ".", "<cfsm_to_dds>");
}

}  // namespace d2c
