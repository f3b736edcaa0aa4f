#include "d2c/eval.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace d2c {

std::string ChoiceWitness::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [rule_idx, fd] : selected) {
        for (const auto& [dom, rng] : fd) {
            if (!first) os << " ";
            os << "r" << rule_idx << ":(";
            for (size_t i = 0; i < dom.size(); ++i) os << (i ? "," : "") << dom[i];
            os << ")->(";
            for (size_t i = 0; i < rng.size(); ++i) os << (i ? "," : "") << rng[i];
            os << ")";
            first = false;
        }
    }
    return os.str();
}

const FactSet& stdb(const StepOutcome& o) { return o.new_state; }

std::set<GroundAtom> trdbtup(const StepOutcome& o, const std::string& recipient) {
    std::set<GroundAtom> out;
    for (const auto& m : o.outgoing)
        if (m.label == recipient) out.insert(m.fact);
    return out;
}

namespace {

// Per-predicate fact store with sorted tuple vectors; insertion order never
// influences results.
struct Db {
    std::map<std::string, std::vector<std::vector<std::string>>> by_pred;

    static Db from(const FactSet& fs) {
        Db db;
        for (const auto& f : fs) db.by_pred[f.pred].push_back(f.args);
        return db;
    }
    bool contains(const std::string& pred, const std::vector<std::string>& args) const {
        auto it = by_pred.find(pred);
        if (it == by_pred.end()) return false;
        return std::binary_search(it->second.begin(), it->second.end(), args);
    }
    bool insert(const std::string& pred, const std::vector<std::string>& args) {
        auto& v = by_pred[pred];
        auto it = std::lower_bound(v.begin(), v.end(), args);
        if (it != v.end() && *it == args) return false;
        v.insert(it, args);
        return true;
    }
    FactSet flatten() const {
        FactSet out;
        for (const auto& [pred, tuples] : by_pred)
            for (const auto& t : tuples) out.insert(GroundAtom{pred, t});
        return out;
    }
};

using Binding = std::vector<std::pair<std::string, std::string>>;

const std::string* lookup(const Binding& b, const std::string& var) {
    for (const auto& [v, c] : b)
        if (v == var) return &c;
    return nullptr;
}

// Unifies a term against a constant, extending the binding; returns the
// number of entries pushed (0 or 1), or -1 on mismatch.
int unify_term(const Term& t, const std::string& value, Binding& b) {
    if (!t.is_var()) return t.text == value ? 0 : -1;
    if (const std::string* bound = lookup(b, t.text)) return *bound == value ? 0 : -1;
    b.emplace_back(t.text, value);
    return 1;
}

int unify_args(const std::vector<Term>& ts, const std::vector<std::string>& vals, Binding& b) {
    if (ts.size() != vals.size()) return -1;
    int pushed = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        int r = unify_term(ts[i], vals[i], b);
        if (r < 0) {
            while (pushed--) b.pop_back();
            return -1;
        }
        pushed += r;
    }
    return pushed;
}

std::string resolve_term(const Term& t, const Binding& b) {
    if (!t.is_var()) return t.text;
    const std::string* c = lookup(b, t.text);
    if (!c) throw ChoiceScopeError("unbound variable " + t.text + " (unsafe rule reached evaluation)");
    return *c;
}

std::vector<std::string> resolve_args(const std::vector<Term>& ts, const Binding& b) {
    std::vector<std::string> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(resolve_term(t, b));
    return out;
}

struct CompiledRule {
    const Rule* rule = nullptr;
    int index = 0;
    int level = 0;
    std::vector<const Literal*> positives;
    std::vector<const Literal*> negatives;
};

using DomainTuple = std::vector<std::string>;
using RangeTuple = std::vector<std::string>;
using CandidateMap = std::map<int, std::map<DomainTuple, std::set<RangeTuple>>>;
using Selection = std::map<int, std::map<DomainTuple, RangeTuple>>;

struct StepEnv {
    const EvalContext* ctx;
    const Db* prev_db;
    const Db* input_db;
    const LabeledMessage* msg;
    const std::optional<LabeledMessage>* prev_msg;
    std::vector<CompiledRule> rules;
    int transport_level = 0;
};

bool eval_negative(const StepEnv& env, const Db& derived, const Literal& lit, const Binding& b) {
    const Atom& a = lit.atom;
    if (a.kind == AtomKind::transport) {
        // Only prev-scoped negative transport literals pass validation.
        const auto& pm = *env.prev_msg;
        if (!pm) return true;
        if (pm->fact.pred != a.pred) return true;
        Binding tmp = b;
        if (unify_args(a.args, pm->fact.args, tmp) < 0) return true;
        if (a.label && unify_term(*a.label, pm->label, tmp) < 0) return true;
        return false;
    }
    std::vector<std::string> args = resolve_args(a.args, b);
    if (a.kind == AtomKind::input) return !env.input_db->contains(a.pred, args);
    if (lit.prev_scoped) return !env.prev_db->contains(a.pred, args);
    return !derived.contains(a.pred, args);
}

bool eval_constraints(const Rule& r, const Binding& b) {
    for (const auto& c : r.constraints)
        if (resolve_term(c.lhs, b) == resolve_term(c.rhs, b)) return false;
    return true;
}

// Enumerates every instantiation of the rule's positive body literals,
// invoking `sink` with the complete binding once negatives and constraints
// are also satisfied.
void match_positives(const StepEnv& env, const Db& derived, const CompiledRule& cr, size_t idx,
                     Binding& b, const std::function<void(const Binding&)>& sink) {
    if (idx == cr.positives.size()) {
        for (const Literal* n : cr.negatives)
            if (!eval_negative(env, derived, *n, b)) return;
        if (!eval_constraints(*cr.rule, b)) return;
        sink(b);
        return;
    }
    const Literal& lit = *cr.positives[idx];
    const Atom& a = lit.atom;
    auto try_fact = [&](const std::vector<std::string>& vals, const std::string* label_value) {
        Binding saved = b;
        if (unify_args(a.args, vals, b) < 0) {
            b = std::move(saved);
            return;
        }
        if (a.label && label_value && unify_term(*a.label, *label_value, b) < 0) {
            b = std::move(saved);
            return;
        }
        match_positives(env, derived, cr, idx + 1, b, sink);
        b = std::move(saved);
    };
    if (a.kind == AtomKind::transport) {
        if (lit.prev_scoped) {
            const auto& pm = *env.prev_msg;
            if (pm && pm->fact.pred == a.pred) try_fact(pm->fact.args, &pm->label);
        } else if (env.msg->fact.pred == a.pred) {
            try_fact(env.msg->fact.args, &env.msg->label);
        }
        return;
    }
    const Db& src = a.kind == AtomKind::input ? *env.input_db
                    : lit.prev_scoped        ? *env.prev_db
                                             : derived;
    auto it = src.by_pred.find(a.pred);
    if (it == src.by_pred.end()) return;
    // Tuples may be inserted while we iterate (same-stratum recursion); index
    // into the vector instead of iterating it.
    for (size_t i = 0; i < it->second.size(); ++i) {
        std::vector<std::string> vals = it->second[i];
        try_fact(vals, nullptr);
    }
}

void fire_head(const StepEnv& env, const CompiledRule& cr, const Binding& b, Db& derived,
               std::set<LabeledMessage>& outgoing, bool validate_recipients, bool* changed) {
    const Atom& head = cr.rule->head;
    std::vector<std::string> args = resolve_args(head.args, b);
    if (head.kind == AtomKind::transport) {
        std::string recipient = resolve_term(*head.label, b);
        if (validate_recipients) {
            bool ok = recipient == env.ctx->self_id ||
                      std::find(env.ctx->neighbors.begin(), env.ctx->neighbors.end(), recipient) !=
                          env.ctx->neighbors.end();
            if (!ok)
                throw RecipientError("rule at line " + std::to_string(cr.rule->line) +
                                     " addresses '" + recipient +
                                     "', which is neither the node nor one of its neighbors");
        }
        outgoing.insert(LabeledMessage{GroundAtom{head.pred, std::move(args)}, recipient});
        return;
    }
    if (derived.insert(head.pred, args)) *changed = true;
}

struct LevelResult {
    CandidateMap enabled;
};

// One stratum of the fix-point. sigma == nullptr runs the relaxed pass that
// fires every choice candidate (used only to bound the selection space).
LevelResult run_level(const StepEnv& env, const std::vector<const CompiledRule*>& rules,
                      Db& derived, std::set<LabeledMessage>& outgoing, const Selection* sigma,
                      bool validate_recipients) {
    LevelResult res;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const CompiledRule* cr : rules) {
            Binding b;
            match_positives(env, derived, *cr, 0, b, [&](const Binding& full) {
                if (cr->rule->choice) {
                    DomainTuple dom;
                    RangeTuple rng;
                    for (const auto& v : cr->rule->choice->domain_vars) {
                        const std::string* c = lookup(full, v);
                        if (!c) throw ChoiceScopeError("unbound choice variable " + v);
                        dom.push_back(*c);
                    }
                    for (const auto& v : cr->rule->choice->range_vars) {
                        const std::string* c = lookup(full, v);
                        if (!c) throw ChoiceScopeError("unbound choice variable " + v);
                        rng.push_back(*c);
                    }
                    res.enabled[cr->index][dom].insert(rng);
                    if (sigma) {
                        auto rit = sigma->find(cr->index);
                        if (rit == sigma->end()) return;
                        auto dit = rit->second.find(dom);
                        if (dit == rit->second.end() || dit->second != rng) return;
                    }
                }
                fire_head(env, *cr, full, derived, outgoing, validate_recipients, &changed);
            });
        }
    }
    return res;
}

constexpr long kMaxSelections = 1 << 20;

void explore(const StepEnv& env, int level, const Db& derived,
             const std::set<LabeledMessage>& outgoing, const ChoiceWitness& witness,
             std::set<StepOutcome>& results) {
    if (level > env.transport_level) {
        results.insert(StepOutcome{derived.flatten(), outgoing, witness});
        return;
    }
    std::vector<const CompiledRule*> rules;
    bool has_choice = false;
    for (const auto& cr : env.rules)
        if (cr.level == level) {
            rules.push_back(&cr);
            has_choice |= cr.rule->choice.has_value();
        }
    if (rules.empty()) {
        explore(env, level + 1, derived, outgoing, witness, results);
        return;
    }
    if (!has_choice) {
        Db d = derived;
        std::set<LabeledMessage> out = outgoing;
        run_level(env, rules, d, out, nullptr, /*validate_recipients=*/true);
        explore(env, level + 1, d, out, witness, results);
        return;
    }

    // Relaxed pass: every choice candidate fires, which over-approximates the
    // candidate space of any FD-consistent run of this stratum.
    CandidateMap candidates;
    {
        Db d = derived;
        std::set<LabeledMessage> scratch = outgoing;
        candidates = run_level(env, rules, d, scratch, nullptr, false).enabled;
    }
    std::vector<std::pair<int, DomainTuple>> slots;
    std::vector<std::vector<RangeTuple>> options;
    long total = 1;
    for (const auto& [rule_idx, doms] : candidates)
        for (const auto& [dom, rngs] : doms) {
            slots.emplace_back(rule_idx, dom);
            options.emplace_back(rngs.begin(), rngs.end());
            total *= static_cast<long>(rngs.size());
            if (total > kMaxSelections)
                throw ChoiceScopeError("choice selection space exceeds the evaluation limit");
        }
    if (slots.empty()) {
        Db d = derived;
        std::set<LabeledMessage> out = outgoing;
        run_level(env, rules, d, out, nullptr, true);
        explore(env, level + 1, d, out, witness, results);
        return;
    }
    std::vector<size_t> odo(slots.size(), 0);
    while (true) {
        Selection sigma;
        for (size_t i = 0; i < slots.size(); ++i)
            sigma[slots[i].first][slots[i].second] = options[i][odo[i]];
        Db d = derived;
        std::set<LabeledMessage> out = outgoing;
        LevelResult r = run_level(env, rules, d, out, &sigma, true);
        // Maximality: wherever a candidate was enabled, the selected range
        // tuple must itself have been enabled (and hence fired).
        bool ok = true;
        ChoiceWitness w = witness;
        for (const auto& [rule_idx, doms] : r.enabled) {
            for (const auto& [dom, rngs] : doms) {
                const RangeTuple& sel = sigma[rule_idx][dom];
                if (!rngs.count(sel)) {
                    ok = false;
                    break;
                }
                w.selected[rule_idx][dom] = sel;
            }
            if (!ok) break;
        }
        if (ok) explore(env, level + 1, d, out, w, results);
        // odometer
        size_t i = 0;
        for (; i < odo.size(); ++i) {
            if (++odo[i] < options[i].size()) break;
            odo[i] = 0;
        }
        if (i == odo.size()) break;
    }
}

}  // namespace

std::vector<StepOutcome> step(const EvalContext& ctx, const FactSet& input,
                              const FactSet& prev_state,
                              const std::optional<LabeledMessage>& prev_msg,
                              const LabeledMessage& msg) {
    const Program& prog = *ctx.program;
    if (!prog.transport_sig.count(msg.fact.pred))
        throw std::invalid_argument("message predicate '" + msg.fact.pred +
                                    "' is not in the transport signature");
    StepEnv env;
    env.ctx = &ctx;
    Db prev_db = Db::from(prev_state);
    Db input_db = Db::from(input);
    env.prev_db = &prev_db;
    env.input_db = &input_db;
    env.msg = &msg;
    env.prev_msg = &prev_msg;
    env.transport_level = ctx.strata->num_levels;

    for (size_t i = 0; i < prog.rules.size(); ++i) {
        const Rule& r = prog.rules[i];
        CompiledRule cr;
        cr.rule = &r;
        cr.index = static_cast<int>(i);
        if (r.head.kind == AtomKind::transport) {
            cr.level = env.transport_level;
        } else {
            auto it = ctx.strata->level.find(r.head.pred);
            cr.level = it == ctx.strata->level.end() ? 0 : it->second;
        }
        // Transport literals first: they match at most one fact.
        for (const auto& l : r.body_current)
            if (!l.negative && l.atom.kind == AtomKind::transport) cr.positives.push_back(&l);
        for (const auto& l : r.body_prev)
            if (!l.negative && l.atom.kind == AtomKind::transport) cr.positives.push_back(&l);
        for (const auto& l : r.body_current)
            if (!l.negative && l.atom.kind != AtomKind::transport) cr.positives.push_back(&l);
        for (const auto& l : r.body_prev)
            if (!l.negative && l.atom.kind != AtomKind::transport) cr.positives.push_back(&l);
        for (const auto& l : r.body_current)
            if (l.negative) cr.negatives.push_back(&l);
        for (const auto& l : r.body_prev)
            if (l.negative) cr.negatives.push_back(&l);
        env.rules.push_back(std::move(cr));
    }

    Db derived;
    derived.insert(kMyName, {ctx.self_id});
    for (const auto& nb : ctx.neighbors) derived.insert(kMyNeighbor, {nb});

    std::set<StepOutcome> results;
    explore(env, 0, derived, {}, {}, results);
    return {results.begin(), results.end()};
}

}  // namespace d2c
