#include "d2c/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace d2c {

std::string Diagnostic::format() const {
    std::ostringstream os;
    const char* k = "";
    switch (kind) {
        case Kind::signature: k = "signature"; break;
        case Kind::safety: k = "safety"; break;
        case Kind::stratification: k = "stratification"; break;
        case Kind::choice: k = "choice"; break;
        case Kind::scenario: k = "scenario"; break;
    }
    if (line > 0)
        os << line << ":" << column << ": " << k << " error: " << message;
    else
        os << k << " error: " << message;
    return os.str();
}

namespace {

void for_each_atom(Program& p, const std::function<void(Atom&, bool /*is_head*/, bool /*prev*/)>& f) {
    for (auto& r : p.rules) {
        f(r.head, true, false);
        for (auto& l : r.body_current) f(l.atom, false, false);
        for (auto& l : r.body_prev) f(l.atom, false, true);
    }
}

}  // namespace

std::vector<Diagnostic> resolve_signatures(Program& p, const SignatureDecls* declared) {
    std::vector<Diagnostic> diags;
    auto err = [&](const Atom& a, std::string msg) {
        diags.push_back({Diagnostic::Kind::signature, a.line, a.column, std::move(msg)});
    };

    // The paper uses both `my_neighbor` and `neighbor`; normalize to the former.
    for_each_atom(p, [](Atom& a, bool, bool) {
        if (a.pred == "neighbor" && a.args.size() == 1) a.pred = kMyNeighbor;
    });

    std::map<std::string, int> arity;
    std::map<std::string, Atom*> first_use;
    bool arity_ok = true;
    for_each_atom(p, [&](Atom& a, bool, bool) {
        auto it = arity.find(a.pred);
        if (it == arity.end()) {
            arity[a.pred] = a.arity();
            first_use[a.pred] = &a;
        } else if (it->second != a.arity()) {
            err(a, "predicate '" + a.pred + "' used with arities " + std::to_string(it->second) +
                       " and " + std::to_string(a.arity()));
            arity_ok = false;
        }
    });
    if (!arity_ok) return diags;

    std::map<std::string, AtomKind> kind;
    kind[kMyName] = AtomKind::state;
    kind[kMyNeighbor] = AtomKind::state;
    kind[kStart] = AtomKind::transport;
    if (arity.count(kMyName) && arity[kMyName] != 1)
        err(*first_use[kMyName], "my_name has arity 1");
    if (arity.count(kMyNeighbor) && arity[kMyNeighbor] != 1)
        err(*first_use[kMyNeighbor], "my_neighbor has arity 1");
    if (arity.count(kStart) && arity[kStart] != 0) err(*first_use[kStart], "start has arity 0");

    if (declared) {
        auto declare = [&](const std::map<std::string, int>& sig, AtomKind k, const char* name) {
            for (const auto& [pred, ar] : sig) {
                if (kind.count(pred) && kind[pred] != k) {
                    diags.push_back({Diagnostic::Kind::signature, 0, 0,
                                     "predicate '" + pred + "' declared in two signatures"});
                    continue;
                }
                kind[pred] = k;
                if (arity.count(pred) && arity[pred] != ar)
                    diags.push_back({Diagnostic::Kind::signature, 0, 0,
                                     "predicate '" + pred + "' declared " + name + "/" +
                                         std::to_string(ar) + " but used with arity " +
                                         std::to_string(arity[pred])});
                arity[pred] = ar;
            }
        };
        declare(declared->state, AtomKind::state, "state");
        declare(declared->transport, AtomKind::transport, "transport");
        declare(declared->input, AtomKind::input, "input");
        for_each_atom(p, [&](Atom& a, bool, bool) {
            if (!kind.count(a.pred))
                err(a, "predicate '" + a.pred + "' is not declared in any signature");
        });
    } else {
        // Inference: labeled atoms are transport; heads and prev-scoped atoms
        // are state; the rest default to input.
        std::map<std::string, bool> labeled, unlabeled, statish;
        for_each_atom(p, [&](Atom& a, bool is_head, bool prev) {
            (a.label ? labeled : unlabeled)[a.pred] = true;
            if (!a.label && (is_head || prev)) statish[a.pred] = true;
        });
        for (const auto& [pred, ar] : arity) {
            if (kind.count(pred)) continue;
            if (labeled.count(pred)) {
                kind[pred] = AtomKind::transport;
                if (unlabeled.count(pred))
                    err(*first_use[pred],
                        "predicate '" + pred + "' occurs both with and without an '@' label");
            } else if (statish.count(pred)) {
                kind[pred] = AtomKind::state;
            } else {
                kind[pred] = AtomKind::input;
            }
        }
    }
    if (!diags.empty()) return diags;

    for_each_atom(p, [&](Atom& a, bool, bool) {
        a.kind = kind[a.pred];
        if (a.kind == AtomKind::transport && !a.label)
            err(a, "transport atom '" + a.pred + "' must carry an '@' label");
        if (a.kind != AtomKind::transport && a.label)
            err(a, "'" + a.pred + "' is not a transport predicate and cannot carry a label");
    });

    p.state_sig.clear();
    p.transport_sig.clear();
    p.input_sig.clear();
    p.state_sig[kMyName] = 1;
    p.state_sig[kMyNeighbor] = 1;
    p.transport_sig[kStart] = 0;
    for (const auto& [pred, k] : kind) {
        if (!arity.count(pred) && !declared) continue;
        int ar = arity.count(pred) ? arity[pred] : 0;
        switch (k) {
            case AtomKind::state: p.state_sig[pred] = ar; break;
            case AtomKind::transport: p.transport_sig[pred] = ar; break;
            case AtomKind::input: p.input_sig[pred] = ar; break;
        }
    }
    if (declared) {
        for (const auto& [pred, ar] : declared->state) p.state_sig[pred] = ar;
        for (const auto& [pred, ar] : declared->transport) p.transport_sig[pred] = ar;
        for (const auto& [pred, ar] : declared->input) p.input_sig[pred] = ar;
    }
    return diags;
}

std::optional<SafetyError> check_safety(const Rule& r) {
    std::set<std::string> bound;
    auto bind_atom = [&](const Atom& a) {
        for (const auto& t : a.args)
            if (t.is_var()) bound.insert(t.text);
        if (a.label && a.label->is_var()) bound.insert(a.label->text);
    };
    for (const auto& l : r.body_current)
        if (!l.negative) bind_atom(l.atom);
    for (const auto& l : r.body_prev)
        if (!l.negative) bind_atom(l.atom);

    std::vector<std::string> unsafe;
    for (const auto& v : rule_variables(r))
        if (!bound.count(v)) unsafe.push_back(v);
    if (unsafe.empty()) return std::nullopt;
    return SafetyError{std::move(unsafe)};
}

std::variant<Stratification, StratificationError> stratify(const Program& p) {
    // Edges between current-step state predicates only: level(head) >=
    // level(body) for positive use, strictly greater for negative use.
    struct Edge {
        std::string from, to;  // head depends on `to`
        int weight;            // 0 positive, 1 negative
    };
    std::vector<Edge> edges;
    std::map<std::string, int> level;
    for (const auto& [pred, ar] : p.state_sig) level[pred] = 0;
    for (const auto& r : p.rules) {
        if (r.head.kind != AtomKind::state) continue;
        for (const auto& l : r.body_current) {
            if (l.prev_scoped || l.atom.kind != AtomKind::state) continue;
            edges.push_back({r.head.pred, l.atom.pred, l.negative ? 1 : 0});
        }
    }
    size_t n = level.size();
    bool changed = true;
    for (size_t iter = 0; iter <= n && changed; ++iter) {
        changed = false;
        for (const auto& e : edges) {
            int want = level[e.to] + e.weight;
            if (level[e.from] < want) {
                level[e.from] = want;
                changed = true;
            }
        }
    }
    if (changed) {
        // A predicate kept climbing: some cycle contains a negative edge.
        std::set<std::string> unstable;
        for (size_t iter = 0; iter < n; ++iter)
            for (const auto& e : edges)
                if (level[e.from] < level[e.to] + e.weight) {
                    unstable.insert(e.from);
                    level[e.from] = level[e.to] + e.weight;
                }
        std::ostringstream os;
        os << "recursion through negation involving:";
        for (const auto& s : unstable) os << " " << s;
        return StratificationError{os.str()};
    }
    Stratification s;
    int max_level = 0;
    for (const auto& [pred, lv] : level) max_level = std::max(max_level, lv);
    s.level = std::move(level);
    s.num_levels = max_level + 1;
    return s;
}

std::optional<NotPropositional> check_plb(const Program& p) {
    NotPropositional np;
    for (const auto& [pred, ar] : p.transport_sig)
        if (ar != 0) np.offenders.emplace_back(pred, ar);
    if (np.offenders.empty()) return std::nullopt;
    return np;
}

std::vector<Diagnostic> validate_program(const Program& p) {
    std::vector<Diagnostic> diags;
    auto err = [&](Diagnostic::Kind k, int line, int col, std::string msg) {
        diags.push_back({k, line, col, std::move(msg)});
    };
    for (size_t i = 0; i < p.rules.size(); ++i) {
        const Rule& r = p.rules[i];
        if (r.head.pred == kMyName || r.head.pred == kMyNeighbor || r.head.pred == kStart)
            err(Diagnostic::Kind::signature, r.head.line, r.head.column,
                "'" + r.head.pred + "' is read-only and cannot head a rule");
        if (r.head.kind == AtomKind::input)
            err(Diagnostic::Kind::signature, r.head.line, r.head.column,
                "input predicate '" + r.head.pred + "' cannot head a rule");
        for (const auto& l : r.body_current)
            if (l.negative && l.atom.kind == AtomKind::transport)
                err(Diagnostic::Kind::signature, l.atom.line, l.atom.column,
                    "negated transport literal outside prev scope (the incoming message is "
                    "matched positively)");
        for (const auto& l : r.body_prev)
            if (l.atom.kind == AtomKind::input)
                err(Diagnostic::Kind::signature, l.atom.line, l.atom.column,
                    "input literals may not appear under prev");
        if (r.choice) {
            if (r.choice_in_prev)
                err(Diagnostic::Kind::choice, r.line, r.column,
                    "choice predicates may not appear under prev");
            std::set<std::string> dom(r.choice->domain_vars.begin(), r.choice->domain_vars.end());
            for (const auto& v : r.choice->range_vars)
                if (dom.count(v))
                    err(Diagnostic::Kind::choice, r.line, r.column,
                        "variable " + v + " occurs in both the domain and range of choice");
            std::set<std::string> bound;
            auto bind = [&](const Literal& l) {
                if (l.negative) return;
                for (const auto& t : l.atom.args)
                    if (t.is_var()) bound.insert(t.text);
                if (l.atom.label && l.atom.label->is_var()) bound.insert(l.atom.label->text);
            };
            for (const auto& l : r.body_current) bind(l);
            for (const auto& l : r.body_prev) bind(l);
            for (const auto& v : r.choice->domain_vars)
                if (!bound.count(v))
                    err(Diagnostic::Kind::choice, r.line, r.column,
                        "choice variable " + v + " does not occur in a positive body literal");
            for (const auto& v : r.choice->range_vars)
                if (!bound.count(v))
                    err(Diagnostic::Kind::choice, r.line, r.column,
                        "choice variable " + v + " does not occur in a positive body literal");
        }
        if (auto unsafe = check_safety(r)) {
            std::ostringstream os;
            os << "unsafe rule: variable(s)";
            for (const auto& v : unsafe->unsafe_vars) os << " " << v;
            os << " do not occur in a positive body literal";
            err(Diagnostic::Kind::safety, r.line, r.column, os.str());
        }
    }
    return diags;
}

}  // namespace d2c
