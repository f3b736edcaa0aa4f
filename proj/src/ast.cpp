#include "d2c/ast.hpp"

#include <sstream>

#include "d2c/fact.hpp"

namespace d2c {

Term make_var(std::string name) { return Term{TermKind::variable, std::move(name)}; }
Term make_const(std::string name) { return Term{TermKind::constant, std::move(name)}; }

std::string pretty_print(const Term& t) { return t.text; }

std::string pretty_print(const Atom& a) {
    std::ostringstream os;
    os << a.pred;
    if (!a.args.empty()) {
        os << "(";
        for (size_t i = 0; i < a.args.size(); ++i) {
            if (i) os << ",";
            os << a.args[i].text;
        }
        os << ")";
    }
    if (a.label) os << "@" << a.label->text;
    return os.str();
}

std::string pretty_print(const Literal& l) {
    return (l.negative ? "not " : "") + pretty_print(l.atom);
}

static std::string print_choice(const ChoicePredicate& c) {
    std::ostringstream os;
    os << "choice(";
    if (!c.domain_vars.empty()) {
        os << "(";
        for (size_t i = 0; i < c.domain_vars.size(); ++i) {
            if (i) os << ",";
            os << c.domain_vars[i];
        }
        os << "),";
    }
    for (size_t i = 0; i < c.range_vars.size(); ++i) {
        if (i) os << ",";
        os << c.range_vars[i];
    }
    os << ")";
    return os.str();
}

std::string pretty_print(const Rule& r) {
    std::ostringstream os;
    os << pretty_print(r.head) << " if ";
    bool first = true;
    for (const auto& l : r.body_current) {
        if (!first) os << ", ";
        os << pretty_print(l);
        first = false;
    }
    if (r.choice) {
        if (!first) os << ", ";
        os << print_choice(*r.choice);
        first = false;
    }
    if (!r.body_prev.empty()) {
        os << (first ? "prev " : " prev ");
        for (size_t i = 0; i < r.body_prev.size(); ++i) {
            if (i) os << ", ";
            os << pretty_print(r.body_prev[i]);
        }
        first = false;
    }
    for (const auto& c : r.constraints) {
        os << (first ? "" : ", ") << c.lhs.text << " != " << c.rhs.text;
        first = false;
    }
    os << ".";
    return os.str();
}

std::string pretty_print(const Program& p) {
    std::ostringstream os;
    for (const auto& r : p.rules) os << pretty_print(r) << "\n";
    return os.str();
}

static void collect_vars(const Atom& a, std::vector<std::string>& out) {
    auto add = [&](const Term& t) {
        if (t.is_var()) {
            for (const auto& v : out)
                if (v == t.text) return;
            out.push_back(t.text);
        }
    };
    for (const auto& t : a.args) add(t);
    if (a.label && a.label->is_var()) add(*a.label);
}

std::vector<std::string> rule_variables(const Rule& r) {
    std::vector<std::string> vars;
    auto add_name = [&](const std::string& n) {
        for (const auto& v : vars)
            if (v == n) return;
        vars.push_back(n);
    };
    collect_vars(r.head, vars);
    for (const auto& l : r.body_current) collect_vars(l.atom, vars);
    for (const auto& l : r.body_prev) collect_vars(l.atom, vars);
    for (const auto& c : r.constraints) {
        if (c.lhs.is_var()) add_name(c.lhs.text);
        if (c.rhs.is_var()) add_name(c.rhs.text);
    }
    if (r.choice) {
        for (const auto& v : r.choice->domain_vars) add_name(v);
        for (const auto& v : r.choice->range_vars) add_name(v);
    }
    return vars;
}

std::set<std::string> program_constants(const Program& p) {
    std::set<std::string> out;
    auto add_atom = [&](const Atom& a) {
        for (const auto& t : a.args)
            if (!t.is_var()) out.insert(t.text);
        if (a.label && !a.label->is_var()) out.insert(a.label->text);
    };
    for (const auto& r : p.rules) {
        add_atom(r.head);
        for (const auto& l : r.body_current) add_atom(l.atom);
        for (const auto& l : r.body_prev) add_atom(l.atom);
        for (const auto& c : r.constraints) {
            if (!c.lhs.is_var()) out.insert(c.lhs.text);
            if (!c.rhs.is_var()) out.insert(c.rhs.text);
        }
    }
    return out;
}

// --- fact.hpp ------------------------------------------------------------

std::string GroundAtom::to_string() const {
    std::ostringstream os;
    os << pred;
    if (!args.empty()) {
        os << "(";
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) os << ",";
            os << args[i];
        }
        os << ")";
    }
    return os.str();
}

std::string LabeledMessage::to_string() const { return fact.to_string() + "@" + label; }

std::string to_string(const FactSet& fs) {
    std::ostringstream os;
    bool first = true;
    for (const auto& f : fs) {
        if (!first) os << " ";
        os << f.to_string() << ".";
        first = false;
    }
    return os.str();
}

std::set<std::string> fact_constants(const FactSet& fs) {
    std::set<std::string> out;
    for (const auto& f : fs)
        for (const auto& a : f.args) out.insert(a);
    return out;
}

}  // namespace d2c
