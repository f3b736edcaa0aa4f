#include "d2c/parser.hpp"

#include <sstream>

#include "d2c/validate.hpp"
#include "lexer.hpp"

namespace d2c {

using lex::Cursor;
using lex::Tok;
using lex::Token;

std::string ParseError::format() const {
    std::ostringstream os;
    os << line << ":" << column << ": parse error: " << message;
    if (!token.empty()) os << " (at '" << token << "')";
    return os.str();
}

namespace {

struct ParseFail {
    ParseError err;
};

[[noreturn]] void fail(const Token& t, std::string msg) {
    throw ParseFail{ParseError{t.line, t.column, t.text, std::move(msg)}};
}

bool is_reserved(const std::string& s) {
    return s == "if" || s == "prev" || s == "not" || s == "choice";
}

Term parse_term(Cursor& c) {
    const Token& t = c.peek();
    if (t.kind == Tok::integer) {
        c.next();
        return make_const(t.text);
    }
    if (t.kind != Tok::ident) fail(t, "expected a term");
    if (is_reserved(t.text)) fail(t, "'" + t.text + "' is a reserved word");
    c.next();
    return t.is_upper_ident() ? make_var(t.text) : make_const(t.text);
}

Atom parse_atom(Cursor& c, bool allow_label) {
    const Token& t = c.peek();
    if (t.kind != Tok::ident) fail(t, "expected a predicate name");
    if (t.is_upper_ident()) fail(t, "predicate names start with a lowercase letter");
    if (is_reserved(t.text)) fail(t, "'" + t.text + "' is a reserved word");
    Atom a;
    a.pred = t.text;
    a.line = t.line;
    a.column = t.column;
    c.next();
    if (c.accept(Tok::lparen)) {
        if (c.at(Tok::rparen)) fail(c.peek(), "empty argument list");
        a.args.push_back(parse_term(c));
        while (c.accept(Tok::comma)) a.args.push_back(parse_term(c));
        if (!c.accept(Tok::rparen)) fail(c.peek(), "expected ')' to close the argument list");
    }
    if (c.at(Tok::at)) {
        if (!allow_label) fail(c.peek(), "'@' label is not allowed here");
        c.next();
        a.label = parse_term(c);
    }
    return a;
}

std::vector<std::string> parse_varlist(Cursor& c, Tok terminator) {
    std::vector<std::string> vars;
    while (true) {
        const Token& t = c.peek();
        if (t.kind != Tok::ident || !t.is_upper_ident())
            fail(t, "expected a variable in choice predicate");
        vars.push_back(t.text);
        c.next();
        if (c.at(terminator)) break;
        if (!c.accept(Tok::comma)) fail(c.peek(), "expected ',' or end of variable list");
    }
    return vars;
}

ChoicePredicate parse_choice(Cursor& c) {
    c.next();  // 'choice'
    if (!c.accept(Tok::lparen)) fail(c.peek(), "expected '(' after choice");
    ChoicePredicate ch;
    if (c.accept(Tok::lparen)) {
        ch.domain_vars = parse_varlist(c, Tok::rparen);
        c.next();  // ')'
        if (!c.accept(Tok::comma)) fail(c.peek(), "expected ',' after choice domain");
    }
    ch.range_vars = parse_varlist(c, Tok::rparen);
    c.next();  // ')'
    return ch;
}

// A constraint begins with a term directly followed by '!='.
bool at_constraint(const Cursor& c) {
    const Token& t = c.peek();
    if (t.kind != Tok::ident && t.kind != Tok::integer) return false;
    return c.peek(1).kind == Tok::neq;
}

void parse_constraints(Cursor& c, Rule& r) {
    while (true) {
        Constraint ct;
        ct.lhs = parse_term(c);
        if (!c.accept(Tok::neq)) fail(c.peek(), "expected '!='");
        ct.rhs = parse_term(c);
        r.constraints.push_back(ct);
        if (!c.accept(Tok::comma)) break;
        if (!at_constraint(c)) fail(c.peek(), "expected another inequality after ','");
    }
}

Rule parse_rule(Cursor& c) {
    Rule r;
    r.line = c.peek().line;
    r.column = c.peek().column;
    r.head = parse_atom(c, /*allow_label=*/true);
    if (!c.accept_ident("if")) fail(c.peek(), "expected 'if'");

    bool in_prev = false;
    bool expect_literal = !c.at_ident("prev") && !c.at(Tok::dot);
    while (true) {
        if (!expect_literal) {
            if (c.accept(Tok::dot)) break;
            if (c.accept_ident("prev")) {
                if (in_prev) fail(c.peek(), "a rule may have at most one 'prev' section");
                in_prev = true;
                expect_literal = true;
                continue;
            }
            if (c.accept(Tok::comma)) {
                // Tolerate the paper's "..., prev ..." spelling.
                if (c.accept_ident("prev")) {
                    if (in_prev) fail(c.peek(), "a rule may have at most one 'prev' section");
                    in_prev = true;
                }
                expect_literal = true;
                continue;
            }
            fail(c.peek(), "expected ',', 'prev', or '.'");
        }
        expect_literal = false;
        if (at_constraint(c)) {
            parse_constraints(c, r);
            if (!c.accept(Tok::dot)) fail(c.peek(), "expected '.' after constraints");
            break;
        }
        if (c.at_ident("choice") && c.peek(1).kind == Tok::lparen) {
            if (r.choice) fail(c.peek(), "at most one choice predicate per rule");
            r.choice = parse_choice(c);
            r.choice_in_prev = in_prev;
            continue;
        }
        Literal l;
        l.prev_scoped = in_prev;
        if (c.accept_ident("not")) l.negative = true;
        l.atom = parse_atom(c, /*allow_label=*/true);
        (in_prev ? r.body_prev : r.body_current).push_back(std::move(l));
    }
    if (r.body_current.empty() && r.body_prev.empty() && !r.choice)
        throw ParseFail{ParseError{r.line, r.column, "", "rule has an empty body"}};
    return r;
}

}  // namespace

ParseResult parse_program_raw(std::string_view text) {
    auto toks = lex::tokenize(text);
    if (!toks.empty() && toks.back().kind == Tok::error) {
        const Token& t = toks.back();
        return ParseError{t.line, t.column, t.text, "unexpected character"};
    }
    Cursor c{&toks};
    Program p;
    try {
        while (!c.at(Tok::eof)) p.rules.push_back(parse_rule(c));
    } catch (const ParseFail& f) {
        return f.err;
    }
    return p;
}

ParseResult parse_program(std::string_view text) {
    ParseResult res = parse_program_raw(text);
    if (auto* prog = std::get_if<Program>(&res)) {
        auto diags = resolve_signatures(*prog, nullptr);
        if (!diags.empty()) {
            const auto& d = diags.front();
            return ParseError{d.line, d.column, "", d.message};
        }
    }
    return res;
}

std::variant<std::vector<GroundAtom>, ParseError> parse_fact_list(std::string_view text) {
    auto toks = lex::tokenize(text);
    if (!toks.empty() && toks.back().kind == Tok::error) {
        const Token& t = toks.back();
        return ParseError{t.line, t.column, t.text, "unexpected character"};
    }
    Cursor c{&toks};
    std::vector<GroundAtom> facts;
    try {
        while (!c.at(Tok::eof)) {
            Atom a = parse_atom(c, /*allow_label=*/false);
            GroundAtom g;
            g.pred = a.pred;
            for (const auto& t : a.args) {
                if (t.is_var())
                    fail(Token{Tok::ident, t.text, a.line, a.column},
                         "facts must be ground (no variables)");
                g.args.push_back(t.text);
            }
            facts.push_back(std::move(g));
            if (!c.accept(Tok::dot)) fail(c.peek(), "expected '.' after fact");
        }
    } catch (const ParseFail& f) {
        return f.err;
    }
    return facts;
}

}  // namespace d2c
