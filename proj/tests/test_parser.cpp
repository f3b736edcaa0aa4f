#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "d2c/ast.hpp"
#include "d2c/parser.hpp"

using namespace d2c;

namespace {

Program parse_ok(const std::string& text) {
    auto res = parse_program(text);
    auto* p = std::get_if<Program>(&res);
    REQUIRE_MESSAGE(p != nullptr, std::get<ParseError>(res).format());
    return *p;
}

ParseError parse_err(const std::string& text) {
    auto res = parse_program(text);
    auto* e = std::get_if<ParseError>(&res);
    REQUIRE(e != nullptr);
    return *e;
}

}  // namespace

TEST_CASE("persistence rule: prev body only") {
    Program p = parse_ok("path(X,Y,Z) if prev path(X,Y,Z).");
    REQUIRE(p.rules.size() == 1);
    const Rule& r = p.rules[0];
    CHECK(r.head.pred == "path");
    CHECK(r.head.args.size() == 3);
    CHECK(r.head.kind == AtomKind::state);
    CHECK(r.body_current.empty());
    REQUIRE(r.body_prev.size() == 1);
    CHECK(r.body_prev[0].atom.pred == "path");
    CHECK(!r.body_prev[0].negative);
    CHECK(r.body_prev[0].prev_scoped);
}

TEST_CASE("labeled transport head with prev negation") {
    Program p = parse_ok("wakeUp@X if my_name(X) prev not win.");
    REQUIRE(p.rules.size() == 1);
    const Rule& r = p.rules[0];
    CHECK(r.head.pred == "wakeUp");
    CHECK(r.head.args.empty());
    REQUIRE(r.head.label.has_value());
    CHECK(r.head.label->is_var());
    CHECK(r.head.kind == AtomKind::transport);
    REQUIRE(r.body_current.size() == 1);
    CHECK(r.body_current[0].atom.pred == kMyName);
    REQUIRE(r.body_prev.size() == 1);
    CHECK(r.body_prev[0].negative);
    CHECK(r.body_prev[0].atom.pred == "win");
}

TEST_CASE("empty program") {
    Program p = parse_ok("");
    CHECK(p.rules.empty());
}

TEST_CASE("malformed: unclosed argument list") {
    ParseError e = parse_err("p(X if q(X).");
    CHECK(e.line == 1);
    CHECK(e.column > 1);
}

TEST_CASE("choice predicate with domain and range") {
    Program p = parse_ok("assign(X,Y) if cand(X,Y), choice((X),Y) prev ready.");
    const Rule& r = p.rules[0];
    REQUIRE(r.choice.has_value());
    CHECK(r.choice->domain_vars == std::vector<std::string>{"X"});
    CHECK(r.choice->range_vars == std::vector<std::string>{"Y"});
}

TEST_CASE("choice with empty domain") {
    Program p = parse_ok("player(X) if path(P,X,D), choice(D) prev player(P).");
    const Rule& r = p.rules[0];
    REQUIRE(r.choice.has_value());
    CHECK(r.choice->domain_vars.empty());
    CHECK(r.choice->range_vars == std::vector<std::string>{"D"});
    REQUIRE(r.body_current.size() == 1);
    REQUIRE(r.body_prev.size() == 1);
}

TEST_CASE("constraints parse after current body") {
    Program p = parse_ok("p(X,Y) if q(X), r(Y), X != Y.");
    const Rule& r = p.rules[0];
    REQUIRE(r.constraints.size() == 1);
    CHECK(r.constraints[0].lhs.text == "X");
    CHECK(r.constraints[0].rhs.text == "Y");
    CHECK(r.body_current.size() == 2);
}

TEST_CASE("constraints parse after prev body") {
    Program p = parse_ok("p(X) if q(X) prev r(Y), X != Y, X != c.");
    const Rule& r = p.rules[0];
    REQUIRE(r.constraints.size() == 2);
    CHECK(r.body_prev.size() == 1);
    CHECK(r.constraints[1].rhs.text == "c");
    CHECK(r.constraints[1].rhs.kind == TermKind::constant);
}

TEST_CASE("comma before prev is tolerated") {
    Program a = parse_ok("p(X) if q(X), prev r(X).");
    Program b = parse_ok("p(X) if q(X) prev r(X).");
    CHECK(a == b);
}

TEST_CASE("integer constants") {
    Program p = parse_ok("p(X) if q(X, 42).");
    const Term& t = p.rules[0].body_current[0].atom.args[1];
    CHECK(!t.is_var());
    CHECK(t.text == "42");
}

TEST_CASE("comments are skipped") {
    Program p = parse_ok("% header\np if q. % trailing\n% done\n");
    CHECK(p.rules.size() == 1);
}

TEST_CASE("kind inference: labeled atoms are transport, prev atoms state, rest input") {
    Program p = parse_ok("flag if sensor(X), msg(X)@Y prev flag.");
    CHECK(p.transport_sig.count("msg"));
    CHECK(p.state_sig.count("flag"));
    CHECK(p.input_sig.count("sensor"));
}

TEST_CASE("inconsistent arity is an error") {
    ParseError e = parse_err("p(X) if q(X). p(X,Y) if q(X), q(Y).");
    CHECK(e.message.find("arit") != std::string::npos);
}

TEST_CASE("neighbor is an alias for my_neighbor") {
    Program p = parse_ok("m@Y if neighbor(Y), m@X, my_name(X).");
    CHECK(p.rules[0].body_current[0].atom.pred == kMyNeighbor);
}

TEST_CASE("two prev sections rejected") {
    parse_err("p if prev q prev r.");
}

TEST_CASE("reserved words cannot be predicates") {
    parse_err("not if q.");
    parse_err("p if if.");
}

TEST_CASE("fact list parsing") {
    auto res = parse_fact_list("path(a,b,up). exit(b). counter(7).");
    auto* facts = std::get_if<std::vector<GroundAtom>>(&res);
    REQUIRE(facts != nullptr);
    REQUIRE(facts->size() == 3);
    CHECK((*facts)[0].pred == "path");
    CHECK((*facts)[2].args == std::vector<std::string>{"7"});
    auto bad = parse_fact_list("p(X).");
    CHECK(std::holds_alternative<ParseError>(bad));
}

// Round-trip property: parse . pretty_print . parse is the identity on rule
// ASTs, over generated programs.
namespace {

Rule random_rule(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> d3(0, 2);
    auto var = [&](int i) { return make_var(std::string(1, static_cast<char>('X' + i))); };
    auto cst = [&](int i) { return make_const("c" + std::to_string(i)); };
    auto atom = [&](const std::string& pred, int arity, bool label) {
        Atom a;
        a.pred = pred;
        for (int i = 0; i < arity; ++i) a.args.push_back(coin(rng) ? var(i) : cst(d3(rng)));
        if (label) a.label = make_var("L");
        return a;
    };
    Rule r;
    bool transport_head = coin(rng) == 1;
    r.head = atom(transport_head ? "m" : "h", d3(rng), transport_head);
    int ncur = d3(rng), nprev = d3(rng);
    for (int i = 0; i < ncur; ++i) {
        Literal l;
        l.atom = atom("b" + std::to_string(i), d3(rng) + 1, false);
        l.negative = coin(rng) == 1;
        r.body_current.push_back(l);
    }
    // Ground the head label if used.
    if (transport_head) {
        Literal l;
        l.atom = atom("lab", 0, true);
        r.body_current.push_back(l);
    }
    for (int i = 0; i < nprev; ++i) {
        Literal l;
        l.atom = atom("q" + std::to_string(i), d3(rng) + 1, false);
        l.negative = coin(rng) == 1;
        l.prev_scoped = true;
        r.body_prev.push_back(l);
    }
    if (r.body_current.empty() && r.body_prev.empty()) {
        Literal l;
        l.atom = atom("base", 1, false);
        r.body_current.push_back(l);
    }
    if (coin(rng)) r.constraints.push_back({var(0), cst(0)});
    if (coin(rng)) {
        ChoicePredicate ch;
        ch.range_vars = {"Y"};
        if (coin(rng)) ch.domain_vars = {"X"};
        r.choice = ch;
    }
    return r;
}

}  // namespace

TEST_CASE("round-trip: parse composed with pretty_print is the identity") {
    std::mt19937_64 rng(20240817);
    for (int iter = 0; iter < 200; ++iter) {
        Program p;
        std::uniform_int_distribution<int> nrules(1, 4);
        int n = nrules(rng);
        for (int i = 0; i < n; ++i) p.rules.push_back(random_rule(rng));
        std::string printed = pretty_print(p);
        auto res = parse_program_raw(printed);
        auto* q = std::get_if<Program>(&res);
        REQUIRE_MESSAGE(q != nullptr, (printed + "\n" + std::get<ParseError>(res).format()));
        REQUIRE_MESSAGE(*q == p, ("round-trip mismatch on:\n" + printed));
        CHECK(pretty_print(*q) == printed);
    }
}
