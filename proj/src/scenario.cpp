#include "d2c/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "d2c/parser.hpp"
#include "lexer.hpp"

namespace d2c {

using lex::Cursor;
using lex::Tok;
using lex::Token;

bool Network::has_node(const std::string& n) const {
    return std::binary_search(nodes.begin(), nodes.end(), n);
}

std::vector<std::string> Network::neighbors(const std::string& n) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges) {
        if (a == n) out.push_back(b);
        if (b == n) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> Network::directed_channels() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& n : nodes) out.emplace_back(n, n);
    for (const auto& [a, b] : edges) {
        out.emplace_back(a, b);
        out.emplace_back(b, a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string to_string(ChannelKind k) { return k == ChannelKind::queue ? "queue" : "multiset"; }

std::string to_string(InputPolicy p) {
    switch (p) {
        case InputPolicy::closed: return "closed";
        case InputPolicy::interactive: return "interactive";
        case InputPolicy::autonomous: return "autonomous";
    }
    return "?";
}

ScenarioError::ScenarioError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? "scenario error" : diags.front().format()),
      diagnostics(std::move(diags)) {}

namespace {

struct LoadFail {
    Diagnostic diag;
};

[[noreturn]] void fail(const Token& t, std::string msg) {
    throw LoadFail{Diagnostic{Diagnostic::Kind::scenario, t.line, t.column, std::move(msg)}};
}

std::string expect_ident(Cursor& c, const char* what) {
    if (!c.at(Tok::ident)) fail(c.peek(), std::string("expected ") + what);
    return c.next().text;
}

void expect(Cursor& c, Tok k, const char* what) {
    if (!c.accept(k)) fail(c.peek(), std::string("expected ") + what);
}

std::vector<std::string> parse_name_list(Cursor& c) {
    std::vector<std::string> names;
    if (c.at(Tok::semicolon)) return names;
    names.push_back(expect_ident(c, "a name"));
    while (c.accept(Tok::comma)) names.push_back(expect_ident(c, "a name"));
    return names;
}

// Collects the token span of a braced block and returns the raw text slice.
std::string_view block_text(std::string_view src, Cursor& c) {
    expect(c, Tok::lbrace, "'{'");
    const Token& first = c.peek();
    int depth = 1;
    size_t begin_line = first.line, begin_col = first.column;
    // Re-scan the raw text: find the offset of the token after '{' by
    // walking lines. Tokens carry line/column, so translate.
    size_t offset = 0, line = 1, col = 1;
    while (offset < src.size() && (line < begin_line || (line == begin_line && col < begin_col))) {
        if (src[offset] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++offset;
    }
    size_t start = offset;
    while (!c.at(Tok::eof)) {
        if (c.at(Tok::lbrace)) ++depth;
        if (c.at(Tok::rbrace)) {
            --depth;
            if (depth == 0) break;
        }
        c.next();
    }
    if (!c.at(Tok::rbrace)) fail(c.peek(), "unterminated '{' block");
    const Token& close = c.peek();
    size_t end = offset;
    while (end < src.size() &&
           (line < static_cast<size_t>(close.line) ||
            (line == static_cast<size_t>(close.line) && col < static_cast<size_t>(close.column)))) {
        if (src[end] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++end;
    }
    c.next();  // '}'
    return src.substr(start, end - start);
}

void parse_sig_entries(Cursor& c, std::map<std::string, int>& sig) {
    if (c.at(Tok::semicolon)) return;
    while (true) {
        std::string name = expect_ident(c, "a predicate name");
        expect(c, Tok::slash, "'/'");
        if (!c.at(Tok::integer)) fail(c.peek(), "expected an arity");
        sig[name] = std::stoi(c.next().text);
        if (!c.accept(Tok::comma)) break;
    }
}

std::vector<GroundAtom> parse_facts_or_fail(std::string_view text) {
    auto res = parse_fact_list(text);
    if (auto* err = std::get_if<ParseError>(&res))
        throw LoadFail{Diagnostic{Diagnostic::Kind::scenario, err->line, err->column,
                                  "in facts: " + err->message}};
    return std::get<std::vector<GroundAtom>>(std::move(res));
}

}  // namespace

Scenario load_scenario_text(std::string_view text, const std::string& base_dir,
                            const std::string& source_path) {
    std::vector<Diagnostic> diags;
    Scenario sc;
    sc.source_path = source_path;
    bool have_decls = false;
    SignatureDecls decls;
    std::string program_text;
    std::vector<std::vector<GroundAtom>> input_sets;
    std::vector<GroundAtom> init_facts;

    auto toks = lex::tokenize(text);
    if (!toks.empty() && toks.back().kind == Tok::error) {
        diags.push_back({Diagnostic::Kind::scenario, toks.back().line, toks.back().column,
                         "unexpected character '" + toks.back().text + "'"});
        throw ScenarioError(std::move(diags));
    }
    Cursor c{&toks};
    try {
        while (!c.at(Tok::eof)) {
            std::string section = expect_ident(c, "a section name");
            if (section == "network") {
                expect(c, Tok::lbrace, "'{'");
                while (!c.accept(Tok::rbrace)) {
                    std::string key = expect_ident(c, "'nodes' or 'edges'");
                    expect(c, Tok::colon, "':'");
                    if (key == "nodes") {
                        for (auto& n : parse_name_list(c)) sc.network.nodes.push_back(n);
                    } else if (key == "edges") {
                        if (!c.at(Tok::semicolon)) {
                            while (true) {
                                std::string a = expect_ident(c, "a node");
                                expect(c, Tok::dashdash, "'--'");
                                std::string b = expect_ident(c, "a node");
                                if (a == b)
                                    fail(c.peek(), "self-loops are implicit; do not list " + a +
                                                       " -- " + b);
                                sc.network.edges.insert({std::min(a, b), std::max(a, b)});
                                if (!c.accept(Tok::comma)) break;
                            }
                        }
                    } else {
                        fail(c.peek(), "unknown network entry '" + key + "'");
                    }
                    expect(c, Tok::semicolon, "';'");
                }
            } else if (section == "signatures") {
                have_decls = true;
                expect(c, Tok::lbrace, "'{'");
                while (!c.accept(Tok::rbrace)) {
                    std::string key = expect_ident(c, "'state', 'transport', or 'input'");
                    expect(c, Tok::colon, "':'");
                    if (key == "state")
                        parse_sig_entries(c, decls.state);
                    else if (key == "transport")
                        parse_sig_entries(c, decls.transport);
                    else if (key == "input")
                        parse_sig_entries(c, decls.input);
                    else
                        fail(c.peek(), "unknown signature '" + key + "'");
                    expect(c, Tok::semicolon, "';'");
                }
            } else if (section == "channel") {
                expect(c, Tok::colon, "':'");
                std::string k = expect_ident(c, "'queue' or 'multiset'");
                if (k == "queue")
                    sc.channel_kind = ChannelKind::queue;
                else if (k == "multiset")
                    sc.channel_kind = ChannelKind::multiset;
                else
                    fail(c.peek(), "unknown channel kind '" + k + "'");
                expect(c, Tok::semicolon, "';'");
            } else if (section == "policy") {
                expect(c, Tok::colon, "':'");
                std::string p = expect_ident(c, "an input policy");
                if (p == "closed")
                    sc.policy = InputPolicy::closed;
                else if (p == "interactive")
                    sc.policy = InputPolicy::interactive;
                else if (p == "autonomous")
                    sc.policy = InputPolicy::autonomous;
                else
                    fail(c.peek(), "unknown policy '" + p + "'");
                expect(c, Tok::semicolon, "';'");
            } else if (section == "init") {
                init_facts = parse_facts_or_fail(block_text(text, c));
            } else if (section == "inputs") {
                expect(c, Tok::lbrace, "'{'");
                while (!c.accept(Tok::rbrace))
                    input_sets.push_back(parse_facts_or_fail(block_text(text, c)));
            } else if (section == "program") {
                if (c.at_ident("file")) {
                    c.next();
                    if (!c.at(Tok::str)) fail(c.peek(), "expected a quoted path");
                    std::string rel = c.next().text;
                    expect(c, Tok::semicolon, "';'");
                    std::ifstream in(base_dir + "/" + rel);
                    if (!in)
                        throw LoadFail{Diagnostic{Diagnostic::Kind::scenario, 0, 0,
                                                  "cannot read program file '" + rel + "'"}};
                    std::ostringstream ss;
                    ss << in.rdbuf();
                    program_text = ss.str();
                } else {
                    program_text = std::string(block_text(text, c));
                }
            } else {
                fail(c.peek(), "unknown section '" + section + "'");
            }
        }
    } catch (const LoadFail& f) {
        diags.push_back(f.diag);
        throw ScenarioError(std::move(diags));
    }

    auto parsed = parse_program_raw(program_text);
    if (auto* err = std::get_if<ParseError>(&parsed)) {
        diags.push_back({Diagnostic::Kind::scenario, err->line, err->column,
                         "in program: " + err->message +
                             (err->token.empty() ? "" : " (at '" + err->token + "')")});
        throw ScenarioError(std::move(diags));
    }
    sc.program = std::get<Program>(std::move(parsed));

    if (!have_decls) {
        // Fall back to inference, then absorb init/input facts.
        for (const auto& f : init_facts)
            if (!decls.state.count(f.pred)) decls.state[f.pred] = static_cast<int>(f.args.size());
        for (const auto& set : input_sets)
            for (const auto& f : set)
                if (!decls.input.count(f.pred))
                    decls.input[f.pred] = static_cast<int>(f.args.size());
        auto inference = resolve_signatures(sc.program, nullptr);
        diags.insert(diags.end(), inference.begin(), inference.end());
        for (const auto& [pred, ar] : sc.program.state_sig) decls.state.try_emplace(pred, ar);
        for (const auto& [pred, ar] : sc.program.transport_sig)
            decls.transport.try_emplace(pred, ar);
        for (const auto& [pred, ar] : sc.program.input_sig) decls.input.try_emplace(pred, ar);
        decls.state.erase(kMyName);
        decls.state.erase(kMyNeighbor);
        decls.transport.erase(kStart);
        for (const auto& [pred, ar] : decls.state) decls.input.erase(pred);
    }
    if (diags.empty()) {
        auto d1 = resolve_signatures(sc.program, &decls);
        diags.insert(diags.end(), d1.begin(), d1.end());
    }
    if (diags.empty()) {
        auto d2 = validate_program(sc.program);
        diags.insert(diags.end(), d2.begin(), d2.end());
    }

    std::sort(sc.network.nodes.begin(), sc.network.nodes.end());
    sc.network.nodes.erase(std::unique(sc.network.nodes.begin(), sc.network.nodes.end()),
                           sc.network.nodes.end());
    if (sc.network.nodes.empty())
        diags.push_back({Diagnostic::Kind::scenario, 0, 0, "network has no nodes"});
    for (const auto& [a, b] : sc.network.edges)
        if (!sc.network.has_node(a) || !sc.network.has_node(b))
            diags.push_back({Diagnostic::Kind::scenario, 0, 0,
                             "edge " + a + " -- " + b + " references an unknown node"});

    for (const auto& f : init_facts) sc.initial_state.insert(f);
    for (const auto& set : input_sets) {
        FactSet fs;
        for (const auto& f : set) fs.insert(f);
        sc.input_pool.push_back(std::move(fs));
    }
    if (sc.policy == InputPolicy::closed) {
        bool trivial = sc.input_pool.empty() ||
                       (sc.input_pool.size() == 1 && sc.input_pool.front().empty());
        if (!trivial)
            diags.push_back({Diagnostic::Kind::scenario, 0, 0,
                             "closed policy admits no inputs, but the inputs section is nonempty"});
        sc.input_pool = {FactSet{}};
    } else if (sc.input_pool.empty()) {
        sc.input_pool = {FactSet{}};
    }

    if (diags.empty()) {
        auto d3 = validate_scenario(sc);
        diags.insert(diags.end(), d3.begin(), d3.end());
    }
    if (diags.empty()) {
        auto strat = stratify(sc.program);
        if (auto* err = std::get_if<StratificationError>(&strat))
            diags.push_back({Diagnostic::Kind::stratification, 0, 0, err->cycle});
        else
            sc.strata = std::get<Stratification>(strat);
    }
    if (!diags.empty()) throw ScenarioError(std::move(diags));
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError({Diagnostic{Diagnostic::Kind::scenario, 0, 0,
                                        "cannot open scenario file '" + path + "'"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string base = ".";
    if (auto slash = path.find_last_of('/'); slash != std::string::npos)
        base = path.substr(0, slash);
    return load_scenario_text(ss.str(), base, path);
}

std::vector<Diagnostic> validate_scenario(const Scenario& sc) {
    std::vector<Diagnostic> diags;
    auto err = [&](std::string msg) {
        diags.push_back({Diagnostic::Kind::scenario, 0, 0, std::move(msg)});
    };
    for (const auto& f : sc.initial_state) {
        if (f.pred == kMyName || f.pred == kMyNeighbor)
            err("the initial state may not assign " + f.pred + " (set per node by the topology)");
        else if (!sc.program.state_sig.count(f.pred))
            err("initial fact '" + f.to_string() + "' is not over the state signature");
        else if (sc.program.state_sig.at(f.pred) != static_cast<int>(f.args.size()))
            err("initial fact '" + f.to_string() + "' has the wrong arity");
    }
    for (const auto& fs : sc.input_pool)
        for (const auto& f : fs) {
            if (!sc.program.input_sig.count(f.pred))
                err("input fact '" + f.to_string() + "' is not over the input signature");
            else if (sc.program.input_sig.at(f.pred) != static_cast<int>(f.args.size()))
                err("input fact '" + f.to_string() + "' has the wrong arity");
        }
    return diags;
}

std::string write_scenario_text(const Scenario& sc) {
    std::ostringstream os;
    os << "network {\n  nodes: ";
    for (size_t i = 0; i < sc.network.nodes.size(); ++i)
        os << (i ? ", " : "") << sc.network.nodes[i];
    os << ";\n";
    if (!sc.network.edges.empty()) {
        os << "  edges: ";
        bool first = true;
        for (const auto& [a, b] : sc.network.edges) {
            os << (first ? "" : ", ") << a << " -- " << b;
            first = false;
        }
        os << ";\n";
    }
    os << "}\n";
    auto sig_line = [&](const char* name, const std::map<std::string, int>& sig,
                        const std::set<std::string>& skip) {
        os << "  " << name << ": ";
        bool first = true;
        for (const auto& [pred, ar] : sig) {
            if (skip.count(pred)) continue;
            os << (first ? "" : ", ") << pred << "/" << ar;
            first = false;
        }
        os << ";\n";
    };
    os << "signatures {\n";
    sig_line("state", sc.program.state_sig, {kMyName, kMyNeighbor});
    sig_line("transport", sc.program.transport_sig, {kStart});
    sig_line("input", sc.program.input_sig, {});
    os << "}\n";
    os << "channel: " << to_string(sc.channel_kind) << ";\n";
    os << "policy: " << to_string(sc.policy) << ";\n";
    os << "init {\n";
    for (const auto& f : sc.initial_state) os << "  " << f.to_string() << ".\n";
    os << "}\n";
    bool trivial_pool =
        sc.input_pool.empty() || (sc.input_pool.size() == 1 && sc.input_pool.front().empty());
    if (!trivial_pool) {
        os << "inputs {\n";
        for (const auto& fs : sc.input_pool) {
            os << "  {";
            for (const auto& f : fs) os << " " << f.to_string() << ".";
            os << " }\n";
        }
        os << "}\n";
    }
    os << "program {\n";
    for (const auto& r : sc.program.rules) os << "  " << pretty_print(r) << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace d2c
