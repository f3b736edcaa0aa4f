// Shared tokenizer for the D2C rule syntax and the scenario / CFSM / trace
// file formats. '%' starts a line comment; identifiers are ASCII
// alphanumerics plus underscore.

#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace d2c::lex {

enum class Tok {
    ident,    // starts with a letter or underscore
    integer,  // unsigned integer literal
    str,      // "quoted"
    lparen,
    rparen,
    lbrace,
    rbrace,
    comma,
    dot,
    at,
    neq,       // !=
    colon,
    semicolon,
    arrow,     // ->
    dashdash,  // --
    slash,
    eof,
    error,
};

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    int line = 1, column = 1;

    bool is_upper_ident() const {
        return kind == Tok::ident && !text.empty() && std::isupper(static_cast<unsigned char>(text[0]));
    }
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string t, int l, int c) { out.push_back({k, std::move(t), l, c}); };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '%') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            push(Tok::ident, std::string(src.substr(i, j - i)), tl, tc);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Tok::integer, std::string(src.substr(i, j - i)), tl, tc);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"') {
                push(Tok::error, "\"", tl, tc);
                return out;
            }
            push(Tok::str, std::string(src.substr(i + 1, j - i - 1)), tl, tc);
            col += static_cast<int>(j - i + 1);
            i = j + 1;
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two('!', '=')) {
            push(Tok::neq, "!=", tl, tc);
            i += 2;
            col += 2;
            continue;
        }
        if (two('-', '>')) {
            push(Tok::arrow, "->", tl, tc);
            i += 2;
            col += 2;
            continue;
        }
        if (two('-', '-')) {
            push(Tok::dashdash, "--", tl, tc);
            i += 2;
            col += 2;
            continue;
        }
        Tok k = Tok::error;
        switch (c) {
            case '(': k = Tok::lparen; break;
            case ')': k = Tok::rparen; break;
            case '{': k = Tok::lbrace; break;
            case '}': k = Tok::rbrace; break;
            case ',': k = Tok::comma; break;
            case '.': k = Tok::dot; break;
            case '@': k = Tok::at; break;
            case ':': k = Tok::colon; break;
            case ';': k = Tok::semicolon; break;
            case '/': k = Tok::slash; break;
            default: break;
        }
        push(k, std::string(1, c), tl, tc);
        if (k == Tok::error) return out;
        ++i;
        ++col;
    }
    out.push_back({Tok::eof, "", line, col});
    return out;
}

// Small cursor over a token stream shared by the parsers.
struct Cursor {
    const std::vector<Token>* toks;
    size_t pos = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t p = pos + ahead;
        if (p >= toks->size()) p = toks->size() - 1;
        return (*toks)[p];
    }
    const Token& next() {
        const Token& t = peek();
        if (pos + 1 < toks->size()) ++pos;
        return t;
    }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(std::string_view s) const {
        return peek().kind == Tok::ident && peek().text == s;
    }
    bool accept(Tok k) {
        if (at(k)) {
            next();
            return true;
        }
        return false;
    }
    bool accept_ident(std::string_view s) {
        if (at_ident(s)) {
            next();
            return true;
        }
        return false;
    }
};

}  // namespace d2c::lex
