#pragma once

#include <map>
#include <string>
#include <vector>

#include "semweave/errors.hpp"
#include "semweave/term.hpp"

namespace semweave {

// Parse result: raw triples in document order plus the declared prefixes.
// Classification into axioms vs data happens at load time, not here.
struct TurtleDocument {
    std::vector<Triple> triples;
    std::map<std::string, std::string> prefixes;
};

namespace turtle_detail {

enum class TokKind { Eof, Iri, PName, A, String, Dot, Semicolon, Comma, HatHat, PrefixKw };

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;       // IRI content, pname as written, or string value (unescaped)
    std::string datatype;   // set by the parser, not the lexer
    int line = 0;
    int col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.kind = TokKind::Eof;
            return t;
        }
        char c = text_[pos_];
        if (c == '.') { advance(); t.kind = TokKind::Dot; return t; }
        if (c == ';') { advance(); t.kind = TokKind::Semicolon; return t; }
        if (c == ',') { advance(); t.kind = TokKind::Comma; return t; }
        if (c == '<') return lex_iri(t);
        if (c == '"') return lex_string(t);
        if (c == '^') {
            advance();
            if (pos_ >= text_.size() || text_[pos_] != '^')
                throw ParseError("expected '^^' before datatype", t.line, t.col);
            advance();
            t.kind = TokKind::HatHat;
            return t;
        }
        return lex_word(t);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token lex_iri(Token t) {
        advance();  // consume '<'
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '>') {
            if (text_[pos_] == '\n')
                throw ParseError("unterminated IRI", t.line, t.col);
            out += text_[pos_];
            advance();
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated IRI", t.line, t.col);
        advance();  // consume '>'
        t.kind = TokKind::Iri;
        t.text = std::move(out);
        return t;
    }

    Token lex_string(Token t) {
        advance();  // consume '"'
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\n') throw ParseError("unterminated string literal", t.line, t.col);
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size())
                    throw ParseError("unterminated string literal", t.line, t.col);
                char e = text_[pos_];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        throw ParseError(std::string("unsupported escape '\\") + e + "'", line_, col_);
                }
                advance();
            } else {
                out += c;
                advance();
            }
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated string literal", t.line, t.col);
        advance();  // consume closing '"'
        t.kind = TokKind::String;
        t.text = std::move(out);
        return t;
    }

    static bool word_char(char c) {
        return !(c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '.' || c == ';' ||
                 c == ',' || c == '<' || c == '"' || c == '#' || c == '^');
    }

    Token lex_word(Token t) {
        std::string out;
        while (pos_ < text_.size() && word_char(text_[pos_])) {
            out += text_[pos_];
            advance();
        }
        if (out.empty())
            throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", t.line, t.col);
        if (out == "@prefix") {
            t.kind = TokKind::PrefixKw;
        } else if (out == "a") {
            t.kind = TokKind::A;
        } else {
            t.kind = TokKind::PName;
            t.text = std::move(out);
        }
        return t;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) { shift(); }

    TurtleDocument parse() {
        TurtleDocument doc;
        while (cur_.kind != TokKind::Eof) {
            if (cur_.kind == TokKind::PrefixKw) {
                parse_prefix(doc);
            } else {
                parse_statement(doc);
            }
        }
        return doc;
    }

private:
    void shift() { cur_ = lex_.next(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur_.line, cur_.col);
    }

    void expect(TokKind k, const char* what) {
        if (cur_.kind != k) fail(std::string("expected ") + what);
        shift();
    }

    void parse_prefix(TurtleDocument& doc) {
        shift();  // @prefix
        if (cur_.kind != TokKind::PName) fail("expected prefix name");
        std::string pname = cur_.text;
        if (pname.empty() || pname.back() != ':')
            fail("prefix name must end with ':'");
        pname.pop_back();
        shift();
        if (cur_.kind != TokKind::Iri) fail("expected IRI in prefix declaration");
        std::string iri = cur_.text;
        shift();
        expect(TokKind::Dot, "'.' after prefix declaration");
        doc.prefixes[pname] = iri;
    }

    // IRIs must be absolute: a scheme separator before any path character.
    static bool absolute_iri(const std::string& iri) {
        for (char c : iri) {
            if (c == ':') return true;
            if (c == '/' || c == '?' || c == '#') return false;
        }
        return false;
    }

    Term resolve_iri(const Token& tok, const TurtleDocument& doc) const {
        if (tok.kind == TokKind::Iri) {
            if (!absolute_iri(tok.text))
                throw ParseError("relative IRI <" + tok.text + ">", tok.line, tok.col);
            return Term::iri(tok.text);
        }
        // prefixed name
        auto colon = tok.text.find(':');
        if (colon == std::string::npos)
            throw ParseError("expected IRI or prefixed name, got '" + tok.text + "'", tok.line, tok.col);
        std::string prefix = tok.text.substr(0, colon);
        std::string local = tok.text.substr(colon + 1);
        auto it = doc.prefixes.find(prefix);
        if (it == doc.prefixes.end())
            throw ParseError("undeclared prefix '" + prefix + ":'", tok.line, tok.col);
        return Term::iri(it->second + local);
    }

    Term parse_subject(const TurtleDocument& doc) {
        if (cur_.kind != TokKind::Iri && cur_.kind != TokKind::PName)
            fail("expected subject");
        Term t = resolve_iri(cur_, doc);
        shift();
        return t;
    }

    Term parse_predicate(const TurtleDocument& doc) {
        if (cur_.kind == TokKind::A) {
            shift();
            return Term::iri(vocab::kRdfType);
        }
        if (cur_.kind != TokKind::Iri && cur_.kind != TokKind::PName)
            fail("expected predicate");
        Term t = resolve_iri(cur_, doc);
        shift();
        return t;
    }

    Term parse_object(const TurtleDocument& doc) {
        if (cur_.kind == TokKind::String) {
            std::string lexical = cur_.text;
            shift();
            if (cur_.kind == TokKind::HatHat) {
                shift();
                if (cur_.kind != TokKind::Iri && cur_.kind != TokKind::PName)
                    fail("expected datatype IRI after '^^'");
                Term dt = resolve_iri(cur_, doc);
                shift();
                return Term::literal(lexical, dt.value());
            }
            return Term::literal(lexical);
        }
        if (cur_.kind != TokKind::Iri && cur_.kind != TokKind::PName)
            fail("expected object");
        Term t = resolve_iri(cur_, doc);
        shift();
        return t;
    }

    void parse_statement(TurtleDocument& doc) {
        Term subject = parse_subject(doc);
        while (true) {
            Term predicate = parse_predicate(doc);
            while (true) {
                Term object = parse_object(doc);
                doc.triples.emplace_back(subject, predicate, object);
                if (cur_.kind == TokKind::Comma) { shift(); continue; }
                break;
            }
            if (cur_.kind == TokKind::Semicolon) {
                shift();
                if (cur_.kind == TokKind::Dot) break;  // tolerate trailing ';'
                continue;
            }
            break;
        }
        expect(TokKind::Dot, "'.' at end of statement");
    }

    Lexer lex_;
    Token cur_;
};

}  // namespace turtle_detail

inline TurtleDocument parse_turtle(const std::string& text) {
    return turtle_detail::Parser(text).parse();
}

// Expands one prefixed name or accepts an absolute IRI. Shared by the
// annotation parser and the CLI query splitter.
inline std::string expand_prefixed(const std::string& name,
                                   const std::map<std::string, std::string>& prefixes) {
    auto colon = name.find(':');
    if (colon != std::string::npos) {
        std::string prefix = name.substr(0, colon);
        auto it = prefixes.find(prefix);
        if (it != prefixes.end()) return it->second + name.substr(colon + 1);
        return name;  // no such prefix: treat as absolute (it contains a scheme separator)
    }
    auto it = prefixes.find("");
    if (it != prefixes.end()) return it->second + name;
    throw ParseError("cannot expand '" + name + "': no ':' and no default prefix");
}

}  // namespace semweave
