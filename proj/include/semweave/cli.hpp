#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "semweave/annotation.hpp"
#include "semweave/errors.hpp"
#include "semweave/resolution.hpp"
#include "semweave/rule.hpp"
#include "semweave/runtime.hpp"
#include "semweave/store.hpp"
#include "semweave/trace.hpp"
#include "semweave/turtle.hpp"

namespace semweave {
namespace cli_detail {

struct Stage {
    std::string kind;  // load | annotate | mock | query
    std::vector<std::string> files;
    std::string pattern;   // query
    bool assert_derived = false;
    bool dump_rules = false;
    std::string trace_file;
    int max_depth = 16;
};

inline bool is_stage_keyword(const std::string& s) {
    return s == "load" || s == "annotate" || s == "mock" || s == "query";
}

// Splits one command line into stages on the subcommand keywords.
inline std::vector<Stage> split_stages(const std::vector<std::string>& args) {
    std::vector<Stage> stages;
    std::size_t i = 0;
    while (i < args.size()) {
        if (!is_stage_keyword(args[i]))
            throw ParseError("expected a subcommand (load/annotate/mock/query), got '" + args[i] + "'");
        Stage st;
        st.kind = args[i++];
        if (st.kind == "query") {
            if (i >= args.size()) throw ParseError("query needs a pattern argument");
            st.pattern = args[i++];
        }
        while (i < args.size() && !is_stage_keyword(args[i])) {
            const std::string& a = args[i];
            if (st.kind == "query" && a == "--assert") {
                st.assert_derived = true;
            } else if (st.kind == "query" && a == "--trace") {
                if (++i >= args.size()) throw ParseError("--trace needs a file argument");
                st.trace_file = args[i];
            } else if (st.kind == "query" && a == "--max-depth") {
                if (++i >= args.size()) throw ParseError("--max-depth needs a number");
                try {
                    st.max_depth = std::stoi(args[i]);
                } catch (const std::exception&) {
                    throw ParseError("--max-depth needs a number, got '" + args[i] + "'");
                }
                if (st.max_depth < 1) throw ParseError("--max-depth must be >= 1");
            } else if (st.kind == "annotate" && a == "--dump-rules") {
                st.dump_rules = true;
            } else if (!a.empty() && a[0] == '-') {
                throw ParseError("unknown flag '" + a + "' for subcommand '" + st.kind + "'");
            } else if (st.kind == "query") {
                throw ParseError("unexpected argument '" + a + "' after query pattern");
            } else {
                st.files.push_back(a);
            }
            ++i;
        }
        if (st.kind != "query" && st.files.empty())
            throw ParseError(st.kind + " needs at least one file argument");
        stages.push_back(std::move(st));
    }
    if (stages.empty()) throw ParseError("no subcommand given");
    return stages;
}

// Whitespace tokenizer that keeps quoted literals (and their ^^datatype
// tail) as single tokens.
inline std::vector<std::string> tokenize_pattern(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == ' ' || text[i] == '\t') {
            ++i;
            continue;
        }
        std::string tok;
        if (text[i] == '"') {
            tok += text[i++];
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size()) tok += text[i++];
                tok += text[i++];
            }
            if (i >= text.size()) throw ParseError("unterminated literal in query pattern");
            tok += text[i++];
            while (i < text.size() && text[i] != ' ' && text[i] != '\t') tok += text[i++];
        } else {
            while (i < text.size() && text[i] != ' ' && text[i] != '\t') tok += text[i++];
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

inline Term parse_query_term(const std::string& tok, bool predicate_position,
                             const std::map<std::string, std::string>& prefixes) {
    if (tok.empty()) throw ParseError("empty query term");
    if (tok[0] == '?') {
        std::string name = tok.substr(1);
        if (!annotation_detail::valid_node_name(name))
            throw ParseError("invalid variable name '" + tok + "'");
        return Term::variable(name);
    }
    if (tok[0] == '<') {
        if (tok.back() != '>') throw ParseError("unterminated IRI '" + tok + "'");
        std::string iri = tok.substr(1, tok.size() - 2);
        if (iri.find(':') == std::string::npos) throw ParseError("relative IRI <" + iri + ">");
        return Term::iri(iri);
    }
    if (tok[0] == '"') {
        auto close = tok.rfind('"');
        if (close == 0) throw ParseError("unterminated literal " + tok);
        std::string lex;
        for (std::size_t i = 1; i < close; ++i) {
            if (tok[i] == '\\' && i + 1 < close) ++i;
            lex += tok[i];
        }
        std::string tail = tok.substr(close + 1);
        if (tail.empty()) return Term::literal(lex);
        if (tail.rfind("^^", 0) != 0)
            throw ParseError("malformed literal " + tok);
        std::string dt = tail.substr(2);
        if (!dt.empty() && dt.front() == '<' && dt.back() == '>')
            dt = dt.substr(1, dt.size() - 2);
        else
            dt = expand_prefixed(dt, prefixes);
        return Term::literal(lex, dt);
    }
    if (predicate_position && tok == "a") return Term::iri(vocab::kRdfType);
    return Term::iri(expand_prefixed(tok, prefixes));
}

inline Pattern parse_query_pattern(const std::string& text,
                                   const std::map<std::string, std::string>& prefixes) {
    auto tokens = tokenize_pattern(text);
    if (tokens.size() != 3)
        throw ParseError("query pattern needs exactly 3 terms, got " +
                         std::to_string(tokens.size()));
    return Pattern(parse_query_term(tokens[0], false, prefixes),
                   parse_query_term(tokens[1], true, prefixes),
                   parse_query_term(tokens[2], false, prefixes));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string format_binding(const Binding& b) {
    if (b.empty()) return "()";
    std::string line;
    for (const auto& [var, term] : b) {
        if (!line.empty()) line += " ";
        line += "?" + var + "=" + term.to_string();
    }
    return line;
}

}  // namespace cli_detail

// Runs one session: stages execute in order over a shared store, rule
// set, and mock registry. Exit codes: 0 when the last query had at least
// one binding (or no query ran), 1 on a zero-binding last query, 2 on
// usage, parse, or validation errors.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace cli_detail;

    std::vector<Stage> stages;
    try {
        stages = split_stages(args);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "usage: load <file.ttl>... | annotate <file.json>... [--dump-rules] | "
               "mock <file.json>... | query \"<s> <p> <o>\" [--assert] [--trace <file>] "
               "[--max-depth N]\n";
        return 2;
    }

    KbStore kb;
    std::vector<Rule> rules;
    ServiceRuntime runtime;
    int last_query_bindings = -1;

    try {
        for (const Stage& st : stages) {
            if (st.kind == "load") {
                for (const auto& f : st.files) {
                    LoadStats stats = kb.load_turtle(read_file(f));
                    out << "loaded " << f << ": " << stats.triples_added << " triples, "
                        << stats.axioms_added << " axioms\n";
                }
            } else if (st.kind == "annotate") {
                for (const auto& f : st.files) {
                    auto a = std::make_shared<const ServiceAnnotation>(parse_annotation(read_file(f)));
                    ValidationReport report = validate(*a, kb);
                    for (const auto& w : report.warnings)
                        err << f << ": warning: " << w << "\n";
                    if (!report.ok()) {
                        for (const auto& e : report.errors) err << f << ": error: " << e << "\n";
                        return 2;
                    }
                    Rule r = compile(a);
                    rules.push_back(r);
                    out << "annotated <" << a->service << ">\n";
                    if (st.dump_rules) out << to_text(r);
                }
            } else if (st.kind == "mock") {
                for (const auto& f : st.files) {
                    for (auto& m : parse_mock_file(read_file(f))) {
                        out << "mock " << m.name << ": " << m.handlers.size() << " handlers, "
                            << m.failures.size() << " failures\n";
                        runtime.mocks().register_mock(std::move(m));
                    }
                }
            } else {
                Pattern goal = parse_query_pattern(st.pattern, kb.prefixes());
                SolveLimits limits;
                limits.max_depth = st.max_depth;
                Solver solver(kb, rules, runtime, limits);
                SolveResult result = solver.solve(goal);
                if (!st.trace_file.empty()) {
                    std::ofstream tf(st.trace_file, std::ios::binary);
                    if (!tf) throw ParseError("cannot open trace file: " + st.trace_file);
                    write_trace(tf, result.trace);
                }
                for (const auto& b : result.bindings) out << format_binding(b) << "\n";
                if (st.assert_derived) {
                    std::size_t added = kb.add_triples(result.derived);
                    out << "asserted " << added << " new triples\n";
                }
                last_query_bindings = static_cast<int>(result.bindings.size());
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (last_query_bindings == 0) return 1;
    return 0;
}

}  // namespace semweave
