#pragma once

#include <cerrno>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "semweave/vocab.hpp"

namespace semweave {

enum class TermKind { Iri, Literal, Variable };

// The universal atom of triples, patterns and bindings: an absolute IRI,
// a typed literal, or a variable.
class Term {
public:
    Term() = default;

    static Term iri(std::string value) {
        Term t;
        t.kind_ = TermKind::Iri;
        t.value_ = std::move(value);
        return t;
    }

    // Plain literals default to the string datatype.
    static Term literal(std::string lexical, std::string datatype = vocab::kXsdString) {
        Term t;
        t.kind_ = TermKind::Literal;
        t.value_ = std::move(lexical);
        t.datatype_ = std::move(datatype);
        return t;
    }

    static Term variable(std::string name) {
        if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
        Term t;
        t.kind_ = TermKind::Variable;
        t.value_ = std::move(name);
        return t;
    }

    TermKind kind() const { return kind_; }
    bool is_iri() const { return kind_ == TermKind::Iri; }
    bool is_literal() const { return kind_ == TermKind::Literal; }
    bool is_variable() const { return kind_ == TermKind::Variable; }

    // IRI string, lexical form, or variable name depending on kind.
    const std::string& value() const { return value_; }
    const std::string& datatype() const { return datatype_; }

    std::string to_string() const {
        switch (kind_) {
            case TermKind::Iri:
                return "<" + value_ + ">";
            case TermKind::Variable:
                return "?" + value_;
            case TermKind::Literal: {
                std::string out = "\"" + escape(value_) + "\"";
                if (datatype_ != vocab::kXsdString) out += "^^<" + datatype_ + ">";
                return out;
            }
        }
        return {};
    }

    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;

private:
    static std::string escape(const std::string& s) {
        std::string out;
        out.reserve(s.size());
        for (char c : s) {
            switch (c) {
                case '\\': out += "\\\\"; break;
                case '"': out += "\\\""; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default: out += c;
            }
        }
        return out;
    }

    TermKind kind_ = TermKind::Iri;
    std::string value_;
    std::string datatype_;
};

// A ground statement. Subject and predicate are IRIs; the object is an IRI
// or a literal. Variables are rejected at construction.
class Triple {
public:
    Triple(Term s, Term p, Term o)
        : subject_(std::move(s)), predicate_(std::move(p)), object_(std::move(o)) {
        if (!subject_.is_iri()) throw std::invalid_argument("triple subject must be an IRI: " + subject_.to_string());
        if (!predicate_.is_iri()) throw std::invalid_argument("triple predicate must be an IRI: " + predicate_.to_string());
        if (object_.is_variable()) throw std::invalid_argument("variable found in a triple: " + object_.to_string());
    }

    const Term& subject() const { return subject_; }
    const Term& predicate() const { return predicate_; }
    const Term& object() const { return object_; }

    std::string to_string() const {
        return "(" + subject_.to_string() + ", " + predicate_.to_string() + ", " + object_.to_string() + ")";
    }

    auto operator<=>(const Triple&) const = default;
    bool operator==(const Triple&) const = default;

private:
    Term subject_;
    Term predicate_;
    Term object_;
};

// Triple shape with variables allowed in any position.
struct Pattern {
    Term subject;
    Term predicate;
    Term object;

    Pattern() = default;
    Pattern(Term s, Term p, Term o)
        : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {}
    explicit Pattern(const Triple& t)
        : subject(t.subject()), predicate(t.predicate()), object(t.object()) {}

    bool is_ground() const {
        return !subject.is_variable() && !predicate.is_variable() && !object.is_variable();
    }

    // Valid only when ground and triple-shaped; throws otherwise.
    Triple to_triple() const { return Triple(subject, predicate, object); }

    std::string to_string() const {
        return "(" + subject.to_string() + ", " + predicate.to_string() + ", " + object.to_string() + ")";
    }

    auto operator<=>(const Pattern&) const = default;
    bool operator==(const Pattern&) const = default;
};

// Variable name -> ground term. std::map keeps printing deterministic.
using Binding = std::map<std::string, Term>;

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
    std::size_t operator()(const Term& t) const {
        std::size_t h = std::hash<int>()(static_cast<int>(t.kind()));
        h = hash_combine(h, std::hash<std::string>()(t.value()));
        h = hash_combine(h, std::hash<std::string>()(t.datatype()));
        return h;
    }
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const {
        TermHash th;
        return hash_combine(hash_combine(th(t.subject()), th(t.predicate())), th(t.object()));
    }
};

// Duplicate-free set of ground triples preserving insertion order.
class Fragment {
public:
    Fragment() = default;

    // Returns true if the triple was new.
    bool insert(const Triple& t) {
        if (index_.count(t)) return false;
        index_.insert(t);
        triples_.push_back(t);
        return true;
    }

    bool contains(const Triple& t) const { return index_.count(t) > 0; }
    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }

    const std::vector<Triple>& triples() const { return triples_; }
    auto begin() const { return triples_.begin(); }
    auto end() const { return triples_.end(); }

    // Drops every triple inserted after the first n. Backtracking support.
    void truncate(std::size_t n) {
        while (triples_.size() > n) {
            index_.erase(triples_.back());
            triples_.pop_back();
        }
    }

    bool operator==(const Fragment& other) const { return index_ == other.index_; }

private:
    std::vector<Triple> triples_;
    std::unordered_set<Triple, TripleHash> index_;
};

// Substitutes bound variables of b into p; unbound variables stay.
inline Term apply_binding(const Term& t, const Binding& b) {
    if (t.is_variable()) {
        auto it = b.find(t.value());
        if (it != b.end()) return it->second;
    }
    return t;
}

inline Pattern apply_binding(const Pattern& p, const Binding& b) {
    return Pattern(apply_binding(p.subject, b), apply_binding(p.predicate, b), apply_binding(p.object, b));
}

// Lexical check of a literal value against an XSD datatype. Unknown
// datatypes pass (validation-only coercion, no normalization).
inline bool lexical_matches_datatype(const std::string& value, const std::string& datatype) {
    using namespace vocab;
    auto is_integer = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (datatype == kXsdDouble || datatype == kXsdFloat || datatype == kXsdDecimal) {
        if (value.empty()) return false;
        char* end = nullptr;
        errno = 0;
        std::strtod(value.c_str(), &end);
        return end == value.c_str() + value.size();
    }
    if (datatype == kXsdInteger || datatype == kXsdInt || datatype == kXsdLong) return is_integer(value);
    if (datatype == kXsdBoolean)
        return value == "true" || value == "false" || value == "0" || value == "1";
    return true;
}

}  // namespace semweave
