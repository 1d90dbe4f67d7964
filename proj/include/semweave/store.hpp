#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "semweave/errors.hpp"
#include "semweave/term.hpp"
#include "semweave/turtle.hpp"
#include "semweave/vocab.hpp"

namespace semweave {

struct LoadStats {
    std::size_t triples_added = 0;
    std::size_t axioms_added = 0;
};

// Matches one pattern against one ground triple, threading repeated
// variables: (?x, p, ?x) only matches triples with subject == object.
inline std::optional<Binding> match_pattern_triple(const Pattern& p, const Triple& t) {
    Binding b;
    auto bind = [&b](const Term& pat, const Term& ground) {
        if (pat.is_variable()) {
            auto [it, fresh] = b.emplace(pat.value(), ground);
            return fresh || it->second == ground;
        }
        return pat == ground;
    };
    if (!bind(p.subject, t.subject())) return std::nullopt;
    if (!bind(p.predicate, t.predicate())) return std::nullopt;
    if (!bind(p.object, t.object())) return std::nullopt;
    return b;
}

class UnionView;

// In-memory triple store: data A-box plus the four schema axiom kinds,
// with subclass/subproperty closure and domain/range type inference.
// Readers share; load/add take exclusive access.
class KbStore {
public:
    KbStore() = default;
    KbStore(const KbStore&) = delete;
    KbStore& operator=(const KbStore&) = delete;

    inline LoadStats load_turtle(const std::string& text);
    inline std::size_t add_triples(const Fragment& f);

    inline std::vector<Binding> match(const Pattern& p) const;
    inline bool holds(const Triple& t) const;
    inline std::set<std::string> type_of(const std::string& iri) const;
    inline bool is_subclass_of(const std::string& c1, const std::string& c2) const;
    inline bool is_subproperty_of(const std::string& p1, const std::string& p2) const;
    inline Fragment extract(const std::vector<Pattern>& patterns, const Binding& b) const;

    inline bool known_class(const std::string& iri) const;
    inline bool known_property(const std::string& iri) const;
    inline bool known_datatype(const std::string& iri) const;
    // Effective constraints: union over the property's superproperty closure.
    inline std::set<std::string> domains_of(const std::string& property) const;
    inline std::set<std::string> ranges_of(const std::string& property) const;

    std::size_t data_size() const {
        std::shared_lock lk(mutex_);
        return data_.size();
    }

    std::vector<Triple> data_triples() const {
        std::shared_lock lk(mutex_);
        return data_.triples();
    }

    std::map<std::string, std::string> prefixes() const {
        std::shared_lock lk(mutex_);
        return prefixes_;
    }

    // For callers that run many view operations under one lock (a query
    // holds read access for its whole duration).
    std::shared_lock<std::shared_mutex> read_lock() const {
        return std::shared_lock(mutex_);
    }

private:
    friend class UnionView;

    using EdgeMap = std::map<std::string, std::set<std::string>>;

    static std::set<std::string> closure(const std::string& start, const EdgeMap& edges) {
        std::set<std::string> out{start};
        std::vector<std::string> work{start};
        while (!work.empty()) {
            std::string cur = std::move(work.back());
            work.pop_back();
            auto it = edges.find(cur);
            if (it == edges.end()) continue;
            for (const auto& next : it->second)
                if (out.insert(next).second) work.push_back(next);
        }
        return out;
    }

    Fragment data_;
    EdgeMap subclass_;
    EdgeMap subproperty_;
    EdgeMap domain_;
    EdgeMap range_;
    std::set<std::string> class_decls_;
    std::set<std::string> property_decls_;
    std::set<std::string> datatype_decls_;
    std::map<std::string, std::string> prefixes_;
    mutable std::shared_mutex mutex_;
};

// Read-only matcher over a base store plus an optional overlay of derived
// triples. The overlay participates in matching, presence checks, and
// type inference exactly as stored data does. Callers must hold read
// access to the base for the view's lifetime (KbStore's own methods do).
class UnionView {
public:
    explicit UnionView(const KbStore& base, const Fragment* overlay = nullptr)
        : base_(base), overlay_(overlay) {}

    std::vector<Binding> match(const Pattern& p) const {
        std::vector<Binding> out;
        std::set<Binding> seen;
        auto emit = [&](const Triple& t) {
            if (auto b = match_pattern_triple(p, t)) {
                if (seen.insert(*b).second) out.push_back(*b);
            }
        };
        for_each_stored([&](const Triple& t) { emit(t); });
        if (p.predicate.is_variable() ||
            (p.predicate.is_iri() && p.predicate.value() == vocab::kRdfType)) {
            for (const auto& t : inferred_type_triples()) emit(t);
        }
        return out;
    }

    bool holds(const Triple& t) const {
        if (base_.data_.contains(t)) return true;
        if (overlay_ && overlay_->contains(t)) return true;
        if (t.predicate().value() == vocab::kRdfType && t.object().is_iri())
            return type_of(t.subject().value()).count(t.object().value()) > 0;
        return false;
    }

    // Asserted types, their superclasses, and domain/range consequences of
    // every property (and superproperty) the node participates in.
    std::set<std::string> type_of(const std::string& iri) const {
        std::set<std::string> direct;
        for_each_stored([&](const Triple& t) {
            if (t.predicate().value() == vocab::kRdfType) {
                if (t.subject().value() == iri && t.object().is_iri())
                    direct.insert(t.object().value());
                return;
            }
            if (t.subject().value() == iri) {
                for (const auto& p : KbStore::closure(t.predicate().value(), base_.subproperty_)) {
                    auto it = base_.domain_.find(p);
                    if (it != base_.domain_.end()) direct.insert(it->second.begin(), it->second.end());
                }
            }
            if (t.object().is_iri() && t.object().value() == iri) {
                for (const auto& p : KbStore::closure(t.predicate().value(), base_.subproperty_)) {
                    auto it = base_.range_.find(p);
                    if (it != base_.range_.end()) direct.insert(it->second.begin(), it->second.end());
                }
            }
        });
        std::set<std::string> out;
        for (const auto& c : direct) {
            auto sup = KbStore::closure(c, base_.subclass_);
            out.insert(sup.begin(), sup.end());
        }
        return out;
    }

    bool is_subclass_of(const std::string& c1, const std::string& c2) const {
        if (c1 == c2) return true;
        return KbStore::closure(c1, base_.subclass_).count(c2) > 0;
    }

    bool is_subproperty_of(const std::string& p1, const std::string& p2) const {
        if (p1 == p2) return true;
        return KbStore::closure(p1, base_.subproperty_).count(p2) > 0;
    }

    Fragment extract(const std::vector<Pattern>& patterns, const Binding& b) const {
        Fragment out;
        for (const auto& p : patterns) {
            Pattern g = apply_binding(p, b);
            if (!g.is_ground())
                throw std::invalid_argument("extraction pattern not ground under binding: " + g.to_string());
            Triple t = g.to_triple();
            if (!holds(t)) throw ExtractError(t.to_string());
            out.insert(t);
        }
        return out;
    }

private:
    template <typename F>
    void for_each_stored(F&& f) const {
        for (const auto& t : base_.data_.triples()) f(t);
        if (overlay_) {
            for (const auto& t : overlay_->triples())
                if (!base_.data_.contains(t)) f(t);
        }
    }

    // Type triples derivable but not stored, ordered by node first
    // appearance, then class name. Keeps match streams deterministic.
    std::vector<Triple> inferred_type_triples() const {
        std::vector<std::string> nodes;
        std::set<std::string> seen_nodes;
        std::map<std::string, std::set<std::string>> asserted;
        for_each_stored([&](const Triple& t) {
            if (seen_nodes.insert(t.subject().value()).second) nodes.push_back(t.subject().value());
            if (t.object().is_iri() && seen_nodes.insert(t.object().value()).second)
                nodes.push_back(t.object().value());
            if (t.predicate().value() == vocab::kRdfType && t.object().is_iri())
                asserted[t.subject().value()].insert(t.object().value());
        });
        std::vector<Triple> out;
        Term type_pred = Term::iri(vocab::kRdfType);
        for (const auto& n : nodes) {
            const auto& have = asserted[n];
            for (const auto& c : type_of(n))
                if (!have.count(c)) out.emplace_back(Term::iri(n), type_pred, Term::iri(c));
        }
        return out;
    }

    const KbStore& base_;
    const Fragment* overlay_;
};

inline LoadStats KbStore::load_turtle(const std::string& text) {
    TurtleDocument doc = parse_turtle(text);
    LoadStats stats;
    std::unique_lock lk(mutex_);
    for (const auto& [name, iri] : doc.prefixes) prefixes_[name] = iri;
    for (const auto& t : doc.triples) {
        const std::string& pred = t.predicate().value();
        if (pred == vocab::kRdfsSubClassOf && t.object().is_iri()) {
            if (subclass_[t.subject().value()].insert(t.object().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfsSubPropertyOf && t.object().is_iri()) {
            if (subproperty_[t.subject().value()].insert(t.object().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfsDomain && t.object().is_iri()) {
            if (domain_[t.subject().value()].insert(t.object().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfsRange && t.object().is_iri()) {
            if (range_[t.subject().value()].insert(t.object().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfType && t.object().is_iri() &&
                   t.object().value() == vocab::kRdfsClass) {
            if (class_decls_.insert(t.subject().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfType && t.object().is_iri() &&
                   t.object().value() == vocab::kRdfProperty) {
            if (property_decls_.insert(t.subject().value()).second) ++stats.axioms_added;
        } else if (pred == vocab::kRdfType && t.object().is_iri() &&
                   t.object().value() == vocab::kRdfsDatatype) {
            if (datatype_decls_.insert(t.subject().value()).second) ++stats.axioms_added;
        } else {
            if (data_.insert(t)) ++stats.triples_added;
        }
    }
    return stats;
}

inline std::size_t KbStore::add_triples(const Fragment& f) {
    std::unique_lock lk(mutex_);
    std::size_t added = 0;
    for (const auto& t : f)
        if (data_.insert(t)) ++added;
    return added;
}

inline std::vector<Binding> KbStore::match(const Pattern& p) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).match(p);
}

inline bool KbStore::holds(const Triple& t) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).holds(t);
}

inline std::set<std::string> KbStore::type_of(const std::string& iri) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).type_of(iri);
}

inline bool KbStore::is_subclass_of(const std::string& c1, const std::string& c2) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).is_subclass_of(c1, c2);
}

inline bool KbStore::is_subproperty_of(const std::string& p1, const std::string& p2) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).is_subproperty_of(p1, p2);
}

inline Fragment KbStore::extract(const std::vector<Pattern>& patterns, const Binding& b) const {
    std::shared_lock lk(mutex_);
    return UnionView(*this).extract(patterns, b);
}

inline bool KbStore::known_class(const std::string& iri) const {
    std::shared_lock lk(mutex_);
    if (class_decls_.count(iri)) return true;
    for (const auto& [sub, supers] : subclass_)
        if (sub == iri || supers.count(iri)) return true;
    for (const auto& [prop, classes] : domain_)
        if (classes.count(iri)) return true;
    for (const auto& [prop, classes] : range_)
        if (classes.count(iri)) return true;
    return false;
}

inline bool KbStore::known_property(const std::string& iri) const {
    std::shared_lock lk(mutex_);
    if (property_decls_.count(iri)) return true;
    if (domain_.count(iri) || range_.count(iri)) return true;
    for (const auto& [sub, supers] : subproperty_)
        if (sub == iri || supers.count(iri)) return true;
    return false;
}

inline bool KbStore::known_datatype(const std::string& iri) const {
    if (vocab::known_datatype(iri)) return true;
    std::shared_lock lk(mutex_);
    return datatype_decls_.count(iri) > 0;
}

inline std::set<std::string> KbStore::domains_of(const std::string& property) const {
    std::shared_lock lk(mutex_);
    std::set<std::string> out;
    for (const auto& p : closure(property, subproperty_)) {
        auto it = domain_.find(p);
        if (it != domain_.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

inline std::set<std::string> KbStore::ranges_of(const std::string& property) const {
    std::shared_lock lk(mutex_);
    std::set<std::string> out;
    for (const auto& p : closure(property, subproperty_)) {
        auto it = range_.find(p);
        if (it != range_.end()) out.insert(it->second.begin(), it->second.end());
    }
    return out;
}

}  // namespace semweave
