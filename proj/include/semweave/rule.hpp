#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "semweave/annotation.hpp"
#include "semweave/term.hpp"
#include "semweave/vocab.hpp"

namespace semweave {

// Class membership check on a body variable. Satisfied by asserted or
// inferred types, with subclass tolerance.
struct TypeAtom {
    std::string var;
    std::string class_iri;
    bool operator==(const TypeAtom&) const = default;
};

// Service invocation atom. Inputs must be ground when it is evaluated;
// outputs are bound by lifting the response.
struct BuiltinAtom {
    std::string service;
    std::vector<std::string> inputs;   // open input node names
    std::vector<std::string> outputs;  // open output-only node names
    bool operator==(const BuiltinAtom&) const = default;
};

using BodyAtom = std::variant<Pattern, TypeAtom, BuiltinAtom>;

struct Rule {
    std::string id;  // service IRI
    std::vector<BodyAtom> body;
    std::vector<Pattern> head;
    std::shared_ptr<const ServiceAnnotation> annotation;

    bool operator==(const Rule& o) const {
        return id == o.id && body == o.body && head == o.head;
    }
};

namespace rule_detail {

inline Term term_for_node(const TemplateNode& n) {
    return n.open() ? Term::variable(n.name) : *n.constant;
}

inline Pattern pattern_for(const ModelTriple& t, const InstanceModel& m) {
    const TemplateNode* s = m.find(t.subject);
    Term subject = term_for_node(*s);
    Term object;
    if (t.object_is_node())
        object = term_for_node(*m.find(t.object_node()));
    else
        object = t.object_term();
    return Pattern(std::move(subject), Term::iri(t.predicate), std::move(object));
}

}  // namespace rule_detail

// Output triples that survive into the rule head: type-predicate triples
// are dropped, as is any triple with no open node in subject or object.
inline std::vector<Pattern> head_filter(const InstanceModel& output) {
    std::vector<Pattern> head;
    for (const auto& t : output.triples) {
        if (t.predicate == vocab::kRdfType) continue;
        const TemplateNode* s = output.find(t.subject);
        bool has_open = s->open();
        if (!has_open && t.object_is_node()) has_open = output.find(t.object_node())->open();
        if (!has_open) continue;
        head.push_back(rule_detail::pattern_for(t, output));
    }
    return head;
}

// Body: one type atom per open object input node, then the input triples
// as patterns, then the service builtin. Head: filtered output triples.
// Atom order follows annotation file order throughout.
inline Rule compile(std::shared_ptr<const ServiceAnnotation> a) {
    Rule r;
    r.id = a->service;
    r.annotation = a;

    for (const auto& n : a->input.nodes)
        if (n.open() && !n.literal_node) r.body.emplace_back(TypeAtom{n.name, n.classification});

    for (const auto& t : a->input.triples)
        r.body.emplace_back(rule_detail::pattern_for(t, a->input));

    BuiltinAtom builtin;
    builtin.service = a->service;
    for (const auto& n : a->input.nodes)
        if (n.open()) builtin.inputs.push_back(n.name);
    auto out_only = output_only_nodes(*a);
    for (const auto& n : a->output.nodes)
        if (out_only.count(n.name)) builtin.outputs.push_back(n.name);
    r.body.emplace_back(std::move(builtin));

    r.head = head_filter(a->output);
    return r;
}

inline Rule compile(const ServiceAnnotation& a) {
    return compile(std::make_shared<const ServiceAnnotation>(a));
}

inline std::set<std::string> collect_variables(const Pattern& p) {
    std::set<std::string> out;
    for (const Term* t : {&p.subject, &p.predicate, &p.object})
        if (t->is_variable()) out.insert(t->value());
    return out;
}

// One line per atom; stable for golden tests.
inline std::string to_text(const Rule& r) {
    std::string out = "rule <" + r.id + ">\n";
    for (const auto& atom : r.body) {
        out += "  body: ";
        if (const auto* p = std::get_if<Pattern>(&atom)) {
            out += p->to_string();
        } else if (const auto* t = std::get_if<TypeAtom>(&atom)) {
            out += "type(?" + t->var + ", <" + t->class_iri + ">)";
        } else {
            const auto& b = std::get<BuiltinAtom>(atom);
            out += "builtin(<" + b.service + ">, in=[";
            for (std::size_t i = 0; i < b.inputs.size(); ++i)
                out += (i ? ", ?" : "?") + b.inputs[i];
            out += "], out=[";
            for (std::size_t i = 0; i < b.outputs.size(); ++i)
                out += (i ? ", ?" : "?") + b.outputs[i];
            out += "])";
        }
        out += "\n";
    }
    for (const auto& p : r.head) out += "  head: " + p.to_string() + "\n";
    return out;
}

}  // namespace semweave
