#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "semweave/annotation.hpp"
#include "semweave/errors.hpp"
#include "semweave/rule.hpp"
#include "semweave/store.hpp"
#include "semweave/term.hpp"
#include "semweave/vocab.hpp"

namespace semweave {

// Wire-level request/response: flat field -> string value.
using SyntacticMessage = std::map<std::string, std::string>;

// The exact triples a service consumes: every input-model triple plus the
// type assertion of each open object input node. Nothing else.
inline std::vector<Pattern> input_fragment_patterns(const ServiceAnnotation& a) {
    std::vector<Pattern> ps;
    for (const auto& n : a.input.nodes)
        if (n.open() && !n.literal_node)
            ps.emplace_back(Term::variable(n.name), Term::iri(vocab::kRdfType),
                            Term::iri(n.classification));
    for (const auto& t : a.input.triples)
        ps.push_back(rule_detail::pattern_for(t, a.input));
    return ps;
}

inline Fragment extract_input_fragment(const ServiceAnnotation& a, const Binding& bind,
                                       const UnionView& kb) {
    return kb.extract(input_fragment_patterns(a), bind);
}

inline Fragment extract_input_fragment(const ServiceAnnotation& a, const Binding& bind,
                                       const KbStore& kb) {
    return kb.extract(input_fragment_patterns(a), bind);
}

namespace grounding_detail {

inline Term node_value(const ServiceAnnotation& a, const std::string& node_name, const Binding& bind) {
    const TemplateNode* n = a.input.find(node_name);
    if (!n) throw std::invalid_argument("lowering placeholder '{" + node_name + "}' names no input node");
    if (!n->open()) return *n->constant;
    auto it = bind.find(node_name);
    if (it == bind.end())
        throw std::invalid_argument("lowering placeholder '{" + node_name + "}' is unbound");
    if (n->literal_node && !it->second.is_literal())
        throw std::invalid_argument("literal node '" + node_name + "' bound to a non-literal");
    return it->second;
}

}  // namespace grounding_detail

// Renders each lowering template: literal nodes contribute their lexical
// form, object nodes their IRI; text outside placeholders passes through.
inline SyntacticMessage lower(const Fragment&, const ServiceAnnotation& a, const Binding& bind) {
    SyntacticMessage msg;
    for (const auto& [field, tpl] : a.grounding.lowering) {
        std::string value;
        std::size_t pos = 0;
        while (pos < tpl.size()) {
            auto open = tpl.find('{', pos);
            if (open == std::string::npos) {
                value += tpl.substr(pos);
                break;
            }
            auto close = tpl.find('}', open);
            if (close == std::string::npos) {
                value += tpl.substr(pos);
                break;
            }
            value += tpl.substr(pos, open - pos);
            Term t = grounding_detail::node_value(a, tpl.substr(open + 1, close - open - 1), bind);
            value += t.value();
            pos = close + 1;
        }
        msg[field] = value;
    }
    return msg;
}

// Skolem IRI for an output-only object node: base + service local name +
// "/" + node + "/" + call id. Stable within a call, distinct across calls.
inline std::string local_name(const std::string& iri) {
    auto pos = iri.find_last_of("#/:");
    return pos == std::string::npos ? iri : iri.substr(pos + 1);
}

inline std::string fresh_instance(const std::string& node_name, const std::string& service_iri,
                                  std::uint64_t call_id, const std::string& base = "urn:instance:") {
    return base + local_name(service_iri) + "/" + node_name + "/" + std::to_string(call_id);
}

struct LiftResult {
    Fragment fragment;
    Binding binding;
};

// Lifts a response into output-model triples: output-only object nodes
// get fresh IRIs, lifted literal nodes get response values with their
// declared datatype, shared nodes keep their input bindings. The fragment
// is the instantiated output model minus the instantiated input model,
// plus type assertions for the fresh object nodes.
inline LiftResult lift(const SyntacticMessage& resp, const ServiceAnnotation& a, const Binding& bind,
                       std::uint64_t call_id, const std::string& fresh_base = "urn:instance:") {
    LiftResult out;
    out.binding = bind;

    std::map<std::string, std::string> node_to_field;
    for (const auto& [field, node] : a.grounding.lifting) node_to_field[node] = field;

    auto out_only = output_only_nodes(a);
    std::vector<const TemplateNode*> fresh_objects;
    for (const auto& n : a.output.nodes) {
        if (!out_only.count(n.name)) continue;
        if (n.literal_node) {
            auto fit = node_to_field.find(n.name);
            if (fit == node_to_field.end())
                throw LiftError("output literal node '" + n.name + "' has no lifting entry");
            auto rit = resp.find(fit->second);
            if (rit == resp.end())
                throw LiftError("response missing field '" + fit->second + "'");
            if (!lexical_matches_datatype(rit->second, n.classification))
                throw LiftError("response field '" + fit->second + "' value \"" + rit->second +
                                "\" does not match datatype <" + n.classification + ">");
            out.binding[n.name] = Term::literal(rit->second, n.classification);
        } else {
            out.binding[n.name] = Term::iri(fresh_instance(n.name, a.service, call_id, fresh_base));
            fresh_objects.push_back(&n);
        }
    }

    Fragment input_instantiation;
    for (const auto& t : a.input.triples) {
        Pattern g = apply_binding(rule_detail::pattern_for(t, a.input), out.binding);
        if (g.is_ground()) input_instantiation.insert(g.to_triple());
    }

    for (const auto& t : a.output.triples) {
        Pattern g = apply_binding(rule_detail::pattern_for(t, a.output), out.binding);
        if (!g.is_ground())
            throw LiftError("output triple not ground after lift: " + g.to_string());
        Triple ground = g.to_triple();
        if (!input_instantiation.contains(ground)) out.fragment.insert(ground);
    }

    Term type_pred = Term::iri(vocab::kRdfType);
    for (const TemplateNode* n : fresh_objects)
        out.fragment.insert(Triple(out.binding.at(n->name), type_pred, Term::iri(n->classification)));

    return out;
}

}  // namespace semweave
