#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "semweave/errors.hpp"
#include "semweave/store.hpp"
#include "semweave/term.hpp"
#include "semweave/vocab.hpp"

namespace semweave {

// One template node of an instance model. Open nodes become rule
// variables; constant nodes are inlined as ground terms.
struct TemplateNode {
    std::string name;
    std::string classification;  // class IRI, or datatype IRI for literal nodes
    bool literal_node = false;
    std::optional<Term> constant;

    bool open() const { return !constant.has_value(); }
    bool operator==(const TemplateNode&) const = default;
};

// Model triple: subject is a node name; object is a node name or an
// inline ground literal.
struct ModelTriple {
    std::string subject;
    std::string predicate;
    std::variant<std::string, Term> object;

    bool object_is_node() const { return object.index() == 0; }
    const std::string& object_node() const { return std::get<std::string>(object); }
    const Term& object_term() const { return std::get<Term>(object); }
    bool operator==(const ModelTriple&) const = default;
};

struct InstanceModel {
    std::vector<TemplateNode> nodes;    // file order
    std::vector<ModelTriple> triples;   // file order

    const TemplateNode* find(const std::string& name) const {
        for (const auto& n : nodes)
            if (n.name == name) return &n;
        return nullptr;
    }

    bool operator==(const InstanceModel&) const = default;
};

struct GroundingSpec {
    std::map<std::string, std::string> lowering;  // syntactic field -> value template
    std::map<std::string, std::string> lifting;   // response field -> output node name
    bool operator==(const GroundingSpec&) const = default;
};

struct EndpointRef {
    enum class Kind { Mock, Http };
    Kind kind = Kind::Mock;
    std::string name;             // mock
    std::string url;              // http
    std::string method = "POST";  // http
    bool operator==(const EndpointRef&) const = default;
};

struct ServiceAnnotation {
    std::string service;  // IRI
    std::map<std::string, std::string> prefixes;
    InstanceModel input;
    InstanceModel output;
    GroundingSpec grounding;
    EndpointRef endpoint;

    // Equality of the abstract content; prefix declarations are concrete
    // syntax and excluded.
    bool same_content(const ServiceAnnotation& o) const {
        return service == o.service && input == o.input && output == o.output &&
               grounding == o.grounding && endpoint == o.endpoint;
    }
};

inline std::set<std::string> shared_nodes(const ServiceAnnotation& a) {
    std::set<std::string> in;
    for (const auto& n : a.input.nodes) in.insert(n.name);
    std::set<std::string> out;
    for (const auto& n : a.output.nodes)
        if (in.count(n.name)) out.insert(n.name);
    return out;
}

// Open nodes of the output model absent from the input model: the nodes
// that need fresh instances (object) or lifted values (literal).
inline std::set<std::string> output_only_nodes(const ServiceAnnotation& a) {
    std::set<std::string> in;
    for (const auto& n : a.input.nodes) in.insert(n.name);
    std::set<std::string> out;
    for (const auto& n : a.output.nodes)
        if (n.open() && !in.count(n.name)) out.insert(n.name);
    return out;
}

namespace annotation_detail {

inline bool valid_node_name(const std::string& s) {
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); };
    if (s.empty() || !alpha(s[0])) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!alnum(s[i])) return false;
    return true;
}

inline std::string expand(const std::string& name, const std::map<std::string, std::string>& prefixes) {
    try {
        return expand_prefixed(name, prefixes);
    } catch (const ParseError& e) {
        throw AnnotationError(e.what());
    }
}

inline const nlohmann::json& member(const nlohmann::json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw AnnotationError(where + ": missing member '" + key + "'");
    return *it;
}

inline std::string string_member(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_string()) throw AnnotationError(where + ": member '" + key + "' must be a string");
    return v.get<std::string>();
}

inline InstanceModel parse_model(const nlohmann::json& j, const std::map<std::string, std::string>& prefixes,
                                 const std::string& which) {
    if (!j.is_object()) throw AnnotationError(which + " must be an object");
    InstanceModel m;
    std::set<std::string> names;
    if (j.contains("nodes")) {
        const auto& nodes = j.at("nodes");
        if (!nodes.is_array()) throw AnnotationError(which + ".nodes must be an array");
        for (const auto& nj : nodes) {
            if (!nj.is_object()) throw AnnotationError(which + ".nodes entries must be objects");
            TemplateNode n;
            n.name = string_member(nj, "name", which + ".nodes");
            if (!valid_node_name(n.name))
                throw AnnotationError(which + ": invalid node name '" + n.name + "'");
            if (!names.insert(n.name).second)
                throw AnnotationError(which + ": duplicate node name '" + n.name + "'");
            bool has_class = nj.contains("class");
            bool has_datatype = nj.contains("datatype");
            if (has_class == has_datatype)
                throw AnnotationError(which + ": node '" + n.name +
                                      "' needs exactly one of 'class' or 'datatype'");
            if (has_class) {
                n.classification = expand(string_member(nj, "class", which), prefixes);
                n.literal_node = false;
            } else {
                n.classification = expand(string_member(nj, "datatype", which), prefixes);
                n.literal_node = true;
            }
            if (nj.contains("constant")) {
                const auto& cj = nj.at("constant");
                if (!cj.is_string())
                    throw AnnotationError(which + ": constant of node '" + n.name + "' must be a string");
                if (n.literal_node)
                    n.constant = Term::literal(cj.get<std::string>(), n.classification);
                else
                    n.constant = Term::iri(expand(cj.get<std::string>(), prefixes));
            }
            m.nodes.push_back(std::move(n));
        }
    }
    if (j.contains("triples")) {
        const auto& triples = j.at("triples");
        if (!triples.is_array()) throw AnnotationError(which + ".triples must be an array");
        for (const auto& tj : triples) {
            if (!tj.is_array() || tj.size() != 3)
                throw AnnotationError(which + ": triples must be 3-element arrays");
            ModelTriple t;
            if (!tj[0].is_string())
                throw AnnotationError(which + ": triple subject must be a node name");
            t.subject = tj[0].get<std::string>();
            if (!names.count(t.subject))
                throw AnnotationError(which + ": triple references undeclared node '" + t.subject + "'");
            if (!tj[1].is_string())
                throw AnnotationError(which + ": triple predicate must be an IRI string");
            t.predicate = expand(tj[1].get<std::string>(), prefixes);
            if (tj[2].is_string()) {
                std::string obj = tj[2].get<std::string>();
                if (!names.count(obj))
                    throw AnnotationError(which + ": triple references undeclared node '" + obj + "'");
                t.object = obj;
            } else if (tj[2].is_object()) {
                std::string value = string_member(tj[2], "value", which + " literal object");
                std::string datatype = vocab::kXsdString;
                if (tj[2].contains("datatype"))
                    datatype = expand(string_member(tj[2], "datatype", which), prefixes);
                t.object = Term::literal(value, datatype);
            } else {
                throw AnnotationError(which + ": triple object must be a node name or {value, datatype}");
            }
            m.triples.push_back(std::move(t));
        }
    }
    return m;
}

inline EndpointRef parse_endpoint(const nlohmann::json& j) {
    if (!j.is_object()) throw AnnotationError("endpoint must be an object");
    EndpointRef e;
    std::string kind = string_member(j, "kind", "endpoint");
    if (kind == "mock") {
        e.kind = EndpointRef::Kind::Mock;
        e.name = string_member(j, "name", "endpoint");
    } else if (kind == "http") {
        e.kind = EndpointRef::Kind::Http;
        e.url = string_member(j, "url", "endpoint");
        if (j.contains("method")) e.method = string_member(j, "method", "endpoint");
    } else {
        throw AnnotationError("unknown endpoint kind '" + kind + "'");
    }
    return e;
}

inline std::map<std::string, std::string> parse_string_map(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw AnnotationError(where + " must be an object");
    std::map<std::string, std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string())
            throw AnnotationError(where + "." + it.key() + " must be a string");
        out[it.key()] = it.value().get<std::string>();
    }
    return out;
}

// Placeholder node names of one lowering template, in template order.
inline std::vector<std::string> template_placeholders(const std::string& tpl) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = tpl.find('{', pos)) != std::string::npos) {
        auto end = tpl.find('}', pos);
        if (end == std::string::npos) break;
        out.push_back(tpl.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return out;
}

}  // namespace annotation_detail

inline ServiceAnnotation parse_annotation(const std::string& text) {
    using namespace annotation_detail;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw AnnotationError(std::string("annotation syntax error: ") + e.what());
    }
    if (!j.is_object()) throw AnnotationError("annotation must be a JSON object");

    ServiceAnnotation a;
    if (j.contains("prefixes")) a.prefixes = parse_string_map(j.at("prefixes"), "prefixes");
    a.service = expand(string_member(j, "service", "annotation"), a.prefixes);
    a.endpoint = parse_endpoint(member(j, "endpoint", "annotation"));
    a.input = parse_model(member(j, "inputModel", "annotation"), a.prefixes, "inputModel");
    a.output = parse_model(member(j, "outputModel", "annotation"), a.prefixes, "outputModel");
    if (j.contains("grounding")) {
        const auto& g = j.at("grounding");
        if (!g.is_object()) throw AnnotationError("grounding must be an object");
        if (g.contains("lowering")) a.grounding.lowering = parse_string_map(g.at("lowering"), "grounding.lowering");
        if (g.contains("lifting")) a.grounding.lifting = parse_string_map(g.at("lifting"), "grounding.lifting");
    }

    // A name appearing in both models denotes one node; declarations must agree.
    for (const auto& n : a.output.nodes) {
        if (const TemplateNode* in = a.input.find(n.name); in && !(*in == n))
            throw AnnotationError("node '" + n.name + "' declared differently in input and output models");
    }
    return a;
}

inline std::string serialize_annotation(const ServiceAnnotation& a) {
    nlohmann::json j;
    j["service"] = a.service;
    nlohmann::json ej;
    if (a.endpoint.kind == EndpointRef::Kind::Mock) {
        ej["kind"] = "mock";
        ej["name"] = a.endpoint.name;
    } else {
        ej["kind"] = "http";
        ej["url"] = a.endpoint.url;
        ej["method"] = a.endpoint.method;
    }
    j["endpoint"] = ej;
    auto model_json = [](const InstanceModel& m) {
        nlohmann::json mj;
        mj["nodes"] = nlohmann::json::array();
        for (const auto& n : m.nodes) {
            nlohmann::json nj;
            nj["name"] = n.name;
            nj[n.literal_node ? "datatype" : "class"] = n.classification;
            if (n.constant) nj["constant"] = n.constant->value();
            mj["nodes"].push_back(nj);
        }
        mj["triples"] = nlohmann::json::array();
        for (const auto& t : m.triples) {
            nlohmann::json tj = nlohmann::json::array();
            tj.push_back(t.subject);
            tj.push_back(t.predicate);
            if (t.object_is_node()) {
                tj.push_back(t.object_node());
            } else {
                tj.push_back(nlohmann::json{{"value", t.object_term().value()},
                                            {"datatype", t.object_term().datatype()}});
            }
            mj["triples"].push_back(tj);
        }
        return mj;
    };
    j["inputModel"] = model_json(a.input);
    j["outputModel"] = model_json(a.output);
    j["grounding"] = nlohmann::json{{"lowering", a.grounding.lowering},
                                    {"lifting", a.grounding.lifting}};
    return j.dump(2);
}

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const ServiceAnnotation& a, const KbStore& kb) {
    using namespace annotation_detail;
    ValidationReport r;

    auto check_model = [&](const InstanceModel& m, const std::string& which) {
        std::map<std::string, bool> classification_known;
        for (const auto& n : m.nodes) {
            bool known;
            if (n.literal_node) {
                known = kb.known_datatype(n.classification);
                if (!known)
                    r.errors.push_back(which + ": unknown datatype <" + n.classification +
                                       "> on node '" + n.name + "'");
                if (n.constant) {
                    if (!n.constant->is_literal()) {
                        r.errors.push_back(which + ": constant of literal node '" + n.name +
                                           "' must be a literal");
                    } else if (!lexical_matches_datatype(n.constant->value(), n.classification)) {
                        r.errors.push_back(which + ": constant \"" + n.constant->value() +
                                           "\" does not match datatype <" + n.classification + ">");
                    }
                }
            } else {
                known = kb.known_class(n.classification);
                if (!known)
                    r.errors.push_back(which + ": unknown class <" + n.classification +
                                       "> on node '" + n.name + "'");
                if (n.constant) {
                    if (!n.constant->is_iri()) {
                        r.errors.push_back(which + ": constant of object node '" + n.name +
                                           "' must be an IRI");
                    } else if (known) {
                        bool instance_of = false;
                        for (const auto& t : kb.type_of(n.constant->value()))
                            if (kb.is_subclass_of(t, n.classification)) {
                                instance_of = true;
                                break;
                            }
                        if (!instance_of)
                            r.errors.push_back(which + ": constant <" + n.constant->value() +
                                               "> is not a known instance of <" + n.classification + ">");
                    }
                }
            }
            classification_known[n.name] = known;
        }

        for (const auto& t : m.triples) {
            if (!kb.known_property(t.predicate)) {
                r.errors.push_back(which + ": unknown property <" + t.predicate + ">");
                continue;
            }
            const TemplateNode* s = m.find(t.subject);
            if (s && s->literal_node) {
                r.errors.push_back(which + ": literal node '" + t.subject + "' used as subject");
            } else if (s && classification_known[s->name]) {
                auto domains = kb.domains_of(t.predicate);
                bool ok = domains.empty();
                for (const auto& d : domains)
                    if (kb.is_subclass_of(s->classification, d)) {
                        ok = true;
                        break;
                    }
                if (!ok)
                    r.errors.push_back(which + ": domain violation: <" + t.predicate +
                                       "> does not accept subject class <" + s->classification + ">");
            }
            auto ranges = kb.ranges_of(t.predicate);
            if (!ranges.empty()) {
                std::string obj_class;
                bool obj_literal;
                bool obj_known = true;
                if (t.object_is_node()) {
                    const TemplateNode* o = m.find(t.object_node());
                    obj_class = o->classification;
                    obj_literal = o->literal_node;
                    obj_known = classification_known[o->name];
                } else {
                    obj_class = t.object_term().datatype();
                    obj_literal = true;
                }
                if (obj_known) {
                    bool ok = false;
                    for (const auto& rr : ranges) {
                        if (obj_literal ? (rr == obj_class) : kb.is_subclass_of(obj_class, rr)) {
                            ok = true;
                            break;
                        }
                    }
                    if (!ok)
                        r.errors.push_back(which + ": range violation: <" + t.predicate +
                                           "> does not accept object classified <" + obj_class + ">");
                }
            }
        }

        if (m.nodes.size() > 1) {
            std::set<std::string> touched;
            for (const auto& t : m.triples) {
                touched.insert(t.subject);
                if (t.object_is_node()) touched.insert(t.object_node());
            }
            for (const auto& n : m.nodes)
                if (!touched.count(n.name))
                    r.errors.push_back(which + ": node '" + n.name + "' is disconnected");
        }
    };

    check_model(a.input, "inputModel");
    check_model(a.output, "outputModel");

    std::set<std::string> input_names;
    for (const auto& n : a.input.nodes) input_names.insert(n.name);

    for (const auto& [field, tpl] : a.grounding.lowering) {
        for (const auto& ph : template_placeholders(tpl))
            if (!input_names.count(ph))
                r.errors.push_back("grounding.lowering." + field + ": placeholder '{" + ph +
                                   "}' names no input node");
    }

    auto out_only = output_only_nodes(a);
    std::set<std::string> lifted;
    for (const auto& [field, node] : a.grounding.lifting) {
        const TemplateNode* n = a.output.find(node);
        if (!n) {
            r.errors.push_back("grounding.lifting." + field + ": '" + node + "' names no output node");
            continue;
        }
        if (!n->open() || !n->literal_node || !out_only.count(node)) {
            r.errors.push_back("grounding.lifting." + field + ": target '" + node +
                               "' must be an open output-only literal node");
            continue;
        }
        if (!lifted.insert(node).second)
            r.errors.push_back("grounding.lifting." + field + ": node '" + node +
                               "' lifted from more than one field");
    }
    for (const auto& name : out_only) {
        const TemplateNode* n = a.output.find(name);
        if (n->literal_node && !lifted.count(name))
            r.errors.push_back("output literal node '" + name + "' has no lifting entry");
    }

    if (a.endpoint.kind == EndpointRef::Kind::Http) {
        if (a.endpoint.url.find("://") == std::string::npos)
            r.errors.push_back("endpoint url must be absolute: " + a.endpoint.url);
    } else if (a.endpoint.name.empty()) {
        r.errors.push_back("mock endpoint name must be non-empty");
    }

    if (shared_nodes(a).empty())
        r.warnings.push_back("input and output models share no nodes (pure producer)");
    if (a.output.nodes.empty()) r.warnings.push_back("empty output model");

    auto open_in_triple = [&](const ModelTriple& t) {
        const TemplateNode* s = a.output.find(t.subject);
        if (s && s->open()) return true;
        if (t.object_is_node()) {
            const TemplateNode* o = a.output.find(t.object_node());
            if (o && o->open()) return true;
        }
        return false;
    };
    for (const auto& t : a.output.triples) {
        if (t.predicate == vocab::kRdfType)
            r.warnings.push_back("output triple on the type predicate is dropped from the rule head");
        else if (!open_in_triple(t))
            r.warnings.push_back("output triple with no open node is dropped from the rule head");
    }

    bool produced = false;
    for (const auto& t : a.output.triples) {
        bool in_input = false;
        for (const auto& it : a.input.triples)
            if (it == t) {
                in_input = true;
                break;
            }
        if (!in_input) {
            produced = true;
            break;
        }
    }
    if (!produced) r.warnings.push_back("no produced triples");

    return r;
}

}  // namespace semweave
