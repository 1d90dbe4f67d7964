#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semweave/annotation.hpp"
#include "semweave/grounding.hpp"
#include "semweave/rule.hpp"
#include "semweave/runtime.hpp"
#include "semweave/store.hpp"
#include "semweave/term.hpp"
#include "semweave/trace.hpp"
#include "semweave/vocab.hpp"

namespace semweave {

// Substitution used during resolution. Unlike Binding, values may be
// variables (aliases created by variable-variable unification).
using Subst = std::map<std::string, Term>;

inline Term walk(Term t, const Subst& s) {
    while (t.is_variable()) {
        auto it = s.find(t.value());
        if (it == s.end()) break;
        t = it->second;
    }
    return t;
}

inline Pattern walk_pattern(const Pattern& p, const Subst& s) {
    return Pattern(walk(p.subject, s), walk(p.predicate, s), walk(p.object, s));
}

inline bool unify_terms(const Term& a, const Term& b, Subst& s) {
    Term wa = walk(a, s);
    Term wb = walk(b, s);
    if (wa == wb) return true;
    if (wa.is_variable()) {
        s[wa.value()] = wb;
        return true;
    }
    if (wb.is_variable()) {
        s[wb.value()] = wa;
        return true;
    }
    return false;
}

// Most general unifier of two flat triple patterns, extending bind.
inline std::optional<Subst> unify(const Pattern& a, const Pattern& b, const Subst& bind) {
    Subst s = bind;
    if (!unify_terms(a.subject, b.subject, s)) return std::nullopt;
    if (!unify_terms(a.predicate, b.predicate, s)) return std::nullopt;
    if (!unify_terms(a.object, b.object, s)) return std::nullopt;
    return s;
}

// Canonical key for alpha-equivalence: variables renamed ?0, ?1, ... in
// order of first occurrence; ground terms verbatim.
inline std::string memo_key(const Pattern& g) {
    std::map<std::string, std::string> names;
    auto canon = [&](const Term& t) {
        if (!t.is_variable()) return t.to_string();
        auto [it, fresh] = names.emplace(t.value(), "?" + std::to_string(names.size()));
        return it->second;
    };
    std::string s = canon(g.subject);
    std::string p = canon(g.predicate);
    std::string o = canon(g.object);
    return "(" + s + ", " + p + ", " + o + ")";
}

struct SolveLimits {
    int max_depth = 16;
    std::chrono::milliseconds invoke_timeout{5000};
    std::string fresh_base = "urn:instance:";
};

struct SolveResult {
    std::vector<Binding> bindings;  // over the goal's variables, ground, in discovery order
    Fragment derived;               // triples produced by services along successful derivations
    std::vector<TraceEvent> trace;
};

// Backward-chaining resolution over the store plus the compiled rules.
// Facts (stored and branch-derived) are tried before rules; rule bodies
// evaluate left to right with the service builtin last; derived triples
// are visible to the rest of their own derivation branch and rolled back
// on backtracking. Depth limiting plus an active-goal alpha-equivalence
// cut guarantee termination.
class Solver {
public:
    Solver(const KbStore& kb, std::vector<Rule> rules, ServiceRuntime& runtime,
           SolveLimits limits = {})
        : kb_(kb), rules_(std::move(rules)), runtime_(runtime), limits_(limits) {
        if (limits_.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    }

    SolveResult solve(const Pattern& goal) {
        SolveResult result;
        overlay_ = Fragment();
        active_.clear();
        trace_.clear();
        call_counter_ = 0;
        frame_counter_ = 0;
        std::set<Binding> emitted;

        std::set<std::string> goal_vars;
        for (const Term* t : {&goal.subject, &goal.predicate, &goal.object})
            if (t->is_variable()) goal_vars.insert(t->value());

        auto lock = kb_.read_lock();
        solve_goal(goal, 0, Subst{}, [&](const Subst& s) {
            Binding b;
            for (const auto& v : goal_vars) {
                Term t = walk(Term::variable(v), s);
                if (t.is_variable()) return;
                b[v] = t;
            }
            if (!emitted.insert(b).second) return;
            result.bindings.push_back(std::move(b));
            for (const Triple& t : overlay_) result.derived.insert(t);
        });

        result.trace = std::move(trace_);
        return result;
    }

private:
    using Cont = std::function<void(const Subst&)>;

    struct DeferredType {
        std::string var;
        std::string class_iri;
    };
    using Deferred = std::vector<DeferredType>;

    UnionView view() const { return UnionView(kb_, &overlay_); }

    // Checks entries whose variable is now ground; unresolved ones are
    // kept. Returns false on the first type violation.
    bool check_deferred(const Subst& s, const Deferred& in, Deferred& out) const {
        out.clear();
        for (const auto& d : in) {
            Term t = walk(Term::variable(d.var), s);
            if (t.is_variable()) {
                out.push_back(d);
                continue;
            }
            if (!t.is_iri() || !view().type_of(t.value()).count(d.class_iri)) return false;
        }
        return true;
    }

    static Rule rename_rule(const Rule& r, std::uint64_t frame) {
        std::string suffix = "@" + std::to_string(frame);
        auto rn_term = [&](const Term& t) {
            return t.is_variable() ? Term::variable(t.value() + suffix) : t;
        };
        auto rn_pattern = [&](const Pattern& p) {
            return Pattern(rn_term(p.subject), rn_term(p.predicate), rn_term(p.object));
        };
        Rule out;
        out.id = r.id;
        out.annotation = r.annotation;
        for (const auto& atom : r.body) {
            if (const auto* p = std::get_if<Pattern>(&atom)) {
                out.body.emplace_back(rn_pattern(*p));
            } else if (const auto* t = std::get_if<TypeAtom>(&atom)) {
                out.body.emplace_back(TypeAtom{t->var + suffix, t->class_iri});
            } else {
                BuiltinAtom b = std::get<BuiltinAtom>(atom);
                for (auto& v : b.inputs) v += suffix;
                for (auto& v : b.outputs) v += suffix;
                out.body.emplace_back(std::move(b));
            }
        }
        for (const auto& p : r.head) out.head.push_back(rn_pattern(p));
        return out;
    }

    void solve_goal(const Pattern& goal, int depth, const Subst& subst, const Cont& k) {
        Pattern g = walk_pattern(goal, subst);
        trace_.push_back({.kind = "goal", .depth = depth, .goal = g.to_string()});
        if (depth > limits_.max_depth) {
            trace_.push_back({.kind = "depthCut", .depth = depth, .goal = g.to_string()});
            return;
        }
        std::string key = memo_key(g);
        if (std::find(active_.begin(), active_.end(), key) != active_.end()) {
            trace_.push_back({.kind = "memoHit", .depth = depth, .goal = g.to_string()});
            return;
        }
        active_.push_back(key);

        for (const Binding& m : view().match(g)) {
            Subst s2 = subst;
            for (const auto& [v, t] : m) s2[v] = t;
            trace_.push_back({.kind = "factMatched",
                              .depth = depth,
                              .goal = g.to_string(),
                              .detail = apply_binding(g, m).to_string()});
            k(s2);
        }

        for (const Rule& r : rules_) {
            Rule rr = rename_rule(r, ++frame_counter_);
            for (const Pattern& h : rr.head) {
                auto u = unify(g, h, subst);
                if (!u) continue;
                trace_.push_back({.kind = "ruleSelected", .depth = depth, .goal = g.to_string(), .rule = rr.id});
                solve_body(rr, 0, depth + 1, *u, Deferred{}, k);
            }
        }

        active_.pop_back();
    }

    void solve_body(const Rule& rule, std::size_t idx, int depth, const Subst& subst,
                    const Deferred& deferred, const Cont& k) {
        if (idx == rule.body.size()) {
            k(subst);
            return;
        }
        const BodyAtom& atom = rule.body[idx];
        if (const auto* t = std::get_if<TypeAtom>(&atom)) {
            Term v = walk(Term::variable(t->var), subst);
            if (v.is_variable()) {
                Deferred d2 = deferred;
                d2.push_back({t->var, t->class_iri});
                solve_body(rule, idx + 1, depth, subst, d2, k);
            } else if (v.is_iri() && view().type_of(v.value()).count(t->class_iri)) {
                solve_body(rule, idx + 1, depth, subst, deferred, k);
            }
            return;
        }
        if (const auto* p = std::get_if<Pattern>(&atom)) {
            solve_goal(*p, depth, subst, [this, &rule, idx, depth, &deferred, &k](const Subst& s2) {
                Deferred rest;
                if (!check_deferred(s2, deferred, rest)) return;
                solve_body(rule, idx + 1, depth, s2, rest, k);
            });
            return;
        }
        eval_builtin(rule, std::get<BuiltinAtom>(atom), depth, subst, deferred, k);
    }

    // Grounds the builtin's input variables (enumerating class instances
    // for unbound object inputs), then runs extract -> lower -> invoke ->
    // lift. Failures prune the branch with a builtinReturned record.
    void eval_builtin(const Rule& rule, const BuiltinAtom& b, int depth, const Subst& subst,
                      const Deferred& deferred, const Cont& k) {
        const ServiceAnnotation& a = *rule.annotation;
        std::vector<const TemplateNode*> open_inputs;
        for (const auto& n : a.input.nodes)
            if (n.open()) open_inputs.push_back(&n);
        ground_inputs(rule, b, open_inputs, 0, depth, subst, deferred, k);
    }

    void ground_inputs(const Rule& rule, const BuiltinAtom& b,
                       const std::vector<const TemplateNode*>& nodes, std::size_t i, int depth,
                       const Subst& subst, const Deferred& deferred, const Cont& k) {
        auto guard_fail = [&](const std::string& why) {
            trace_.push_back({.kind = "builtinReturned",
                              .depth = depth,
                              .rule = rule.id,
                              .status = "error",
                              .stage = "guard",
                              .detail = why});
        };
        if (i < nodes.size()) {
            const TemplateNode& n = *nodes[i];
            Term t = walk(Term::variable(b.inputs[i]), subst);
            if (t.is_variable()) {
                if (n.literal_node) {
                    guard_fail("input '" + n.name + "' is an unbound literal");
                    return;
                }
                auto candidates = view().match(
                    Pattern(t, Term::iri(vocab::kRdfType), Term::iri(n.classification)));
                if (candidates.empty()) {
                    guard_fail("no instances of <" + n.classification + "> for unbound input '" +
                               n.name + "'");
                    return;
                }
                for (const Binding& m : candidates) {
                    Subst s2 = subst;
                    s2[t.value()] = m.at(t.value());
                    ground_inputs(rule, b, nodes, i + 1, depth, s2, deferred, k);
                }
                return;
            }
            if (n.literal_node) {
                if (!t.is_literal() || t.datatype() != n.classification) {
                    guard_fail("input '" + n.name + "' bound to " + t.to_string() +
                               ", expected a <" + n.classification + "> literal");
                    return;
                }
            } else if (!t.is_iri()) {
                guard_fail("input '" + n.name + "' bound to " + t.to_string() + ", expected an IRI");
                return;
            }
            ground_inputs(rule, b, nodes, i + 1, depth, subst, deferred, k);
            return;
        }

        Deferred rest;
        if (!check_deferred(subst, deferred, rest)) {
            guard_fail("type atom violated");
            return;
        }

        const ServiceAnnotation& a = *rule.annotation;
        Binding abind;
        for (std::size_t j = 0; j < nodes.size(); ++j)
            abind[nodes[j]->name] = walk(Term::variable(b.inputs[j]), subst);

        Fragment input_fragment;
        try {
            input_fragment = extract_input_fragment(a, abind, view());
        } catch (const ExtractError& e) {
            trace_.push_back({.kind = "builtinReturned",
                              .depth = depth,
                              .rule = rule.id,
                              .status = "error",
                              .stage = "extract",
                              .detail = e.what()});
            return;
        }

        SyntacticMessage request = lower(input_fragment, a, abind);
        std::uint64_t call_id = ++call_counter_;
        trace_.push_back(
            {.kind = "builtinInvoked", .depth = depth, .rule = rule.id, .call_id = call_id});
        auto started = std::chrono::steady_clock::now();
        auto elapsed_ms = [&] {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             started)
                .count();
        };

        SyntacticMessage response;
        try {
            response = runtime_.invoke(a.endpoint, request, limits_.invoke_timeout);
        } catch (const ConnectorError& e) {
            trace_.push_back({.kind = "builtinReturned",
                              .depth = depth,
                              .rule = rule.id,
                              .call_id = call_id,
                              .status = "error",
                              .stage = "connector",
                              .detail = e.what(),
                              .duration_ms = elapsed_ms()});
            return;
        }

        LiftResult lifted;
        try {
            lifted = lift(response, a, abind, call_id, limits_.fresh_base);
        } catch (const LiftError& e) {
            trace_.push_back({.kind = "builtinReturned",
                              .depth = depth,
                              .rule = rule.id,
                              .call_id = call_id,
                              .status = "error",
                              .stage = "lift",
                              .detail = e.what(),
                              .duration_ms = elapsed_ms()});
            return;
        }
        trace_.push_back({.kind = "builtinReturned",
                          .depth = depth,
                          .rule = rule.id,
                          .call_id = call_id,
                          .status = "ok",
                          .duration_ms = elapsed_ms()});

        Subst s2 = subst;
        auto out_only = output_only_nodes(a);
        std::size_t j = 0;
        for (const auto& n : a.output.nodes) {
            if (!out_only.count(n.name)) continue;
            const Term& value = lifted.binding.at(n.name);
            if (!unify_terms(Term::variable(b.outputs[j]), value, s2)) return;
            ++j;
        }

        std::size_t pre = overlay_.size();
        for (const Triple& t : lifted.fragment) overlay_.insert(t);
        k(s2);
        overlay_.truncate(pre);
    }

    const KbStore& kb_;
    std::vector<Rule> rules_;
    ServiceRuntime& runtime_;
    SolveLimits limits_;

    Fragment overlay_;
    std::vector<std::string> active_;
    std::vector<TraceEvent> trace_;
    std::uint64_t call_counter_ = 0;
    std::uint64_t frame_counter_ = 0;
};

}  // namespace semweave
