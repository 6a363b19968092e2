#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ontopred/join.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/rules.hpp"
#include "ontopred/triple_text.hpp"

namespace ontopred {

struct chain_limits {
    std::size_t max_iterations = 10000;
    std::size_t max_derived = 1000000;
};

struct derivation_report {
    std::size_t derived = 0;
    std::size_t iterations = 0;
    /// New triples per rule (expanded names, e.g. `r#2`; axioms as `axiom:...`).
    std::map<std::string, std::size_t> fired;
};

namespace detail {

struct compiled_rule {
    std::string base;  // name recorded as provenance
    std::string name;  // expanded name
    compiled_body body;
    std::vector<id_pattern> head;
};

inline term var(const char* name) { return term::variable(name); }

/// The fixed schema axioms as id-level rules; predicates may be variables.
inline std::vector<compiled_rule> axiom_rules(knowledge_base& kb) {
    auto id_of = [&](const term& t) { return kb.intern(t); };
    std::vector<compiled_rule> out;
    auto add = [&](std::string name, std::vector<triple_pattern> body, std::vector<triple_pattern> head) {
        compiled_rule r;
        r.base = r.name = "axiom:" + std::move(name);
        for (const auto& tp : body) r.body.add_pattern(tp, id_of);
        for (const auto& tp : head) {
            id_pattern ip;
            ip.s = r.body.make_slot(tp.subject, id_of);
            ip.p = r.body.make_slot(tp.predicate, id_of);
            ip.o = r.body.make_slot(tp.object, id_of);
            r.head.push_back(ip);
        }
        out.push_back(std::move(r));
    };
    const term x = var("x"), y = var("y"), z = var("z"), c = var("c"), d = var("d"), p = var("p"), q = var("q");
    add("subclass-typing", {{x, vocab::type, c}, {c, vocab::sub_class_of, d}}, {{x, vocab::type, d}});
    add("subproperty", {{x, p, y}, {p, vocab::sub_property_of, q}}, {{x, q, y}});
    add("inverse", {{x, p, y}, {p, vocab::inverse_of, q}}, {{y, q, x}});
    add("inverse-back", {{x, p, y}, {q, vocab::inverse_of, p}}, {{y, q, x}});
    add("symmetric", {{x, p, y}, {p, vocab::type, vocab::symmetric_property}}, {{y, p, x}});
    add("transitive", {{x, p, y}, {y, p, z}, {p, vocab::type, vocab::transitive_property}}, {{x, p, z}});
    add("equivalence-symmetric", {{x, vocab::equivalent_to, y}}, {{y, vocab::equivalent_to, x}});
    for (const term* link : {&vocab::type, &vocab::has_weakness, &vocab::has_vulnerability, &vocab::related_to}) {
        std::string local(link->local_name());
        add("equivalence-subject-" + local, {{x, *link, y}, {x, vocab::equivalent_to, z}}, {{z, *link, y}});
        add("equivalence-object-" + local, {{x, *link, y}, {y, vocab::equivalent_to, z}}, {{x, *link, z}});
    }
    return out;
}

inline std::vector<compiled_rule> compile_rules(knowledge_base& kb, const rule_set& rs) {
    auto id_of = [&](const term& t) { return kb.intern(t); };
    std::vector<compiled_rule> out;
    if (rs.axioms) out = axiom_rules(kb);
    for (const auto& r : rs.rules) {
        validate(r);
        for (const auto& h : expand_disjunction(r)) {
            compiled_rule c;
            c.base = r.name;
            c.name = h.name;
            for (const auto& a : h.body_and) c.body.add_atom(a, id_of);
            check_builtins_bound(c.body, {});
            for (const auto& a : h.head) {
                auto tp = a.as_pattern();
                id_pattern ip;
                ip.s = c.body.make_slot(tp.subject, id_of);
                ip.p = c.body.make_slot(tp.predicate, id_of);
                ip.o = c.body.make_slot(tp.object, id_of);
                c.head.push_back(ip);
            }
            out.push_back(std::move(c));
        }
    }
    return out;
}

} // namespace detail

/// Semi-naive forward chaining of `rs` (plus the schema axioms) to the least
/// fixpoint. Facts found in a round are applied together after it, so the
/// result does not depend on rule order. On LimitExceeded the KB holds the
/// state after the last completed round.
inline derivation_report forward_chain(knowledge_base& kb, const rule_set& rs, const chain_limits& limits = {}) {
    auto rules = detail::compile_rules(kb, rs);
    derivation_report report;
    const auto& dict = kb.dict();

    triple_index delta_store;
    const triple_index* delta = &kb.index();
    bool first = true;

    while (true) {
        if (report.iterations >= limits.max_iterations)
            throw error(errc::limit_exceeded, "max_iterations (" + std::to_string(limits.max_iterations) +
                                                  ") reached before fixpoint");
        ++report.iterations;

        std::set<id_triple> fresh;
        std::map<std::string, std::set<id_triple>> fresh_by_rule;
        std::map<id_triple, std::set<std::string>> provenance;

        for (const auto& r : rules) {
            auto emit = [&](const std::vector<term_id>& row) {
                for (const auto& h : r.head) {
                    auto value = [&](const detail::slot& s) { return s.is_var() ? row[s.var] : s.id; };
                    id_triple t{value(h.s), value(h.p), value(h.o)};
                    if (!dict.at(t.s).is_resource() || !dict.at(t.p).is_resource()) continue;
                    provenance[t].insert(r.base);
                    if (!kb.index().contains(t)) {
                        fresh.insert(t);
                        fresh_by_rule[r.name].insert(t);
                    }
                }
            };
            std::size_t n = r.body.patterns.size();
            if (n == 0) {
                if (!first) continue;
                std::vector<term_id> row(r.body.vars.size(), no_term);
                detail::joiner(kb, r.body, {}).run(row, emit);
                continue;
            }
            if (first) {
                std::vector<const triple_index*> sources(n, &kb.index());
                std::vector<term_id> row(r.body.vars.size(), no_term);
                detail::joiner(kb, r.body, sources).run(row, emit);
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<const triple_index*> sources(n, &kb.index());
                sources[i] = delta;
                std::vector<term_id> row(r.body.vars.size(), no_term);
                detail::joiner(kb, r.body, sources).run(row, emit);
            }
        }

        if (report.derived + fresh.size() > limits.max_derived)
            throw error(errc::limit_exceeded, "max_derived (" + std::to_string(limits.max_derived) +
                                                  ") would be exceeded in iteration " +
                                                  std::to_string(report.iterations));

        std::vector<id_triple> ordered(fresh.begin(), fresh.end());
        std::stable_partition(ordered.begin(), ordered.end(),
                              [&](const id_triple& t) { return detail::is_declaration(kb.to_triple(t)); });
        for (const auto& t : ordered) kb.assert_derived(t);
        for (const auto& [t, names] : provenance)
            for (const auto& n : names) kb.add_provenance(t, n);
        for (const auto& [name, facts] : fresh_by_rule) report.fired[name] += facts.size();
        report.derived += fresh.size();

        if (fresh.empty()) break;
        delta_store = triple_index();
        for (const auto& t : fresh) delta_store.insert(t);
        delta = &delta_store;
        first = false;
    }
    return report;
}

} // namespace ontopred
