#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontopred/error.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/rules.hpp"
#include "ontopred/vocabulary.hpp"

namespace ontopred {

enum class catalog_kind { attack_pattern, weakness, vulnerability };

inline std::string_view to_string(catalog_kind k) {
    switch (k) {
    case catalog_kind::attack_pattern: return "attack_pattern";
    case catalog_kind::weakness: return "weakness";
    case catalog_kind::vulnerability: return "vulnerability";
    }
    return "?";
}

inline std::optional<catalog_kind> parse_catalog_kind(std::string_view s) {
    if (s == "attack_pattern") return catalog_kind::attack_pattern;
    if (s == "weakness") return catalog_kind::weakness;
    if (s == "vulnerability") return catalog_kind::vulnerability;
    return std::nullopt;
}

/// Base class every entry of a catalog sits under.
inline const term& base_class(catalog_kind k) {
    switch (k) {
    case catalog_kind::attack_pattern: return vocab::attack_pattern;
    case catalog_kind::weakness: return vocab::weakness;
    case catalog_kind::vulnerability: return vocab::vulnerability;
    }
    return vocab::thing;
}

inline std::string_view default_prefix(catalog_kind k) {
    switch (k) {
    case catalog_kind::attack_pattern: return "capec";
    case catalog_kind::weakness: return "cwe";
    case catalog_kind::vulnerability: return "cve";
    }
    return "x";
}

/// Catalog id to resource: ids with a ':' are kept (`osvdb:1234`), others get
/// the kind's prefix (`CWE-345` becomes `cwe:CWE-345`).
inline term resource_for(catalog_kind k, const std::string& id) {
    if (id.find(':') != std::string::npos) return term::resource(id);
    return term::resource(std::string(default_prefix(k)) + ":" + id);
}

/// Like resource_for, guessing the kind from a CAPEC-/CWE-/CVE- id.
inline std::optional<term> resource_for_id(const std::string& id) {
    if (id.find(':') != std::string::npos) return term::resource(id);
    if (id.rfind("CAPEC-", 0) == 0) return resource_for(catalog_kind::attack_pattern, id);
    if (id.rfind("CWE-", 0) == 0) return resource_for(catalog_kind::weakness, id);
    if (id.rfind("CVE-", 0) == 0) return resource_for(catalog_kind::vulnerability, id);
    return std::nullopt;
}

/// Consequence category class for a catalog string; spaces are optional.
inline std::optional<term> consequence_class(std::string_view s) {
    std::string squeezed;
    for (char c : s)
        if (c != ' ') squeezed += c;
    for (const auto& c : vocab::consequence_categories)
        if (c.local_name() == squeezed) return c;
    return std::nullopt;
}

struct catalog_entry {
    catalog_kind kind = catalog_kind::attack_pattern;
    std::string id;
    std::string name;
    std::string description;
    std::vector<std::string> parent_ids;
    std::vector<std::string> related_weakness_ids;
    std::vector<std::string> related_vulnerability_ids;
    std::vector<std::string> prerequisites;
    std::vector<std::string> steps;
    std::vector<term> consequences;

    term resource() const { return resource_for(kind, id); }
};

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& rec, const char* field, const std::string& where) {
    std::vector<std::string> out;
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) return out;
    if (!it->is_array()) throw error(errc::parse_error, where + ": field '" + field + "' must be an array of strings");
    for (const auto& v : *it) {
        if (!v.is_string()) throw error(errc::parse_error, where + ": field '" + field + "' must be an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline std::string string_field(const nlohmann::json& rec, const char* field, const std::string& where, bool required) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) {
        if (required) throw error(errc::parse_error, where + ": missing field '" + field + "'");
        return {};
    }
    if (!it->is_string()) throw error(errc::parse_error, where + ": field '" + field + "' must be a string");
    return it->get<std::string>();
}

inline nlohmann::json parse_json_document(std::string_view text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = lex::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string why = e.what();
        if (auto p = why.find("parse error"); p != std::string::npos) why = why.substr(p);
        throw error(errc::parse_error, what + " line " + std::to_string(line) + ", column " + std::to_string(col) +
                                           ": " + why);
    }
}

} // namespace detail

/// Normalized catalog JSON: `{"kind": ..., "records": [{"id", "name", ...}]}`.
/// Unknown fields are ignored; record order is kept.
inline std::vector<catalog_entry> parse_catalog(std::string_view text, catalog_kind kind) {
    auto doc = detail::parse_json_document(text, "catalog");
    if (!doc.is_object()) throw error(errc::parse_error, "catalog: top level must be an object");
    if (auto it = doc.find("kind"); it != doc.end()) {
        if (!it->is_string() || parse_catalog_kind(it->get<std::string>()) != kind)
            throw error(errc::parse_error, "catalog: kind " + it->dump() + " does not match expected \"" +
                                               std::string(to_string(kind)) + "\"");
    }
    auto records = doc.find("records");
    if (records == doc.end() || !records->is_array())
        throw error(errc::parse_error, "catalog: 'records' must be an array");

    std::vector<catalog_entry> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < records->size(); ++i) {
        const auto& rec = (*records)[i];
        std::string where = "catalog record " + std::to_string(i);
        if (!rec.is_object()) throw error(errc::parse_error, where + ": must be an object");
        catalog_entry e;
        e.kind = kind;
        e.id = detail::string_field(rec, "id", where, true);
        if (e.id.empty()) throw error(errc::parse_error, where + ": empty id");
        where += " (" + e.id + ")";
        try {
            (void)e.resource();
        } catch (const error& err) {
            throw error(errc::parse_error, where + ": " + err.detail());
        }
        if (!seen.insert(e.id).second) throw error(errc::duplicate_id, e.id + " appears twice in the " +
                                                                           std::string(to_string(kind)) + " catalog");
        e.name = detail::string_field(rec, "name", where, false);
        e.description = detail::string_field(rec, "description", where, false);
        e.parent_ids = detail::string_list(rec, "parent_ids", where);
        e.related_weakness_ids = detail::string_list(rec, "related_weakness_ids", where);
        e.related_vulnerability_ids = detail::string_list(rec, "related_vulnerability_ids", where);
        e.prerequisites = detail::string_list(rec, "prerequisites", where);
        e.steps = detail::string_list(rec, "steps", where);
        for (const auto& c : detail::string_list(rec, "consequences", where)) {
            auto cls = consequence_class(c);
            if (!cls) throw error(errc::parse_error, where + ": unknown consequence category \"" + c + "\"");
            if (std::find(e.consequences.begin(), e.consequences.end(), *cls) == e.consequences.end())
                e.consequences.push_back(*cls);
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Reads the kind from the document itself.
inline std::vector<catalog_entry> parse_catalog(std::string_view text) {
    auto doc = detail::parse_json_document(text, "catalog");
    auto it = doc.is_object() ? doc.find("kind") : doc.end();
    if (it == doc.end() || !it->is_string() || !parse_catalog_kind(it->get<std::string>()))
        throw error(errc::parse_error, "catalog: missing or unknown 'kind'");
    return parse_catalog(text, *parse_catalog_kind(it->get<std::string>()));
}

// -- intermediate graph -------------------------------------------------------

enum class edge_label { is_a, related_to, equivalent_to, part_of };

inline std::string_view to_string(edge_label l) {
    switch (l) {
    case edge_label::is_a: return "is-a";
    case edge_label::related_to: return "relatedTo";
    case edge_label::equivalent_to: return "equivalentTo";
    case edge_label::part_of: return "partOf";
    }
    return "?";
}

struct graph_edge {
    term from;
    term to;
    edge_label label = edge_label::is_a;

    friend bool operator==(const graph_edge&, const graph_edge&) = default;
    friend auto operator<=>(const graph_edge& a, const graph_edge& b) {
        if (auto c = a.from <=> b.from; c != 0) return c;
        if (auto c = a.to <=> b.to; c != 0) return c;
        return a.label <=> b.label;
    }
};

/// Concept graph between the catalogs and the ontology. Every edge can be
/// walked from either end (`out_edges` / `in_edges`).
class intermediate_graph {
public:
    /// Adds a concept; a second node with the same resource is recorded as a
    /// duplicate and ignored.
    void add_node(catalog_entry entry) {
        term r = entry.resource();
        if (nodes_.count(r)) {
            duplicates_.push_back(r);
            return;
        }
        nodes_.emplace(std::move(r), std::move(entry));
    }

    /// Adds an edge; returns false when it was already present.
    bool add_edge(const term& from, const term& to, edge_label label) {
        if (!edges_.insert({from, to, label}).second) return false;
        out_[from].push_back({from, to, label});
        in_[to].push_back({from, to, label});
        return true;
    }

    void warn(std::string message) { warnings_.push_back(std::move(message)); }

    const std::map<term, catalog_entry>& nodes() const noexcept { return nodes_; }
    const std::set<graph_edge>& edges() const noexcept { return edges_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const std::vector<term>& duplicates() const noexcept { return duplicates_; }

    bool has_node(const term& r) const { return nodes_.count(r) != 0; }
    const catalog_entry* node(const term& r) const {
        auto it = nodes_.find(r);
        return it == nodes_.end() ? nullptr : &it->second;
    }

    std::vector<graph_edge> out_edges(const term& r, std::optional<edge_label> label = std::nullopt) const {
        return select(out_, r, label);
    }
    std::vector<graph_edge> in_edges(const term& r, std::optional<edge_label> label = std::nullopt) const {
        return select(in_, r, label);
    }

    std::size_t count(edge_label label) const {
        return static_cast<std::size_t>(
            std::count_if(edges_.begin(), edges_.end(), [&](const graph_edge& e) { return e.label == label; }));
    }

private:
    static std::vector<graph_edge> select(const std::map<term, std::vector<graph_edge>>& m, const term& r,
                                          std::optional<edge_label> label) {
        std::vector<graph_edge> out;
        auto it = m.find(r);
        if (it == m.end()) return out;
        for (const auto& e : it->second)
            if (!label || e.label == *label) out.push_back(e);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::map<term, catalog_entry> nodes_;
    std::set<graph_edge> edges_;
    std::map<term, std::vector<graph_edge>> out_;
    std::map<term, std::vector<graph_edge>> in_;
    std::vector<std::string> warnings_;
    std::vector<term> duplicates_;
};

namespace detail {

/// One cycle path per back edge of the is-a subgraph restricted to `kind`.
inline std::vector<std::vector<term>> is_a_cycles(const intermediate_graph& g, std::optional<catalog_kind> kind) {
    std::vector<std::vector<term>> cycles;
    std::map<term, int> state;  // 0 new, 1 on stack, 2 done
    std::vector<term> stack;
    std::function<void(const term&)> visit = [&](const term& n) {
        state[n] = 1;
        stack.push_back(n);
        for (const auto& e : g.out_edges(n, edge_label::is_a)) {
            const auto* target = g.node(e.to);
            if (kind && (!target || target->kind != *kind)) continue;
            int s = state[e.to];
            if (s == 1) {
                auto from = std::find(stack.begin(), stack.end(), e.to);
                std::vector<term> path(from, stack.end());
                path.push_back(e.to);
                cycles.push_back(std::move(path));
            } else if (s == 0) {
                visit(e.to);
            }
        }
        stack.pop_back();
        state[n] = 2;
    };
    for (const auto& [r, entry] : g.nodes())
        if ((!kind || entry.kind == *kind) && state[r] == 0) visit(r);
    return cycles;
}

inline std::string path_str(const std::vector<term>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += " -> ";
        out += path[i].str();
    }
    return out;
}

} // namespace detail

/// One node per entry, an is-a edge per parent id and a relatedTo edge per
/// cross-catalog link. Missing targets become warnings.
inline intermediate_graph build_graph(const std::vector<catalog_entry>& entries) {
    intermediate_graph g;
    for (const auto& e : entries) {
        if (g.has_node(e.resource()))
            throw error(errc::duplicate_id, e.id + " appears twice in the " + std::string(to_string(e.kind)) +
                                                " catalogs");
        g.add_node(e);
    }
    auto link = [&](const catalog_entry& e, catalog_kind target_kind, const std::string& id, edge_label label) {
        term from = e.resource();
        term to = [&] {
            try {
                return resource_for(target_kind, id);
            } catch (const error& err) {
                throw error(errc::parse_error, e.id + ": bad reference \"" + id + "\": " + err.detail());
            }
        }();
        const auto* target = g.node(to);
        if (!target) {
            g.warn(from.str() + " " + std::string(to_string(label)) + " " + to.str() + ": target not in any catalog");
            return;
        }
        if (target->kind != target_kind) {
            g.warn(from.str() + " " + std::string(to_string(label)) + " " + to.str() + ": target is a " +
                   std::string(to_string(target->kind)) + ", expected " + std::string(to_string(target_kind)));
            return;
        }
        g.add_edge(from, to, label);
    };
    for (const auto& e : entries) {
        for (const auto& p : e.parent_ids) link(e, e.kind, p, edge_label::is_a);
        for (const auto& w : e.related_weakness_ids) link(e, catalog_kind::weakness, w, edge_label::related_to);
        for (const auto& v : e.related_vulnerability_ids)
            link(e, catalog_kind::vulnerability, v, edge_label::related_to);
    }
    for (auto kind : {catalog_kind::attack_pattern, catalog_kind::weakness, catalog_kind::vulnerability}) {
        auto cycles = detail::is_a_cycles(g, kind);
        if (!cycles.empty())
            throw error(errc::cycle_detected, std::string(to_string(kind)) + " is-a cycle: " +
                                                  detail::path_str(cycles.front()));
    }
    return g;
}

struct equivalence_map {
    std::vector<std::pair<std::string, std::string>> pairs;
};

/// `{"pairs": [["osvdb:1", "CVE-2009-0217"], ...]}`
inline equivalence_map parse_equivalences(std::string_view text) {
    auto doc = detail::parse_json_document(text, "equivalences");
    auto it = doc.is_object() ? doc.find("pairs") : doc.end();
    if (it == doc.end() || !it->is_array()) throw error(errc::parse_error, "equivalences: 'pairs' must be an array");
    equivalence_map out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& p = (*it)[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw error(errc::parse_error, "equivalences pair " + std::to_string(i) + ": expected two strings");
        out.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return out;
}

/// Adds one equivalentTo edge per pair whose ends are both in the graph.
inline intermediate_graph apply_equivalences(intermediate_graph g, const equivalence_map& map) {
    for (const auto& [a, b] : map.pairs) {
        auto ra = resource_for_id(a), rb = resource_for_id(b);
        if (!ra || !rb || !g.has_node(*ra) || !g.has_node(*rb)) {
            g.warn("equivalence " + a + " = " + b + ": endpoint not in graph, skipped");
            continue;
        }
        if (*ra == *rb) continue;
        // stored once in canonical order; in_edges gives the reverse direction
        auto [lo, hi] = std::minmax(*ra, *rb);
        g.add_edge(lo, hi, edge_label::equivalent_to);
    }
    return g;
}

struct consistency_report {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const noexcept { return errors.empty(); }
};

inline consistency_report check_consistency(const intermediate_graph& g) {
    consistency_report r;
    for (const auto& cycle : detail::is_a_cycles(g, std::nullopt))
        r.errors.push_back("is-a cycle: " + detail::path_str(cycle));
    for (const auto& d : g.duplicates()) r.errors.push_back("duplicate id: " + d.str());
    r.warnings = g.warnings();
    for (const auto& e : g.edges()) {
        if (!g.has_node(e.from))
            r.warnings.push_back("dangling " + std::string(to_string(e.label)) + " source " + e.from.str());
        if (!g.has_node(e.to))
            r.warnings.push_back("dangling " + std::string(to_string(e.label)) + " target " + e.to.str());
    }
    for (const auto& [res, entry] : g.nodes())
        if (entry.name.empty()) r.warnings.push_back(res.str() + " has an empty name");
    return r;
}

namespace detail {

inline void require_consistent(const intermediate_graph& g) {
    auto report = check_consistency(g);
    if (!report.ok()) {
        std::string msg = std::to_string(report.errors.size()) + " consistency error(s): " + report.errors.front();
        throw error(errc::inconsistent_graph, msg);
    }
}

} // namespace detail

/// Asserts the catalog classes into `kb`; returns the number of new triples.
inline std::size_t emit_ontology(const intermediate_graph& g, knowledge_base& kb) {
    detail::require_consistent(g);
    std::vector<triple> out;
    for (const auto& [r, e] : g.nodes()) {
        const term& base = base_class(e.kind);
        out.emplace_back(r, vocab::type, vocab::class_);
        out.emplace_back(r, vocab::catalog_kind, base);
        if (g.out_edges(r, edge_label::is_a).empty()) out.emplace_back(r, vocab::sub_class_of, base);
        if (!e.name.empty()) out.emplace_back(r, vocab::label, term::literal(e.name));
        if (!e.description.empty()) out.emplace_back(r, vocab::description, term::literal(e.description));
        for (const auto& p : e.prerequisites) out.emplace_back(r, vocab::prerequisite, term::literal(p));
        for (std::size_t i = 0; i < e.steps.size(); ++i)
            out.emplace_back(r, vocab::step, term::literal(std::to_string(i + 1) + ": " + e.steps[i]));
        for (const auto& c : e.consequences) out.emplace_back(r, vocab::has_consequence, c);
    }
    for (const auto& e : g.edges()) {
        switch (e.label) {
        case edge_label::is_a: out.emplace_back(e.from, vocab::sub_class_of, e.to); break;
        case edge_label::related_to: out.emplace_back(e.from, vocab::related_to, e.to); break;
        case edge_label::equivalent_to: out.emplace_back(e.from, vocab::equivalent_to, e.to); break;
        case edge_label::part_of: out.emplace_back(e.from, vocab::part_of, e.to); break;
        }
    }
    std::sort(out.begin(), out.end());
    std::size_t added = 0;
    for (const auto& t : out)
        if (kb.assert_triple(t)) ++added;
    return added;
}

struct generated_rules {
    rule_set rules;
    std::vector<std::string> warnings;
};

/// Per attack pattern A with linked weaknesses W1..Wn:
///   A/detect   System(?s) AND hasWeakness(?s, Wi)...    => Vulnerable(?s)
///   A/predict  System(?s) AND ANY { hasWeakness(?s, Wi) } => UnderPotentialAttackSystem(?s)
/// and with linked vulnerabilities V1..Vm:
///   A/attack         Vulnerable(?s) AND all Wi AND hasVulnerability(?s, Vj)... => UnderAttackSystem(?s)
///   A/predict-vuln   Vulnerable(?s) AND ANY { hasVulnerability(?s, Vj) }      => UnderPotentialAttackSystem(?s)
/// Every head also asserts `targets(marker, ?s)` and `A(marker)`.
inline generated_rules generate_attack_rules(const intermediate_graph& g) {
    detail::require_consistent(g);
    generated_rules out;
    const term s = term::variable("s");
    for (const auto& [a, entry] : g.nodes()) {
        if (entry.kind != catalog_kind::attack_pattern) continue;
        std::vector<term> weaknesses, vulns;
        for (const auto& e : g.out_edges(a, edge_label::related_to)) {
            const auto* target = g.node(e.to);
            if (!target) continue;
            if (target->kind == catalog_kind::weakness) weaknesses.push_back(e.to);
            if (target->kind == catalog_kind::vulnerability) vulns.push_back(e.to);
        }
        if (weaknesses.empty() && vulns.empty()) {
            out.warnings.push_back(a.str() + " has no linked weaknesses or vulnerabilities; no rules generated");
            continue;
        }
        const term marker = vocab::marker_for(a);
        auto head = [&](const term& status) {
            return std::vector<atom>{atom::of_class(status, s), atom::of_property(vocab::targets, marker, s),
                                     atom::of_class(a, marker)};
        };
        auto has = [&](const term& p, const std::vector<term>& objs) {
            std::vector<atom> atoms;
            for (const auto& o : objs) atoms.push_back(atom::of_property(p, s, o));
            return atoms;
        };
        std::string base = a.str();
        if (!weaknesses.empty()) {
            rule detect{base + "/detect", {atom::of_class(vocab::system, s)}, {}, head(vocab::vulnerable)};
            for (auto& x : has(vocab::has_weakness, weaknesses)) detect.body_and.push_back(x);
            out.rules.add(std::move(detect));
            out.rules.add({base + "/predict", {atom::of_class(vocab::system, s)}, has(vocab::has_weakness, weaknesses),
                           head(vocab::under_potential_attack_system)});
        }
        if (!vulns.empty()) {
            rule attack{base + "/attack", {atom::of_class(vocab::vulnerable, s)}, {}, head(vocab::under_attack_system)};
            for (auto& x : has(vocab::has_weakness, weaknesses)) attack.body_and.push_back(x);
            for (auto& x : has(vocab::has_vulnerability, vulns)) attack.body_and.push_back(x);
            out.rules.add(std::move(attack));
            out.rules.add({base + "/predict-vuln", {atom::of_class(vocab::vulnerable, s)},
                           has(vocab::has_vulnerability, vulns), head(vocab::under_potential_attack_system)});
        }
    }
    for (const auto& r : out.rules.rules) validate(r);
    return out;
}

} // namespace ontopred
