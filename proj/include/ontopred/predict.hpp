#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontopred/error.hpp"
#include "ontopred/events.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/query.hpp"
#include "ontopred/rational.hpp"
#include "ontopred/reasoner.hpp"

namespace ontopred {

/// Which nodes are live. With `all_active` every node counts as active.
struct system_state {
    bool all_active = false;
    std::set<term> active;
    std::set<term> unreachable;

    bool live(const term& node) const { return (all_active || active.count(node)) && !unreachable.count(node); }
};

/// `{"nodes": {"s1": {"active": true, "reachable": true}, ...}}`; both flags
/// default to true.
inline system_state parse_state(std::string_view text) {
    auto doc = detail::parse_json_document(text, "state");
    auto nodes = doc.is_object() ? doc.find("nodes") : doc.end();
    if (nodes == doc.end() || !nodes->is_object()) throw error(errc::parse_error, "state: 'nodes' must be an object");
    system_state s;
    for (const auto& [id, flags] : nodes->items()) {
        if (!flags.is_object()) throw error(errc::parse_error, "state: node " + id + " needs an object of flags");
        auto flag = [&](const char* name) {
            auto it = flags.find(name);
            if (it == flags.end()) return true;
            if (!it->is_boolean()) throw error(errc::parse_error, "state: node " + id + ": '" + name + "' must be boolean");
            return it->get<bool>();
        };
        term node;
        try {
            node = node_resource(id);
        } catch (const error& e) {
            throw error(errc::parse_error, "state: " + e.detail());
        }
        if (flag("active")) s.active.insert(node);
        if (!flag("reachable")) s.unreachable.insert(node);
    }
    return s;
}

inline system_state all_nodes_live() {
    system_state s;
    s.all_active = true;
    return s;
}

struct prediction_entry {
    term node;
    term attack;
    term status;
    std::vector<term> satisfied;
    std::vector<term> missing;
    rational score;
    std::vector<term> consequences;
    std::vector<std::string> provenance;
};

struct prediction_report {
    std::int64_t generated_at = 0;
    std::vector<prediction_entry> entries;
};

/// Strongest first.
inline const std::vector<term>& status_classes() {
    static const std::vector<term> order{vocab::under_attack_system, vocab::vulnerable,
                                         vocab::under_potential_attack_system};
    return order;
}

namespace detail {

inline std::set<term> column(const query_result& r, std::size_t i) {
    std::set<term> out;
    for (const auto& row : r.rows) out.insert(row[i]);
    return out;
}

inline bool has_attack_classes(const knowledge_base& kb) {
    if (!kb.match({term::variable("a"), vocab::catalog_kind, vocab::attack_pattern}).empty()) return true;
    return kb.is_class(vocab::attack_pattern) && kb.subclass_closure(vocab::attack_pattern).size() > 1;
}

} // namespace detail

/// Runs the rules to a fixpoint, collects (attack, node) candidates from the
/// observed weaknesses and vulnerabilities and from attack markers, keeps
/// live nodes whose status a rule derived for that attack, and scores each by
/// the share of the attack's linked weaknesses and vulnerabilities present on
/// the node.
inline prediction_report run_prediction(knowledge_base& kb, const rule_set& rs, const system_state& state,
                                        const chain_limits& limits = {}) {
    if (!detail::has_attack_classes(kb)) throw error(errc::empty_ontology, "no attack pattern classes loaded");
    forward_chain(kb, rs, limits);

    std::set<std::pair<term, term>> candidates;  // (attack, node)
    const auto n = term::variable("n"), x = term::variable("x");
    for (const auto& [link, by] : {std::pair{vocab::has_weakness, &q_by_weakness},
                                   std::pair{vocab::has_vulnerability, &q_by_vulnerability}}) {
        auto observed = evaluate(kb, query{{"?n", "?x"}, {{n, link, x}}});
        std::map<term, std::set<term>> nodes_of;
        for (const auto& row : observed.rows) nodes_of[row[1]].insert(row[0]);
        for (const auto& [what, nodes] : nodes_of)
            for (const auto& attack : detail::column(evaluate(kb, by(what)), 0))
                for (const auto& node : nodes) candidates.insert({attack, node});
    }
    auto marked = evaluate(kb, query{{"?m", "?n"}, {{term::variable("m"), vocab::targets, n}}});
    for (const auto& row : marked.rows) {
        auto attack = vocab::attack_for(row[0]);
        if (attack && !evaluate(kb, q_specific_attack(row[1], *attack)).rows.empty())
            candidates.insert({*attack, row[1]});
    }

    prediction_report report;
    for (const auto& t : kb.match({term::variable("e"), vocab::occurred_at, term::variable("t")})) {
        const auto& ts = t.at("?t");
        if (ts.is_literal() && detail::is_integer_text(ts.text(), false))
            report.generated_at = std::max<std::int64_t>(report.generated_at, std::stoll(std::string(ts.text())));
    }

    for (const auto& [attack, node] : candidates) {
        if (!state.live(node)) continue;
        auto targeting = kb.provenance({vocab::marker_for(attack), vocab::targets, node});
        prediction_entry e{node, attack, {}, {}, {}, {}, {}, {}};
        std::set<std::string> used;
        for (const auto& status : status_classes()) {
            for (const auto& name : kb.provenance({node, vocab::type, status}))
                if (targeting.count(name)) {
                    used.insert(name);
                    if (e.status == term()) e.status = status;
                }
        }
        if (e.status == term()) continue;
        e.provenance.assign(used.begin(), used.end());

        for (const auto& b : kb.match({attack, vocab::related_to, x})) {
            const auto& req = b.at("?x");
            if (!kb.is_asserted({attack, vocab::related_to, req})) continue;
            if (kb.contains({req, vocab::catalog_kind, vocab::attack_pattern})) continue;
            bool present = kb.contains({node, vocab::has_weakness, req}) || kb.contains({node, vocab::has_vulnerability, req});
            (present ? e.satisfied : e.missing).push_back(req);
        }
        auto total = e.satisfied.size() + e.missing.size();
        e.score = total == 0 ? rational(1) : rational(std::int64_t(e.satisfied.size()), std::int64_t(total));
        for (const auto& b : kb.match({attack, vocab::has_consequence, x})) e.consequences.push_back(b.at("?x"));
        report.entries.push_back(std::move(e));
    }
    std::sort(report.entries.begin(), report.entries.end(), [](const prediction_entry& a, const prediction_entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.attack != b.attack) return a.attack.str() < b.attack.str();
        return a.node.str() < b.node.str();
    });
    return report;
}

inline nlohmann::ordered_json to_json(const prediction_report& r) {
    using nlohmann::ordered_json;
    auto strings = [](const std::vector<term>& ts) {
        ordered_json a = ordered_json::array();
        for (const auto& t : ts) a.push_back(t.str());
        return a;
    };
    ordered_json entries = ordered_json::array();
    for (const auto& e : r.entries) {
        ordered_json j;
        j["node"] = e.node.str();
        j["attack"] = e.attack.str();
        j["status"] = std::string(e.status.local_name());
        j["score"] = {{"num", e.score.num()}, {"den", e.score.den()}};
        j["satisfied"] = strings(e.satisfied);
        j["missing"] = strings(e.missing);
        j["consequences"] = strings(e.consequences);
        j["provenance"] = e.provenance;
        entries.push_back(std::move(j));
    }
    ordered_json out;
    out["generated_at"] = r.generated_at;
    out["entries"] = std::move(entries);
    return out;
}

inline std::string serialize(const prediction_report& r) { return to_json(r).dump(2) + "\n"; }

} // namespace ontopred
