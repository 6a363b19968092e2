#pragma once

// Reference implementations used only by the tests. They work on plain
// triple vectors with nested loops and share no code with the library's
// indexes, join kernel or reasoner.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ontopred/kb.hpp"
#include "ontopred/rational.hpp"
#include "ontopred/rules.hpp"

namespace oracle {

using ontopred::binding;
using ontopred::term;
using ontopred::triple;
using ontopred::triple_pattern;

inline term core(const std::string& local) { return term::resource("core:" + local); }

/// Bindings of `p` by scanning every triple.
inline std::set<binding> match_scan(const std::vector<triple>& triples, const triple_pattern& p) {
    std::set<binding> out;
    for (const auto& t : triples) {
        binding b;
        bool ok = true;
        auto bind = [&](const term& pat, const term& val) {
            if (!ok) return;
            if (!pat.is_variable()) {
                ok = pat == val;
                return;
            }
            auto it = b.find(pat.text());
            if (it == b.end())
                b.emplace(pat.text(), val);
            else
                ok = it->second == val;
        };
        bind(p.subject, t.subject);
        bind(p.predicate, t.predicate);
        bind(p.object, t.object);
        if (ok) out.insert(b);
    }
    return out;
}

/// Descendants of `root` (inclusive) over (child, parent) edges.
inline std::set<std::string> closure_dfs(const std::vector<std::pair<std::string, std::string>>& edges,
                                         const std::string& root) {
    std::set<std::string> seen{root};
    std::function<void(const std::string&)> visit = [&](const std::string& c) {
        for (const auto& [child, parent] : edges)
            if (parent == c && seen.insert(child).second) visit(child);
    };
    visit(root);
    return seen;
}

/// Longest chain length (edges) by trying every start node.
inline std::size_t longest_chain(const std::vector<std::pair<std::string, std::string>>& edges) {
    std::function<std::size_t(const std::string&)> up = [&](const std::string& c) -> std::size_t {
        std::size_t best = 0;
        for (const auto& [child, parent] : edges)
            if (child == c) best = std::max(best, 1 + up(parent));
        return best;
    };
    std::size_t best = 0;
    for (const auto& [child, parent] : edges) best = std::max(best, up(child));
    return best;
}

// -- conjunctive evaluation by nested loops ---------------------------------

struct by_predicate {
    std::map<term, std::vector<triple>> p;
    std::map<std::pair<term, term>, std::vector<triple>> po;
};

inline by_predicate group_by_predicate(const std::vector<triple>& triples) {
    by_predicate out;
    for (const auto& t : triples) {
        out.p[t.predicate].push_back(t);
        out.po[{t.predicate, t.object}].push_back(t);
    }
    return out;
}

/// Extends `b` over every pattern in order by trying all triples (only those
/// with the right predicate when `groups` is given and the predicate is known).
inline void nested_loop(const std::vector<triple>& triples, const std::vector<triple_pattern>& patterns,
                        std::size_t i, binding& b, const std::function<void(const binding&)>& emit,
                        const by_predicate* groups = nullptr) {
    if (i == patterns.size()) {
        emit(b);
        return;
    }
    // substitute what is already bound so the scan can reject early
    auto fix = [&](const term& t) -> std::optional<term> {
        if (!t.is_variable()) return t;
        auto it = b.find(t.text());
        if (it == b.end()) return std::nullopt;
        return it->second;
    };
    const auto& p = patterns[i];
    auto fs = fix(p.subject), fp = fix(p.predicate), fo = fix(p.object);
    const std::vector<triple>* scan = &triples;
    static const std::vector<triple> none;
    if (groups && fp && fo) {
        auto it = groups->po.find({*fp, *fo});
        scan = it == groups->po.end() ? &none : &it->second;
    } else if (groups && fp) {
        auto it = groups->p.find(*fp);
        scan = it == groups->p.end() ? &none : &it->second;
    }
    for (const auto& t : *scan) {
        if ((fs && *fs != t.subject) || (fp && *fp != t.predicate) || (fo && *fo != t.object)) continue;
        std::vector<std::string> added;
        bool ok = true;
        auto bind = [&](const term& pat, const term& val) {
            if (!ok || !pat.is_variable()) return;
            auto it = b.find(pat.text());
            if (it == b.end()) {
                b.emplace(pat.text(), val);
                added.push_back(pat.text());
            } else {
                ok = it->second == val;
            }
        };
        bind(p.subject, t.subject);
        bind(p.predicate, t.predicate);
        bind(p.object, t.object);
        if (ok) nested_loop(triples, patterns, i + 1, b, emit, groups);
        for (const auto& v : added) b.erase(v);
    }
}

inline std::set<binding> nested_loop_all(const std::vector<triple>& triples,
                                         const std::vector<triple_pattern>& patterns, binding seed = {},
                                         const by_predicate* groups = nullptr) {
    std::set<binding> out;
    nested_loop(triples, patterns, 0, seed, [&](const binding& b) { out.insert(b); }, groups);
    return out;
}

/// Query oracle: projected rows, sorted and deduplicated.
inline std::vector<std::vector<std::string>> query_rows(const std::vector<triple>& triples,
                                                        const std::vector<std::string>& select,
                                                        const std::vector<triple_pattern>& patterns) {
    std::set<std::vector<std::string>> rows;
    for (const auto& b : nested_loop_all(triples, patterns)) {
        std::vector<std::string> row;
        for (const auto& v : select) row.push_back(b.at(v).str());
        rows.insert(row);
    }
    return {rows.begin(), rows.end()};
}

// -- naive forward chaining -------------------------------------------------

inline std::optional<long long> timestamp_of(const std::map<term, long long>& stamps, const term& e) {
    auto it = stamps.find(e);
    if (it == stamps.end()) return std::nullopt;
    return it->second;
}

inline term subst(const term& t, const binding& b) { return t.is_variable() ? b.at(t.text()) : t; }

/// Re-runs every rule (and the schema axioms) over the full fact set until
/// nothing changes. Rules are expanded by hand here, one body per disjunct.
inline std::set<triple> naive_fixpoint(std::vector<triple> initial, const std::vector<ontopred::rule>& rules,
                                       bool axioms = true) {
    std::set<triple> facts(initial.begin(), initial.end());
    auto type = core("type"), sub = core("subClassOf"), subp = core("subPropertyOf"), inv = core("inverseOf"),
         eq = core("equivalentTo");
    auto has_weakness = core("hasWeakness"), has_vulnerability = core("hasVulnerability"),
         related_to = core("relatedTo"), symmetric = core("SymmetricProperty"),
         transitive_class = core("TransitiveProperty"), occurred_at = core("occurredAt");
    while (true) {
        std::vector<triple> snapshot(facts.begin(), facts.end());
        auto groups = group_by_predicate(snapshot);
        std::set<triple> found;
        std::map<term, long long> stamps;
        for (const auto& t : snapshot)
            if (t.predicate == occurred_at && t.object.is_literal()) {
                long long v = std::stoll(std::string(t.object.text()));
                auto [it, fresh] = stamps.emplace(t.subject, v);
                if (!fresh) it->second = std::min(it->second, v);
            }
        auto add = [&](const term& s, const term& p, const term& o) {
            if (!s.is_resource() || !p.is_resource()) return;
            triple t(s, p, o);
            if (!facts.count(t)) found.insert(t);
        };
        if (axioms) {
            // pair every fact with the schema facts only; still plain scans
            std::vector<triple> schema, transitive_facts;
            std::set<term> transitive;
            for (const auto& b : snapshot) {
                if (b.predicate == sub || b.predicate == subp || b.predicate == inv || b.predicate == eq ||
                    (b.predicate == type && b.object == symmetric))
                    schema.push_back(b);
                if (b.predicate == type && b.object == transitive_class) transitive.insert(b.subject);
            }
            for (const auto& a : snapshot)
                if (transitive.count(a.predicate)) transitive_facts.push_back(a);
            for (const auto& a : snapshot) {
                for (const auto& b : schema) {
                    if (a.predicate == type && b.predicate == sub && b.subject == a.object) add(a.subject, type, b.object);
                    if (b.predicate == subp && b.subject == a.predicate) add(a.subject, b.object, a.object);
                    if (b.predicate == inv && b.subject == a.predicate) add(a.object, b.object, a.subject);
                    if (b.predicate == inv && b.object == a.predicate) add(a.object, b.subject, a.subject);
                    if (b.predicate == type && b.subject == a.predicate) add(a.object, a.predicate, a.subject);
                    bool link = a.predicate == type || a.predicate == has_weakness ||
                                a.predicate == has_vulnerability || a.predicate == related_to;
                    if (link && b.predicate == eq) {
                        if (b.subject == a.subject) add(b.object, a.predicate, a.object);
                        if (b.subject == a.object) add(a.subject, a.predicate, b.object);
                    }
                }
                if (a.predicate == eq) add(a.object, eq, a.subject);
            }
            for (const auto& a : transitive_facts)
                for (const auto& b : transitive_facts)
                    if (a.predicate == b.predicate && a.object == b.subject) add(a.subject, a.predicate, b.object);
        }
        for (const auto& r : rules) {
            std::vector<std::vector<ontopred::atom>> bodies;
            if (r.body_or.empty()) {
                bodies.push_back(r.body_and);
            } else {
                for (const auto& d : r.body_or) {
                    auto body = r.body_and;
                    body.push_back(d);
                    bodies.push_back(body);
                }
            }
            for (const auto& body : bodies) {
                std::vector<triple_pattern> patterns;
                std::vector<ontopred::atom> builtins;
                for (const auto& a : body) {
                    if (a.is_builtin())
                        builtins.push_back(a);
                    else
                        patterns.push_back(a.as_pattern());
                }
                for (const auto& b : nested_loop_all(snapshot, patterns, {}, &groups)) {
                    bool ok = true;
                    for (const auto& f : builtins) {
                        auto t1 = timestamp_of(stamps, subst(f.args[0], b));
                        auto t2 = timestamp_of(stamps, subst(f.args[1], b));
                        if (!t1 || !t2 || !(*t1 < *t2)) ok = false;
                    }
                    if (!ok) continue;
                    for (const auto& h : r.head) {
                        auto tp = h.as_pattern();
                        add(subst(tp.subject, b), subst(tp.predicate, b), subst(tp.object, b));
                    }
                }
            }
        }
        if (found.empty()) return facts;
        facts.insert(found.begin(), found.end());
    }
}


// -- metrics by direct counting ---------------------------------------------

struct metric_values {
    long long classes = 0, properties = 0, subclass_links = 0, functional_or_data = 0, depth = 0;
    std::vector<std::pair<std::string, long long>> isa_rank, partof_rank;
    long long non_empty = 0, individuals = 0, components = 0;
    std::map<std::string, long long> connectivity;
    std::map<std::string, std::pair<long long, long long>> importance;  // (instances, individuals)
    std::map<std::string, ontopred::rational> richness;                 // absent: no direct individuals
    std::set<std::string> richness_undefined;
};

inline metric_values count_metrics(const std::vector<triple>& raw) {
    std::set<triple> unique(raw.begin(), raw.end());
    std::vector<triple> triples(unique.begin(), unique.end());
    const std::string type = "core:type", sub = "core:subClassOf";
    metric_values m;
    std::set<std::string> classes, object_props, data_props, functional;
    std::set<std::pair<std::string, std::string>> links;
    std::map<std::string, std::set<std::string>> domains;
    for (const auto& t : triples) {
        auto s = t.subject.str(), p = t.predicate.str(), o = t.object.str();
        if (p == type && o == "core:Class") classes.insert(s);
        if (p == sub) {
            classes.insert(s);
            classes.insert(o);
            links.insert({s, o});
        }
        if (p == type && o == "core:ObjectProperty") object_props.insert(s);
        if (p == type && o == "core:DatatypeProperty") data_props.insert(s);
        if (p == type && o == "core:FunctionalProperty") functional.insert(s);
        if (p == "core:domain") domains[s].insert(o);
    }
    std::set<std::string> props(object_props);
    props.insert(data_props.begin(), data_props.end());
    m.classes = (long long)classes.size();
    m.properties = (long long)props.size();
    m.subclass_links = (long long)links.size();
    for (const auto& p : props)
        if (data_props.count(p) || functional.count(p)) ++m.functional_or_data;
    std::vector<std::pair<std::string, std::string>> edges(links.begin(), links.end());
    m.depth = (long long)longest_chain(edges);

    auto rank = [](std::map<std::string, long long> counts) {
        std::vector<std::pair<std::string, long long>> out;
        for (auto& [c, n] : counts)
            if (n > 0) out.emplace_back(c, n);
        // insertion sort: larger count first, name order kept among equals
        for (std::size_t i = 1; i < out.size(); ++i)
            for (std::size_t j = i; j > 0 && out[j - 1].second < out[j].second; --j) std::swap(out[j - 1], out[j]);
        return out;
    };
    std::map<std::string, long long> fan;
    for (const auto& [child, parent] : links) ++fan[parent];
    m.isa_rank = rank(fan);

    std::map<std::string, std::set<std::string>> typed;  // individual -> classes
    for (const auto& t : triples)
        if (t.predicate.str() == type && classes.count(t.object.str())) typed[t.subject.str()].insert(t.object.str());

    std::map<std::string, long long> partof;
    for (const auto& t : triples) {
        if (t.predicate.str() != "core:partOf") continue;
        for (const auto& x : {t.subject.str(), t.object.str()}) {
            if (classes.count(x))
                ++partof[x];
            else if (typed.count(x))
                for (const auto& c : typed[x]) ++partof[c];
        }
    }
    m.partof_rank = rank(partof);

    m.individuals = (long long)typed.size();
    std::set<std::string> non_empty;
    for (const auto& [i, cs] : typed) non_empty.insert(cs.begin(), cs.end());
    m.non_empty = (long long)non_empty.size();

    std::vector<triple> ind_links;
    for (const auto& t : triples)
        if (object_props.count(t.predicate.str()) && !data_props.count(t.predicate.str()) &&
            typed.count(t.subject.str()) && typed.count(t.object.str()))
            ind_links.push_back(t);
    for (const auto& c : non_empty) {
        long long n = 0;
        for (const auto& t : ind_links) {
            bool s_in = typed[t.subject.str()].count(c) > 0, o_in = typed[t.object.str()].count(c) > 0;
            if (s_in != o_in) ++n;
        }
        m.connectivity[c] = n;
    }

    // importance counts instances of the class or any descendant
    for (const auto& c : classes) {
        auto desc = closure_dfs(edges, c);
        long long n = 0;
        for (const auto& [i, cs] : typed)
            for (const auto& d : cs)
                if (desc.count(d)) {
                    ++n;
                    break;
                }
        if (n > 0) m.importance[c] = {n, m.individuals};
    }

    // components by repeated flooding
    std::set<std::string> unvisited;
    for (const auto& [i, cs] : typed) unvisited.insert(i);
    while (!unvisited.empty()) {
        ++m.components;
        std::vector<std::string> frontier{*unvisited.begin()};
        unvisited.erase(unvisited.begin());
        while (!frontier.empty()) {
            auto x = frontier.back();
            frontier.pop_back();
            for (const auto& t : ind_links) {
                std::string other;
                if (t.subject.str() == x) other = t.object.str();
                if (t.object.str() == x) other = t.subject.str();
                if (!other.empty() && unvisited.erase(other)) frontier.push_back(other);
            }
        }
    }

    for (const auto& c : non_empty) {
        // ancestors: classes whose descendant set contains c
        std::set<std::string> applicable;
        for (const auto& p : object_props) {
            if (data_props.count(p)) continue;
            for (const auto& d : domains[p])
                if (closure_dfs(edges, d).count(c)) applicable.insert(p);
        }
        if (applicable.empty()) {
            m.richness_undefined.insert(c);
            continue;
        }
        long long num = 0, den = 0;
        for (const auto& [i, cs] : typed) {
            if (!cs.count(c)) continue;
            long long used = 0;
            for (const auto& p : applicable) {
                bool any = false;
                for (const auto& t : triples)
                    if (t.subject.str() == i && t.predicate.str() == p) any = true;
                used += any;
            }
            num += used;
            den += (long long)applicable.size();
        }
        m.richness[c] = ontopred::rational(num, den);
    }
    return m;
}

} // namespace oracle
