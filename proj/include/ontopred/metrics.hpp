#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontopred/error.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/rational.hpp"

namespace ontopred {

using rank_list = std::vector<std::pair<term, std::int64_t>>;

struct metrics_report {
    // ontology level
    rational object_properties_richness;  // |P| / (|P| + |H|)
    rational inheritance_richness;        // |H| / |C|
    rational data_properties_richness;    // (functional object + data properties) / |C|
    std::int64_t class_count = 0;
    rational medium_po;                   // |P| / |C|
    std::int64_t isa_depth = 0;
    rank_list isa_fanout_rank;
    rank_list partof_fanout_rank;

    // knowledge-base level
    rational class_richness;
    std::map<term, std::int64_t> class_connectivity;
    std::map<term, rational> class_importance;
    std::int64_t individual_graph_components = 0;
    std::map<term, rational> kb_object_properties_richness;
};

namespace detail {

inline rational ratio(std::int64_t num, std::int64_t den) { return den == 0 ? rational::undefined_value() : rational(num, den); }

/// Sorted by count descending, then by class.
inline rank_list ranked(const std::map<term, std::int64_t>& counts) {
    rank_list out;
    for (const auto& [c, n] : counts)
        if (n > 0) out.emplace_back(c, n);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

struct kb_view {
    std::set<term> classes;
    std::set<term> object_properties;
    std::set<term> individuals;
    std::map<term, std::set<term>> types;  // individual -> classes it is typed by
    std::vector<triple> links;             // object-property triples between individuals
};

inline kb_view view_of(const knowledge_base& kb) {
    kb_view v;
    v.classes = kb.classes();
    for (const auto& [p, d] : kb.properties())
        if (d.kind == property_kind::object) v.object_properties.insert(p);
    v.individuals = kb.individuals();
    for (const auto& b : kb.match({term::variable("i"), vocab::type, term::variable("c")})) {
        const auto& i = b.at("?i");
        const auto& c = b.at("?c");
        if (v.classes.count(c)) v.types[i].insert(c);
    }
    for (const auto& p : v.object_properties)
        for (const auto& b : kb.match({term::variable("s"), p, term::variable("o")})) {
            const auto& s = b.at("?s");
            const auto& o = b.at("?o");
            if (v.individuals.count(s) && v.individuals.count(o)) v.links.emplace_back(s, p, o);
        }
    return v;
}

} // namespace detail

/// Schema-level metrics plus the hierarchy extras. Needs at least one class.
inline metrics_report compute_ontology_metrics(const knowledge_base& kb) {
    auto classes = kb.classes();
    if (classes.empty()) throw error(errc::empty_ontology, "no classes to measure");
    metrics_report r;
    std::int64_t C = std::int64_t(classes.size()), P = 0, functional_or_data = 0;
    for (const auto& [p, d] : kb.properties()) {
        if (d.kind == property_kind::object || d.kind == property_kind::data) ++P;
        if (d.kind == property_kind::data || (d.kind == property_kind::object && d.functional)) ++functional_or_data;
    }
    std::int64_t H = std::int64_t(kb.hierarchy_edge_count());
    r.object_properties_richness = detail::ratio(P, P + H);
    r.inheritance_richness = detail::ratio(H, C);
    r.data_properties_richness = detail::ratio(functional_or_data, C);
    r.class_count = C;
    r.medium_po = detail::ratio(P, C);
    r.isa_depth = std::int64_t(kb.hierarchy_depth());

    std::map<term, std::int64_t> fanout;
    for (const auto& c : classes) fanout[c] = std::int64_t(kb.direct_subclasses(c).size());
    r.isa_fanout_rank = detail::ranked(fanout);

    // a part-of link touches its endpoints if they are classes, otherwise the
    // classes they are typed by
    std::map<term, std::int64_t> partof;
    auto touch = [&](const term& x) {
        if (classes.count(x)) {
            ++partof[x];
            return;
        }
        for (const auto& b : kb.match({x, vocab::type, term::variable("c")}))
            if (classes.count(b.at("?c"))) ++partof[b.at("?c")];
    };
    for (const auto& b : kb.match({term::variable("x"), vocab::part_of, term::variable("y")})) {
        touch(b.at("?x"));
        touch(b.at("?y"));
    }
    r.partof_fanout_rank = detail::ranked(partof);
    return r;
}

/// Individual-level metrics. Classes may be empty of individuals.
inline void compute_kb_metrics(const knowledge_base& kb, metrics_report& r) {
    auto v = detail::view_of(kb);
    std::int64_t C = std::int64_t(v.classes.size()), N = std::int64_t(v.individuals.size());

    std::set<term> non_empty;
    for (const auto& [i, cs] : v.types) non_empty.insert(cs.begin(), cs.end());
    r.class_richness = detail::ratio(std::int64_t(non_empty.size()), C);

    // per-class maps only list classes that have individuals
    r.class_connectivity.clear();
    for (const auto& c : non_empty) r.class_connectivity[c] = 0;
    auto typed = [&](const term& i, const term& c) {
        auto it = v.types.find(i);
        return it != v.types.end() && it->second.count(c);
    };
    for (const auto& t : v.links) {
        std::set<term> touched;
        for (const auto& c : v.types[t.subject])
            if (!typed(t.object, c)) touched.insert(c);
        for (const auto& c : v.types[t.object])
            if (!typed(t.subject, c)) touched.insert(c);
        for (const auto& c : touched) ++r.class_connectivity[c];
    }

    r.class_importance.clear();
    for (const auto& c : v.classes)
        if (auto n = std::int64_t(kb.instances_of(c, true).size()); n > 0) r.class_importance[c] = rational(n, N);

    // union-find over individuals
    std::map<term, term> parent;
    for (const auto& i : v.individuals) parent.emplace(i, i);
    std::function<term(const term&)> root = [&](const term& x) -> term {
        auto& p = parent.at(x);
        if (p == x) return x;
        p = root(p);
        return p;
    };
    std::int64_t components = N;
    for (const auto& t : v.links) {
        auto a = root(t.subject), b = root(t.object);
        if (a != b) {
            parent.at(a) = b;
            --components;
        }
    }
    r.individual_graph_components = components;

    // properties applicable to a class: those whose domain is the class or an ancestor
    r.kb_object_properties_richness.clear();
    std::map<term, std::set<term>> used;  // individual -> object properties it uses as subject
    for (const auto& p : v.object_properties)
        for (const auto& b : kb.match({term::variable("s"), p, term::variable("o")})) used[b.at("?s")].insert(p);
    std::map<term, std::vector<term>> members;
    for (const auto& [i, cs] : v.types)
        for (const auto& c : cs) members[c].push_back(i);
    for (const auto& [c, inds] : members) {
        auto ancestors = kb.superclass_closure(c);
        std::set<term> applicable;
        for (const auto& p : v.object_properties) {
            const auto* d = kb.property(p);
            for (const auto& dom : d->domains)
                if (ancestors.count(dom)) applicable.insert(p);
        }
        if (applicable.empty()) {
            r.kb_object_properties_richness[c] = rational::undefined_value();
            continue;
        }
        rational sum(0);
        for (const auto& i : inds) {
            std::int64_t n = 0;
            for (const auto& p : used[i]) n += applicable.count(p);
            sum = sum + rational(n, std::int64_t(applicable.size()));
        }
        r.kb_object_properties_richness[c] = sum / rational(std::int64_t(inds.size()));
    }
}

inline metrics_report compute_metrics(const knowledge_base& kb) {
    auto r = compute_ontology_metrics(kb);
    compute_kb_metrics(kb, r);
    return r;
}

/// Per-individual form of kb_object_properties_richness for one class: used
/// applicable object properties over applicable ones, for each direct instance.
inline std::map<term, rational> individual_property_richness(const knowledge_base& kb, const term& cls) {
    auto ancestors = kb.superclass_closure(cls);
    std::set<term> applicable;
    for (const auto& [p, d] : kb.properties())
        if (d.kind == property_kind::object)
            for (const auto& dom : d.domains)
                if (ancestors.count(dom)) applicable.insert(p);
    std::map<term, rational> out;
    for (const auto& i : kb.instances_of(cls, false)) {
        std::int64_t used = 0;
        for (const auto& p : applicable)
            if (!kb.match({i, p, term::variable("o")}).empty()) ++used;
        out[i] = detail::ratio(used, std::int64_t(applicable.size()));
    }
    return out;
}

// -- lifecycle diffs ----------------------------------------------------------

struct rank_change {
    term cls;
    std::int64_t from = -1;  // position, -1 when absent
    std::int64_t to = -1;
};

struct rank_diff {
    std::vector<rank_change> moved;
    std::vector<term> entered;
    std::vector<term> left;
    bool empty() const { return moved.empty() && entered.empty() && left.empty(); }
};

struct metrics_diff {
    std::map<std::string, rational> scalars;                         // b - a
    std::map<std::string, std::map<term, rational>> per_class;        // b - a, absent counts as 0
    std::map<std::string, rank_diff> ranks;
};

namespace detail {

inline std::map<std::string, rational> scalars_of(const metrics_report& r) {
    return {{"object_properties_richness", r.object_properties_richness},
            {"inheritance_richness", r.inheritance_richness},
            {"data_properties_richness", r.data_properties_richness},
            {"class_count", rational(r.class_count)},
            {"medium_po", r.medium_po},
            {"isa_depth", rational(r.isa_depth)},
            {"class_richness", r.class_richness},
            {"individual_graph_components", rational(r.individual_graph_components)}};
}

inline std::map<std::string, std::map<term, rational>> per_class_of(const metrics_report& r) {
    std::map<std::string, std::map<term, rational>> out;
    for (const auto& [c, n] : r.class_connectivity) out["class_connectivity"][c] = rational(n);
    out["class_importance"] = r.class_importance;
    out["kb_object_properties_richness"] = r.kb_object_properties_richness;
    return out;
}

inline rank_diff diff_ranks(const rank_list& a, const rank_list& b) {
    rank_diff d;
    std::map<term, std::int64_t> pa, pb;
    for (std::size_t i = 0; i < a.size(); ++i) pa[a[i].first] = std::int64_t(i);
    for (std::size_t i = 0; i < b.size(); ++i) pb[b[i].first] = std::int64_t(i);
    for (const auto& [c, i] : pa) {
        auto it = pb.find(c);
        if (it == pb.end())
            d.left.push_back(c);
        else if (it->second != i)
            d.moved.push_back({c, i, it->second});
    }
    for (const auto& [c, i] : pb)
        if (!pa.count(c)) d.entered.push_back(c);
    return d;
}

} // namespace detail

inline metrics_diff diff_reports(const metrics_report& a, const metrics_report& b) {
    metrics_diff d;
    auto sa = detail::scalars_of(a), sb = detail::scalars_of(b);
    for (const auto& [name, value] : sb) d.scalars[name] = value - sa.at(name);
    auto ca = detail::per_class_of(a), cb = detail::per_class_of(b);
    for (const auto& name : {"class_connectivity", "class_importance", "kb_object_properties_richness"}) {
        auto& out = d.per_class[name];
        for (const auto& [c, v] : ca[name]) out[c] = rational(0) - v;
        for (const auto& [c, v] : cb[name]) out[c] = out.count(c) ? out[c] + v : v;
    }
    d.ranks["isa_fanout_rank"] = detail::diff_ranks(a.isa_fanout_rank, b.isa_fanout_rank);
    d.ranks["partof_fanout_rank"] = detail::diff_ranks(a.partof_fanout_rank, b.partof_fanout_rank);
    return d;
}

// -- serialization -----------------------------------------------------------

inline nlohmann::ordered_json to_json(const rational& r) {
    return {{"num", r.num()}, {"den", r.den()}, {"undefined", r.undefined()}};
}

inline nlohmann::ordered_json to_json(const rank_list& ranks) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& [c, n] : ranks) out.push_back({c.str(), n});
    return out;
}

inline nlohmann::ordered_json to_json(const metrics_report& r) {
    using nlohmann::ordered_json;
    ordered_json onto;
    onto["object_properties_richness"] = to_json(r.object_properties_richness);
    onto["inheritance_richness"] = to_json(r.inheritance_richness);
    onto["data_properties_richness"] = to_json(r.data_properties_richness);
    onto["class_count"] = r.class_count;
    onto["medium_po"] = to_json(r.medium_po);
    onto["isa_depth"] = r.isa_depth;
    onto["isa_fanout_rank"] = to_json(r.isa_fanout_rank);
    onto["partof_fanout_rank"] = to_json(r.partof_fanout_rank);

    ordered_json kbj;
    kbj["class_richness"] = to_json(r.class_richness);
    ordered_json conn = ordered_json::object(), imp = ordered_json::object(), rich = ordered_json::object();
    for (const auto& [c, n] : r.class_connectivity) conn[c.str()] = n;
    for (const auto& [c, v] : r.class_importance) imp[c.str()] = to_json(v);
    for (const auto& [c, v] : r.kb_object_properties_richness) rich[c.str()] = to_json(v);
    kbj["class_connectivity"] = std::move(conn);
    kbj["class_importance"] = std::move(imp);
    kbj["individual_graph_components"] = r.individual_graph_components;
    kbj["kb_object_properties_richness"] = std::move(rich);

    ordered_json out;
    out["ontology"] = std::move(onto);
    out["kb"] = std::move(kbj);
    return out;
}

inline nlohmann::ordered_json to_json(const metrics_diff& d) {
    using nlohmann::ordered_json;
    ordered_json out, scalars = ordered_json::object(), per_class = ordered_json::object(), ranks = ordered_json::object();
    for (const auto& [name, v] : d.scalars) scalars[name] = to_json(v);
    for (const auto& [name, m] : d.per_class) {
        ordered_json j = ordered_json::object();
        for (const auto& [c, v] : m)
            if (v != rational(0)) j[c.str()] = to_json(v);
        per_class[name] = std::move(j);
    }
    for (const auto& [name, rd] : d.ranks) {
        ordered_json moved = ordered_json::array(), entered = ordered_json::array(), left = ordered_json::array();
        for (const auto& m : rd.moved) moved.push_back({m.cls.str(), m.from, m.to});
        for (const auto& c : rd.entered) entered.push_back(c.str());
        for (const auto& c : rd.left) left.push_back(c.str());
        ranks[name] = {{"moved", moved}, {"entered", entered}, {"left", left}};
    }
    out["scalars"] = std::move(scalars);
    out["per_class"] = std::move(per_class);
    out["ranks"] = std::move(ranks);
    return out;
}

} // namespace ontopred
