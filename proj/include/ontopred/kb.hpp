#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ontopred/error.hpp"
#include "ontopred/term.hpp"
#include "ontopred/triple_index.hpp"
#include "ontopred/vocabulary.hpp"

namespace ontopred {

/// Variable name (with its '?') to value.
using binding = std::map<std::string, term>;

enum class property_kind { object, data };

struct property_decl {
    term name;
    std::optional<property_kind> kind;  // unset until declared Object/DatatypeProperty
    bool functional = false;
    bool transitive = false;
    bool symmetric = false;
    std::optional<term> inverse;
    std::set<term> super_properties;
    std::set<term> domains;

    bool declared() const { return kind.has_value(); }
};

/// Triple store holding the ontology (classes, class hierarchy, properties
/// with their hierarchy, individuals) together with all asserted and derived
/// facts. Schema structures are kept in sync with the triples that declare
/// them, so the triples remain the single source of truth.
///
/// Single writer; concurrent reads are fine once mutation stops.
class knowledge_base {
public:
    knowledge_base() = default;

    /// Adds `t`. Returns true iff it was not present before.
    bool assert_triple(const triple& t) {
        auto id = intern(t);
        if (index_.contains(id)) {
            derived_.erase(id);
            return false;
        }
        check_assertable(t);
        index_.insert(id);
        on_schema_triple(id);
        return true;
    }

    /// Throws the error assert_triple would raise, without mutating.
    void check_assertable(const triple& t) const {
        const term& p = t.predicate;
        if (!vocab::is_core_predicate(p) && !is_declared_property(p))
            throw error(errc::undeclared_predicate, "predicate " + p.str() + " is neither core nor declared (in " +
                                                        t.str() + ")");
        if ((p == vocab::type || p == vocab::sub_class_of || p == vocab::sub_property_of ||
             p == vocab::inverse_of || p == vocab::domain || p == vocab::equivalent_to) &&
            !t.object.is_resource())
            throw error(errc::malformed_term, p.str() + " needs a resource object (in " + t.str() + ")");
        if (p == vocab::sub_class_of) {
            if (t.subject == t.object)
                throw error(errc::cycle_detected, "class " + t.subject.str() + " cannot be its own subclass");
            auto child = dict_.find(t.subject);
            auto parent = dict_.find(t.object);
            if (child && parent && reaches_up(*parent, *child))
                throw error(errc::cycle_detected, "subClassOf " + t.subject.str() + " -> " + t.object.str() +
                                                      " would close a cycle in the class hierarchy");
        }
    }

    bool contains(const triple& t) const {
        auto s = dict_.find(t.subject), p = dict_.find(t.predicate), o = dict_.find(t.object);
        return s && p && o && index_.contains({*s, *p, *o});
    }

    std::size_t size() const noexcept { return index_.size(); }
    bool empty() const noexcept { return index_.empty(); }

    /// Bindings under which `pattern` is a stored triple. At most two
    /// positions may be variables.
    std::set<binding> match(const triple_pattern& pattern, index_kind via = index_kind::automatic) const {
        if (pattern.variable_count() > 2)
            throw error(errc::too_many_variables, "pattern '" + pattern.str() + "' has three variables; at most two are allowed");
        std::set<binding> out;
        const term* parts[3] = {&pattern.subject, &pattern.predicate, &pattern.object};
        term_id ids[3];
        for (int i = 0; i < 3; ++i) {
            if (parts[i]->is_variable()) {
                ids[i] = no_term;
            } else {
                auto id = dict_.find(*parts[i]);
                if (!id) return out;
                ids[i] = *id;
            }
        }
        index_.scan(
            ids[0], ids[1], ids[2],
            [&](const id_triple& t) {
                term_id vals[3] = {t.s, t.p, t.o};
                binding b;
                for (int i = 0; i < 3; ++i) {
                    if (!parts[i]->is_variable()) continue;
                    const term& value = dict_.at(vals[i]);
                    auto [it, fresh] = b.emplace(parts[i]->text(), value);
                    if (!fresh && it->second != value) return;
                }
                out.insert(std::move(b));
            },
            via);
        return out;
    }

    // -- ontology view -----------------------------------------------------

    std::set<term> classes() const { return to_terms(classes_); }
    bool is_class(const term& c) const {
        auto id = dict_.find(c);
        return id && classes_.count(*id);
    }

    /// (child, parent) pairs of the class hierarchy.
    std::vector<std::pair<term, term>> class_hierarchy() const {
        std::vector<std::pair<term, term>> out;
        for (const auto& [child, parents] : parents_)
            for (term_id parent : parents) out.emplace_back(dict_.at(child), dict_.at(parent));
        std::sort(out.begin(), out.end());
        return out;
    }
    std::size_t hierarchy_edge_count() const noexcept { return hierarchy_edges_; }

    std::set<term> direct_subclasses(const term& c) const {
        std::set<term> out;
        if (auto id = dict_.find(c))
            if (auto it = children_.find(*id); it != children_.end()) out = to_terms(it->second);
        return out;
    }
    std::set<term> direct_superclasses(const term& c) const {
        std::set<term> out;
        if (auto id = dict_.find(c))
            if (auto it = parents_.find(*id); it != parents_.end()) out = to_terms(it->second);
        return out;
    }

    /// `c` and all of its descendants.
    std::set<term> subclass_closure(const term& c) const {
        auto id = require_class(c);
        std::set<term> out;
        for (term_id d : closure_ids(id)) out.insert(dict_.at(d));
        return out;
    }

    /// `c` and all of its ancestors.
    std::set<term> superclass_closure(const term& c) const {
        auto id = require_class(c);
        std::unordered_set<term_id> seen{id};
        std::vector<term_id> stack{id};
        while (!stack.empty()) {
            term_id cur = stack.back();
            stack.pop_back();
            if (auto it = parents_.find(cur); it != parents_.end())
                for (term_id p : it->second)
                    if (seen.insert(p).second) stack.push_back(p);
        }
        return to_terms(seen);
    }

    std::set<term> instances_of(const term& c, bool inherited) const {
        auto id = require_class(c);
        std::set<term> out;
        auto type_id = dict_.find(vocab::type);
        if (!type_id) return out;
        std::vector<term_id> targets = inherited ? closure_ids(id) : std::vector<term_id>{id};
        for (term_id cls : targets)
            index_.scan(no_term, *type_id, cls, [&](const id_triple& t) { out.insert(dict_.at(t.s)); });
        return out;
    }

    /// Edge count of the longest subClassOf chain.
    std::size_t hierarchy_depth() const {
        std::unordered_map<term_id, std::size_t> memo;
        std::function<std::size_t(term_id)> down = [&](term_id c) -> std::size_t {
            if (auto it = memo.find(c); it != memo.end()) return it->second;
            std::size_t best = 0;
            if (auto it = children_.find(c); it != children_.end())
                for (term_id child : it->second) best = std::max(best, down(child) + 1);
            memo[c] = best;
            return best;
        };
        std::size_t depth = 0;
        for (term_id c : classes_) depth = std::max(depth, down(c));
        return depth;
    }

    /// Resources typed by a (non-meta) class.
    std::set<term> individuals() const {
        std::set<term> out;
        auto type_id = dict_.find(vocab::type);
        if (!type_id) return out;
        index_.scan(no_term, *type_id, no_term, [&](const id_triple& t) {
            if (classes_.count(t.o)) out.insert(dict_.at(t.s));
        });
        return out;
    }

    const std::map<term, property_decl>& properties() const noexcept { return properties_; }
    bool is_declared_property(const term& p) const {
        auto it = properties_.find(p);
        return it != properties_.end() && it->second.declared();
    }
    const property_decl* property(const term& p) const {
        auto it = properties_.find(p);
        return it == properties_.end() ? nullptr : &it->second;
    }

    // -- provenance and retraction ----------------------------------------

    /// Marks an event-derived triple as removable by retract().
    void mark_retractable(const triple& t) {
        if (auto id = find_ids(t); id && !is_schema_predicate(id->p)) retractable_.insert(*id);
    }
    bool is_retractable(const triple& t) const {
        auto id = find_ids(t);
        return id && retractable_.count(*id);
    }

    /// Removes a retractable triple. Inferred consequences of it are left in
    /// place; the store is monotonic apart from this.
    bool retract(const triple& t) {
        auto id = find_ids(t);
        if (!id || !index_.contains(*id)) return false;
        if (!retractable_.count(*id))
            throw error(errc::not_retractable, t.str() + " was not asserted from an event");
        retractable_.erase(*id);
        derived_.erase(*id);
        provenance_.erase(*id);
        return index_.erase(*id);
    }

    /// True when the triple exists only because the reasoner derived it.
    bool is_derived(const triple& t) const {
        auto id = find_ids(t);
        return id && derived_.count(*id);
    }
    bool is_asserted(const triple& t) const {
        auto id = find_ids(t);
        return id && index_.contains(*id) && !derived_.count(*id);
    }

    /// Names of the rules that produced `t` (empty for purely asserted facts).
    std::set<std::string> provenance(const triple& t) const {
        auto id = find_ids(t);
        if (!id) return {};
        auto it = provenance_.find(*id);
        return it == provenance_.end() ? std::set<std::string>{} : it->second;
    }

    /// All triples, sorted by their serialized line.
    std::vector<triple> triples() const {
        std::vector<std::pair<std::string, triple>> lines;
        lines.reserve(index_.size());
        for (const auto& t : index_.all()) {
            triple tr = to_triple(t);
            lines.emplace_back(tr.str(), std::move(tr));
        }
        std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<triple> out;
        out.reserve(lines.size());
        for (auto& [line, tr] : lines) out.push_back(std::move(tr));
        return out;
    }

    // -- id-level access for the reasoner and query engine ----------------

    const dictionary& dict() const noexcept { return dict_; }
    term_id intern(const term& t) { return dict_.intern(t); }
    id_triple intern(const triple& t) {
        return {dict_.intern(t.subject), dict_.intern(t.predicate), dict_.intern(t.object)};
    }
    std::optional<id_triple> find_ids(const triple& t) const {
        auto s = dict_.find(t.subject), p = dict_.find(t.predicate), o = dict_.find(t.object);
        if (!s || !p || !o) return std::nullopt;
        return id_triple{*s, *p, *o};
    }
    triple to_triple(const id_triple& t) const { return triple(dict_.at(t.s), dict_.at(t.p), dict_.at(t.o)); }
    const triple_index& index() const noexcept { return index_; }

    /// Adds a reasoner-derived triple; same checks as assert_triple.
    bool assert_derived(const id_triple& id) {
        if (index_.contains(id)) return false;
        check_assertable(to_triple(id));
        index_.insert(id);
        derived_.insert(id);
        on_schema_triple(id);
        return true;
    }

    void add_provenance(const id_triple& id, const std::string& rule) { provenance_[id].insert(rule); }

private:
    bool is_schema_predicate(term_id p) const {
        const term& pt = dict_.at(p);
        if (pt == vocab::sub_class_of || pt == vocab::sub_property_of || pt == vocab::inverse_of ||
            pt == vocab::domain)
            return true;
        return false;
    }

    term_id require_class(const term& c) const {
        auto id = dict_.find(c);
        if (!id || !classes_.count(*id)) throw error(errc::unknown_class, c.str() + " is not a class");
        return *id;
    }

    std::vector<term_id> closure_ids(term_id root) const {
        std::vector<term_id> out{root};
        std::unordered_set<term_id> seen{root};
        for (std::size_t i = 0; i < out.size(); ++i)
            if (auto it = children_.find(out[i]); it != children_.end())
                for (term_id c : it->second)
                    if (seen.insert(c).second) out.push_back(c);
        return out;
    }

    /// Is `target` reachable from `from` by following parent links?
    bool reaches_up(term_id from, term_id target) const {
        std::vector<term_id> stack{from};
        std::unordered_set<term_id> seen{from};
        while (!stack.empty()) {
            term_id cur = stack.back();
            stack.pop_back();
            if (cur == target) return true;
            if (auto it = parents_.find(cur); it != parents_.end())
                for (term_id p : it->second)
                    if (seen.insert(p).second) stack.push_back(p);
        }
        return false;
    }

    template <typename Set>
    std::set<term> to_terms(const Set& ids) const {
        std::set<term> out;
        for (term_id id : ids) out.insert(dict_.at(id));
        return out;
    }

    property_decl& decl(term_id p) {
        const term& name = dict_.at(p);
        auto [it, fresh] = properties_.try_emplace(name);
        if (fresh) it->second.name = name;
        return it->second;
    }

    void on_schema_triple(const id_triple& t) {
        const term& p = dict_.at(t.p);
        const term& o = dict_.at(t.o);
        if (p == vocab::type) {
            if (o == vocab::class_) {
                classes_.insert(t.s);
            } else if (o == vocab::object_property) {
                decl(t.s).kind = property_kind::object;
            } else if (o == vocab::datatype_property) {
                decl(t.s).kind = property_kind::data;
            } else if (o == vocab::functional_property) {
                decl(t.s).functional = true;
            } else if (o == vocab::transitive_property) {
                decl(t.s).transitive = true;
            } else if (o == vocab::symmetric_property) {
                decl(t.s).symmetric = true;
            }
        } else if (p == vocab::sub_class_of) {
            classes_.insert(t.s);
            classes_.insert(t.o);
            if (parents_[t.s].insert(t.o).second) ++hierarchy_edges_;
            children_[t.o].insert(t.s);
        } else if (p == vocab::sub_property_of) {
            decl(t.s).super_properties.insert(o);
        } else if (p == vocab::inverse_of) {
            decl(t.s).inverse = o;
        } else if (p == vocab::domain) {
            decl(t.s).domains.insert(o);
        }
    }

    dictionary dict_;
    triple_index index_;
    std::unordered_set<term_id> classes_;
    std::unordered_map<term_id, std::set<term_id>> parents_;
    std::unordered_map<term_id, std::set<term_id>> children_;
    std::size_t hierarchy_edges_ = 0;
    std::map<term, property_decl> properties_;
    std::unordered_set<id_triple, id_triple_hash> retractable_;
    std::unordered_set<id_triple, id_triple_hash> derived_;
    std::unordered_map<id_triple, std::set<std::string>, id_triple_hash> provenance_;
};

} // namespace ontopred
