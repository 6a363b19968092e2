#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ontopred/error.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/rules.hpp"

namespace ontopred {

// -- temporal built-in ------------------------------------------------------

inline std::optional<std::int64_t> event_timestamp(const knowledge_base& kb, const term& event) {
    auto e = kb.dict().find(event);
    auto p = kb.dict().find(vocab::occurred_at);
    if (!e || !p) return std::nullopt;
    std::optional<std::int64_t> out;
    kb.index().scan(*e, *p, no_term, [&](const id_triple& t) {
        const term& lit = kb.dict().at(t.o);
        if (!lit.is_literal()) return;
        std::int64_t v = 0;
        auto text = lit.text();
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc() && ptr == text.data() + text.size()) out = out ? std::min(*out, v) : v;
    });
    return out;
}

/// Strict temporal order of two events by their occurredAt literals.
inline bool before(const knowledge_base& kb, const term& e1, const term& e2) {
    auto t1 = event_timestamp(kb, e1);
    if (!t1) throw error(errc::missing_timestamp, e1.str() + " has no occurredAt");
    auto t2 = event_timestamp(kb, e2);
    if (!t2) throw error(errc::missing_timestamp, e2.str() + " has no occurredAt");
    return *t1 < *t2;
}

namespace detail {

/// A pattern position: a constant id, or variable slot `var` (>= 0).
struct slot {
    term_id id = no_term;
    int var = -1;
    bool is_var() const noexcept { return var >= 0; }
};

struct id_pattern {
    slot s, p, o;
};

/// Conjunction of id patterns and `before` filters over numbered variables.
struct compiled_body {
    std::vector<std::string> vars;
    std::vector<id_pattern> patterns;
    std::vector<std::array<slot, 2>> befores;
    bool impossible = false;  // some constant is unknown to the store

    int var_index(const std::string& name) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return static_cast<int>(i);
        vars.push_back(name);
        return static_cast<int>(vars.size() - 1);
    }

    /// `id_of` maps a constant to its id, or no_term when unknown.
    template <typename IdOf>
    slot make_slot(const term& t, IdOf&& id_of) {
        if (t.is_variable()) return {no_term, var_index(t.text())};
        term_id id = id_of(t);
        if (id == no_term) impossible = true;
        return {id, -1};
    }

    template <typename IdOf>
    void add_pattern(const triple_pattern& tp, IdOf&& id_of) {
        id_pattern ip;
        ip.s = make_slot(tp.subject, id_of);
        ip.p = make_slot(tp.predicate, id_of);
        ip.o = make_slot(tp.object, id_of);
        patterns.push_back(ip);
    }

    template <typename IdOf>
    void add_atom(const atom& a, IdOf&& id_of) {
        if (a.is_builtin()) {
            befores.push_back({make_slot(a.args[0], id_of), make_slot(a.args[1], id_of)});
        } else {
            add_pattern(a.as_pattern(), id_of);
        }
    }
};

/// Backtracking join. Each step picks the unused pattern with the smallest
/// estimated match count under the current bindings; `before` filters run as
/// soon as both arguments are bound.
class joiner {
public:
    joiner(const knowledge_base& kb, const compiled_body& body, std::vector<const triple_index*> sources)
        : kb_(kb), body_(body), sources_(std::move(sources)), used_(body.patterns.size(), 0) {}

    template <typename Emit>
    void run(std::vector<term_id>& row, Emit&& emit) {
        if (body_.impossible) return;
        if (!filters_hold(row)) return;
        step(row, 0, emit);
    }

private:
    static term_id value(const slot& s, const std::vector<term_id>& row) { return s.is_var() ? row[s.var] : s.id; }

    template <typename Emit>
    void step(std::vector<term_id>& row, std::size_t depth, Emit& emit) {
        if (depth == body_.patterns.size()) {
            emit(static_cast<const std::vector<term_id>&>(row));
            return;
        }
        std::size_t best = body_.patterns.size();
        std::size_t best_est = 0;
        for (std::size_t i = 0; i < body_.patterns.size(); ++i) {
            if (used_[i]) continue;
            const auto& ip = body_.patterns[i];
            std::size_t est = sources_[i]->estimate(value(ip.s, row), value(ip.p, row), value(ip.o, row));
            if (best == body_.patterns.size() || est < best_est) {
                best = i;
                best_est = est;
            }
        }
        const auto& ip = body_.patterns[best];
        used_[best] = 1;
        sources_[best]->scan(value(ip.s, row), value(ip.p, row), value(ip.o, row), [&](const id_triple& t) {
            const slot* slots[3] = {&ip.s, &ip.p, &ip.o};
            term_id vals[3] = {t.s, t.p, t.o};
            int bound_here[3];
            int n = 0;
            bool ok = true;
            for (int k = 0; k < 3 && ok; ++k) {
                if (!slots[k]->is_var()) continue;
                term_id& cell = row[slots[k]->var];
                if (cell == no_term) {
                    cell = vals[k];
                    bound_here[n++] = slots[k]->var;
                } else if (cell != vals[k]) {
                    ok = false;
                }
            }
            if (ok && filters_hold(row)) step(row, depth + 1, emit);
            for (int k = 0; k < n; ++k) row[bound_here[k]] = no_term;
        });
        used_[best] = 0;
    }

    bool filters_hold(const std::vector<term_id>& row) const {
        for (const auto& f : body_.befores) {
            term_id a = value(f[0], row), b = value(f[1], row);
            if (a == no_term || b == no_term) continue;
            if (!(timestamp(a) < timestamp(b))) return false;
        }
        return true;
    }

    std::int64_t timestamp(term_id e) const {
        const term& ev = kb_.dict().at(e);
        auto ts = event_timestamp(kb_, ev);
        if (!ts) throw error(errc::missing_timestamp, ev.str() + " has no occurredAt");
        return *ts;
    }

    const knowledge_base& kb_;
    const compiled_body& body_;
    std::vector<const triple_index*> sources_;
    std::vector<char> used_;
};

/// Throws UnboundBuiltinArgument when a `before` argument is a variable no
/// pattern (and no seed) can bind.
inline void check_builtins_bound(const compiled_body& body, const std::vector<char>& seeded) {
    std::vector<char> bound = seeded;
    bound.resize(body.vars.size(), 0);
    for (const auto& ip : body.patterns)
        for (const slot* s : {&ip.s, &ip.p, &ip.o})
            if (s->is_var()) bound[s->var] = 1;
    for (const auto& f : body.befores)
        for (const auto& s : f)
            if (s.is_var() && !bound[s.var])
                throw error(errc::unbound_builtin_argument, "before() argument " + body.vars[s.var] + " is never bound");
}

} // namespace detail

/// All extensions of `seed` satisfying the conjunction `atoms` in `kb`.
inline std::set<binding> evaluate_body(const knowledge_base& kb, const std::vector<atom>& atoms,
                                       const binding& seed = {}) {
    detail::compiled_body body;
    auto id_of = [&](const term& t) { return kb.dict().find(t).value_or(no_term); };
    for (const auto& [name, value] : seed) body.var_index(name);
    for (const auto& a : atoms) body.add_atom(a, id_of);

    std::vector<term_id> row(body.vars.size(), no_term);
    std::vector<char> seeded(body.vars.size(), 0);
    std::set<binding> out;
    for (const auto& [name, value] : seed) {
        int v = body.var_index(name);
        seeded[v] = 1;
        auto id = kb.dict().find(value);
        if (!id) {
            body.impossible = true;
        } else {
            row[v] = *id;
        }
    }
    detail::check_builtins_bound(body, seeded);
    if (body.impossible) {
        // unknown values match no pattern, but an empty conjunction still holds
        if (body.patterns.empty() && body.befores.empty()) out.insert(seed);
        return out;
    }
    std::vector<const triple_index*> sources(body.patterns.size(), &kb.index());
    detail::joiner(kb, body, sources).run(row, [&](const std::vector<term_id>& r) {
        binding b;
        for (std::size_t i = 0; i < r.size(); ++i) b.emplace(body.vars[i], kb.dict().at(r[i]));
        out.insert(std::move(b));
    });
    return out;
}

} // namespace ontopred
