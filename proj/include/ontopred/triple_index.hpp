#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ontopred/term.hpp"

namespace ontopred {

using term_id = std::uint32_t;
inline constexpr term_id no_term = std::numeric_limits<term_id>::max();

/// Interns terms to dense ids. Ids are stable for the lifetime of the owner.
class dictionary {
public:
    term_id intern(const term& t) {
        if (auto it = ids_.find(t); it != ids_.end()) return it->second;
        auto id = static_cast<term_id>(terms_.size());
        terms_.push_back(t);
        ids_.emplace(t, id);
        return id;
    }

    std::optional<term_id> find(const term& t) const {
        if (auto it = ids_.find(t); it != ids_.end()) return it->second;
        return std::nullopt;
    }

    const term& at(term_id id) const { return terms_.at(id); }
    std::size_t size() const noexcept { return terms_.size(); }

private:
    std::vector<term> terms_;
    std::unordered_map<term, term_id, term_hash> ids_;
};

struct id_triple {
    term_id s = no_term;
    term_id p = no_term;
    term_id o = no_term;

    friend bool operator==(const id_triple&, const id_triple&) = default;
    friend auto operator<=>(const id_triple&, const id_triple&) = default;
};

struct id_triple_hash {
    std::size_t operator()(const id_triple& t) const noexcept {
        std::uint64_t h = t.s;
        h = h * 0x100000001b3ULL ^ t.p;
        h = h * 0x100000001b3ULL ^ t.o;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

/// Which access path a scan goes through. `automatic` picks the most
/// selective bound position.
enum class index_kind { automatic, subject, predicate, object };

/// Set of id triples with one hash index per position.
class triple_index {
public:
    bool insert(const id_triple& t) {
        if (!all_.insert(t).second) return false;
        by_s_[t.s].push_back(t);
        by_p_[t.p].push_back(t);
        by_o_[t.o].push_back(t);
        return true;
    }

    bool erase(const id_triple& t) {
        if (all_.erase(t) == 0) return false;
        drop(by_s_, t.s, t);
        drop(by_p_, t.p, t);
        drop(by_o_, t.o, t);
        return true;
    }

    bool contains(const id_triple& t) const { return all_.count(t) != 0; }
    std::size_t size() const noexcept { return all_.size(); }
    bool empty() const noexcept { return all_.empty(); }

    const std::unordered_set<id_triple, id_triple_hash>& all() const noexcept { return all_; }

    /// Calls `fn` for every triple agreeing with the bound positions
    /// (`no_term` means unbound).
    template <typename Fn>
    void scan(term_id s, term_id p, term_id o, Fn&& fn, index_kind via = index_kind::automatic) const {
        auto accept = [&](const id_triple& t) {
            return (s == no_term || t.s == s) && (p == no_term || t.p == p) && (o == no_term || t.o == o);
        };
        if (s != no_term && o != no_term && p != no_term && via == index_kind::automatic) {
            id_triple t{s, p, o};
            if (all_.count(t)) fn(t);
            return;
        }
        if (via == index_kind::automatic) {
            if (s != no_term)
                via = index_kind::subject;
            else if (o != no_term)
                via = index_kind::object;
            else if (p != no_term)
                via = index_kind::predicate;
        }
        const map_type* index = nullptr;
        term_id key = no_term;
        switch (via) {
        case index_kind::subject: index = &by_s_; key = s; break;
        case index_kind::predicate: index = &by_p_; key = p; break;
        case index_kind::object: index = &by_o_; key = o; break;
        case index_kind::automatic: break;
        }
        if (index == nullptr) {
            for (const auto& t : all_)
                if (accept(t)) fn(t);
            return;
        }
        if (key == no_term) {
            // forced through an index on an unbound position: walk every bucket
            for (const auto& [k, bucket] : *index)
                for (const auto& t : bucket)
                    if (accept(t)) fn(t);
            return;
        }
        auto it = index->find(key);
        if (it == index->end()) return;
        for (const auto& t : it->second)
            if (accept(t)) fn(t);
    }

    /// Upper bound on the matches of a scan, used for join ordering.
    std::size_t estimate(term_id s, term_id p, term_id o) const {
        std::size_t best = all_.size();
        auto bucket = [](const map_type& m, term_id k) -> std::size_t {
            auto it = m.find(k);
            return it == m.end() ? 0 : it->second.size();
        };
        if (s != no_term) best = std::min(best, bucket(by_s_, s));
        if (p != no_term) best = std::min(best, bucket(by_p_, p));
        if (o != no_term) best = std::min(best, bucket(by_o_, o));
        return best;
    }

private:
    using map_type = std::unordered_map<term_id, std::vector<id_triple>>;

    static void drop(map_type& m, term_id key, const id_triple& t) {
        auto it = m.find(key);
        if (it == m.end()) return;
        auto& v = it->second;
        v.erase(std::remove(v.begin(), v.end(), t), v.end());
        if (v.empty()) m.erase(it);
    }

    std::unordered_set<id_triple, id_triple_hash> all_;
    map_type by_s_;
    map_type by_p_;
    map_type by_o_;
};

} // namespace ontopred
