#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ontopred/error.hpp"
#include "ontopred/join.hpp"
#include "ontopred/kb.hpp"

namespace ontopred {

/// Conjunctive query: projected variables over an ordered list of patterns.
struct query {
    std::vector<std::string> select;  // with the leading '?'
    std::vector<triple_pattern> patterns;

    std::string str() const {
        std::string out = "SELECT";
        for (const auto& v : select) out += " " + v;
        out += " WHERE {";
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            out += i ? " . " : " ";
            out += patterns[i].str();
        }
        return out + " }";
    }

    friend bool operator==(const query&, const query&) = default;
};

struct query_result {
    std::vector<std::string> columns;
    std::vector<std::vector<term>> rows;
};

/// At most two variables per pattern; every selected variable bound.
inline void validate(const query& q) {
    std::set<std::string> bound;
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto& p = q.patterns[i];
        if (p.variable_count() > 2)
            throw error(errc::too_many_variables, "pattern " + std::to_string(i) + " '" + p.str() +
                                                      "' has three variables; at most two are allowed");
        for (const term* t : {&p.subject, &p.predicate, &p.object})
            if (t->is_variable()) bound.insert(t->text());
    }
    for (const auto& v : q.select)
        if (!bound.count(v)) throw error(errc::unbound_select, "selected variable " + v + " occurs in no pattern");
}

namespace detail {

inline bool keyword_at(std::string_view s, std::size_t pos, std::string_view kw) {
    if (s.size() - pos < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(s[pos + i])) != kw[i]) return false;
    std::size_t end = pos + kw.size();
    return end == s.size() || !detail::is_name_char(s[end]);
}

} // namespace detail

/// `SELECT ?v1 [?v2 ...] WHERE { <s> <p> <o> . ... }`. Bare names resolve to
/// the core namespace; keywords are case-insensitive.
inline query parse_query(std::string_view s) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        auto [line, col] = lex::line_col(s, pos);
        throw error(errc::parse_error, "query line " + std::to_string(line) + ", column " + std::to_string(col) +
                                           ": " + why);
    };
    query q;
    lex::skip_space(s, pos);
    if (!detail::keyword_at(s, pos, "SELECT")) fail("expected SELECT");
    pos += 6;
    while (true) {
        lex::skip_space(s, pos);
        if (pos >= s.size() || s[pos] != '?') break;
        term v;
        try {
            v = lex::read_term(s, pos, {});
        } catch (const error& e) {
            fail(e.detail());
        }
        if (std::find(q.select.begin(), q.select.end(), v.text()) == q.select.end()) q.select.push_back(v.text());
    }
    if (q.select.empty()) fail("SELECT needs at least one variable");
    if (!detail::keyword_at(s, pos, "WHERE")) fail("expected WHERE");
    pos += 5;
    lex::skip_space(s, pos);
    if (pos >= s.size() || s[pos] != '{') fail("expected '{'");
    ++pos;
    while (true) {
        lex::skip_space(s, pos);
        if (pos >= s.size()) fail("missing '}'");
        if (s[pos] == '}') {
            ++pos;
            break;
        }
        term parts[3];
        for (auto& part : parts) {
            lex::skip_space(s, pos);
            try {
                part = lex::read_term(s, pos, vocab::core_prefix);
            } catch (const error& e) {
                fail(e.detail());
            }
        }
        q.patterns.push_back({parts[0], parts[1], parts[2]});
        lex::skip_space(s, pos);
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
        } else if (pos < s.size() && s[pos] != '}') {
            fail("expected '.' or '}' after a pattern");
        }
    }
    lex::skip_space(s, pos);
    if (pos != s.size()) fail("trailing characters after '}'");
    if (q.patterns.empty()) fail("WHERE block has no patterns");
    validate(q);
    return q;
}

/// All bindings satisfying every pattern, projected on `select`, sorted by
/// the serialized values and deduplicated.
inline query_result evaluate(const knowledge_base& kb, const query& q) {
    validate(q);
    query_result out;
    out.columns = q.select;

    detail::compiled_body body;
    auto id_of = [&](const term& t) { return kb.dict().find(t).value_or(no_term); };
    for (const auto& p : q.patterns) body.add_pattern(p, id_of);
    std::vector<int> cols;
    for (const auto& v : q.select) cols.push_back(body.var_index(v));

    std::set<std::vector<std::string>> keys;
    std::vector<std::pair<std::vector<std::string>, std::vector<term_id>>> found;
    std::vector<term_id> row(body.vars.size(), no_term);
    std::vector<const triple_index*> sources(body.patterns.size(), &kb.index());
    detail::joiner(kb, body, sources).run(row, [&](const std::vector<term_id>& r) {
        std::vector<std::string> key;
        std::vector<term_id> ids;
        for (int c : cols) {
            key.push_back(kb.dict().at(r[c]).str());
            ids.push_back(r[c]);
        }
        if (keys.insert(key).second) found.emplace_back(std::move(key), std::move(ids));
    });
    std::sort(found.begin(), found.end());
    for (const auto& [key, ids] : found) {
        std::vector<term> values;
        for (term_id id : ids) values.push_back(kb.dict().at(id));
        out.rows.push_back(std::move(values));
    }
    return out;
}

inline query_result evaluate(const knowledge_base& kb, std::string_view text) { return evaluate(kb, parse_query(text)); }

// -- canonical builders -------------------------------------------------------
// Reconstructions of the three granularity levels: one node and one attack,
// one attack across all nodes, and all attacks tied to a weakness or
// vulnerability. Each pattern carries at most one variable.

namespace detail {
inline term qvar(const char* name) { return term::variable(name); }
}

/// Attack-marker individuals typed by `attack` that target `node`.
inline query q_specific_attack(const term& node, const term& attack) {
    auto m = detail::qvar("m");
    return {{"?m"}, {{m, vocab::type, attack}, {m, vocab::targets, node}}};
}

/// Every (marker, node) pair for `attack`.
inline query q_attacks_of_type(const term& attack) {
    auto m = detail::qvar("m"), n = detail::qvar("n");
    return {{"?m", "?n"}, {{m, vocab::type, attack}, {m, vocab::targets, n}}};
}

/// Attack classes linked to weakness `w`, directly or through a chain.
inline query q_by_weakness(const term& w) {
    auto a = detail::qvar("a");
    return {{"?a"}, {{a, vocab::related_to, w}, {a, vocab::catalog_kind, vocab::attack_pattern}}};
}

/// Attack classes linked to vulnerability `v`, directly or via a weakness.
inline query q_by_vulnerability(const term& v) {
    auto a = detail::qvar("a");
    return {{"?a"}, {{a, vocab::related_to, v}, {a, vocab::catalog_kind, vocab::attack_pattern}}};
}

/// Nodes currently bearing weakness `w`.
inline query q_nodes_with_weakness(const term& w) {
    auto n = detail::qvar("n");
    return {{"?n"}, {{n, vocab::has_weakness, w}}};
}

/// Nodes currently bearing vulnerability `v`.
inline query q_nodes_with_vulnerability(const term& v) {
    auto n = detail::qvar("n");
    return {{"?n"}, {{n, vocab::has_vulnerability, v}}};
}

} // namespace ontopred
