#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ontopred/error.hpp"
#include "ontopred/term.hpp"
#include "ontopred/vocabulary.hpp"

namespace ontopred {

enum class atom_kind { class_atom, property_atom, builtin };

/// `Class(t)`, `property(a, b)` or the `before(a, b)` built-in.
struct atom {
    atom_kind kind = atom_kind::class_atom;
    term predicate;          // class or property; unused for built-ins
    std::string builtin;     // built-in name
    std::vector<term> args;  // 1 for class atoms, 2 otherwise

    static atom of_class(term cls, term t) { return {atom_kind::class_atom, std::move(cls), {}, {std::move(t)}}; }
    static atom of_property(term p, term a, term b) {
        return {atom_kind::property_atom, std::move(p), {}, {std::move(a), std::move(b)}};
    }
    static atom before(term a, term b) { return {atom_kind::builtin, {}, "before", {std::move(a), std::move(b)}}; }

    bool is_builtin() const noexcept { return kind == atom_kind::builtin; }

    /// The triple pattern a class or property atom stands for.
    triple_pattern as_pattern() const {
        if (kind == atom_kind::class_atom) return {args[0], vocab::type, predicate};
        return {args[0], predicate, args[1]};
    }

    std::set<std::string> variables() const {
        std::set<std::string> out;
        for (const auto& a : args)
            if (a.is_variable()) out.insert(a.text());
        return out;
    }

    friend bool operator==(const atom&, const atom&) = default;
};

/// Horn clause with an optional single disjunction group in its body.
struct rule {
    std::string name;
    std::vector<atom> body_and;
    std::vector<atom> body_or;  // empty means no disjunction
    std::vector<atom> head;

    friend bool operator==(const rule&, const rule&) = default;
};

/// User rules plus the switch for the fixed schema axioms (subclass typing,
/// subPropertyOf, inverse, symmetric and transitive properties, equivalence).
struct rule_set {
    std::vector<rule> rules;
    bool axioms = true;

    void add(rule r) {
        for (const auto& existing : rules)
            if (existing.name == r.name) throw error(errc::parse_error, "duplicate rule name \"" + r.name + "\"");
        rules.push_back(std::move(r));
    }
    void merge(const rule_set& other) {
        for (const auto& r : other.rules) add(r);
    }
};

/// Checks range restriction (every head variable occurs in the body, counting
/// body_and plus any single disjunct), that built-ins only appear in bodies
/// with bound arguments, and that atom arguments have sensible kinds.
inline void validate(const rule& r) {
    auto unsafe = [&](const std::string& what) { throw error(errc::unsafe_rule, "rule \"" + r.name + "\": " + what); };
    if (r.head.empty()) unsafe("head is empty");
    for (const auto& a : r.head) {
        if (a.is_builtin()) unsafe("built-in " + a.builtin + " may not appear in a head");
    }
    auto check_args = [&](const atom& a) {
        if (a.is_builtin()) return;
        if (a.args[0].is_literal()) unsafe("literal " + a.args[0].str() + " cannot be a subject");
        if (!a.predicate.is_resource()) unsafe("atom predicate must be a resource");
    };
    for (const auto& a : r.body_and) check_args(a);
    for (const auto& a : r.body_or) check_args(a);
    for (const auto& a : r.head) check_args(a);
    for (const auto& a : r.body_or)
        if (a.is_builtin()) unsafe("built-ins are not allowed inside ANY { }");

    std::vector<std::set<std::string>> variants;
    std::set<std::string> base;
    for (const auto& a : r.body_and)
        if (!a.is_builtin())
            for (const auto& v : a.variables()) base.insert(v);
    if (r.body_or.empty()) {
        variants.push_back(base);
    } else {
        for (const auto& d : r.body_or) {
            auto vars = base;
            for (const auto& v : d.variables()) vars.insert(v);
            variants.push_back(std::move(vars));
        }
    }
    for (const auto& bound : variants) {
        for (const auto& a : r.head)
            for (const auto& v : a.variables())
                if (!bound.count(v)) unsafe("head variable " + v + " does not occur in the body");
        for (const auto& a : r.body_and)
            if (a.is_builtin())
                for (const auto& v : a.variables())
                    if (!bound.count(v)) unsafe("built-in argument " + v + " is never bound");
    }
}

/// One pure Horn rule per disjunct, named `<name>#<k>` (1-based).
inline std::vector<rule> expand_disjunction(const rule& r) {
    if (r.body_or.empty()) return {r};
    std::vector<rule> out;
    out.reserve(r.body_or.size());
    for (std::size_t k = 0; k < r.body_or.size(); ++k) {
        rule h;
        h.name = r.name + "#" + std::to_string(k + 1);
        h.body_and = r.body_and;
        h.body_and.push_back(r.body_or[k]);
        h.head = r.head;
        out.push_back(std::move(h));
    }
    return out;
}

// -- DSL text ---------------------------------------------------------------

namespace detail {

inline std::string dsl_term(const term& t) {
    if (t.is_resource() && t.prefix() == vocab::core_prefix) return std::string(t.local_name());
    return t.str();
}

inline std::string dsl_atom(const atom& a) {
    if (a.is_builtin()) return a.builtin + "(" + dsl_term(a.args[0]) + ", " + dsl_term(a.args[1]) + ")";
    std::string out = dsl_term(a.predicate) + "(" + dsl_term(a.args[0]);
    if (a.kind == atom_kind::property_atom) out += ", " + dsl_term(a.args[1]);
    return out + ")";
}

inline std::string join_atoms(const std::vector<atom>& atoms, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += sep;
        out += dsl_atom(atoms[i]);
    }
    return out;
}

class rule_parser {
public:
    explicit rule_parser(std::string_view text) : s_(text) {}

    rule_set parse() {
        rule_set out;
        for (skip(); pos_ < s_.size(); skip()) {
            rule r = parse_rule();
            validate(r);
            out.add(std::move(r));
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        auto [line, col] = lex::line_col(s_, pos_);
        throw error(errc::parse_error, "rules line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why);
    }

    void skip() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view peek_word() {
        skip();
        std::size_t end = pos_;
        while (end < s_.size() && (detail::is_name_char(s_[end]) || s_[end] == ':')) ++end;
        return s_.substr(pos_, end - pos_);
    }

    bool accept_word(std::string_view w) {
        if (peek_word() != w) return false;
        std::size_t after = pos_ + w.size();
        pos_ = after;
        return true;
    }

    void expect(std::string_view token) {
        skip();
        if (s_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    bool accept(std::string_view token) {
        skip();
        if (s_.substr(pos_, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }

    rule parse_rule() {
        if (!accept_word("rule")) fail("expected 'rule'");
        skip();
        if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected quoted rule name");
        auto name = lex::read_quoted(s_, pos_);
        if (!name || name->empty()) fail("bad rule name");
        rule r;
        r.name = std::move(*name);
        expect(":");
        bool saw_any = false;
        do {
            if (peek_word() == "ANY" && next_nonspace_after_word("ANY") == '{') {
                if (saw_any) fail("at most one ANY { } group per rule");
                saw_any = true;
                accept_word("ANY");
                expect("{");
                do {
                    r.body_or.push_back(parse_atom());
                } while (accept(","));
                expect("}");
            } else {
                r.body_and.push_back(parse_atom());
            }
        } while (accept_word("AND"));
        expect("=>");
        do {
            r.head.push_back(parse_atom());
        } while (accept_word("AND"));
        return r;
    }

    char next_nonspace_after_word(std::string_view w) const {
        std::size_t p = pos_ + w.size();
        while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t' || s_[p] == '\r' || s_[p] == '\n')) ++p;
        return p < s_.size() ? s_[p] : '\0';
    }

    atom parse_atom() {
        auto word = peek_word();
        if (word.empty()) fail("expected an atom");
        std::string name(word);
        pos_ += word.size();
        expect("(");
        std::vector<term> args;
        do {
            skip();
            try {
                args.push_back(lex::read_term(s_, pos_, vocab::core_prefix));
            } catch (const error& e) {
                fail(e.detail());
            }
        } while (accept(","));
        expect(")");
        if (name == "before") {
            if (args.size() != 2) fail("before takes two arguments");
            return atom::before(std::move(args[0]), std::move(args[1]));
        }
        if (name.find(':') == std::string::npos) name = std::string(vocab::core_prefix) + ":" + name;
        term pred;
        try {
            pred = term::resource(name);
        } catch (const error& e) {
            fail(e.detail());
        }
        if (args.size() == 1) return atom::of_class(std::move(pred), std::move(args[0]));
        if (args.size() == 2) return atom::of_property(std::move(pred), std::move(args[0]), std::move(args[1]));
        fail("atoms take one or two arguments");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the rule DSL:
///   rule "<name>": Atom AND Atom ... [AND ANY { Atom, Atom }] => Atom [AND Atom]
/// Bare names resolve to the core namespace; `#` starts a comment.
inline rule_set parse_rules(std::string_view text) { return detail::rule_parser(text).parse(); }

inline std::string to_dsl(const rule& r) {
    std::string out = "rule \"" + r.name + "\": " + detail::join_atoms(r.body_and, " AND ");
    if (!r.body_or.empty()) {
        if (!r.body_and.empty()) out += " AND ";
        out += "ANY { " + detail::join_atoms(r.body_or, ", ") + " }";
    }
    out += " => " + detail::join_atoms(r.head, " AND ");
    return out;
}

inline std::string to_dsl(const rule_set& rs) {
    std::string out;
    for (std::size_t i = 0; i < rs.rules.size(); ++i) {
        if (i) out += "\n";
        out += to_dsl(rs.rules[i]) + "\n";
    }
    return out;
}

} // namespace ontopred
