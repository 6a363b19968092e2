#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "ontopred/error.hpp"

namespace ontopred {

enum class term_kind : std::uint8_t { resource, literal, variable };

enum class datatype : std::uint8_t { string, integer, timestamp };

inline std::string_view to_string(datatype dt) {
    switch (dt) {
    case datatype::string: return "string";
    case datatype::integer: return "integer";
    case datatype::timestamp: return "timestamp";
    }
    return "string";
}

inline std::optional<datatype> parse_datatype(std::string_view name) {
    if (name == "string") return datatype::string;
    if (name == "integer") return datatype::integer;
    if (name == "timestamp") return datatype::timestamp;
    return std::nullopt;
}

namespace detail {

inline bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-' || c == '.';
}

inline bool is_integer_text(std::string_view s, bool allow_negative) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (s[0] == '-') {
        if (!allow_negative || s.size() == 1) return false;
        i = 1;
    }
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

} // namespace detail

/// A resource (`prefix:Local`), a typed literal, or a `?variable`.
class term {
public:
    term() = default;

    static term resource(std::string iri) {
        auto colon = iri.find(':');
        bool ok = !iri.empty() && colon != std::string::npos && colon > 0 && colon + 1 < iri.size() &&
                  iri.find(':', colon + 1) == std::string::npos;
        if (ok) {
            for (char c : iri)
                if (c != ':' && !detail::is_name_char(c)) ok = false;
        }
        if (!ok) throw error(errc::malformed_term, "resource '" + iri + "' is not of the form prefix:Local");
        term t;
        t.kind_ = term_kind::resource;
        t.text_ = std::move(iri);
        return t;
    }

    static term literal(std::string value, datatype dt = datatype::string) {
        if (dt == datatype::integer && !detail::is_integer_text(value, true))
            throw error(errc::malformed_term, "integer literal '" + value + "' is not a number");
        if (dt == datatype::timestamp && !detail::is_integer_text(value, false))
            throw error(errc::malformed_term, "timestamp literal '" + value + "' is not a non-negative integer");
        term t;
        t.kind_ = term_kind::literal;
        t.text_ = std::move(value);
        t.datatype_ = dt;
        return t;
    }

    static term integer(std::int64_t v) { return literal(std::to_string(v), datatype::integer); }
    static term timestamp(std::int64_t v) { return literal(std::to_string(v), datatype::timestamp); }

    /// Accepts the name with or without its leading '?'.
    static term variable(std::string_view name) {
        if (!name.empty() && name.front() == '?') name.remove_prefix(1);
        bool ok = !name.empty();
        for (char c : name)
            if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'))
                ok = false;
        if (!ok) throw error(errc::malformed_term, "bad variable name '?" + std::string(name) + "'");
        term t;
        t.kind_ = term_kind::variable;
        t.text_ = "?" + std::string(name);
        return t;
    }

    term_kind kind() const noexcept { return kind_; }
    bool is_resource() const noexcept { return kind_ == term_kind::resource; }
    bool is_literal() const noexcept { return kind_ == term_kind::literal; }
    bool is_variable() const noexcept { return kind_ == term_kind::variable; }

    /// Identifier for resources, lexical value for literals, `?name` for variables.
    const std::string& text() const noexcept { return text_; }
    datatype type() const noexcept { return datatype_; }

    std::string_view prefix() const {
        return is_resource() ? std::string_view(text_).substr(0, text_.find(':')) : std::string_view{};
    }
    std::string_view local_name() const {
        return is_resource() ? std::string_view(text_).substr(text_.find(':') + 1) : std::string_view{};
    }

    /// Serialized form used by the triple text format, queries and reports.
    std::string str() const {
        if (kind_ != term_kind::literal) return text_;
        std::string out = "\"";
        for (char c : text_) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
            }
        }
        out += "\"^^";
        out += to_string(datatype_);
        return out;
    }

    friend bool operator==(const term&, const term&) = default;
    friend std::strong_ordering operator<=>(const term& a, const term& b) {
        if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
        if (auto c = a.text_.compare(b.text_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.datatype_ <=> b.datatype_;
    }

private:
    term_kind kind_ = term_kind::resource;
    std::string text_;
    datatype datatype_ = datatype::string;
};

struct term_hash {
    std::size_t operator()(const term& t) const noexcept {
        std::size_t h = std::hash<std::string>{}(t.text());
        return h ^ (static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL) ^
               (static_cast<std::size_t>(t.type()) << 7);
    }
};

/// An asserted fact. Subject and predicate are resources; the object is a
/// resource or a literal.
struct triple {
    term subject;
    term predicate;
    term object;

    triple() = default;
    triple(term s, term p, term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
        if (!subject.is_resource())
            throw error(errc::malformed_term, "triple subject must be a resource, got " + subject.str());
        if (!predicate.is_resource())
            throw error(errc::malformed_term, "triple predicate must be a resource, got " + predicate.str());
        if (object.is_variable())
            throw error(errc::malformed_term, "triple object must not be a variable");
    }

    std::string str() const { return subject.str() + " " + predicate.str() + " " + object.str() + " ."; }

    friend bool operator==(const triple&, const triple&) = default;
    friend auto operator<=>(const triple&, const triple&) = default;
};

/// A triple whose positions may hold variables.
struct triple_pattern {
    term subject;
    term predicate;
    term object;

    int variable_count() const {
        return int(subject.is_variable()) + int(predicate.is_variable()) + int(object.is_variable());
    }

    std::string str() const { return subject.str() + " " + predicate.str() + " " + object.str(); }

    friend bool operator==(const triple_pattern&, const triple_pattern&) = default;
};

// Lexing shared by the triple text, rule and query parsers.
namespace lex {

inline void skip_space(std::string_view s, std::size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r' || s[pos] == '\n')) ++pos;
}

/// Reads a quoted literal body starting at the opening quote. Returns the
/// unescaped value, or nullopt when the closing quote is missing.
inline std::optional<std::string> read_quoted(std::string_view s, std::size_t& pos) {
    std::string value;
    ++pos;
    while (pos < s.size()) {
        char c = s[pos++];
        if (c == '"') return value;
        if (c == '\\') {
            if (pos >= s.size()) return std::nullopt;
            char e = s[pos++];
            switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case 'r': value += '\r'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: return std::nullopt;
            }
        } else {
            value += c;
        }
    }
    return std::nullopt;
}

/// Reads one term at `pos`. `default_prefix`, when non-empty, is applied to
/// bare names (`System` becomes `core:System`). Throws parse_error with a
/// message that omits the location; callers add it.
inline term read_term(std::string_view s, std::size_t& pos, std::string_view default_prefix) {
    if (pos >= s.size()) throw error(errc::parse_error, "expected a term, found end of input");
    char c = s[pos];
    if (c == '"') {
        auto value = read_quoted(s, pos);
        if (!value) throw error(errc::parse_error, "unterminated or badly escaped literal");
        datatype dt = datatype::string;
        if (s.substr(pos, 2) == "^^") {
            pos += 2;
            std::size_t start = pos;
            while (pos < s.size() && detail::is_name_char(s[pos])) ++pos;
            auto parsed = parse_datatype(s.substr(start, pos - start));
            if (!parsed) throw error(errc::parse_error, "unknown datatype '" + std::string(s.substr(start, pos - start)) + "'");
            dt = *parsed;
        }
        try {
            return term::literal(std::move(*value), dt);
        } catch (const error& e) {
            throw error(errc::parse_error, e.detail());
        }
    }
    if (c == '?') {
        std::size_t start = ++pos;
        while (pos < s.size() && (detail::is_name_char(s[pos]) && s[pos] != '-' && s[pos] != '.')) ++pos;
        if (pos == start) throw error(errc::parse_error, "empty variable name");
        return term::variable(s.substr(start, pos - start));
    }
    std::size_t start = pos;
    while (pos < s.size() && (detail::is_name_char(s[pos]) || s[pos] == ':')) ++pos;
    // a trailing '.' terminates a pattern rather than belonging to the name
    while (pos > start + 1 && s[pos - 1] == '.') --pos;
    if (pos == start) throw error(errc::parse_error, std::string("unexpected character '") + c + "'");
    std::string name(s.substr(start, pos - start));
    if (name.find(':') == std::string::npos && !default_prefix.empty()) name = std::string(default_prefix) + ":" + name;
    try {
        return term::resource(std::move(name));
    } catch (const error& e) {
        throw error(errc::parse_error, e.detail());
    }
}

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(std::string_view s, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < s.size(); ++i) {
        if (s[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace lex

} // namespace ontopred
