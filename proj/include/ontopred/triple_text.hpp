#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ontopred/kb.hpp"

// Line-oriented triple format: `<subject> <predicate> <object> .` with
// resources as prefix:Local and literals as "value"^^datatype. Blank lines and
// `#` comment lines are accepted on input; export emits neither.
namespace ontopred {

inline std::vector<triple> parse_triple_text(std::string_view text) {
    std::vector<triple> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;

        std::size_t pos = 0;
        lex::skip_space(line, pos);
        if (pos >= line.size() || line[pos] == '#') {
            if (end == text.size()) break;
            continue;
        }
        auto fail = [&](const std::string& why) {
            throw error(errc::parse_error, "line " + std::to_string(line_no) + ": " + why);
        };
        term parts[3];
        try {
            for (auto& part : parts) {
                lex::skip_space(line, pos);
                part = lex::read_term(line, pos, {});
            }
        } catch (const error& e) {
            fail(e.detail());
        }
        for (const auto& part : parts)
            if (part.is_variable()) fail("variables are not allowed in asserted triples");
        lex::skip_space(line, pos);
        if (pos >= line.size() || line[pos] != '.') fail("expected ' .' at end of triple");
        ++pos;
        lex::skip_space(line, pos);
        if (pos != line.size()) fail("trailing characters after ' .'");
        try {
            out.emplace_back(parts[0], parts[1], parts[2]);
        } catch (const error& e) {
            fail(e.detail());
        }
        if (end == text.size()) break;
    }
    return out;
}

namespace detail {

inline bool is_declaration(const triple& t) {
    if (t.predicate == vocab::type) return vocab::is_meta_class(t.object);
    return t.predicate == vocab::sub_property_of || t.predicate == vocab::inverse_of ||
           t.predicate == vocab::domain;
}

} // namespace detail

/// Asserts every triple of `text` into `kb`, declarations first so files
/// sorted by line still load. Returns the number of newly added triples.
inline std::size_t load_triples(knowledge_base& kb, const std::vector<triple>& triples) {
    std::size_t added = 0;
    for (const auto& t : triples)
        if (detail::is_declaration(t) && kb.assert_triple(t)) ++added;
    for (const auto& t : triples)
        if (!detail::is_declaration(t) && kb.assert_triple(t)) ++added;
    return added;
}

inline std::size_t load_triple_text(knowledge_base& kb, std::string_view text) {
    return load_triples(kb, parse_triple_text(text));
}

/// Sorted, LF-terminated export of every triple in `kb`.
inline std::string export_triple_text(const knowledge_base& kb) {
    std::string out;
    for (const auto& t : kb.triples()) {
        out += t.str();
        out += '\n';
    }
    return out;
}

} // namespace ontopred
