#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ontopred/error.hpp"
#include "ontopred/ingest.hpp"
#include "ontopred/join.hpp"
#include "ontopred/kb.hpp"
#include "ontopred/triple_text.hpp"
#include "ontopred/vocabulary.hpp"

namespace ontopred {

/// `s1` becomes `node:s1`; ids that already carry a prefix are kept.
inline term node_resource(const std::string& id) {
    return term::resource(id.find(':') == std::string::npos ? "node:" + id : id);
}

inline term event_resource(const std::string& id) {
    return term::resource(id.find(':') == std::string::npos ? "event:" + id : id);
}

/// Bare class names resolve to the core namespace.
inline term event_class_resource(const std::string& name) {
    return term::resource(name.find(':') == std::string::npos ? std::string(vocab::core_prefix) + ":" + name : name);
}

/// Data property carrying a free-form event attribute.
inline term attribute_property(const std::string& key) { return term::resource("attr:" + key); }

struct event_record {
    std::string event_id;
    std::int64_t timestamp = 0;
    std::string sensor_id;
    std::string node_id;
    term event_class;
    std::vector<std::pair<std::string, std::string>> attributes;  // sorted by key

    term resource() const { return event_resource(event_id); }
    term node() const { return node_resource(node_id); }

    friend bool operator==(const event_record&, const event_record&) = default;
};

namespace detail {

inline void check_attribute_key(const std::string& key, const std::string& where) {
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char c) { return is_name_char(c) && c != ':'; }) ||
        key.back() == '.')
        throw error(errc::parse_error, where + ": attribute key \"" + key + "\" must be a plain name");
}

inline event_record parse_event_line(std::string_view line, const std::string& where) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        std::string why = e.what();
        if (auto p = why.find("parse error"); p != std::string::npos) why = why.substr(p);
        throw error(errc::parse_error, where + ": " + why);
    }
    if (!j.is_object()) throw error(errc::parse_error, where + ": expected a JSON object");
    auto text = [&](const char* field) {
        auto it = j.find(field);
        if (it == j.end() || !it->is_string() || it->get<std::string>().empty())
            throw error(errc::parse_error, where + ": missing or non-string field '" + field + "'");
        return it->get<std::string>();
    };
    event_record e;
    e.event_id = text("event_id");
    auto ts = j.find("timestamp");
    if (ts == j.end() || !ts->is_number_integer())
        throw error(errc::parse_error, where + ": missing or non-integer field 'timestamp'");
    e.timestamp = ts->get<std::int64_t>();
    if (e.timestamp < 0) throw error(errc::parse_error, where + ": negative timestamp");
    e.sensor_id = text("sensor_id");
    e.node_id = text("node_id");
    try {
        e.event_class = event_class_resource(text("event_class"));
        (void)e.resource();
        (void)e.node();
    } catch (const error& err) {
        if (err.code() == errc::parse_error) throw;
        throw error(errc::parse_error, where + ": " + err.detail());
    }
    if (auto attrs = j.find("attributes"); attrs != j.end() && !attrs->is_null()) {
        if (!attrs->is_object()) throw error(errc::parse_error, where + ": 'attributes' must be an object");
        for (const auto& [key, value] : attrs->items()) {
            check_attribute_key(key, where);
            if (!value.is_string())
                throw error(errc::parse_error, where + ": attribute '" + key + "' must be a string");
            e.attributes.emplace_back(key, value.get<std::string>());
        }
        std::sort(e.attributes.begin(), e.attributes.end());
    }
    return e;
}

} // namespace detail

/// One JSON object per line; blank lines are skipped. Errors name the line.
inline std::vector<event_record> parse_events(std::string_view text) {
    std::vector<event_record> out;
    std::set<std::string> seen;
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        std::string where = "events line " + std::to_string(line_no);
        auto e = detail::parse_event_line(line, where);
        if (!seen.insert(e.event_id).second)
            throw error(errc::duplicate_event_id, where + ": event id " + e.event_id + " already used");
        out.push_back(std::move(e));
    }
    return out;
}

/// Triples for one event. With a KB, an event class the KB does not know is
/// replaced by core:Event and reported through `warnings`.
inline std::vector<triple> to_triples(const event_record& e, const knowledge_base* kb = nullptr,
                                      std::vector<std::string>* warnings = nullptr) {
    const term ev = e.resource(), node = e.node();
    term cls = e.event_class;
    if (kb && !kb->is_class(cls)) {
        if (warnings)
            warnings->push_back("UnknownEventClass: " + cls.str() + " (event " + e.event_id + ") stored as " +
                                vocab::event.str());
        cls = vocab::event;
    }
    std::vector<triple> out{
        {ev, vocab::type, cls},
        {ev, vocab::occurred_at, term::timestamp(e.timestamp)},
        {ev, vocab::observed_on, node},
        {ev, vocab::reported_by, term::literal(e.sensor_id)},
        {node, vocab::type, vocab::system},
    };
    for (const auto& [key, value] : e.attributes) {
        if (key == "weakness_id") {
            out.emplace_back(node, vocab::has_weakness, resource_for(catalog_kind::weakness, value));
        } else if (key == "vulnerability_id") {
            out.emplace_back(node, vocab::has_vulnerability, resource_for(catalog_kind::vulnerability, value));
        } else {
            auto p = attribute_property(key);
            out.emplace_back(p, vocab::type, vocab::datatype_property);
            out.emplace_back(ev, p, term::literal(value));
        }
    }
    return out;
}

// -- multi-step attacks ------------------------------------------------------

/// Which event class is which step of an attack's process.
struct step_registry {
    term attack;
    std::vector<std::pair<int, term>> steps;  // sorted by index

    std::optional<int> step_of(const term& event_class) const {
        for (const auto& [i, c] : steps)
            if (c == event_class) return i;
        return std::nullopt;
    }
};

/// `{"attack_id": "atk:Mitnick", "steps": [{"index": 1, "event_class": "ev:SynFlood"}, ...]}`
inline step_registry parse_registry(std::string_view text) {
    auto doc = detail::parse_json_document(text, "registry");
    auto fail = [](const std::string& why) -> void { throw error(errc::parse_error, "registry: " + why); };
    if (!doc.is_object()) fail("top level must be an object");
    auto id = doc.find("attack_id");
    if (id == doc.end() || !id->is_string()) fail("missing 'attack_id'");
    step_registry r;
    std::string aid = id->get<std::string>();
    try {
        r.attack = term::resource(aid.find(':') == std::string::npos ? "atk:" + aid : aid);
    } catch (const error& e) {
        fail(e.detail());
    }
    auto steps = doc.find("steps");
    if (steps == doc.end() || !steps->is_array() || steps->empty()) fail("'steps' must be a non-empty array");
    std::set<int> indices;
    for (const auto& s : *steps) {
        if (!s.is_object() || !s.contains("index") || !s["index"].is_number_integer() || !s.contains("event_class") ||
            !s["event_class"].is_string())
            fail("each step needs an integer 'index' and a string 'event_class'");
        int index = s["index"].get<int>();
        if (index < 1 || !indices.insert(index).second) fail("step indices must be distinct and positive");
        r.steps.emplace_back(index, event_class_resource(s["event_class"].get<std::string>()));
    }
    std::sort(r.steps.begin(), r.steps.end());
    return r;
}

struct step_record {
    int index = 0;
    std::string event_id;
    std::int64_t timestamp = 0;

    friend bool operator==(const step_record&, const step_record&) = default;
};

/// Per (node, attack): the step events seen so far, ordered by time.
class step_tracker {
public:
    void add_registry(step_registry r) {
        auto attack = r.attack;
        registries_.insert_or_assign(attack, std::move(r));
    }

    const step_registry* registry(const term& attack) const {
        auto it = registries_.find(attack);
        return it == registries_.end() ? nullptr : &it->second;
    }
    const std::map<term, step_registry>& registries() const noexcept { return registries_; }

    /// Records `e` under every attack that registers its class. Returns the
    /// attacks it was recorded for; a replayed event is ignored.
    std::vector<term> record(const event_record& e) {
        std::vector<term> hits;
        for (const auto& [attack, reg] : registries_) {
            auto index = reg.step_of(e.event_class);
            if (!index) continue;
            auto& list = steps_[{e.node(), attack}];
            if (std::any_of(list.begin(), list.end(), [&](const step_record& s) { return s.event_id == e.event_id; }))
                continue;
            auto pos = std::upper_bound(list.begin(), list.end(), e.timestamp,
                                        [](std::int64_t t, const step_record& s) { return t < s.timestamp; });
            list.insert(pos, {*index, e.event_id, e.timestamp});
            hits.push_back(attack);
        }
        return hits;
    }

    const std::vector<step_record>& steps(const term& node, const term& attack) const {
        static const std::vector<step_record> none;
        auto it = steps_.find({node, attack});
        return it == steps_.end() ? none : it->second;
    }

    const std::map<std::pair<term, term>, std::vector<step_record>>& all() const noexcept { return steps_; }

private:
    std::map<term, step_registry> registries_;
    std::map<std::pair<term, term>, std::vector<step_record>> steps_;
};

struct assert_result {
    std::size_t asserted = 0;
    std::vector<std::string> warnings;
};

/// Asserts the events into `kb` (declarations first), tags the facts as
/// retractable and feeds the tracker. Step events also get a
/// `partOf <marker>` link to the attack they belong to.
inline assert_result assert_events(knowledge_base& kb, const std::vector<event_record>& events, step_tracker& tracker) {
    assert_result out;
    for (const auto& e : events) {
        auto ts = to_triples(e, &kb, &out.warnings);
        for (const auto& attack : tracker.record(e)) ts.emplace_back(e.resource(), vocab::part_of, vocab::marker_for(attack));
        for (bool declarations : {true, false})
            for (const auto& t : ts) {
                if (detail::is_declaration(t) != declarations) continue;
                if (!kb.assert_triple(t)) continue;
                ++out.asserted;
                if (!declarations) kb.mark_retractable(t);
            }
    }
    return out;
}

struct progress {
    int completed = 0;
    std::optional<int> next;  // nullopt once every step was seen
    bool in_order = true;
};

/// In order means: the recorded indices never go back in the registry order
/// and the distinct ones form a prefix of it.
inline progress step_progress(const step_tracker& tracker, const term& attack, const term& node) {
    const auto* reg = tracker.registry(attack);
    if (!reg) throw error(errc::unknown_attack_registry, "no step registry for " + attack.str());
    progress p;
    std::set<int> seen;
    int last = 0;
    std::int64_t last_ts = 0;
    for (const auto& s : tracker.steps(node, attack)) {
        if (s.index < last || s.timestamp < last_ts) p.in_order = false;
        last = std::max(last, s.index);
        last_ts = s.timestamp;
        seen.insert(s.index);
    }
    p.completed = static_cast<int>(seen.size());
    std::size_t prefix = 0;
    while (prefix < reg->steps.size() && seen.count(reg->steps[prefix].first)) ++prefix;
    if (prefix != seen.size()) p.in_order = false;
    for (const auto& [i, c] : reg->steps)
        if (!seen.count(i)) {
            p.next = i;
            break;
        }
    return p;
}

} // namespace ontopred
