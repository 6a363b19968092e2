#pragma once

// Fixture bundles: core ontology + mini catalogs + generated rules, and
// optionally the Mitnick files.

#include <string>

#include "ontopred/core_ontology.hpp"
#include "ontopred/events.hpp"
#include "ontopred/ingest.hpp"
#include "ontopred/rules.hpp"
#include "ontopred/triple_text.hpp"
#include "support/files.hpp"

namespace scenario {

struct bundle {
    ontopred::knowledge_base kb;
    ontopred::rule_set rules;
    ontopred::step_tracker tracker;

    std::size_t feed(const std::string& jsonl) {
        return ontopred::assert_events(kb, ontopred::parse_events(jsonl), tracker).asserted;
    }
};

inline std::vector<ontopred::catalog_entry> mini_catalogs() {
    using ontopred::catalog_kind;
    std::vector<ontopred::catalog_entry> all;
    for (auto [file, kind] : {std::pair{"mini_capec.json", catalog_kind::attack_pattern},
                              std::pair{"mini_cwe.json", catalog_kind::weakness},
                              std::pair{"mini_cve.json", catalog_kind::vulnerability}}) {
        auto part = ontopred::parse_catalog(files::data(file), kind);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

inline bundle catalogs(bool with_mitnick = false) {
    bundle b;
    ontopred::load_core_ontology(b.kb);
    auto graph = ontopred::apply_equivalences(ontopred::build_graph(mini_catalogs()),
                                              ontopred::parse_equivalences(files::data("equivalences.json")));
    ontopred::emit_ontology(graph, b.kb);
    b.rules = ontopred::generate_attack_rules(graph).rules;
    if (with_mitnick) {
        ontopred::load_triple_text(b.kb, files::data("mitnick.nt"));
        b.rules.merge(ontopred::parse_rules(files::data("mitnick.rules")));
        b.tracker.add_registry(ontopred::parse_registry(files::data("mitnick_registry.json")));
    }
    return b;
}

} // namespace scenario
