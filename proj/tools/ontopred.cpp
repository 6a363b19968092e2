// ontopred: batch front end over the header-only library.
//
// Exit codes: 0 ok, 1 usage or configuration, 2 parse error,
// 3 cycle or inconsistent catalog graph, 4 inference limit exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ontopred/ontopred.hpp"

namespace {

using namespace ontopred;

struct config {
    std::vector<std::string> catalogs;
    std::string equivalences;
    std::vector<std::string> triples;
    std::vector<std::string> rules;
    std::vector<std::string> registries;
    std::string events;
    std::string state;
    std::string out;
    std::string format = "json";
    std::size_t max_iterations = chain_limits{}.max_iterations;
    std::size_t max_derived = chain_limits{}.max_derived;

    // per command
    std::string query_text;
    std::string query_file;
    std::string rules_out;
    std::string export_path;
    std::string breakdown;
    bool infer = false;

    chain_limits limits() const { return {max_iterations, max_derived}; }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const config& cfg, const std::string& data) {
    if (cfg.out.empty()) {
        std::cout << data;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw error(errc::io_error, "cannot write " + cfg.out);
    f << data;
}

void note(const std::string& msg) { std::cerr << "ontopred: " << msg << "\n"; }

struct session {
    knowledge_base kb;
    rule_set rules;
    step_tracker tracker;
    std::size_t catalog_triples = 0;
    std::size_t generated = 0;
    std::size_t event_triples = 0;
};

/// Wraps parse failures with the file they came from.
template <class F>
auto from_file(const std::string& path, F&& f) {
    try {
        return f(slurp(path));
    } catch (const error& e) {
        if (e.code() == errc::io_error) throw;
        throw error(e.code(), path + ": " + e.detail());
    }
}

session open_session(const config& cfg, bool with_events = true) {
    session s;
    load_core_ontology(s.kb);
    if (!cfg.catalogs.empty()) {
        std::vector<catalog_entry> entries;
        for (const auto& path : cfg.catalogs) {
            auto part = from_file(path, [](const std::string& text) { return parse_catalog(text); });
            entries.insert(entries.end(), part.begin(), part.end());
        }
        auto graph = build_graph(entries);
        if (!cfg.equivalences.empty())
            graph = apply_equivalences(std::move(graph), from_file(cfg.equivalences, [](const std::string& t) {
                                           return parse_equivalences(t);
                                       }));
        auto report = check_consistency(graph);
        for (const auto& w : report.warnings) note("warning: " + w);
        if (!report.ok()) {
            for (const auto& e : report.errors) note(e);
            throw error(errc::inconsistent_graph, std::to_string(report.errors.size()) + " consistency error(s)");
        }
        s.catalog_triples = emit_ontology(graph, s.kb);
        auto gen = generate_attack_rules(graph);
        for (const auto& w : gen.warnings) note("warning: " + w);
        s.generated = gen.rules.rules.size();
        s.rules = std::move(gen.rules);
    }
    for (const auto& path : cfg.triples)
        from_file(path, [&](const std::string& text) { return load_triple_text(s.kb, text); });
    for (const auto& path : cfg.rules)
        from_file(path, [&](const std::string& text) {
            s.rules.merge(parse_rules(text));
            return 0;
        });
    for (const auto& path : cfg.registries)
        from_file(path, [&](const std::string& text) {
            s.tracker.add_registry(parse_registry(text));
            return 0;
        });
    if (with_events && !cfg.events.empty()) {
        auto events = from_file(cfg.events, [](const std::string& text) { return parse_events(text); });
        auto result = assert_events(s.kb, events, s.tracker);
        for (const auto& w : result.warnings) note("warning: " + w);
        s.event_triples = result.asserted;
    }
    return s;
}

bool text(const config& cfg) { return cfg.format == "text"; }

std::string rational_text(const rational& r) { return r.undefined() ? "undefined" : r.str(); }

// -- commands -------------------------------------------------------------

int cmd_ingest(const config& cfg) {
    auto s = open_session(cfg, false);
    emit(cfg, export_triple_text(s.kb));
    if (!cfg.rules_out.empty()) {
        std::ofstream f(cfg.rules_out, std::ios::binary);
        if (!f) throw error(errc::io_error, "cannot write " + cfg.rules_out);
        f << to_dsl(s.rules);
    }
    note(std::to_string(s.catalog_triples) + " catalog triples, " + std::to_string(s.kb.size()) +
         " triples total, " + std::to_string(s.generated) + " generated rules");
    return 0;
}

int cmd_infer(const config& cfg) {
    auto s = open_session(cfg);
    auto report = forward_chain(s.kb, s.rules, cfg.limits());
    if (!cfg.export_path.empty()) {
        std::ofstream f(cfg.export_path, std::ios::binary);
        if (!f) throw error(errc::io_error, "cannot write " + cfg.export_path);
        f << export_triple_text(s.kb);
    }
    if (text(cfg)) {
        std::string out = "derived " + std::to_string(report.derived) + "\niterations " +
                          std::to_string(report.iterations) + "\n";
        for (const auto& [name, n] : report.fired) out += name + "\t" + std::to_string(n) + "\n";
        emit(cfg, out);
        return 0;
    }
    nlohmann::ordered_json j;
    j["derived"] = report.derived;
    j["iterations"] = report.iterations;
    j["fired"] = nlohmann::ordered_json::object();
    for (const auto& [name, n] : report.fired) j["fired"][name] = n;
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_events(const config& cfg) {
    if (cfg.events.empty()) throw error(errc::io_error, "events needs --events");
    auto s = open_session(cfg);
    std::vector<std::tuple<term, term, progress>> rows;
    for (const auto& [key, steps] : s.tracker.all()) {
        const auto& [node, attack] = key;
        if (!s.tracker.registries().count(attack)) continue;
        rows.emplace_back(node, attack, step_progress(s.tracker, attack, node));
    }
    if (text(cfg)) {
        std::string out = "asserted " + std::to_string(s.event_triples) + "\n";
        for (const auto& [node, attack, p] : rows)
            out += node.str() + "\t" + attack.str() + "\t" + std::to_string(p.completed) + "\t" +
                   (p.next ? std::to_string(*p.next) : "-") + "\t" + (p.in_order ? "in-order" : "out-of-order") + "\n";
        emit(cfg, out);
        return 0;
    }
    nlohmann::ordered_json j;
    j["asserted"] = s.event_triples;
    j["progress"] = nlohmann::ordered_json::array();
    for (const auto& [node, attack, p] : rows) {
        nlohmann::ordered_json e;
        e["node"] = node.str();
        e["attack"] = attack.str();
        e["completed"] = p.completed;
        e["next"] = p.next ? nlohmann::ordered_json(*p.next) : nlohmann::ordered_json(nullptr);
        e["in_order"] = p.in_order;
        j["progress"].push_back(std::move(e));
    }
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_query(const config& cfg) {
    std::string q = cfg.query_text;
    if (!cfg.query_file.empty()) q = slurp(cfg.query_file);
    if (q.empty()) throw error(errc::io_error, "query needs query text or --query-file");
    auto parsed = parse_query(q);
    auto s = open_session(cfg);
    forward_chain(s.kb, s.rules, cfg.limits());
    auto result = evaluate(s.kb, parsed);
    if (text(cfg)) {
        std::string out;
        for (const auto& row : result.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + row[i].str();
            out += "\n";
        }
        emit(cfg, out);
        return 0;
    }
    nlohmann::ordered_json j;
    j["columns"] = result.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& t : row) r.push_back(t.str());
        j["rows"].push_back(std::move(r));
    }
    emit(cfg, j.dump(2) + "\n");
    return 0;
}

int cmd_predict(const config& cfg) {
    auto s = open_session(cfg);
    auto state = cfg.state.empty() ? all_nodes_live()
                                   : from_file(cfg.state, [](const std::string& t) { return parse_state(t); });
    auto report = run_prediction(s.kb, s.rules, state, cfg.limits());
    if (text(cfg)) {
        std::string out;
        for (const auto& e : report.entries) {
            out += e.node.str() + "\t" + e.attack.str() + "\t" + std::string(e.status.local_name()) + "\t" +
                   e.score.str();
            std::string missing;
            for (const auto& m : e.missing) missing += (missing.empty() ? "" : ",") + m.str();
            out += "\t" + (missing.empty() ? "-" : missing) + "\n";
        }
        emit(cfg, out);
        return 0;
    }
    emit(cfg, serialize(report));
    return 0;
}

int cmd_metrics(const config& cfg) {
    auto s = open_session(cfg);
    if (cfg.infer) forward_chain(s.kb, s.rules, cfg.limits());
    if (!cfg.breakdown.empty()) {
        auto cls = term::resource(cfg.breakdown);
        if (!s.kb.is_class(cls)) throw error(errc::unknown_class, cfg.breakdown + " is not a class");
        auto each = individual_property_richness(s.kb, cls);
        if (text(cfg)) {
            std::string out;
            for (const auto& [i, v] : each) out += i.str() + "\t" + rational_text(v) + "\n";
            emit(cfg, out);
            return 0;
        }
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [i, v] : each) j[i.str()] = to_json(v);
        emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    auto r = compute_metrics(s.kb);
    if (!text(cfg)) {
        emit(cfg, to_json(r).dump(2) + "\n");
        return 0;
    }
    std::string out;
    auto line = [&](const std::string& k, const std::string& v) { out += k + "\t" + v + "\n"; };
    line("object_properties_richness", rational_text(r.object_properties_richness));
    line("inheritance_richness", rational_text(r.inheritance_richness));
    line("data_properties_richness", rational_text(r.data_properties_richness));
    line("class_count", std::to_string(r.class_count));
    line("medium_po", rational_text(r.medium_po));
    line("isa_depth", std::to_string(r.isa_depth));
    line("class_richness", rational_text(r.class_richness));
    line("individual_graph_components", std::to_string(r.individual_graph_components));
    for (const auto& [c, n] : r.isa_fanout_rank) line("isa_fanout\t" + c.str(), std::to_string(n));
    for (const auto& [c, n] : r.partof_fanout_rank) line("partof_fanout\t" + c.str(), std::to_string(n));
    for (const auto& [c, n] : r.class_connectivity) line("class_connectivity\t" + c.str(), std::to_string(n));
    for (const auto& [c, v] : r.class_importance) line("class_importance\t" + c.str(), rational_text(v));
    for (const auto& [c, v] : r.kb_object_properties_richness)
        line("kb_object_properties_richness\t" + c.str(), rational_text(v));
    emit(cfg, out);
    return 0;
}

int cmd_export(const config& cfg) {
    auto s = open_session(cfg);
    if (cfg.infer) forward_chain(s.kb, s.rules, cfg.limits());
    emit(cfg, export_triple_text(s.kb));
    return 0;
}

int exit_code(errc c) {
    switch (c) {
    case errc::cycle_detected:
    case errc::inconsistent_graph:
        return 3;
    case errc::limit_exceeded:
        return 4;
    case errc::empty_ontology:
    case errc::unknown_class:
    case errc::unknown_attack_registry:
    case errc::not_retractable:
    case errc::io_error:
        return 1;
    default:
        return 2;
    }
}

void common_options(CLI::App* cmd, config& cfg) {
    cmd->add_option("--catalog", cfg.catalogs, "catalog JSON file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--equivalences", cfg.equivalences, "cross-catalog equivalence map")->check(CLI::ExistingFile);
    cmd->add_option("--triples", cfg.triples, "extra triple file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--rules", cfg.rules, "rule file (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--registry", cfg.registries, "attack step registry (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--events", cfg.events, "event stream, one JSON object per line")->check(CLI::ExistingFile);
    cmd->add_option("--state", cfg.state, "system state file")->check(CLI::ExistingFile);
    cmd->add_option("--out", cfg.out, "write output here instead of stdout");
    cmd->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--max-iterations", cfg.max_iterations, "forward-chaining iteration limit")->check(CLI::PositiveNumber);
    cmd->add_option("--max-derived", cfg.max_derived, "forward-chaining derived-triple limit")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ontology-driven network attack prediction"};
    app.require_subcommand(1);
    config cfg;
    int (*run)(const config&) = nullptr;

    auto add = [&](const char* name, const char* help, int (*fn)(const config&)) {
        auto* cmd = app.add_subcommand(name, help);
        common_options(cmd, cfg);
        cmd->callback([&run, fn] { run = fn; });
        return cmd;
    };
    add("ingest", "build the ontology from catalogs and export it as triples", cmd_ingest)
        ->add_option("--rules-out", cfg.rules_out, "also write the generated rules here");
    add("infer", "forward-chain the rules and report what was derived", cmd_infer)
        ->add_option("--export", cfg.export_path, "write all triples after inference here");
    add("events", "assert events and report attack step progress", cmd_events);
    auto* q = add("query", "run a SELECT query after inference", cmd_query);
    q->add_option("query", cfg.query_text, "query text");
    q->add_option("--query-file", cfg.query_file, "read the query from a file")->check(CLI::ExistingFile);
    add("predict", "run the full pipeline and print the prediction report", cmd_predict);
    auto* m = add("metrics", "compute ontology and knowledge-base metrics", cmd_metrics);
    m->add_flag("--infer", cfg.infer, "run inference first");
    m->add_option("--breakdown", cfg.breakdown, "per-individual property usage for one class");
    add("export", "export all triples", cmd_export)->add_flag("--infer", cfg.infer, "run inference first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return run(cfg);
    } catch (const error& e) {
        note(e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        note(e.what());
        return 1;
    }
}
