#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "support/files.hpp"

namespace fs = std::filesystem;

namespace {

struct run_result {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("ontopred_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string data(const std::string& name) { return std::string(ONTOPRED_DATA_DIR) + "/" + name; }
std::string golden(const std::string& name) { return files::read(std::string(ONTOPRED_GOLDEN_DIR) + "/" + name); }

run_result run(const std::string& args) {
    auto out = scratch() / "stdout", err = scratch() / "stderr";
    std::string cmd = std::string(ONTOPRED_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    run_result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = files::read(out.string());
    r.err = files::read(err.string());
    return r;
}

std::string write(const std::string& name, const std::string& content) {
    auto p = scratch() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
}

const std::string catalogs = "--catalog " + data("mini_capec.json") + " --catalog " + data("mini_cwe.json") +
                             " --catalog " + data("mini_cve.json") + " --equivalences " + data("equivalences.json");
const std::string mitnick = " --triples " + data("mitnick.nt") + " --rules " + data("mitnick.rules") +
                            " --registry " + data("mitnick_registry.json");

} // namespace

TEST(CliIngest, MiniCatalogExportMatchesGolden) {
    auto r = run("ingest " + catalogs);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, golden("mini_ingest.nt"));
    EXPECT_NE(r.err.find("generated rules"), std::string::npos);
    EXPECT_EQ(run("ingest " + catalogs).out, r.out);
}

TEST(CliIngest, ExportedTriplesAndRulesReproduceTheReport) {
    auto rules = (scratch() / "gen.rules").string();
    ASSERT_EQ(run("ingest " + catalogs + " --rules-out " + rules).code, 0);
    // exported triples plus exported rules reproduce the catalog pipeline
    auto r = run("predict --triples " + std::string(ONTOPRED_GOLDEN_DIR) + "/mini_ingest.nt --rules " + rules +
                 " --events " + data("capec111_events.jsonl") + " --state " + data("state.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, golden("capec111_report.json"));
}

TEST(CliIngest, MalformedJsonIsExitTwo) {
    auto bad = write("bad.json", "{\"kind\": \"weakness\", \"records\": [");
    auto r = run("ingest --catalog " + bad);
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("ParseError"), std::string::npos);
}

TEST(CliIngest, IsACycleIsExitThree) {
    auto cyc = write("cycle.json", R"({"kind": "weakness", "records": [
        {"id": "CWE-1", "name": "a", "parent_ids": ["CWE-2"]},
        {"id": "CWE-2", "name": "b", "parent_ids": ["CWE-1"]}]})");
    auto r = run("ingest --catalog " + cyc);
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("cwe:CWE-1"), std::string::npos);
    EXPECT_NE(r.err.find("cwe:CWE-2"), std::string::npos);
}

TEST(CliUsage, BadInvocationsAreExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("predict --catalog /no/such/file.json").code, 1);
    EXPECT_EQ(run("predict " + catalogs + " --format yaml").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(CliPredict, ReportContainsS1AndCapec111) {
    auto r = run("predict " + catalogs + " --events " + data("capec111_events.jsonl") + " --state " + data("state.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, golden("capec111_report.json"));
    auto j = nlohmann::json::parse(r.out);
    bool found = false;
    for (const auto& e : j["entries"])
        if (e["node"] == "node:s1" && e["attack"] == "capec:CAPEC-111") found = true;
    EXPECT_TRUE(found);
}

TEST(CliPredict, EmptyEventsGiveEmptyReport) {
    auto r = run("predict " + catalogs + " --events " + data("empty_events.jsonl"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "{\n  \"generated_at\": 0,\n  \"entries\": []\n}\n");
}

TEST(CliPredict, ForcedLimitIsExitFour) {
    auto r = run("predict " + catalogs + " --events " + data("capec111_events.jsonl") + " --max-derived 1");
    EXPECT_EQ(r.code, 4);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("LimitExceeded"), std::string::npos);
}

TEST(CliPredict, BadEventLineIsExitTwo) {
    auto ev = write("bad.jsonl", "{\"event_id\": \"x\"}\n");
    EXPECT_EQ(run("predict " + catalogs + " --events " + ev).code, 2);
}

TEST(CliPredict, MitnickReportMatchesGolden) {
    auto args = "predict " + catalogs + mitnick + " --events " + data("mitnick_events.jsonl") + " --state " +
                data("state.json");
    auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, golden("mitnick_report.json"));
    EXPECT_EQ(run(args).out, r.out);
}

TEST(CliPredict, OutFileKeepsStdoutEmpty) {
    auto path = (scratch() / "report.json").string();
    auto r = run("predict " + catalogs + " --events " + data("capec111_events.jsonl") + " --out " + path);
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(files::read(path), golden("capec111_report.json"));
}

TEST(CliQuery, VulnerableQueryGivesOneRow) {
    auto r = run("query " + catalogs + " --events " + data("capec111_events.jsonl") +
                 " 'SELECT ?n WHERE { ?n core:type core:Vulnerable }' --format text");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "node:s1\n");
}

TEST(CliQuery, ThreeVariablePatternIsExitTwo) {
    auto r = run("query " + catalogs + " 'SELECT ?s WHERE { ?s ?p ?o }'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("TooManyVariables"), std::string::npos);
}

TEST(CliQuery, EmptyResultIsExitZero) {
    auto r = run("query " + catalogs + " 'SELECT ?n WHERE { ?n core:type core:Vulnerable }' --format text");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliMetrics, MiniCatalogMatchesGolden) {
    auto r = run("metrics " + catalogs);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, golden("mini_metrics.json"));
}

TEST(CliInfer, SecondRunDerivesNothing) {
    auto exported = (scratch() / "inferred.nt").string();
    auto first = run("infer " + catalogs + " --events " + data("capec111_events.jsonl") + " --export " + exported);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_GT(nlohmann::json::parse(first.out)["derived"].get<int>(), 0);
    auto second = run("infer " + catalogs + " --triples " + exported);
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(nlohmann::json::parse(second.out)["derived"], 0);
}

TEST(CliEvents, MitnickProgress) {
    auto r = run("events " + catalogs + mitnick + " --events " + data("mitnick_events.jsonl") + " --format text");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("node:xterminal\tatk:Mitnick\t3\t-\tin-order"), std::string::npos) << r.out;
}

TEST(CliExport, InferredExportIsSupersetOfIngest) {
    auto plain = run("export " + catalogs).out;
    EXPECT_EQ(plain, golden("mini_ingest.nt"));
    auto inferred = run("export --infer " + catalogs + " --events " + data("capec111_events.jsonl")).out;
    EXPECT_GT(inferred.size(), plain.size());
    EXPECT_NE(inferred.find("node:s1 core:type core:Vulnerable ."), std::string::npos);
}

TEST(CliMetrics, BreakdownPerIndividual) {
    auto r = run("metrics " + catalogs + mitnick + " --events " + data("mitnick_events.jsonl") +
                 " --breakdown core:System --format text");
    ASSERT_EQ(r.code, 0) << r.err;
    // hasAddress, hasPort, hasVulnerability, hasWeakness, targetedBy apply to System;
    // xterminal only uses hasWeakness
    EXPECT_EQ(r.out, "node:server\t0/1\nnode:xterminal\t1/5\n");
    EXPECT_EQ(run("metrics " + catalogs + " --breakdown core:Nope").code, 1);
}
