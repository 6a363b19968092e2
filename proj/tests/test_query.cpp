#include <gtest/gtest.h>

#include <random>

#include "ontopred/core_ontology.hpp"
#include "ontopred/query.hpp"
#include "ontopred/reasoner.hpp"
#include "ontopred/triple_text.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ontopred;

namespace {

term res(const std::string& s) { return term::resource(s); }

void expect_error(errc code, const std::function<void()>& fn) {
    try {
        fn();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

std::vector<std::vector<std::string>> strings(const query_result& r) {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : r.rows) {
        std::vector<std::string> line;
        for (const auto& t : row) line.push_back(t.str());
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST(ParseQuery, SinglePattern) {
    auto q = parse_query("SELECT ?a WHERE { ?a type capec:CAPEC-111 }");
    ASSERT_EQ(q.patterns.size(), 1u);
    EXPECT_EQ(q.select, std::vector<std::string>{"?a"});
    EXPECT_EQ(q.patterns[0].predicate, vocab::type);
    EXPECT_EQ(q.patterns[0].object, res("capec:CAPEC-111"));
    EXPECT_EQ(q.patterns[0].variable_count(), 1);
}

TEST(ParseQuery, ThreeVariablePattern) {
    expect_error(errc::too_many_variables, [] { parse_query("SELECT ?a WHERE { ?a ?p ?o }"); });
    try {
        parse_query("SELECT ?a WHERE { ?a type System . ?a ?p ?o }");
    } catch (const error& e) {
        EXPECT_NE(std::string(e.what()).find("pattern 1"), std::string::npos) << e.what();
    }
}

TEST(ParseQuery, UnboundSelect) {
    expect_error(errc::unbound_select, [] { parse_query("SELECT ?z WHERE { ?a type System }"); });
}

TEST(ParseQuery, GrammarDetails) {
    auto q = parse_query("select ?n ?w where {\n  ?n hasWeakness ?w .\n  ?n type System .\n}");
    EXPECT_EQ(q.patterns.size(), 2u);
    EXPECT_EQ(q.select, (std::vector<std::string>{"?n", "?w"}));
    auto lit = parse_query("SELECT ?e WHERE { ?e occurredAt \"100\"^^timestamp }");
    EXPECT_EQ(lit.patterns[0].object, term::timestamp(100));
    EXPECT_THROW(parse_query("SELECT WHERE { ?a type System }"), error);
    EXPECT_THROW(parse_query("SELECT ?a { ?a type System }"), error);
    EXPECT_THROW(parse_query("SELECT ?a WHERE { ?a type }"), error);
    EXPECT_THROW(parse_query("SELECT ?a WHERE { ?a type System"), error);
    EXPECT_THROW(parse_query("SELECT ?a WHERE { }"), error);
    EXPECT_EQ(parse_query(q.str()), q);
}

TEST(Evaluate, EmptyKb) {
    knowledge_base kb;
    EXPECT_TRUE(evaluate(kb, "SELECT ?s WHERE { ?s type Vulnerable }").rows.empty());
}

TEST(Evaluate, Capec111AfterInference) {
    knowledge_base kb;
    load_core_ontology(kb);
    kb.assert_triple({res("node:s1"), vocab::type, vocab::system});
    for (auto w : {"cwe:CWE-345", "cwe:CWE-346", "cwe:CWE-352"})
        kb.assert_triple({res("node:s1"), vocab::has_weakness, res(w)});
    forward_chain(kb, parse_rules(R"(rule "f5": System(?s) AND hasWeakness(?s, cwe:CWE-345)
        AND hasWeakness(?s, cwe:CWE-346) AND hasWeakness(?s, cwe:CWE-352) => Vulnerable(?s))"));
    auto r = evaluate(kb, "SELECT ?s WHERE { ?s type Vulnerable }");
    EXPECT_EQ(strings(r), (std::vector<std::vector<std::string>>{{"node:s1"}}));
}

TEST(Evaluate, TwoPatternJoinMatchesNestedLoop) {
    knowledge_base kb;
    std::mt19937 rng(8);
    std::vector<triple> fixture;
    for (int i = 0; i < 20; ++i) {
        auto node = res("node:n" + std::to_string(rng() % 5));
        if (i % 3 == 0)
            fixture.emplace_back(node, vocab::type, vocab::system);
        else
            fixture.emplace_back(node, vocab::has_weakness, res("cwe:W" + std::to_string(rng() % 4)));
    }
    for (const auto& t : fixture) kb.assert_triple(t);
    auto q = parse_query("SELECT ?n ?w WHERE { ?n type System . ?n hasWeakness ?w }");
    EXPECT_EQ(strings(evaluate(kb, q)), oracle::query_rows(kb.triples(), q.select, q.patterns));
}

TEST(Evaluate, RowsSortedAndDeduplicated) {
    knowledge_base kb;
    kb.assert_triple({res("node:b"), vocab::has_weakness, res("cwe:1")});
    kb.assert_triple({res("node:a"), vocab::has_weakness, res("cwe:1")});
    kb.assert_triple({res("node:a"), vocab::has_weakness, res("cwe:2")});
    auto r = evaluate(kb, "SELECT ?n WHERE { ?n hasWeakness ?w }");
    EXPECT_EQ(strings(r), (std::vector<std::vector<std::string>>{{"node:a"}, {"node:b"}}));
    EXPECT_EQ(r.columns, std::vector<std::string>{"?n"});
}

TEST(Builders, SpecificAttack) {
    auto q = q_specific_attack(res("node:s1"), res("capec:CAPEC-111"));
    for (const auto& p : q.patterns) EXPECT_LE(p.variable_count(), 1);
    bool node_const = false, attack_const = false;
    for (const auto& p : q.patterns) {
        node_const |= p.object == res("node:s1");
        attack_const |= p.object == res("capec:CAPEC-111");
    }
    EXPECT_TRUE(node_const && attack_const);
    knowledge_base kb;
    load_core_ontology(kb);
    EXPECT_TRUE(evaluate(kb, q_specific_attack(res("node:nowhere"), res("capec:CAPEC-111"))).rows.empty());
}

TEST(Builders, AttacksOfType) {
    knowledge_base kb;
    load_core_ontology(kb);
    EXPECT_TRUE(evaluate(kb, q_attacks_of_type(res("atk:Mitnick"))).rows.empty());
    auto m = res("mk:atk.Mitnick");
    kb.assert_triple({res("atk:Mitnick"), vocab::sub_class_of, vocab::attack_pattern});
    kb.assert_triple({m, vocab::type, res("atk:Mitnick")});
    kb.assert_triple({m, vocab::targets, res("node:a")});
    kb.assert_triple({m, vocab::targets, res("node:b")});
    auto r = evaluate(kb, q_attacks_of_type(res("atk:Mitnick")));
    EXPECT_EQ(strings(r), (std::vector<std::vector<std::string>>{{"mk:atk.Mitnick", "node:a"},
                                                                 {"mk:atk.Mitnick", "node:b"}}));
    for (const auto& p : q_attacks_of_type(res("atk:Mitnick")).patterns) EXPECT_LE(p.variable_count(), 2);
    EXPECT_EQ(strings(evaluate(kb, q_specific_attack(res("node:a"), res("atk:Mitnick")))),
              (std::vector<std::vector<std::string>>{{"mk:atk.Mitnick"}}));
}

TEST(Builders, ByWeaknessAndVulnerability) {
    knowledge_base kb;
    load_core_ontology(kb);
    auto attack = [&](const std::string& id) {
        kb.assert_triple({res(id), vocab::sub_class_of, vocab::attack_pattern});
        kb.assert_triple({res(id), vocab::catalog_kind, vocab::attack_pattern});
    };
    attack("capec:A1");
    attack("capec:A2");
    attack("capec:A3");
    kb.assert_triple({res("capec:A1"), vocab::related_to, res("cwe:W1")});
    kb.assert_triple({res("capec:A2"), vocab::related_to, res("cwe:W1")});
    kb.assert_triple({res("capec:A3"), vocab::related_to, res("cwe:W2")});
    kb.assert_triple({res("cwe:W1"), vocab::related_to, res("cve:V1")});
    kb.assert_triple({res("capec:A3"), vocab::related_to, res("cve:V2")});
    kb.assert_triple({res("node:s1"), vocab::has_weakness, res("cwe:W1")});
    forward_chain(kb, {});

    auto by_w1 = evaluate(kb, q_by_weakness(res("cwe:W1")));
    EXPECT_EQ(strings(by_w1), (std::vector<std::vector<std::string>>{{"capec:A1"}, {"capec:A2"}}));
    std::size_t scan = 0;
    for (const auto& t : kb.triples())
        if (t.predicate == vocab::related_to && t.object == res("cwe:W1") && kb.is_asserted(t)) ++scan;
    EXPECT_EQ(by_w1.rows.size(), scan);
    EXPECT_TRUE(evaluate(kb, q_by_weakness(res("cwe:W9"))).rows.empty());
    // chain: A1 -> W1 -> V1
    EXPECT_EQ(strings(evaluate(kb, q_by_vulnerability(res("cve:V1")))),
              (std::vector<std::vector<std::string>>{{"capec:A1"}, {"capec:A2"}}));
    EXPECT_EQ(strings(evaluate(kb, q_by_vulnerability(res("cve:V2")))),
              (std::vector<std::vector<std::string>>{{"capec:A3"}}));
    EXPECT_TRUE(evaluate(kb, q_by_vulnerability(res("cve:V9"))).rows.empty());
    EXPECT_EQ(strings(evaluate(kb, q_nodes_with_weakness(res("cwe:W1")))),
              (std::vector<std::vector<std::string>>{{"node:s1"}}));
    EXPECT_TRUE(evaluate(kb, q_nodes_with_vulnerability(res("cve:V1"))).rows.empty());
}

// -- properties ---------------------------------------------------------------

TEST(Properties, MatchesNestedLoopAndIgnoresPatternOrder) {
    std::mt19937 rng(99);
    for (int round = 0; round < 60; ++round) {
        auto fixture = gen::make_kb(rng);
        knowledge_base kb;
        load_triples(kb, fixture.triples);
        auto stored = kb.triples();
        for (int k = 0; k < 5; ++k) {
            auto rq = gen::make_query(rng, stored);
            query q{rq.select, rq.patterns};
            auto got = strings(evaluate(kb, q));
            EXPECT_EQ(got, oracle::query_rows(stored, q.select, q.patterns)) << q.str();
            auto shuffled = q;
            std::shuffle(shuffled.patterns.begin(), shuffled.patterns.end(), rng);
            EXPECT_EQ(strings(evaluate(kb, shuffled)), got);
            EXPECT_EQ(strings(evaluate(kb, q)), got);
        }
    }
}
