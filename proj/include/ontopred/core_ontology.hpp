#pragma once

#include <string_view>

#include "ontopred/kb.hpp"
#include "ontopred/triple_text.hpp"

namespace ontopred {

/// Hand-authored complement ontology: network entities, events, the three
/// catalog base classes, node status classes, consequence categories and the
/// core properties. One triple per line, sorted.
inline constexpr std::string_view core_ontology_seed = R"(
core:AttackPattern core:type core:Class .
core:AttackStep core:subClassOf core:Event .
core:AttackStep core:type core:Class .
core:Consequence core:type core:Class .
core:Deception core:subClassOf core:Consequence .
core:Deception core:type core:Class .
core:Disruption core:subClassOf core:Consequence .
core:Disruption core:type core:Class .
core:Event core:type core:Class .
core:IPAddress core:type core:Class .
core:NetworkNode core:type core:Class .
core:Port core:type core:Class .
core:System core:subClassOf core:NetworkNode .
core:System core:type core:Class .
core:UnauthorizedDisclosure core:subClassOf core:Consequence .
core:UnauthorizedDisclosure core:type core:Class .
core:UnderAttackSystem core:subClassOf core:Vulnerable .
core:UnderAttackSystem core:type core:Class .
core:UnderPotentialAttackSystem core:subClassOf core:System .
core:UnderPotentialAttackSystem core:type core:Class .
core:Usurpation core:subClassOf core:Consequence .
core:Usurpation core:type core:Class .
core:Vulnerability core:type core:Class .
core:VulnerabilityObserved core:subClassOf core:Event .
core:VulnerabilityObserved core:type core:Class .
core:Vulnerable core:subClassOf core:UnderPotentialAttackSystem .
core:Vulnerable core:type core:Class .
core:Weakness core:type core:Class .
core:WeaknessObserved core:subClassOf core:Event .
core:WeaknessObserved core:type core:Class .
core:catalogKind core:type core:ObjectProperty .
core:description core:type core:DatatypeProperty .
core:hasAddress core:domain core:NetworkNode .
core:hasAddress core:type core:ObjectProperty .
core:hasConsequence core:domain core:AttackPattern .
core:hasConsequence core:type core:ObjectProperty .
core:hasPort core:domain core:NetworkNode .
core:hasPort core:type core:ObjectProperty .
core:hasVulnerability core:domain core:System .
core:hasVulnerability core:type core:ObjectProperty .
core:hasWeakness core:domain core:System .
core:hasWeakness core:type core:ObjectProperty .
core:label core:type core:DatatypeProperty .
core:observedOn core:domain core:Event .
core:observedOn core:type core:FunctionalProperty .
core:observedOn core:type core:ObjectProperty .
core:occurredAt core:domain core:Event .
core:occurredAt core:type core:DatatypeProperty .
core:occurredAt core:type core:FunctionalProperty .
core:partOf core:domain core:Event .
core:partOf core:type core:ObjectProperty .
core:prerequisite core:type core:DatatypeProperty .
core:relatedFrom core:inverseOf core:relatedTo .
core:relatedFrom core:type core:ObjectProperty .
core:relatedTo core:type core:ObjectProperty .
core:relatedTo core:type core:TransitiveProperty .
core:reportedBy core:domain core:Event .
core:reportedBy core:type core:DatatypeProperty .
core:step core:type core:DatatypeProperty .
core:targetedBy core:domain core:System .
core:targetedBy core:type core:ObjectProperty .
core:targets core:domain core:AttackPattern .
core:targets core:inverseOf core:targetedBy .
core:targets core:type core:ObjectProperty .
)";

/// Asserts the seed into `kb`; returns the number of new triples.
inline std::size_t load_core_ontology(knowledge_base& kb) {
    return load_triple_text(kb, core_ontology_seed.substr(1));
}

} // namespace ontopred
