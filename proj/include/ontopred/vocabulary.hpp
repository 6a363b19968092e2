#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ontopred/term.hpp"

// Fixed resource constants of the core namespace. Everything in here is a
// legal predicate or class without a prior declaration.
namespace ontopred::vocab {

inline constexpr std::string_view core_prefix = "core";

inline term core(std::string_view local) { return term::resource("core:" + std::string(local)); }

// schema-level predicates
inline const term type = core("type");
inline const term sub_class_of = core("subClassOf");
inline const term sub_property_of = core("subPropertyOf");
inline const term equivalent_to = core("equivalentTo");
inline const term inverse_of = core("inverseOf");
inline const term domain = core("domain");

// meta classes used in declarations
inline const term class_ = core("Class");
inline const term object_property = core("ObjectProperty");
inline const term datatype_property = core("DatatypeProperty");
inline const term functional_property = core("FunctionalProperty");
inline const term transitive_property = core("TransitiveProperty");
inline const term symmetric_property = core("SymmetricProperty");

// domain classes
inline const term thing = core("Thing");
inline const term network_node = core("NetworkNode");
inline const term system = core("System");
inline const term ip_address = core("IPAddress");
inline const term port = core("Port");
inline const term event = core("Event");
inline const term attack_step = core("AttackStep");
inline const term weakness_observed = core("WeaknessObserved");
inline const term vulnerability_observed = core("VulnerabilityObserved");
inline const term attack_pattern = core("AttackPattern");
inline const term weakness = core("Weakness");
inline const term vulnerability = core("Vulnerability");
inline const term vulnerable = core("Vulnerable");
inline const term under_attack_system = core("UnderAttackSystem");
inline const term under_potential_attack_system = core("UnderPotentialAttackSystem");
inline const term consequence = core("Consequence");
inline const term unauthorized_disclosure = core("UnauthorizedDisclosure");
inline const term deception = core("Deception");
inline const term disruption = core("Disruption");
inline const term usurpation = core("Usurpation");

// domain properties
inline const term has_weakness = core("hasWeakness");
inline const term has_vulnerability = core("hasVulnerability");
inline const term related_to = core("relatedTo");
inline const term related_from = core("relatedFrom");
inline const term targets = core("targets");
inline const term targeted_by = core("targetedBy");
inline const term occurred_at = core("occurredAt");
inline const term observed_on = core("observedOn");
inline const term reported_by = core("reportedBy");
inline const term part_of = core("partOf");
inline const term has_consequence = core("hasConsequence");
inline const term catalog_kind = core("catalogKind");
inline const term label = core("label");
inline const term description = core("description");
inline const term prerequisite = core("prerequisite");
inline const term step = core("step");

inline const std::array<term, 4> consequence_categories = {unauthorized_disclosure, deception, disruption,
                                                             usurpation};

/// Predicates legal in any triple, declared or not.
inline bool is_core_predicate(const term& p) {
    static const std::array<const term*, 22> all = {
        &type,         &sub_class_of,  &sub_property_of, &equivalent_to,   &inverse_of,     &domain,
        &has_weakness, &has_vulnerability, &related_to,  &targets,         &targeted_by,    &occurred_at,
        &observed_on,  &reported_by,   &part_of,         &has_consequence, &catalog_kind,   &label,
        &description,  &prerequisite,  &step,            &related_from};
    for (const term* t : all)
        if (*t == p) return true;
    return false;
}

/// Objects of `type` that make the subject a schema element rather than an
/// individual.
inline bool is_meta_class(const term& c) {
    return c == class_ || c == object_property || c == datatype_property || c == functional_property ||
           c == transitive_property || c == symmetric_property;
}

/// Marker individuals stand for "attack A is in progress": `mk:<prefix>.<local>`.
inline term marker_for(const term& attack) {
    return term::resource("mk:" + std::string(attack.prefix()) + "." + std::string(attack.local_name()));
}

/// Inverse of marker_for; returns nullopt for anything that is not a marker.
inline std::optional<term> attack_for(const term& marker) {
    if (!marker.is_resource() || marker.prefix() != "mk") return std::nullopt;
    auto local = marker.local_name();
    auto dot = local.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == local.size()) return std::nullopt;
    return term::resource(std::string(local.substr(0, dot)) + ":" + std::string(local.substr(dot + 1)));
}

} // namespace ontopred::vocab
