#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ontopred {

enum class errc {
    malformed_term,
    undeclared_predicate,
    too_many_variables,
    unknown_class,
    cycle_detected,
    parse_error,
    duplicate_id,
    duplicate_event_id,
    inconsistent_graph,
    unsafe_rule,
    limit_exceeded,
    unbound_builtin_argument,
    unbound_select,
    missing_timestamp,
    unknown_attack_registry,
    empty_ontology,
    not_retractable,
    io_error,
};

inline std::string_view to_string(errc code) {
    switch (code) {
    case errc::malformed_term: return "MalformedTerm";
    case errc::undeclared_predicate: return "UndeclaredPredicate";
    case errc::too_many_variables: return "TooManyVariables";
    case errc::unknown_class: return "UnknownClass";
    case errc::cycle_detected: return "CycleDetected";
    case errc::parse_error: return "ParseError";
    case errc::duplicate_id: return "DuplicateId";
    case errc::duplicate_event_id: return "DuplicateEventId";
    case errc::inconsistent_graph: return "InconsistentGraph";
    case errc::unsafe_rule: return "UnsafeRule";
    case errc::limit_exceeded: return "LimitExceeded";
    case errc::unbound_builtin_argument: return "UnboundBuiltinArgument";
    case errc::unbound_select: return "UnboundSelect";
    case errc::missing_timestamp: return "MissingTimestamp";
    case errc::unknown_attack_registry: return "UnknownAttackRegistry";
    case errc::empty_ontology: return "EmptyOntology";
    case errc::not_retractable: return "NotRetractable";
    case errc::io_error: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the `errc` kinds; the
/// message is prefixed with the kind name so it reads well on stderr.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    errc code() const noexcept { return code_; }
    /// The message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    errc code_;
    std::string detail_;
};

} // namespace ontopred
