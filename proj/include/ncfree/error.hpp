#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ncfree {

enum class ErrorKind {
    dimension_mismatch,
    parse_error,
    unknown_identifier,
    not_expandable,
    singular_inverse,
    log_branch_violation,
    not_hermitian,
    not_pluriharmonic,
    truncation_too_deep,
    gram_not_psd,
    inconsistent_action,
    out_of_truncation,
    t_not_contractive,
    resolvent_singular,
    precondition_violated,
    endpoint_mismatch,
    evaluation_failure,
    invalid_input,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension_mismatch: return "DimensionMismatch";
        case ErrorKind::parse_error: return "ParseError";
        case ErrorKind::unknown_identifier: return "UnknownIdentifier";
        case ErrorKind::not_expandable: return "NotExpandable";
        case ErrorKind::singular_inverse: return "SingularInverse";
        case ErrorKind::log_branch_violation: return "LogBranchViolation";
        case ErrorKind::not_hermitian: return "NotHermitian";
        case ErrorKind::not_pluriharmonic: return "NotPluriharmonic";
        case ErrorKind::truncation_too_deep: return "TruncationTooDeep";
        case ErrorKind::gram_not_psd: return "GramNotPSD";
        case ErrorKind::inconsistent_action: return "InconsistentAction";
        case ErrorKind::out_of_truncation: return "OutOfTruncation";
        case ErrorKind::t_not_contractive: return "TNotContractive";
        case ErrorKind::resolvent_singular: return "ResolventSingular";
        case ErrorKind::precondition_violated: return "PreconditionViolated";
        case ErrorKind::endpoint_mismatch: return "EndpointMismatch";
        case ErrorKind::evaluation_failure: return "EvaluationFailure";
        case ErrorKind::invalid_input: return "InvalidInput";
    }
    return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and is what the
/// CLI reports; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind), position_(position) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Character offset for parse errors.
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> position_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace ncfree
