#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amdl {

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, empty version space, out-of-range index, bad parameter).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Conditional sampling from an agreement region of zero mass.
class degenerate_agreement : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance file or CSV input that does not match its schema.
class schema_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, std::string_view what) {
    if (!condition) throw contract_error(std::string(what));
}

/// Non-exceptional ways an experiment can end without a usable output.
enum class FailureMode {
    none,
    version_space_collapse,
    pruning_stalled,
    degenerate_agreement,
};

inline std::string_view to_string(FailureMode mode) {
    switch (mode) {
    case FailureMode::none: return "none";
    case FailureMode::version_space_collapse: return "version-space-collapse";
    case FailureMode::pruning_stalled: return "pruning-stalled";
    case FailureMode::degenerate_agreement: return "degenerate-agreement";
    }
    return "unknown";
}

} // namespace amdl
