#pragma once

#include <stdexcept>
#include <string>

namespace residue {

/// Library error carrying a short machine-readable code (e.g. "invalid-split")
/// alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* kDomain = "domain";
inline constexpr const char* kInvalidModulus = "invalid-modulus";
inline constexpr const char* kInvalidSplit = "invalid-split";
inline constexpr const char* kUnsupported = "unsupported";
inline constexpr const char* kMalformed = "malformed";
inline constexpr const char* kDimensionMismatch = "dimension-mismatch";
inline constexpr const char* kDegenerateTarget = "degenerate-target";
inline constexpr const char* kUnderdeterminedLabels = "underdetermined-labels";
inline constexpr const char* kModulusMismatch = "modulus-mismatch";
inline constexpr const char* kLabelOutOfRange = "label-out-of-range";
inline constexpr const char* kInvalidConfig = "invalid-config";
inline constexpr const char* kInvalidGrid = "invalid-grid";
inline constexpr const char* kUnknownTable = "unknown-table";
inline constexpr const char* kIo = "io";
}  // namespace errc

}  // namespace residue
