#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pegrisk {

enum class ErrorKind {
    Schema,
    Validation,
    Alignment,
    DegenerateRegressor,
    Window,
    Domain,
    Inversion,
    InsufficientData,
    SingularDesign,
    Io,
    Config,
};

/// Stable lowercase token used in machine-parsable error lines, e.g. "singular-design".
std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the CLI)
/// can branch on the category without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pegrisk
