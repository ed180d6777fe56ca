#include "pegrisk/error.hpp"

namespace pegrisk {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Alignment: return "alignment";
        case ErrorKind::DegenerateRegressor: return "degenerate-regressor";
        case ErrorKind::Window: return "window";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Inversion: return "inversion";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::SingularDesign: return "singular-design";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

}  // namespace pegrisk
