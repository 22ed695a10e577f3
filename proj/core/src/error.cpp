#include "meshrel/error.hpp"

namespace meshrel {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::resource_cap: return "resource_cap";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace meshrel
