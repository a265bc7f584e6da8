#pragma once

#include <stdexcept>
#include <string>

namespace v2vpeb {

enum class ErrorCode {
    InvalidArgument,
    InvalidCount,
    IndexOutOfRange,
    CoincidentPanels,
    NoActiveLinks,
    EmptySet,
    ZeroDistance,
    SubcarrierNotAllocated,
    NuisanceSingular,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CoincidentPanels: return "CoincidentPanels";
    case ErrorCode::NoActiveLinks: return "NoActiveLinks";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::SubcarrierNotAllocated: return "SubcarrierNotAllocated";
    case ErrorCode::NuisanceSingular: return "NuisanceSingular";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace v2vpeb
