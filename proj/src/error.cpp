#include "mbci/error.hpp"

namespace mbci {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidBand: return "invalid-band";
    case Errc::UnsupportedOrder: return "unsupported-order";
    case Errc::InvalidWindow: return "invalid-window";
    case Errc::InvalidRequest: return "invalid-request";
    case Errc::TooShort: return "too-short";
    case Errc::InsufficientChannels: return "insufficient-channels";
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::UnknownChannel: return "unknown-channel";
    case Errc::Layout: return "layout";
    case Errc::Validation: return "validation";
    case Errc::Numerical: return "numerical";
    case Errc::Fold: return "fold";
    case Errc::CriterionUnavailable: return "criterion-unavailable";
    case Errc::Io: return "io";
    case Errc::Format: return "format";
    case Errc::Protocol: return "protocol";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), m_code(code)
{
}

}  // namespace mbci
