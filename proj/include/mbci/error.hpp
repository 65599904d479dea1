#pragma once

#include <stdexcept>
#include <string>

namespace mbci {

enum class Errc {
    InvalidBand,
    UnsupportedOrder,
    InvalidWindow,
    InvalidRequest,
    TooShort,
    InsufficientChannels,
    InsufficientData,
    UnknownChannel,
    Layout,
    Validation,
    Numerical,
    Fold,
    CriterionUnavailable,
    Io,
    Format,
    Protocol,
};

const char* errc_name(Errc code) noexcept;

/// Exception carrying a machine-readable error category.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);
    Errc code() const noexcept { return m_code; }

private:
    Errc m_code;
};

}  // namespace mbci
