#pragma once

#include <stdexcept>
#include <string>

namespace batnet {

// Base class for all error conditions raised by the library.  Expected
// outcomes of noisy reception (no sync found, block CRC failure) are not
// errors and are reported through optional return values instead.
struct ModemError : std::runtime_error {
    explicit ModemError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigInvalid : ModemError {
    explicit ConfigInvalid(const std::string& what) : ModemError(what) {}
};

struct PayloadTooLong : ModemError {
    explicit PayloadTooLong(const std::string& what) : ModemError(what) {}
};

struct BufferTooShort : ModemError {
    explicit BufferTooShort(const std::string& what) : ModemError(what) {}
};

struct ZeroMagnitude : ModemError {
    explicit ZeroMagnitude(const std::string& what) : ModemError(what) {}
};

struct LengthMismatch : ModemError {
    explicit LengthMismatch(const std::string& what) : ModemError(what) {}
};

struct InvalidProfile : ModemError {
    explicit InvalidProfile(const std::string& what) : ModemError(what) {}
};

struct UnknownAxis : ModemError {
    explicit UnknownAxis(const std::string& what) : ModemError(what) {}
};

struct WavError : ModemError {
    explicit WavError(const std::string& what) : ModemError(what) {}
};

}  // namespace batnet
