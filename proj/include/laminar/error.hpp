#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laminar {

enum class Errc {
    invalid_argument,
    address,
    overlap,
    decode,
    ambiguity,
    not_encodable,
    capacity,
    conflict,
    busy,
    forbidden,
    scope,
    config,
    data,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the engine. The code is what callers branch on;
/// the message is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, Errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace laminar
