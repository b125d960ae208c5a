#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nestex {

enum class Errc {
    format,           // malformed file structure (header, row width)
    parse,            // a cell failed to parse or was non-finite
    size_mismatch,    // N != m^{2K}
    invalid_argument, // caller-supplied parameter out of contract
    bounds,           // index out of range
    domain,           // outer function evaluated outside its domain
    capability,       // problem cannot do what was asked (e.g. no conditional sampler)
    numerical,        // linear solve failed even after the ridge fallback
    io,               // read/write failure
};

inline std::string_view to_string(Errc c) noexcept {
    switch (c) {
        case Errc::format: return "format error";
        case Errc::parse: return "parse error";
        case Errc::size_mismatch: return "size mismatch";
        case Errc::invalid_argument: return "invalid argument";
        case Errc::bounds: return "out of bounds";
        case Errc::domain: return "domain error";
        case Errc::capability: return "capability error";
        case Errc::numerical: return "numerical error";
        case Errc::io: return "i/o error";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

    // Errors caused by bad user input rather than by the computation itself.
    [[nodiscard]] bool is_usage() const noexcept {
        return code_ == Errc::format || code_ == Errc::parse || code_ == Errc::size_mismatch ||
               code_ == Errc::invalid_argument || code_ == Errc::bounds;
    }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nestex
