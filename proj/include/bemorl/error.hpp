#pragma once

#include <stdexcept>
#include <string>

namespace bemorl {

/// Error categories surfaced by the library. The CLI maps them to
/// machine-readable error records.
enum class ErrorKind {
    Config,     // malformed model, layout or config values
    Stability,  // explicit integration step above the stable bound
    Ingest,     // weather / front / checkpoint file parsing
    Asset,      // unknown layout or climate id
    Lifecycle,  // env stepped before reset or after done
    Validation, // preference off the simplex, bad reference point, ...
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

} // namespace bemorl
