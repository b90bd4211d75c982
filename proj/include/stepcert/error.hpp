#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace stepcert {

// All library failures carry a stable machine-readable code alongside the
// human-readable message.  Codes are compared by tests and by the CLI when
// mapping failures to exit statuses, so they are part of the interface.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& what) {
    throw Error(code, what);
}

// Precondition helper: `code` names the contract violated.
inline void require(bool ok, const std::string& code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace stepcert
