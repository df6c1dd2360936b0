#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace semflow {

// Base error carrying a stable machine-readable kind tag. The CLI prints
// "semflow: error[<kind>]: <message>" on stderr so callers can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct UnknownTokenError : Error {
    explicit UnknownTokenError(const std::string& m) : Error("unknown_token", m) {}
};

struct VocabularyError : Error {
    explicit VocabularyError(const std::string& m) : Error("vocabulary", m) {}
};

struct GrammarError : Error {
    explicit GrammarError(const std::string& m) : Error("grammar", m) {}
};

struct UnresolvableReferentError : Error {
    explicit UnresolvableReferentError(const std::string& m) : Error("unresolvable_referent", m) {}
};

struct UnsupportedTaskError : Error {
    explicit UnsupportedTaskError(const std::string& m) : Error("unsupported_task", m) {}
};

// Raised by apply_patch; op_index identifies the failing op within the patch.
struct PatchError : Error {
    PatchError(int index, const std::string& m)
        : Error("patch", "op " + std::to_string(index) + ": " + m), op_index(index) {}
    int op_index;
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

// Out-of-domain numeric arguments (e.g. velocity queried at t = 0).
struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain", m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace semflow
