#pragma once

#include <stdexcept>
#include <string>

namespace annotex {

// Base of every error thrown by the toolkit. `code()` is a stable,
// machine-readable identifier used in CLI diagnostics and reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// File-level problems: malformed bytes, schema violations. CLI exit code 2.
class ParseError : public Error {
public:
    using Error::Error;
};

// Everything that goes wrong after a successful parse. CLI exit code 3.
class RuntimeError : public Error {
public:
    using Error::Error;
};

inline ParseError syntax_error(const std::string& msg) { return {"SyntaxError", msg}; }
inline ParseError schema_error(const std::string& msg) { return {"SchemaError", msg}; }
inline ParseError semantic_error(const std::string& msg) { return {"SemanticError", msg}; }

}  // namespace annotex
