#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdsim {

/// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument values: out-of-range labels, bad ranks, empty inputs.
class InputError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatches between tensors, payloads or bundles.
class ShapeError : public InputError {
public:
    using InputError::InputError;
};

/// API misuse that breaks a call contract (e.g. a stale forward cache).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Wire decoding failure. `code` distinguishes the failure class so tests
/// and callers can react to truncation vs. a foreign blob.
class DecodeError : public Error {
public:
    enum class Code { BadMagic, BadVersion, BadKind, Truncated, BadLayout };

    DecodeError(Code c, const std::string& msg) : Error(msg), code(c) {}
    Code code;
};

/// Config file problem; `key_path` names the offending key ("channel.eta").
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& msg)
        : Error(path.empty() ? msg : path + ": " + msg), key_path(std::move(path)) {}
    std::string key_path;
};

/// Malformed on-disk artifact (CSV log, checkpoint); carries a line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line_no, const std::string& msg)
        : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    std::size_t line;
};

}  // namespace fdsim
