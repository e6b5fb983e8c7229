#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmark {

enum class Errc {
    // classfile
    BadMagic,
    Truncated,
    BadPoolTag,
    DanglingIndex,
    Malformed,
    TrailingBytes,
    IndexOverflow,
    // bytecode
    UnknownOpcode,
    TruncatedInstruction,
    FamilyViolation,
    NotACodepoint,
    // codec
    UnmappedCharacter,
    KeyTooLong,
    BadConfig,
    // embedder / dummygen
    InsufficientCapacity,
    NoCode,
    NoSuchMethod,
    NameCollision,
    PoolOverflow,
    // opaque
    MalformedGroup,
    // attacks
    ToolMissing,
    ToolFailed,
    // io
    Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace wmark
