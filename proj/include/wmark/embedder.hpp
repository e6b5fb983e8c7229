#pragma once

#include <string>
#include <vector>

#include "wmark/classfile.hpp"
#include "wmark/config.hpp"

namespace wmark {

// Bits the method can carry under the mode. NoCode for abstract/native.
std::size_t capacity(const ClassFile& cf, std::size_t method, Mode mode);

struct SiteChange {
    std::uint32_t code_offset = 0;  // byte position inside the code array
    CodepointKind kind = CodepointKind::Arith8;
    std::uint8_t before = 0;
    std::uint8_t after = 0;
    unsigned bits_used = 0;
};

struct EmbedPlan {
    std::size_t method = 0;
    std::string method_name;
    Mode mode = Mode::ReplaceOpcodes;
    std::size_t required_bits = 0;
    std::size_t capacity = 0;
    std::size_t sites_used = 0;
    std::size_t sites_available = 0;
    std::string keyed_bits;
    std::vector<SiteChange> changes;

    std::string to_json() const;
};

struct EmbedResult {
    ClassFile model;
    EmbedPlan plan;
};

// Writes apply_key(encode_chars(message)) into the method's codepoints.
// Only bytes of that method's code array change.
EmbedResult embed(const ClassFile& cf, std::size_t method, std::string_view message, const WatermarkConfig& config);

}  // namespace wmark
