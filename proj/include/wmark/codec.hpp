#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmark/bytecode.hpp"

namespace wmark {

class Bitstream {
public:
    Bitstream() = default;
    static Bitstream from_string(std::string_view bits);  // '0'/'1' only; spaces ignored

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i]; }
    void push_back(bool b) { bits_.push_back(b); }
    void append(const Bitstream& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }
    // Appends the low `n` bits of value, most significant first.
    void append_value(unsigned value, unsigned n);
    // Reads `n` bits at `pos` as an unsigned value, most significant first.
    unsigned value_at(std::size_t pos, unsigned n) const;

    // First position where `pattern` occurs, or nullopt. Empty pattern matches at 0.
    std::optional<std::size_t> find(const Bitstream& pattern) const;

    std::string to_string() const;
    std::string to_hex() const;  // zero-padded on the right to whole nibbles

    bool operator==(const Bitstream&) const = default;

private:
    std::vector<bool> bits_;
};

// Sequential consumer; reading past the end yields zeros and marks underrun.
class BitReader {
public:
    explicit BitReader(const Bitstream& bits) : bits_(bits) {}
    unsigned take(unsigned n);
    std::size_t consumed() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return pos_ < bits_.size() ? bits_.size() - pos_ : 0; }
    bool exhausted() const noexcept { return pos_ >= bits_.size(); }

private:
    const Bitstream& bits_;
    std::size_t pos_ = 0;
};

class Codebook {
public:
    explicit Codebook(unsigned width = 4) : width_(width) {}

    // Six-symbol book from the worked example: space, I, T, S, U, R.
    static Codebook example_book();
    // Example book extended in order of appearance for "ITS SURABAYA": A, B, Y.
    static Codebook surabaya_book();

    void add(char symbol, std::string_view code);  // BadConfig on width mismatch or collision

    unsigned width() const noexcept { return width_; }
    std::size_t size() const noexcept { return forward_.size(); }
    bool contains(char c) const { return forward_.count(c) != 0; }
    const std::map<char, std::string>& entries() const noexcept { return forward_; }
    std::optional<char> symbol_for(const std::string& code) const;
    const std::string& code_for(char c) const;

private:
    unsigned width_;
    std::map<char, std::string> forward_;
    std::map<std::string, char> reverse_;
};

enum class KeyOp { And, Or, Xor };
std::string_view keyop_name(KeyOp op) noexcept;
std::optional<KeyOp> parse_keyop(std::string_view name) noexcept;

struct KeySpec {
    Bitstream bits;  // empty means pass-through
    KeyOp op = KeyOp::Xor;
};

Bitstream encode_chars(std::string_view message, const Codebook& book);

struct DecodedText {
    std::string text;
    std::size_t unknown_chunks = 0;
    bool remainder_dropped = false;
};

// Never throws on hostile input: unmapped chunks become '?'.
DecodedText decode_chars(const Bitstream& bits, const Codebook& book);

// Key right-aligned under the code; uncovered leading bits pass through.
Bitstream apply_key(const Bitstream& code, const KeySpec& key);

struct SiteAssignment {
    CodepointKind kind = CodepointKind::Arith8;
    unsigned value = 0;      // bit value for the site
    std::uint8_t byte = 0;   // opcode or operand byte realizing the value
    unsigned bits_used = 0;  // < width only for a zero-padded final site
};

// Greedy in-order fill. Sites after the bits run out are not returned.
std::vector<SiteAssignment> bits_to_codepoints(const Bitstream& bits, const std::vector<CodepointKind>& sites);

// Bits currently carried by the given sites of an instruction list.
Bitstream codepoints_to_bits(const std::vector<Instruction>& instructions, const std::vector<Codepoint>& sites);

std::size_t total_width(const std::vector<Codepoint>& sites) noexcept;

}  // namespace wmark
