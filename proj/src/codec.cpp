#include "wmark/codec.hpp"

#include <algorithm>

namespace wmark {

Bitstream Bitstream::from_string(std::string_view bits) {
    Bitstream out;
    for (char c : bits) {
        if (c == '0' || c == '1') {
            out.push_back(c == '1');
        } else if (c != ' ') {
            throw Error(Errc::BadConfig, "bit string contains '" + std::string(1, c) + "'");
        }
    }
    return out;
}

void Bitstream::append_value(unsigned value, unsigned n) {
    for (unsigned i = n; i-- > 0;) bits_.push_back((value >> i) & 1u);
}

unsigned Bitstream::value_at(std::size_t pos, unsigned n) const {
    unsigned v = 0;
    for (unsigned i = 0; i < n; ++i) v = (v << 1) | (bits_.at(pos + i) ? 1u : 0u);
    return v;
}

std::optional<std::size_t> Bitstream::find(const Bitstream& pattern) const {
    if (pattern.size() > size()) return std::nullopt;
    auto it = std::search(bits_.begin(), bits_.end(), pattern.bits_.begin(), pattern.bits_.end());
    if (it == bits_.end() && !pattern.empty()) return std::nullopt;
    return static_cast<std::size_t>(it - bits_.begin());
}

std::string Bitstream::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

std::string Bitstream::to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
        unsigned nibble = 0;
        for (std::size_t j = 0; j < 4; ++j) nibble = (nibble << 1) | (i + j < bits_.size() && bits_[i + j] ? 1u : 0u);
        s.push_back(kDigits[nibble]);
    }
    return s;
}

unsigned BitReader::take(unsigned n) {
    unsigned v = 0;
    for (unsigned i = 0; i < n; ++i, ++pos_) v = (v << 1) | (pos_ < bits_.size() && bits_[pos_] ? 1u : 0u);
    return v;
}

Codebook Codebook::example_book() {
    Codebook b(4);
    b.add(' ', "0000");
    b.add('I', "0001");
    b.add('T', "0010");
    b.add('S', "0011");
    b.add('U', "0100");
    b.add('R', "0101");
    return b;
}

Codebook Codebook::surabaya_book() {
    Codebook b = example_book();
    b.add('A', "0110");
    b.add('B', "0111");
    b.add('Y', "1000");
    return b;
}

void Codebook::add(char symbol, std::string_view code) {
    if (code.size() != width_ || code.find_first_not_of("01") != std::string_view::npos) {
        throw Error(Errc::BadConfig, "code '" + std::string(code) + "' for '" + std::string(1, symbol) +
                                         "' is not a " + std::to_string(width_) + "-bit string");
    }
    std::string c(code);
    if (forward_.count(symbol)) throw Error(Errc::BadConfig, "symbol '" + std::string(1, symbol) + "' mapped twice");
    if (reverse_.count(c)) throw Error(Errc::BadConfig, "code " + c + " assigned to two symbols");
    forward_[symbol] = c;
    reverse_[c] = symbol;
}

std::optional<char> Codebook::symbol_for(const std::string& code) const {
    auto it = reverse_.find(code);
    if (it == reverse_.end()) return std::nullopt;
    return it->second;
}

const std::string& Codebook::code_for(char c) const {
    auto it = forward_.find(c);
    if (it == forward_.end()) throw Error(Errc::UnmappedCharacter, "'" + std::string(1, c) + "' is not in the codebook");
    return it->second;
}

std::string_view keyop_name(KeyOp op) noexcept {
    switch (op) {
        case KeyOp::And: return "AND";
        case KeyOp::Or: return "OR";
        case KeyOp::Xor: return "XOR";
    }
    return "?";
}

std::optional<KeyOp> parse_keyop(std::string_view name) noexcept {
    for (KeyOp op : {KeyOp::And, KeyOp::Or, KeyOp::Xor}) {
        if (keyop_name(op) == name) return op;
    }
    return std::nullopt;
}

Bitstream encode_chars(std::string_view message, const Codebook& book) {
    Bitstream out;
    for (char c : message) out.append(Bitstream::from_string(book.code_for(c)));
    return out;
}

DecodedText decode_chars(const Bitstream& bits, const Codebook& book) {
    DecodedText out;
    const unsigned w = book.width();
    std::size_t whole = w == 0 ? 0 : bits.size() / w;
    for (std::size_t i = 0; i < whole; ++i) {
        std::string chunk;
        for (unsigned j = 0; j < w; ++j) chunk.push_back(bits[i * w + j] ? '1' : '0');
        if (auto c = book.symbol_for(chunk)) {
            out.text.push_back(*c);
        } else {
            out.text.push_back('?');
            ++out.unknown_chunks;
        }
    }
    out.remainder_dropped = whole * w != bits.size();
    return out;
}

Bitstream apply_key(const Bitstream& code, const KeySpec& key) {
    if (key.bits.size() > code.size()) {
        throw Error(Errc::KeyTooLong, "key of " + std::to_string(key.bits.size()) + " bits exceeds code of " +
                                          std::to_string(code.size()));
    }
    Bitstream out;
    std::size_t shift = code.size() - key.bits.size();
    for (std::size_t i = 0; i < code.size(); ++i) {
        bool c = code[i];
        if (i >= shift) {
            bool k = key.bits[i - shift];
            switch (key.op) {
                case KeyOp::And: c = c && k; break;
                case KeyOp::Or: c = c || k; break;
                case KeyOp::Xor: c = c != k; break;
            }
        }
        out.push_back(c);
    }
    return out;
}

std::vector<SiteAssignment> bits_to_codepoints(const Bitstream& bits, const std::vector<CodepointKind>& sites) {
    std::size_t capacity = 0;
    for (auto k : sites) capacity += width(k);
    if (capacity < bits.size()) {
        throw Error(Errc::InsufficientCapacity, "need " + std::to_string(bits.size()) + " bits, sites hold " +
                                                    std::to_string(capacity) + " (short by " +
                                                    std::to_string(bits.size() - capacity) + ")");
    }
    std::vector<SiteAssignment> out;
    BitReader r(bits);
    for (auto kind : sites) {
        if (r.exhausted()) break;
        SiteAssignment a;
        a.kind = kind;
        a.bits_used = static_cast<unsigned>(std::min<std::size_t>(width(kind), r.remaining()));
        a.value = r.take(width(kind));
        bool opcode_site = kind == CodepointKind::Arith8 || kind == CodepointKind::Branch4 ||
                           kind == CodepointKind::Branch2;
        a.byte = opcode_site ? family_opcode(kind, a.value) : static_cast<std::uint8_t>(a.value);
        out.push_back(a);
    }
    return out;
}

Bitstream codepoints_to_bits(const std::vector<Instruction>& instructions, const std::vector<Codepoint>& sites) {
    Bitstream out;
    for (const auto& s : sites) out.append_value(codepoint_value(instructions.at(s.index), s.kind), width(s.kind));
    return out;
}

std::size_t total_width(const std::vector<Codepoint>& sites) noexcept {
    std::size_t n = 0;
    for (const auto& s : sites) n += width(s.kind);
    return n;
}

}  // namespace wmark
