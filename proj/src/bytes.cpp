#include "wmark/bytes.hpp"

#include <fstream>
#include <iterator>

namespace wmark {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::BadMagic: return "BadMagic";
        case Errc::Truncated: return "Truncated";
        case Errc::BadPoolTag: return "BadPoolTag";
        case Errc::DanglingIndex: return "DanglingIndex";
        case Errc::Malformed: return "Malformed";
        case Errc::TrailingBytes: return "TrailingBytes";
        case Errc::IndexOverflow: return "IndexOverflow";
        case Errc::UnknownOpcode: return "UnknownOpcode";
        case Errc::TruncatedInstruction: return "TruncatedInstruction";
        case Errc::FamilyViolation: return "FamilyViolation";
        case Errc::NotACodepoint: return "NotACodepoint";
        case Errc::UnmappedCharacter: return "UnmappedCharacter";
        case Errc::KeyTooLong: return "KeyTooLong";
        case Errc::BadConfig: return "BadConfig";
        case Errc::InsufficientCapacity: return "InsufficientCapacity";
        case Errc::NoCode: return "NoCode";
        case Errc::NoSuchMethod: return "NoSuchMethod";
        case Errc::NameCollision: return "NameCollision";
        case Errc::PoolOverflow: return "PoolOverflow";
        case Errc::MalformedGroup: return "MalformedGroup";
        case Errc::ToolMissing: return "ToolMissing";
        case Errc::ToolFailed: return "ToolFailed";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

void ByteReader::need(std::size_t n) const {
    if (n > remaining()) {
        throw Error(Errc::Truncated, "need " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                                         ", have " + std::to_string(remaining()));
    }
}

std::uint8_t ByteReader::u1() {
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u2() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u4() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u8() {
    std::uint64_t hi = u4();
    return (hi << 32) | u4();
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
    need(n);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
}

void ByteWriter::u2(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u4(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u8(std::uint64_t v) {
    u4(static_cast<std::uint32_t>(v >> 32));
    u4(static_cast<std::uint32_t>(v));
}

void ByteWriter::u2_checked(std::size_t v, const char* what) {
    if (v > 0xFFFF) throw Error(Errc::IndexOverflow, std::string(what) + " = " + std::to_string(v) + " exceeds u2");
    u2(static_cast<std::uint16_t>(v));
}

void ByteWriter::u4_checked(std::size_t v, const char* what) {
    if (v > 0xFFFFFFFFull) throw Error(Errc::IndexOverflow, std::string(what) + " exceeds u4");
    u4(static_cast<std::uint32_t>(v));
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

}  // namespace wmark
