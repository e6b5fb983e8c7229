#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wmark/error.hpp"

namespace wmark {

using Bytes = std::vector<std::uint8_t>;

// Big-endian cursor over an immutable buffer. Every read past the end throws
// Truncated, so parsers never need their own bounds checks.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u1();
    std::uint16_t u2();
    std::uint32_t u4();
    std::uint64_t u8();
    std::span<const std::uint8_t> take(std::size_t n);

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool done() const noexcept { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    void u1(std::uint8_t v) { out_.push_back(v); }
    void u2(std::uint16_t v);
    void u4(std::uint32_t v);
    void u8(std::uint64_t v);
    void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

    // Width-checked variants: throw IndexOverflow when the value does not fit.
    void u2_checked(std::size_t v, const char* what);
    void u4_checked(std::size_t v, const char* what);

    Bytes& bytes() noexcept { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace wmark
