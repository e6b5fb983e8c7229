#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wmark/classfile.hpp"
#include "wmark/config.hpp"

namespace wmark {

struct MethodReport {
    std::size_t method = 0;
    std::string name;
    std::string descriptor;
    Bitstream bits;
    DecodedText decoded;
};

// One entry per method with code, in file order.
std::vector<MethodReport> decode_all(const ClassFile& cf, Mode mode, const Codebook& book);

struct Verdict {
    std::string file;
    bool found = false;
    bool degenerate = false;  // empty message: trivially found
    std::string method;
    std::size_t method_index = 0;
    std::size_t bit_offset = 0;
    std::string error;  // set when the file could not be read or parsed

    std::string to_json() const;
};

// Found iff the keyed message bits occur contiguously in some method's stream.
Verdict verify(const ClassFile& cf, std::string_view message, const WatermarkConfig& config);
Verdict verify_bytes(std::span<const std::uint8_t> bytes, std::string_view message, const WatermarkConfig& config);
std::vector<Verdict> verify_files(const std::vector<std::filesystem::path>& files, std::string_view message,
                                  const WatermarkConfig& config);

// JSON line per (file, method): hex bitstream, decoded text, match offsets.
std::string report_json_line(const std::string& file, const MethodReport& r, const std::vector<std::size_t>& matches);

// All occurrences of pattern in bits (possibly overlapping).
std::vector<std::size_t> find_all(const Bitstream& bits, const Bitstream& pattern);

}  // namespace wmark
