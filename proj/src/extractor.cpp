#include "wmark/extractor.hpp"

#include <json.hpp>

namespace wmark {

std::vector<MethodReport> decode_all(const ClassFile& cf, Mode mode, const Codebook& book) {
    std::vector<MethodReport> out;
    for (auto& hit : find_methods(cf, match_all())) {
        const auto& m = cf.methods[hit.index];
        MethodReport r;
        r.method = hit.index;
        r.name = cf.name_of(m);
        r.descriptor = cf.descriptor_of(m);
        auto insns = decode_instructions(hit.code.code);
        r.bits = codepoints_to_bits(insns, scan_codepoints(insns, mode));
        r.decoded = decode_chars(r.bits, book);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::size_t> find_all(const Bitstream& bits, const Bitstream& pattern) {
    std::vector<std::size_t> out;
    if (pattern.empty() || pattern.size() > bits.size()) return out;
    for (std::size_t i = 0; i + pattern.size() <= bits.size(); ++i) {
        std::size_t j = 0;
        while (j < pattern.size() && bits[i + j] == pattern[j]) ++j;
        if (j == pattern.size()) out.push_back(i);
    }
    return out;
}

Verdict verify(const ClassFile& cf, std::string_view message, const WatermarkConfig& config) {
    Verdict v;
    Bitstream raw = encode_chars(message, config.book);
    if (raw.empty()) {
        v.found = true;
        v.degenerate = true;
        return v;
    }
    Bitstream expected = apply_key(raw, config.key);
    for (const auto& r : decode_all(cf, config.mode, config.book)) {
        if (auto pos = r.bits.find(expected)) {
            v.found = true;
            v.method = r.name;
            v.method_index = r.method;
            v.bit_offset = *pos;
            return v;
        }
    }
    return v;
}

Verdict verify_bytes(std::span<const std::uint8_t> bytes, std::string_view message, const WatermarkConfig& config) {
    try {
        return verify(parse(bytes), message, config);
    } catch (const Error& e) {
        if (e.code() == Errc::UnmappedCharacter || e.code() == Errc::KeyTooLong) throw;
        Verdict v;
        v.error = e.what();
        return v;
    }
}

std::vector<Verdict> verify_files(const std::vector<std::filesystem::path>& files, std::string_view message,
                                  const WatermarkConfig& config) {
    std::vector<Verdict> out;
    for (const auto& f : files) {
        Verdict v;
        try {
            v = verify_bytes(read_file(f), message, config);
        } catch (const Error& e) {
            if (e.code() != Errc::Io) throw;
            v.error = e.what();
        }
        v.file = f.string();
        out.push_back(std::move(v));
    }
    return out;
}

std::string Verdict::to_json() const {
    nlohmann::json j;
    j["file"] = file;
    j["verdict"] = found ? "Found" : "NotFound";
    if (found && !degenerate) {
        j["method"] = method;
        j["method_index"] = method_index;
        j["bit_offset"] = bit_offset;
    }
    if (degenerate) j["degenerate"] = true;
    if (!error.empty()) j["error"] = error;
    return j.dump();
}

std::string report_json_line(const std::string& file, const MethodReport& r, const std::vector<std::size_t>& matches) {
    nlohmann::json j;
    j["file"] = file;
    j["method"] = r.name;
    j["descriptor"] = r.descriptor;
    j["bit_length"] = r.bits.size();
    j["bits_hex"] = r.bits.to_hex();
    j["text"] = r.decoded.text;
    j["unknown_chunks"] = r.decoded.unknown_chunks;
    j["remainder_dropped"] = r.decoded.remainder_dropped;
    j["matches"] = matches;
    return j.dump();
}

}  // namespace wmark
