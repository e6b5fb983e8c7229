#pragma once

#include <filesystem>
#include <string>

#include "wmark/codec.hpp"

namespace wmark {

// Key material and embedding choices. JSON form:
//   {"codebook": {"I": "0001", ...}, "key": {"bits": "1100101011", "op": "AND"},
//    "mode": "replace_opcodes"}
// Missing members fall back to the defaults below.
struct WatermarkConfig {
    Codebook book = Codebook::surabaya_book();
    KeySpec key;
    Mode mode = Mode::ReplaceOpcodes;
};

WatermarkConfig parse_config(const std::string& json_text);
WatermarkConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const WatermarkConfig& config);

}  // namespace wmark
