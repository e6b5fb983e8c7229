#include "wmark/config.hpp"

#include <json.hpp>

#include "wmark/bytes.hpp"

namespace wmark {

using nlohmann::json;

WatermarkConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::BadConfig, e.what());
    }
    if (!j.is_object()) throw Error(Errc::BadConfig, "config must be a JSON object");

    WatermarkConfig cfg;
    try {
        if (j.contains("codebook")) {
            const auto& cb = j.at("codebook");
            if (!cb.is_object() || cb.empty()) throw Error(Errc::BadConfig, "codebook must be a non-empty object");
            unsigned w = static_cast<unsigned>(cb.begin().value().get<std::string>().size());
            Codebook book(w);
            for (const auto& [symbol, code] : cb.items()) {
                if (symbol.size() != 1) throw Error(Errc::BadConfig, "codebook key '" + symbol + "' is not one byte");
                book.add(symbol[0], code.get<std::string>());
            }
            cfg.book = std::move(book);
        }
        if (j.contains("key")) {
            const auto& k = j.at("key");
            cfg.key.bits = Bitstream::from_string(k.value("bits", ""));
            std::string op = k.value("op", "XOR");
            auto parsed = parse_keyop(op);
            if (!parsed) throw Error(Errc::BadConfig, "unknown key operator '" + op + "'");
            cfg.key.op = *parsed;
        }
        if (j.contains("mode")) {
            std::string m = j.at("mode").get<std::string>();
            auto parsed = parse_mode(m);
            if (!parsed) throw Error(Errc::BadConfig, "unknown mode '" + m + "'");
            cfg.mode = *parsed;
        }
    } catch (const json::exception& e) {
        throw Error(Errc::BadConfig, e.what());
    }
    return cfg;
}

WatermarkConfig load_config(const std::filesystem::path& path) {
    Bytes raw = read_file(path);
    return parse_config(std::string(raw.begin(), raw.end()));
}

std::string config_to_json(const WatermarkConfig& config) {
    json cb = json::object();
    for (const auto& [symbol, code] : config.book.entries()) cb[std::string(1, symbol)] = code;
    json j;
    j["codebook"] = cb;
    j["key"] = {{"bits", config.key.bits.to_string()}, {"op", std::string(keyop_name(config.key.op))}};
    j["mode"] = std::string(mode_name(config.mode));
    return j.dump(2);
}

}  // namespace wmark
