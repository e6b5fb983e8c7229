#pragma once

#include <filesystem>
#include <optional>
#include <json.hpp>
#include <string>
#include <vector>

#include "wmark/bytes.hpp"
#include "wmark/classfile.hpp"
#include "wmark/error.hpp"

namespace wmark::testing {

inline std::filesystem::path fixture_dir() { return WMARK_FIXTURE_DIR; }

inline std::filesystem::path class_path(const std::string& name) {
    return fixture_dir() / "classes" / (name + ".class");
}

inline Bytes fixture_bytes(const std::string& name) { return read_file(class_path(name)); }

inline ClassFile fixture(const std::string& name) { return parse(fixture_bytes(name)); }

// Loaded once; returning a reference keeps range-for over manifest()["fixtures"] safe.
inline const nlohmann::json& manifest() {
    static const nlohmann::json m = [] {
        Bytes raw = read_file(fixture_dir() / "manifest.json");
        return nlohmann::json::parse(raw.begin(), raw.end());
    }();
    return m;
}

// Every committed class file, by fixture name.
inline std::vector<std::string> all_fixtures() {
    std::vector<std::string> out;
    for (const auto& f : manifest()["fixtures"]) out.push_back(f["name"].get<std::string>());
    return out;
}

// Fixtures carrying a dummy method (guarded or not).
inline std::vector<std::string> dummy_fixtures() {
    std::vector<std::string> out;
    for (const auto& f : manifest()["fixtures"]) {
        if (f.contains("dummy")) out.push_back(f["name"].get<std::string>());
    }
    return out;
}

inline std::string dummy_of(const std::string& fixture_name) {
    for (const auto& f : manifest()["fixtures"]) {
        if (f["name"] == fixture_name) return f.value("dummy", "");
    }
    return {};
}

// Runs f and reports which Errc it threw; nullopt when it returned normally.
template <class F>
std::optional<Errc> thrown_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

}  // namespace wmark::testing

#define EXPECT_ERRC(expr, errc) EXPECT_EQ(::wmark::testing::thrown_code([&] { (void)(expr); }), ::wmark::Errc::errc)
