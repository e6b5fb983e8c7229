#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wmark/dummygen.hpp"
#include "wmark/embedder.hpp"
#include "wmark/extractor.hpp"

using namespace wmark;
using namespace wmark::testing;

namespace {

// Replaces a method's code array, keeping the rest of its Code attribute.
void set_code(ClassFile& cf, std::size_t method, const Bytes& code) {
    Attribute* attr = find_attribute(cf, cf.methods[method].attributes, "Code");
    CodeView view = CodeView::parse(*attr);
    view.code = code;
    view.attributes.clear();
    attr->data = view.encode();
}

WatermarkConfig plain_config() {
    WatermarkConfig c;
    c.book = Codebook::surabaya_book();
    return c;
}

// Byte ranges of a method's code array inside the serialized file.
std::pair<std::size_t, std::size_t> code_span(const Bytes& file, const ClassFile& cf, std::size_t method) {
    const Attribute* attr = find_attribute(cf, cf.methods[method].attributes, "Code");
    // Locate the attribute payload by searching the unique byte sequence.
    auto it = std::search(file.begin(), file.end(), attr->data.begin(), attr->data.end());
    std::size_t start = static_cast<std::size_t>(it - file.begin()) + CodeView::kCodeOffset;
    return {start, start + CodeView::parse(*attr).code.size()};
}

}  // namespace

TEST(Embedder, CapacitySumsWidths) {
    ClassFile cf = fixture("HelloWorld");
    std::size_t m = method_index(cf, "main");
    Bytes code;
    for (int i = 0; i < 8; ++i) code.push_back(op::iadd);
    for (int i = 0; i < 4; ++i) code.insert(code.end(), {op::ifle, 0, 3});
    for (int i = 0; i < 2; ++i) code.insert(code.end(), {op::ifnull, 0, 3});
    for (int i = 0; i < 3; ++i) code.insert(code.end(), {op::bipush, 9});
    code.insert(code.end(), {op::iinc, 1, 1});
    code.push_back(op::return_);
    set_code(cf, m, code);
    EXPECT_EQ(capacity(cf, m, Mode::Combined), 66u);
    EXPECT_EQ(capacity(cf, m, Mode::ReplaceOpcodes), 34u);
    EXPECT_EQ(capacity(cf, m, Mode::OverwriteOperands), 32u);
}

TEST(Embedder, MethodWithoutCodepointsHasZeroCapacity) {
    ClassFile cf = fixture("HelloWorld");
    std::size_t m = method_index(cf, "<init>");
    for (Mode mode : {Mode::ReplaceOpcodes, Mode::OverwriteOperands, Mode::Combined}) {
        EXPECT_EQ(capacity(cf, m, mode), 0u);
    }
}

TEST(Embedder, AbstractMethodHasNoCode) {
    ClassFile cf = fixture("HelloWorld");
    cf.methods[0].access_flags |= acc::Abstract;
    EXPECT_ERRC(capacity(cf, 0, Mode::Combined), NoCode);
}

TEST(Embedder, DummyCapacitiesMatchManifest) {
    for (const auto& f : manifest()["fixtures"]) {
        if (!f.contains("dummy")) continue;
        ClassFile cf = fixture(f["name"]);
        std::size_t m = method_index(cf, f["dummy"].get<std::string>());
        const auto& caps = f["dummy_capacity"];
        EXPECT_EQ(capacity(cf, m, Mode::ReplaceOpcodes), caps["replace_opcodes"].get<std::size_t>()) << f["name"];
        EXPECT_EQ(capacity(cf, m, Mode::OverwriteOperands), caps["overwrite_operands"].get<std::size_t>());
        EXPECT_EQ(capacity(cf, m, Mode::Combined), caps["combined"].get<std::size_t>());
        EXPECT_GE(capacity(cf, m, Mode::ReplaceOpcodes), 48u) << f["name"];
    }
}

TEST(Embedder, ItsSurabayaRoundTripsThroughExtractor) {
    ClassFile cf = fixture("Stylepad");
    std::size_t z = method_index(cf, "Z");
    EmbedResult r = embed(cf, z, "ITS SURABAYA", plain_config());
    EXPECT_EQ(r.plan.required_bits, 48u);
    EXPECT_EQ(r.plan.sites_used, 16u);
    ClassFile back = parse(serialize(r.model));
    auto reports = decode_all(back, Mode::ReplaceOpcodes, Codebook::surabaya_book());
    std::size_t hits = 0;
    for (const auto& rep : reports) {
        if (rep.decoded.text.find("ITS SURABAYA") != std::string::npos) {
            ++hits;
            EXPECT_EQ(rep.name, "Z");
        }
    }
    EXPECT_EQ(hits, 1u);
    Verdict v = verify(back, "ITS SURABAYA", plain_config());
    EXPECT_TRUE(v.found);
    EXPECT_EQ(v.method, "Z");
    EXPECT_EQ(v.bit_offset, 0u);
}

TEST(Embedder, EmptyMessageLeavesFileUntouched) {
    Bytes raw = fixture_bytes("Stylepad");
    ClassFile cf = parse(raw);
    EmbedResult r = embed(cf, method_index(cf, "Z"), "", plain_config());
    EXPECT_EQ(serialize(r.model), raw);
    EXPECT_TRUE(r.plan.changes.empty());
}

TEST(Embedder, OneBitOverCapacityIsRejected) {
    ClassFile cf = fixture("HelloWorld");
    std::size_t m = method_index(cf, "main");
    // 16 iadd sites: 48 bits, exactly twelve characters.
    Bytes code(16, op::iadd);
    code.push_back(op::return_);
    set_code(cf, m, code);
    WatermarkConfig c = plain_config();
    EXPECT_NO_THROW(embed(cf, m, "ITS SURABAYA", c));
    // Drop one bit of capacity.
    code[15] = op::nop;
    set_code(cf, m, code);
    ASSERT_EQ(capacity(cf, m, Mode::ReplaceOpcodes), 45u);
    Bytes op_sites = {op::iflt, 0, 3};
    code.erase(code.begin() + 15);
    code.insert(code.begin() + 15, op_sites.begin(), op_sites.end());
    set_code(cf, m, code);
    ASSERT_EQ(capacity(cf, m, Mode::ReplaceOpcodes), 47u);
    try {
        embed(cf, m, "ITS SURABAYA", c);
        FAIL() << "expected InsufficientCapacity";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InsufficientCapacity);
        EXPECT_NE(std::string(e.what()).find("short by 1"), std::string::npos);
    }
}

TEST(Embedder, DiffConfinedToTargetCode) {
    Bytes raw = fixture_bytes("Wonderland");
    ClassFile cf = parse(raw);
    std::size_t m = method_index(cf, "R");
    for (Mode mode : {Mode::ReplaceOpcodes, Mode::OverwriteOperands, Mode::Combined}) {
        WatermarkConfig c = plain_config();
        c.mode = mode;
        EmbedResult r = embed(cf, m, "RUBY IS AT", c);
        Bytes out = serialize(r.model);
        ASSERT_EQ(out.size(), raw.size());
        auto [lo, hi] = code_span(raw, cf, m);
        std::size_t diffs = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == out[i]) continue;
            ++diffs;
            EXPECT_TRUE(i >= lo && i < hi) << "byte " << i << " outside the code of R";
        }
        EXPECT_LE(diffs, r.plan.sites_used);
        EXPECT_EQ(r.model.methods.size(), cf.methods.size());
        EXPECT_TRUE(validate_structure(parse(out), m).ok);
    }
}

TEST(Embedder, Deterministic) {
    ClassFile cf = fixture("FireWorks");
    std::size_t m = method_index(cf, "Y");
    WatermarkConfig c = plain_config();
    c.key = {Bitstream::from_string("1100101011"), KeyOp::Xor};
    EXPECT_EQ(serialize(embed(cf, m, "ITS SURABAYA", c).model), serialize(embed(cf, m, "ITS SURABAYA", c).model));
}

TEST(Embedder, ReembedOverwrites) {
    ClassFile cf = fixture("Stylepad");
    std::size_t z = method_index(cf, "Z");
    WatermarkConfig c = plain_config();
    ClassFile once = embed(cf, z, "BUSY", c).model;
    ClassFile twice = embed(once, z, "RUSTY", c).model;
    EXPECT_TRUE(verify(twice, "RUSTY", c).found);
}

TEST(Embedder, PlanJsonCarriesReport) {
    ClassFile cf = fixture("Stylepad");
    EmbedResult r = embed(cf, method_index(cf, "Z"), "ITS", plain_config());
    auto j = nlohmann::json::parse(r.plan.to_json());
    EXPECT_EQ(j["method"], "Z");
    EXPECT_EQ(j["required_bits"], 12);
    EXPECT_EQ(j["sites_used"], 4);
    EXPECT_EQ(j["changes"].size(), r.plan.changes.size());
}
