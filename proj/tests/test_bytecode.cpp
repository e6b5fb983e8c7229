#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wmark/bytecode.hpp"
#include "wmark/dummygen.hpp"

using namespace wmark;
using namespace wmark::testing;

namespace {

std::vector<CodepointKind> kinds(const std::vector<Codepoint>& sites) {
    std::vector<CodepointKind> out;
    for (const auto& s : sites) out.push_back(s.kind);
    return out;
}

}  // namespace

TEST(Bytecode, DecodeBipushThenIadd) {
    Bytes code{0x10, 0x2A, 0x60};
    auto insns = decode_instructions(code);
    ASSERT_EQ(insns.size(), 2u);
    EXPECT_EQ(insns[0].offset, 0u);
    EXPECT_EQ(insns[0].opcode, op::bipush);
    EXPECT_EQ(insns[0].operands, Bytes{0x2A});
    EXPECT_EQ(insns[1].offset, 2u);
    EXPECT_EQ(insns[1].opcode, op::iadd);
}

TEST(Bytecode, DecodeSingleIadd) {
    Bytes code{0x60};
    EXPECT_EQ(decode_instructions(code).size(), 1u);
}

TEST(Bytecode, UnknownAndTruncated) {
    Bytes unknown{0xCB};
    EXPECT_ERRC(decode_instructions(unknown), UnknownOpcode);
    Bytes cut{0x10};
    EXPECT_ERRC(decode_instructions(cut), TruncatedInstruction);
    Bytes cut_branch{0x99, 0x00};
    EXPECT_ERRC(decode_instructions(cut_branch), TruncatedInstruction);
}

TEST(Bytecode, SwitchPaddingIsRelativeToMethodStart) {
    // nop; tableswitch at offset 1 -> 2 pad bytes, default, low=0, high=1, two offsets
    Bytes code{0x00, 0xAA, 0, 0, 0, 0, 0, 20, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 20, 0, 0, 0, 20, 0xB1};
    auto insns = decode_instructions(code);
    ASSERT_EQ(insns.size(), 3u);
    EXPECT_EQ(insns[1].opcode, op::tableswitch);
    EXPECT_EQ(insns[1].size(), 23u);
    EXPECT_EQ(insns[2].offset, 24u);
    EXPECT_EQ(branch_targets(insns[1]), (std::vector<std::int64_t>{21, 21, 21}));
    EXPECT_EQ(encode_instructions(insns), code);

    // lookupswitch at offset 0 -> 3 pad bytes, default, npairs=1, one pair
    Bytes lookup{0xAB, 0, 0, 0, 0, 0, 0, 20, 0, 0, 0, 1, 0, 0, 0, 5, 0, 0, 0, 20, 0xB1};
    auto l = decode_instructions(lookup);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0].size(), 20u);
    EXPECT_EQ(encode_instructions(l), lookup);
}

TEST(Bytecode, WideConsumesModifiedInstruction) {
    // wide iinc 300 by -2; wide iload 258; return
    Bytes code{0xC4, 0x84, 0x01, 0x2C, 0xFF, 0xFE, 0xC4, 0x15, 0x01, 0x02, 0xB1};
    auto insns = decode_instructions(code);
    ASSERT_EQ(insns.size(), 3u);
    EXPECT_TRUE(insns[0].wide);
    EXPECT_EQ(insns[0].opcode, op::iinc);
    EXPECT_EQ(insns[0].size(), 6u);
    EXPECT_TRUE(insns[1].wide);
    EXPECT_EQ(insns[1].size(), 4u);
    EXPECT_EQ(insns[2].offset, 10u);
    EXPECT_EQ(encode_instructions(insns), code);
    // wide iinc is never a codepoint: its increment is 16 bits.
    EXPECT_TRUE(scan_codepoints(insns, Mode::Combined).empty());
}

TEST(Bytecode, CombinedScanKeepsCodeOrder) {
    // bipush 5; iadd; iflt +3; ifnull +3
    Bytes code{0x10, 0x05, 0x60, 0x9B, 0x00, 0x03, 0xC6, 0x00, 0x03};
    auto insns = decode_instructions(code);
    EXPECT_EQ(kinds(scan_codepoints(insns, Mode::Combined)),
              (std::vector<CodepointKind>{CodepointKind::OperandBipush, CodepointKind::Arith8, CodepointKind::Branch4,
                                          CodepointKind::Branch2}));
    EXPECT_EQ(kinds(scan_codepoints(insns, Mode::ReplaceOpcodes)),
              (std::vector<CodepointKind>{CodepointKind::Arith8, CodepointKind::Branch4, CodepointKind::Branch2}));
    EXPECT_EQ(kinds(scan_codepoints(insns, Mode::OverwriteOperands)),
              (std::vector<CodepointKind>{CodepointKind::OperandBipush}));
}

TEST(Bytecode, LoadsAndStoresHaveNoCodepoints) {
    Bytes code{0x1B, 0x1C, 0x3C, 0x3D, 0x1D, 0x3E};
    auto insns = decode_instructions(code);
    for (Mode m : {Mode::ReplaceOpcodes, Mode::OverwriteOperands, Mode::Combined}) {
        EXPECT_TRUE(scan_codepoints(insns, m).empty());
    }
}

TEST(Bytecode, IfeqAndIfneAreNotCodepoints) {
    Bytes code{0x99, 0x00, 0x03, 0x9A, 0x00, 0x03};
    EXPECT_TRUE(scan_codepoints(decode_instructions(code), Mode::Combined).empty());
    EXPECT_FALSE(opcode_family(op::ifeq).has_value());
    EXPECT_FALSE(opcode_family(op::ifne).has_value());
}

TEST(Bytecode, FamilyTablesAndWidths) {
    const std::uint8_t arith[8] = {0x60, 0x64, 0x68, 0x6C, 0x70, 0x7E, 0x80, 0x82};
    for (unsigned v = 0; v < 8; ++v) {
        EXPECT_EQ(family_opcode(CodepointKind::Arith8, v), arith[v]);
        EXPECT_EQ(family_value(arith[v]), v);
        EXPECT_EQ(opcode_family(arith[v]), CodepointKind::Arith8);
    }
    const std::uint8_t branch[4] = {0x9B, 0x9C, 0x9D, 0x9E};
    for (unsigned v = 0; v < 4; ++v) {
        EXPECT_EQ(family_opcode(CodepointKind::Branch4, v), branch[v]);
        EXPECT_EQ(family_value(branch[v]), v);
    }
    EXPECT_EQ(family_opcode(CodepointKind::Branch2, 0), op::ifnull);
    EXPECT_EQ(family_opcode(CodepointKind::Branch2, 1), op::ifnonnull);
    EXPECT_EQ(width(CodepointKind::Arith8), 3u);
    EXPECT_EQ(width(CodepointKind::Branch4), 2u);
    EXPECT_EQ(width(CodepointKind::Branch2), 1u);
    EXPECT_EQ(width(CodepointKind::OperandBipush), 8u);
    EXPECT_EQ(width(CodepointKind::OperandIinc), 8u);
}

TEST(Bytecode, RewriteIaddToIsub) {
    Bytes code{0x1B, 0x1C, 0x60, 0x3C};
    auto insns = decode_instructions(code);
    rewrite_opcode(code, insns, 2, op::isub);
    EXPECT_EQ(code, (Bytes{0x1B, 0x1C, 0x64, 0x3C}));
    EXPECT_EQ(insns[2].opcode, op::isub);
}

TEST(Bytecode, RewriteBipushOperand) {
    Bytes code{0x10, 0x2A, 0x60};
    auto insns = decode_instructions(code);
    rewrite_operand(code, insns, 0, 0x49);
    EXPECT_EQ(code, (Bytes{0x10, 0x49, 0x60}));
}

TEST(Bytecode, RewriteIincTouchesOnlyIncrement) {
    Bytes code{0x84, 0x03, 0x01};
    auto insns = decode_instructions(code);
    rewrite_operand(code, insns, 0, 0xF0);
    EXPECT_EQ(code, (Bytes{0x84, 0x03, 0xF0}));
    EXPECT_EQ(codepoint_byte_offset(insns[0], CodepointKind::OperandIinc), 2u);
}

TEST(Bytecode, CrossFamilyRewriteIsRejected) {
    Bytes code{0x60, 0x9B, 0x00, 0x03};
    auto insns = decode_instructions(code);
    Bytes before = code;
    EXPECT_ERRC(rewrite_opcode(code, insns, 0, op::ifnull), FamilyViolation);
    EXPECT_ERRC(rewrite_opcode(code, insns, 1, op::ifeq), FamilyViolation);
    EXPECT_ERRC(rewrite_opcode(code, insns, 1, op::iadd), FamilyViolation);
    EXPECT_EQ(code, before);
}

TEST(Bytecode, NonCodepointRewriteIsRejected) {
    Bytes code{0x1B, 0x60};
    auto insns = decode_instructions(code);
    EXPECT_ERRC(rewrite_opcode(code, insns, 0, op::iload_2), NotACodepoint);
    EXPECT_ERRC(rewrite_operand(code, insns, 1, 7), NotACodepoint);
}

TEST(Bytecode, DecodeEncodeIdentityOnFixtures) {
    for (const auto& name : all_fixtures()) {
        ClassFile cf = fixture(name);
        for (const auto& hit : find_methods(cf, match_all())) {
            auto insns = decode_instructions(hit.code.code);
            EXPECT_EQ(encode_instructions(insns), hit.code.code) << name;
            // Tiling: each instruction starts where the previous one ended.
            std::size_t pos = 0;
            for (const auto& i : insns) {
                EXPECT_EQ(i.offset, pos);
                pos += i.size();
            }
            EXPECT_EQ(pos, hit.code.code.size());
        }
    }
}

TEST(Bytecode, FixtureCountsMatchManifest) {
    // The manifest comes from the independent assembler that built the fixtures.
    for (const auto& f : manifest()["fixtures"]) {
        ClassFile cf = fixture(f["name"]);
        for (const auto& m : f["methods"]) {
            if (!m.value("has_code", true)) continue;
            auto hits = find_methods(cf, [&](const ClassFile& c, const MemberInfo& mi) {
                return c.name_of(mi) == m["name"] && c.descriptor_of(mi) == m["descriptor"];
            });
            ASSERT_EQ(hits.size(), 1u) << f["name"] << "." << m["name"];
            auto insns = decode_instructions(hits[0].code.code);
            EXPECT_EQ(insns.size(), m["instructions"].get<std::size_t>()) << m["name"];
            std::size_t c[5] = {};
            for (const auto& s : scan_codepoints(insns, Mode::Combined)) ++c[static_cast<int>(s.kind)];
            EXPECT_EQ(c[0], m["arith8"].get<std::size_t>()) << f["name"] << "." << m["name"];
            EXPECT_EQ(c[1], m["branch4"].get<std::size_t>()) << f["name"] << "." << m["name"];
            EXPECT_EQ(c[2], m["branch2"].get<std::size_t>()) << f["name"] << "." << m["name"];
            EXPECT_EQ(c[3], m["bipush"].get<std::size_t>()) << f["name"] << "." << m["name"];
            EXPECT_EQ(c[4], m["iinc"].get<std::size_t>()) << f["name"] << "." << m["name"];
        }
    }
}

TEST(Bytecode, FuzzedRewritesPreserveLengthAndStackShape) {
    std::mt19937_64 rng(11);
    for (const auto& name : dummy_fixtures()) {
        ClassFile cf = fixture(name);
        std::size_t idx = method_index(cf, dummy_of(name));
        Attribute* attr = find_attribute(cf, cf.methods[idx].attributes, "Code");
        for (int round = 0; round < 50; ++round) {
            CodeView view = CodeView::parse(*attr);
            Bytes code = view.code;
            auto insns = decode_instructions(code);
            for (const auto& s : scan_codepoints(insns, Mode::Combined)) {
                unsigned v = static_cast<unsigned>(rng() % (1u << width(s.kind)));
                if (s.kind == CodepointKind::OperandBipush || s.kind == CodepointKind::OperandIinc) {
                    rewrite_operand(code, insns, s.index, static_cast<std::uint8_t>(v));
                } else {
                    rewrite_opcode(code, insns, s.index, family_opcode(s.kind, v));
                }
            }
            ASSERT_EQ(code.size(), view.code.size());
            view.code = code;
            ClassFile mutated = cf;
            find_attribute(mutated, mutated.methods[idx].attributes, "Code")->data = view.encode();
            StructureReport rep = validate_structure(mutated, idx);
            EXPECT_TRUE(rep.ok) << name << ": " << rep.diagnostic;
        }
    }
}
