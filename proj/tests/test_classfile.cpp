#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wmark/bytecode.hpp"
#include "wmark/classfile.hpp"

using namespace wmark;
using namespace wmark::testing;

TEST(ClassFile, RoundTripIsByteIdenticalForEveryFixture) {
    for (const auto& name : all_fixtures()) {
        Bytes raw = fixture_bytes(name);
        EXPECT_EQ(serialize(parse(raw)), raw) << name;
    }
}

TEST(ClassFile, ReparseOfSerializedModelIsEqual) {
    for (const auto& name : all_fixtures()) {
        ClassFile cf = fixture(name);
        EXPECT_EQ(parse(serialize(cf)), cf) << name;
    }
}

TEST(ClassFile, HelloWorldResolvesThisClass) {
    ClassFile cf = fixture("HelloWorld");
    EXPECT_EQ(cf.magic, kClassMagic);
    EXPECT_EQ(cf.this_name(), "HelloWorld");
    EXPECT_EQ(cf.class_name(cf.super_class), "java/lang/Object");
    EXPECT_EQ(cf.major_version, 48);
}

TEST(ClassFile, ZeroMagicIsRejected) {
    Bytes raw = fixture_bytes("HelloWorld");
    raw[0] = raw[1] = raw[2] = raw[3] = 0;
    EXPECT_ERRC(parse(raw), BadMagic);
}

TEST(ClassFile, EveryTruncationIsRejected) {
    Bytes raw = fixture_bytes("HelloWorld");
    Bytes half(raw.begin(), raw.begin() + raw.size() / 2);
    EXPECT_ERRC(parse(half), Truncated);
    // No prefix may parse; anything shorter than the magic is still Truncated.
    for (std::size_t n = 0; n < raw.size(); ++n) {
        std::span<const std::uint8_t> prefix(raw.data(), n);
        auto code = thrown_code([&] { parse(prefix); });
        ASSERT_TRUE(code.has_value()) << "prefix " << n << " parsed";
        EXPECT_TRUE(*code == Errc::Truncated || *code == Errc::Malformed) << "prefix " << n;
    }
}

TEST(ClassFile, TrailingGarbageIsRejected) {
    Bytes raw = fixture_bytes("HelloWorld");
    raw.push_back(0);
    EXPECT_ERRC(parse(raw), TrailingBytes);
}

TEST(ClassFile, UnknownPoolTagIsRejected) {
    Bytes raw = fixture_bytes("HelloWorld");
    raw[10] = 2;  // first pool entry's tag; 2 is unassigned
    EXPECT_ERRC(parse(raw), BadPoolTag);
}

TEST(ClassFile, DanglingThisClassIsRejected) {
    ClassFile cf = fixture("HelloWorld");
    cf.this_class = static_cast<std::uint16_t>(cf.pool.size() + 5);
    EXPECT_ERRC(parse(serialize(cf)), DanglingIndex);
}

TEST(ClassFile, WrongTagBehindIndexIsRejected) {
    ClassFile cf = fixture("HelloWorld");
    // super_class must name a Class entry; point it at a Utf8.
    cf.super_class = cf.pool[cf.super_class].a;
    EXPECT_ERRC(parse(serialize(cf)), DanglingIndex);
}

TEST(ClassFile, SeventyThousandPoolEntriesOverflow) {
    ClassFile cf = fixture("HelloWorld");
    ConstantEntry e{Tag::Integer, {}, 7, 0, 0};
    while (cf.pool.size() < 70000) cf.pool.push_back(e);
    EXPECT_ERRC(serialize(cf), IndexOverflow);
}

TEST(ClassFile, AppendPastPoolLimitThrowsPoolOverflow) {
    ClassFile cf = fixture("HelloWorld");
    ConstantEntry e{Tag::Integer, {}, 7, 0, 0};
    while (cf.pool.size() < 65535) cf.pool.push_back(e);
    EXPECT_ERRC(cf.append(e), PoolOverflow);
}

TEST(ClassFile, LongAndDoubleTakeTwoSlots) {
    ClassFile cf = fixture("HelloWorld");
    std::size_t before = cf.pool.size();
    std::uint16_t idx = cf.append(ConstantEntry{Tag::Long, {}, 0x0123456789ABCDEFull, 0, 0});
    EXPECT_EQ(idx, before);
    EXPECT_EQ(cf.pool.size(), before + 2);
    EXPECT_EQ(cf.pool[before + 1].tag, Tag::WideSlot);
    ClassFile back = parse(serialize(cf));
    EXPECT_EQ(back.pool[idx].bits, 0x0123456789ABCDEFull);
    EXPECT_EQ(back, cf);
}

TEST(ClassFile, AddUtf8Deduplicates) {
    ClassFile cf = fixture("HelloWorld");
    std::size_t before = cf.pool.size();
    std::uint16_t a = cf.add_utf8("main");
    EXPECT_EQ(cf.pool.size(), before);
    EXPECT_EQ(cf.utf8(a), "main");
    std::uint16_t b = cf.add_utf8("definitely_new");
    EXPECT_EQ(cf.pool.size(), before + 1);
    EXPECT_EQ(cf.add_utf8("definitely_new"), b);
}

TEST(ClassFile, OneOpcodeReplacementDiffersInExactlyOneByte) {
    Bytes raw = fixture_bytes("Stylepad");
    ClassFile cf = parse(raw);
    auto hits = find_methods(cf, match_name("Z"));
    ASSERT_EQ(hits.size(), 1u);
    auto insns = decode_instructions(hits[0].code.code);
    auto sites = scan_codepoints(insns, Mode::ReplaceOpcodes);
    ASSERT_FALSE(sites.empty());
    const auto& target = insns[sites[0].index];
    ASSERT_EQ(sites[0].kind, CodepointKind::Arith8);

    Attribute* code = find_attribute(cf, cf.methods[hits[0].index].attributes, "Code");
    ASSERT_NE(code, nullptr);
    std::uint8_t& byte = code->data[CodeView::kCodeOffset + target.offset];
    byte = byte == op::iadd ? op::isub : op::iadd;

    Bytes out = serialize(cf);
    ASSERT_EQ(out.size(), raw.size());
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) diffs += raw[i] != out[i];
    EXPECT_EQ(diffs, 1u);
}

TEST(ClassFile, FindMethodsByName) {
    ClassFile cf = fixture("Stylepad");
    auto hits = find_methods(cf, match_name("Z"));
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(cf.name_of(cf.methods[hits[0].index]), "Z");
    EXPECT_EQ(cf.descriptor_of(cf.methods[hits[0].index]), "(I)V");
    EXPECT_TRUE(find_methods(cf, match_name("no_such_method")).empty());
    EXPECT_ERRC(method_index(cf, "no_such_method"), NoSuchMethod);
}

TEST(ClassFile, FindAllSkipsAbstractAndNative) {
    for (const auto& name : all_fixtures()) {
        ClassFile cf = fixture(name);
        std::size_t with_code = 0;
        for (const auto& m : cf.methods) with_code += !(m.access_flags & (acc::Abstract | acc::Native));
        EXPECT_EQ(find_methods(cf, match_all()).size(), with_code) << name;
    }
    // A method flagged native is dropped even if it still carries code.
    ClassFile cf = fixture("HelloWorld");
    std::size_t all = find_methods(cf, match_all()).size();
    cf.methods[0].access_flags |= acc::Native;
    EXPECT_EQ(find_methods(cf, match_all()).size(), all - 1);
}

TEST(ClassFile, FindMethodsFollowsFileOrder) {
    ClassFile cf = fixture("Stylepad");
    auto hits = find_methods(cf, match_all());
    for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_LT(hits[i - 1].index, hits[i].index);
}

TEST(ClassFile, CodeViewEncodesBackToAttribute) {
    for (const auto& name : all_fixtures()) {
        ClassFile cf = fixture(name);
        for (const auto& m : cf.methods) {
            const Attribute* code = find_attribute(cf, m.attributes, "Code");
            if (!code) continue;
            CodeView view = CodeView::parse(*code);
            EXPECT_EQ(view.encode(), code->data) << name << "." << cf.name_of(m);
            for (const auto& e : view.exception_table) {
                EXPECT_LE(e.end_pc, view.code.size());
                EXPECT_LT(e.handler_pc, view.code.size());
            }
        }
    }
}

TEST(ClassFile, DebugTablesRoundTrip) {
    ClassFile cf = fixture("Stylepad");
    std::size_t tables = 0;
    for (const auto& m : cf.methods) {
        const Attribute* code = find_attribute(cf, m.attributes, "Code");
        if (!code) continue;
        CodeView view = CodeView::parse(*code);
        if (const Attribute* lnt = find_attribute(cf, view.attributes, "LineNumberTable")) {
            EXPECT_EQ(encode_line_numbers(parse_line_numbers(*lnt)), lnt->data);
            ++tables;
        }
        if (const Attribute* lvt = find_attribute(cf, view.attributes, "LocalVariableTable")) {
            EXPECT_EQ(encode_local_variables(parse_local_variables(*lvt)), lvt->data);
            ++tables;
        }
    }
    EXPECT_GT(tables, 0u);
    const Attribute* sf = find_attribute(cf, cf.attributes, "SourceFile");
    ASSERT_NE(sf, nullptr);
    EXPECT_EQ(cf.utf8(parse_source_file(*sf)), "Stylepad.java");
}

TEST(ClassFile, ResolveMethodref) {
    ClassFile cf = fixture("HelloWorld");
    bool saw_println = false;
    for (std::size_t i = 1; i < cf.pool.size(); ++i) {
        if (cf.pool[i].tag != Tag::Methodref) continue;
        MemberRef r = resolve_ref(cf, i);
        if (r.name == "println") {
            saw_println = true;
            EXPECT_EQ(r.owner, "java/io/PrintStream");
            EXPECT_EQ(r.descriptor, "(Ljava/lang/String;)V");
        }
    }
    EXPECT_TRUE(saw_println);
    EXPECT_ERRC(resolve_ref(cf, cf.this_class), DanglingIndex);
}
