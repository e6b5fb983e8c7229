#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmark/bytes.hpp"

namespace wmark {

inline constexpr std::uint32_t kClassMagic = 0xCAFEBABE;

enum class Tag : std::uint8_t {
    WideSlot = 0,  // placeholder occupying the slot after a Long or Double
    Utf8 = 1,
    Integer = 3,
    Float = 4,
    Long = 5,
    Double = 6,
    Class = 7,
    String = 8,
    Fieldref = 9,
    Methodref = 10,
    InterfaceMethodref = 11,
    NameAndType = 12,
};

namespace acc {
inline constexpr std::uint16_t Public = 0x0001;
inline constexpr std::uint16_t Private = 0x0002;
inline constexpr std::uint16_t Protected = 0x0004;
inline constexpr std::uint16_t Static = 0x0008;
inline constexpr std::uint16_t Final = 0x0010;
inline constexpr std::uint16_t Native = 0x0100;
inline constexpr std::uint16_t Abstract = 0x0400;
}  // namespace acc

// One constant-pool slot. Which payload fields are meaningful depends on tag:
//   Utf8                      -> text (raw modified UTF-8 bytes)
//   Integer/Float             -> bits (low 32 bits)
//   Long/Double               -> bits
//   Class, String             -> a (name_index / string_index)
//   Field/Method/IfaceMethod  -> a = class_index, b = name_and_type_index
//   NameAndType               -> a = name_index, b = descriptor_index
struct ConstantEntry {
    Tag tag = Tag::WideSlot;
    std::string text;
    std::uint64_t bits = 0;
    std::uint16_t a = 0;
    std::uint16_t b = 0;

    bool operator==(const ConstantEntry&) const = default;
};

struct Attribute {
    std::uint16_t name_index = 0;
    Bytes data;  // attribute_length bytes following the header

    bool operator==(const Attribute&) const = default;
};

struct MemberInfo {
    std::uint16_t access_flags = 0;
    std::uint16_t name_index = 0;
    std::uint16_t descriptor_index = 0;
    std::vector<Attribute> attributes;

    bool operator==(const MemberInfo&) const = default;
};

struct ExceptionEntry {
    std::uint16_t start_pc = 0;
    std::uint16_t end_pc = 0;
    std::uint16_t handler_pc = 0;
    std::uint16_t catch_type = 0;

    bool operator==(const ExceptionEntry&) const = default;
};

// Parsed view of a Code attribute. encode() reproduces the attribute payload
// byte for byte when nothing was changed.
struct CodeView {
    static constexpr std::size_t kCodeOffset = 8;  // max_stack, max_locals, code_length

    std::uint16_t max_stack = 0;
    std::uint16_t max_locals = 0;
    Bytes code;
    std::vector<ExceptionEntry> exception_table;
    std::vector<Attribute> attributes;

    static CodeView parse(const Attribute& attr);
    Bytes encode() const;
};

struct LineNumberEntry {
    std::uint16_t start_pc = 0;
    std::uint16_t line_number = 0;
};

struct LocalVariableEntry {
    std::uint16_t start_pc = 0;
    std::uint16_t length = 0;
    std::uint16_t name_index = 0;
    std::uint16_t descriptor_index = 0;
    std::uint16_t index = 0;
};

std::vector<LineNumberEntry> parse_line_numbers(const Attribute& attr);
Bytes encode_line_numbers(const std::vector<LineNumberEntry>& entries);
std::vector<LocalVariableEntry> parse_local_variables(const Attribute& attr);
Bytes encode_local_variables(const std::vector<LocalVariableEntry>& entries);
std::uint16_t parse_source_file(const Attribute& attr);

struct ClassFile {
    std::uint32_t magic = kClassMagic;
    std::uint16_t minor_version = 0;
    std::uint16_t major_version = 0;
    std::vector<ConstantEntry> pool{ConstantEntry{}};  // slot 0 unused
    std::uint16_t access_flags = 0;
    std::uint16_t this_class = 0;
    std::uint16_t super_class = 0;
    std::vector<std::uint16_t> interfaces;
    std::vector<MemberInfo> fields;
    std::vector<MemberInfo> methods;
    std::vector<Attribute> attributes;

    bool operator==(const ClassFile&) const = default;

    const ConstantEntry& entry(std::size_t index, Tag expected) const;
    const std::string& utf8(std::size_t index) const;
    const std::string& class_name(std::size_t index) const;
    std::string this_name() const { return class_name(this_class); }

    const std::string& name_of(const MemberInfo& m) const { return utf8(m.name_index); }
    const std::string& descriptor_of(const MemberInfo& m) const { return utf8(m.descriptor_index); }
    const std::string& attribute_name(const Attribute& a) const { return utf8(a.name_index); }

    // Pool growth. utf8/class/name_and_type reuse an equal existing entry;
    // all throw PoolOverflow past 65535 slots.
    std::uint16_t add_utf8(std::string_view s);
    std::uint16_t add_class(std::string_view name);
    std::uint16_t add_name_and_type(std::string_view name, std::string_view descriptor);
    std::uint16_t append(ConstantEntry e);

    std::optional<std::uint16_t> find_utf8(std::string_view s) const;
};

// Member reference resolved through the pool.
struct MemberRef {
    Tag tag = Tag::Methodref;
    std::string owner;
    std::string name;
    std::string descriptor;
};
MemberRef resolve_ref(const ClassFile& cf, std::size_t index);

ClassFile parse(std::span<const std::uint8_t> bytes);
Bytes serialize(const ClassFile& cf);

// Attribute lookup by name inside a list; nullptr when absent.
const Attribute* find_attribute(const ClassFile& cf, const std::vector<Attribute>& attrs, std::string_view name);
Attribute* find_attribute(const ClassFile& cf, std::vector<Attribute>& attrs, std::string_view name);

struct MethodHit {
    std::size_t index = 0;
    CodeView code;
};

using MethodFilter = std::function<bool(const ClassFile&, const MemberInfo&)>;

// Methods carrying a Code attribute that satisfy the filter, in file order.
std::vector<MethodHit> find_methods(const ClassFile& cf, const MethodFilter& filter);
MethodFilter match_all();
MethodFilter match_name(std::string name);

// Index of the first method with this name that has code; NoSuchMethod otherwise.
std::size_t method_index(const ClassFile& cf, std::string_view name);

}  // namespace wmark
