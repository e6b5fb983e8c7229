#include "wmark/classfile.hpp"

#include <algorithm>

namespace wmark {

namespace {

std::string tag_name(Tag t) {
    switch (t) {
        case Tag::WideSlot: return "wide-slot";
        case Tag::Utf8: return "Utf8";
        case Tag::Integer: return "Integer";
        case Tag::Float: return "Float";
        case Tag::Long: return "Long";
        case Tag::Double: return "Double";
        case Tag::Class: return "Class";
        case Tag::String: return "String";
        case Tag::Fieldref: return "Fieldref";
        case Tag::Methodref: return "Methodref";
        case Tag::InterfaceMethodref: return "InterfaceMethodref";
        case Tag::NameAndType: return "NameAndType";
    }
    return "?";
}

bool is_ref(Tag t) { return t == Tag::Fieldref || t == Tag::Methodref || t == Tag::InterfaceMethodref; }

std::vector<Attribute> read_attributes(ByteReader& r) {
    std::uint16_t count = r.u2();
    std::vector<Attribute> attrs;
    attrs.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        Attribute a;
        a.name_index = r.u2();
        std::uint32_t len = r.u4();
        auto body = r.take(len);
        a.data.assign(body.begin(), body.end());
        attrs.push_back(std::move(a));
    }
    return attrs;
}

void write_attributes(ByteWriter& w, const std::vector<Attribute>& attrs) {
    w.u2_checked(attrs.size(), "attributes_count");
    for (const auto& a : attrs) {
        w.u2(a.name_index);
        w.u4_checked(a.data.size(), "attribute_length");
        w.raw(a.data);
    }
}

std::vector<MemberInfo> read_members(ByteReader& r) {
    std::uint16_t count = r.u2();
    std::vector<MemberInfo> out;
    out.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        MemberInfo m;
        m.access_flags = r.u2();
        m.name_index = r.u2();
        m.descriptor_index = r.u2();
        m.attributes = read_attributes(r);
        out.push_back(std::move(m));
    }
    return out;
}

void write_members(ByteWriter& w, const std::vector<MemberInfo>& members, const char* what) {
    w.u2_checked(members.size(), what);
    for (const auto& m : members) {
        w.u2(m.access_flags);
        w.u2(m.name_index);
        w.u2(m.descriptor_index);
        write_attributes(w, m.attributes);
    }
}

ConstantEntry read_entry(ByteReader& r, std::size_t slot) {
    ConstantEntry e;
    std::uint8_t tag = r.u1();
    switch (tag) {
        case 1: {
            e.tag = Tag::Utf8;
            std::uint16_t len = r.u2();
            auto s = r.take(len);
            e.text.assign(s.begin(), s.end());
            break;
        }
        case 3:
        case 4:
            e.tag = static_cast<Tag>(tag);
            e.bits = r.u4();
            break;
        case 5:
        case 6:
            e.tag = static_cast<Tag>(tag);
            e.bits = r.u8();
            break;
        case 7:
        case 8:
            e.tag = static_cast<Tag>(tag);
            e.a = r.u2();
            break;
        case 9:
        case 10:
        case 11:
        case 12:
            e.tag = static_cast<Tag>(tag);
            e.a = r.u2();
            e.b = r.u2();
            break;
        default:
            throw Error(Errc::BadPoolTag, "tag " + std::to_string(tag) + " at pool slot " + std::to_string(slot));
    }
    return e;
}

// Every stored index must resolve to an entry of the tag the format requires.
void check_index(const ClassFile& cf, std::size_t index, Tag expected, const std::string& where) {
    if (index == 0 || index >= cf.pool.size()) {
        throw Error(Errc::DanglingIndex, where + " -> #" + std::to_string(index) + " outside pool of " +
                                             std::to_string(cf.pool.size() - 1));
    }
    if (cf.pool[index].tag != expected) {
        throw Error(Errc::DanglingIndex, where + " -> #" + std::to_string(index) + " is " +
                                             tag_name(cf.pool[index].tag) + ", expected " + tag_name(expected));
    }
}

void check_attributes(const ClassFile& cf, const std::vector<Attribute>& attrs, const std::string& where) {
    for (const auto& a : attrs) check_index(cf, a.name_index, Tag::Utf8, where + " attribute name");
}

void validate(const ClassFile& cf) {
    for (std::size_t i = 1; i < cf.pool.size(); ++i) {
        const auto& e = cf.pool[i];
        std::string where = "pool #" + std::to_string(i);
        switch (e.tag) {
            case Tag::Class:
            case Tag::String: check_index(cf, e.a, Tag::Utf8, where); break;
            case Tag::Fieldref:
            case Tag::Methodref:
            case Tag::InterfaceMethodref:
                check_index(cf, e.a, Tag::Class, where);
                check_index(cf, e.b, Tag::NameAndType, where);
                break;
            case Tag::NameAndType:
                check_index(cf, e.a, Tag::Utf8, where);
                check_index(cf, e.b, Tag::Utf8, where);
                break;
            default: break;
        }
    }
    check_index(cf, cf.this_class, Tag::Class, "this_class");
    if (cf.super_class != 0) check_index(cf, cf.super_class, Tag::Class, "super_class");
    for (auto i : cf.interfaces) check_index(cf, i, Tag::Class, "interface");
    for (const auto* list : {&cf.fields, &cf.methods}) {
        for (const auto& m : *list) {
            check_index(cf, m.name_index, Tag::Utf8, "member name");
            check_index(cf, m.descriptor_index, Tag::Utf8, "member descriptor");
            check_attributes(cf, m.attributes, "member");
        }
    }
    check_attributes(cf, cf.attributes, "class");
}

}  // namespace

CodeView CodeView::parse(const Attribute& attr) {
    ByteReader r(attr.data);
    CodeView v;
    v.max_stack = r.u2();
    v.max_locals = r.u2();
    std::uint32_t len = r.u4();
    auto code = r.take(len);
    v.code.assign(code.begin(), code.end());
    std::uint16_t n = r.u2();
    for (std::uint16_t i = 0; i < n; ++i) {
        ExceptionEntry e;
        e.start_pc = r.u2();
        e.end_pc = r.u2();
        e.handler_pc = r.u2();
        e.catch_type = r.u2();
        v.exception_table.push_back(e);
    }
    v.attributes = read_attributes(r);
    if (!r.done()) throw Error(Errc::Malformed, "Code attribute has trailing bytes");
    return v;
}

Bytes CodeView::encode() const {
    ByteWriter w;
    w.u2(max_stack);
    w.u2(max_locals);
    w.u4_checked(code.size(), "code_length");
    w.raw(code);
    w.u2_checked(exception_table.size(), "exception_table_length");
    for (const auto& e : exception_table) {
        w.u2(e.start_pc);
        w.u2(e.end_pc);
        w.u2(e.handler_pc);
        w.u2(e.catch_type);
    }
    write_attributes(w, attributes);
    return w.take();
}

std::vector<LineNumberEntry> parse_line_numbers(const Attribute& attr) {
    ByteReader r(attr.data);
    std::vector<LineNumberEntry> out(r.u2());
    for (auto& e : out) {
        e.start_pc = r.u2();
        e.line_number = r.u2();
    }
    if (!r.done()) throw Error(Errc::Malformed, "LineNumberTable length mismatch");
    return out;
}

Bytes encode_line_numbers(const std::vector<LineNumberEntry>& entries) {
    ByteWriter w;
    w.u2_checked(entries.size(), "line_number_table_length");
    for (const auto& e : entries) {
        w.u2(e.start_pc);
        w.u2(e.line_number);
    }
    return w.take();
}

std::vector<LocalVariableEntry> parse_local_variables(const Attribute& attr) {
    ByteReader r(attr.data);
    std::vector<LocalVariableEntry> out(r.u2());
    for (auto& e : out) {
        e.start_pc = r.u2();
        e.length = r.u2();
        e.name_index = r.u2();
        e.descriptor_index = r.u2();
        e.index = r.u2();
    }
    if (!r.done()) throw Error(Errc::Malformed, "LocalVariableTable length mismatch");
    return out;
}

Bytes encode_local_variables(const std::vector<LocalVariableEntry>& entries) {
    ByteWriter w;
    w.u2_checked(entries.size(), "local_variable_table_length");
    for (const auto& e : entries) {
        w.u2(e.start_pc);
        w.u2(e.length);
        w.u2(e.name_index);
        w.u2(e.descriptor_index);
        w.u2(e.index);
    }
    return w.take();
}

std::uint16_t parse_source_file(const Attribute& attr) {
    ByteReader r(attr.data);
    std::uint16_t idx = r.u2();
    if (!r.done()) throw Error(Errc::Malformed, "SourceFile length mismatch");
    return idx;
}

const ConstantEntry& ClassFile::entry(std::size_t index, Tag expected) const {
    check_index(*this, index, expected, "lookup");
    return pool[index];
}

const std::string& ClassFile::utf8(std::size_t index) const { return entry(index, Tag::Utf8).text; }

const std::string& ClassFile::class_name(std::size_t index) const { return utf8(entry(index, Tag::Class).a); }

std::uint16_t ClassFile::append(ConstantEntry e) {
    bool wide = e.tag == Tag::Long || e.tag == Tag::Double;
    if (pool.size() + (wide ? 2 : 1) > 0xFFFF) {
        throw Error(Errc::PoolOverflow, "constant pool would exceed 65535 slots");
    }
    auto idx = static_cast<std::uint16_t>(pool.size());
    pool.push_back(std::move(e));
    if (wide) pool.push_back(ConstantEntry{});
    return idx;
}

std::optional<std::uint16_t> ClassFile::find_utf8(std::string_view s) const {
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].tag == Tag::Utf8 && pool[i].text == s) return static_cast<std::uint16_t>(i);
    }
    return std::nullopt;
}

std::uint16_t ClassFile::add_utf8(std::string_view s) {
    if (auto i = find_utf8(s)) return *i;
    ConstantEntry e;
    e.tag = Tag::Utf8;
    e.text = std::string(s);
    return append(std::move(e));
}

std::uint16_t ClassFile::add_class(std::string_view name) {
    std::uint16_t n = add_utf8(name);
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].tag == Tag::Class && pool[i].a == n) return static_cast<std::uint16_t>(i);
    }
    ConstantEntry e;
    e.tag = Tag::Class;
    e.a = n;
    return append(std::move(e));
}

std::uint16_t ClassFile::add_name_and_type(std::string_view name, std::string_view descriptor) {
    std::uint16_t n = add_utf8(name);
    std::uint16_t d = add_utf8(descriptor);
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].tag == Tag::NameAndType && pool[i].a == n && pool[i].b == d) return static_cast<std::uint16_t>(i);
    }
    ConstantEntry e;
    e.tag = Tag::NameAndType;
    e.a = n;
    e.b = d;
    return append(std::move(e));
}

MemberRef resolve_ref(const ClassFile& cf, std::size_t index) {
    if (index == 0 || index >= cf.pool.size() || !is_ref(cf.pool[index].tag)) {
        throw Error(Errc::DanglingIndex, "#" + std::to_string(index) + " is not a member reference");
    }
    const auto& e = cf.pool[index];
    const auto& nat = cf.entry(e.b, Tag::NameAndType);
    return MemberRef{e.tag, cf.class_name(e.a), cf.utf8(nat.a), cf.utf8(nat.b)};
}

ClassFile parse(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    ClassFile cf;
    if (bytes.size() < 4) throw Error(Errc::Truncated, "shorter than the magic number");
    cf.magic = r.u4();
    if (cf.magic != kClassMagic) throw Error(Errc::BadMagic, "first four bytes are not CAFEBABE");
    cf.minor_version = r.u2();
    cf.major_version = r.u2();
    std::uint16_t pool_count = r.u2();
    if (pool_count == 0) throw Error(Errc::Malformed, "constant_pool_count is zero");
    cf.pool.reserve(pool_count);
    for (std::size_t slot = 1; slot < pool_count; ++slot) {
        ConstantEntry e = read_entry(r, slot);
        bool wide = e.tag == Tag::Long || e.tag == Tag::Double;
        cf.pool.push_back(std::move(e));
        if (wide) {
            if (slot + 1 >= pool_count) throw Error(Errc::Malformed, "wide constant in the last pool slot");
            cf.pool.push_back(ConstantEntry{});
            ++slot;
        }
    }
    cf.access_flags = r.u2();
    cf.this_class = r.u2();
    cf.super_class = r.u2();
    std::uint16_t n_if = r.u2();
    for (std::uint16_t i = 0; i < n_if; ++i) cf.interfaces.push_back(r.u2());
    cf.fields = read_members(r);
    cf.methods = read_members(r);
    cf.attributes = read_attributes(r);
    if (!r.done()) throw Error(Errc::TrailingBytes, std::to_string(r.remaining()) + " bytes after the class body");
    validate(cf);
    return cf;
}

Bytes serialize(const ClassFile& cf) {
    ByteWriter w;
    w.u4(cf.magic);
    w.u2(cf.minor_version);
    w.u2(cf.major_version);
    w.u2_checked(cf.pool.size(), "constant_pool_count");
    for (std::size_t i = 1; i < cf.pool.size(); ++i) {
        const auto& e = cf.pool[i];
        if (e.tag == Tag::WideSlot) continue;
        w.u1(static_cast<std::uint8_t>(e.tag));
        switch (e.tag) {
            case Tag::Utf8:
                w.u2_checked(e.text.size(), "Utf8 length");
                w.raw(std::span(reinterpret_cast<const std::uint8_t*>(e.text.data()), e.text.size()));
                break;
            case Tag::Integer:
            case Tag::Float: w.u4(static_cast<std::uint32_t>(e.bits)); break;
            case Tag::Long:
            case Tag::Double: w.u8(e.bits); break;
            case Tag::Class:
            case Tag::String: w.u2(e.a); break;
            default:
                w.u2(e.a);
                w.u2(e.b);
                break;
        }
    }
    w.u2(cf.access_flags);
    w.u2(cf.this_class);
    w.u2(cf.super_class);
    w.u2_checked(cf.interfaces.size(), "interfaces_count");
    for (auto i : cf.interfaces) w.u2(i);
    write_members(w, cf.fields, "fields_count");
    write_members(w, cf.methods, "methods_count");
    write_attributes(w, cf.attributes);
    return w.take();
}

const Attribute* find_attribute(const ClassFile& cf, const std::vector<Attribute>& attrs, std::string_view name) {
    for (const auto& a : attrs) {
        if (cf.attribute_name(a) == name) return &a;
    }
    return nullptr;
}

Attribute* find_attribute(const ClassFile& cf, std::vector<Attribute>& attrs, std::string_view name) {
    for (auto& a : attrs) {
        if (cf.attribute_name(a) == name) return &a;
    }
    return nullptr;
}

std::vector<MethodHit> find_methods(const ClassFile& cf, const MethodFilter& filter) {
    std::vector<MethodHit> hits;
    for (std::size_t i = 0; i < cf.methods.size(); ++i) {
        const auto& m = cf.methods[i];
        if (m.access_flags & (acc::Abstract | acc::Native)) continue;
        const Attribute* code = find_attribute(cf, m.attributes, "Code");
        if (!code || !filter(cf, m)) continue;
        hits.push_back(MethodHit{i, CodeView::parse(*code)});
    }
    return hits;
}

MethodFilter match_all() {
    return [](const ClassFile&, const MemberInfo&) { return true; };
}

MethodFilter match_name(std::string name) {
    return [name = std::move(name)](const ClassFile& cf, const MemberInfo& m) { return cf.name_of(m) == name; };
}

std::size_t method_index(const ClassFile& cf, std::string_view name) {
    for (std::size_t i = 0; i < cf.methods.size(); ++i) {
        const auto& m = cf.methods[i];
        if (cf.name_of(m) == name && find_attribute(cf, m.attributes, "Code")) return i;
    }
    throw Error(Errc::NoSuchMethod, "no method named '" + std::string(name) + "' with code in " + cf.this_name());
}

}  // namespace wmark
