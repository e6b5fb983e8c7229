#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wmark/bytecode.hpp"
#include "wmark/classfile.hpp"
#include "wmark/opaque.hpp"

namespace wmark {

enum class Shape { R, S, X, Y, Z };
std::string_view shape_name(Shape s) noexcept;
std::optional<Shape> parse_shape(std::string_view name) noexcept;

struct DummySpec {
    std::size_t bits = 0;
    Mode mode = Mode::ReplaceOpcodes;
    std::string name = "Z";
    Shape shape = Shape::X;
};

// Appends a private (I)V method whose body is int arithmetic with at least
// spec.bits of codepoint capacity under spec.mode.
ClassFile synthesize_dummy(const ClassFile& cf, const DummySpec& spec);

struct StructureReport {
    bool ok = true;
    std::uint32_t offset = 0;
    std::string diagnostic;
    std::uint16_t max_depth = 0;
};

// Abstract stack-depth simulation. Never throws: every problem, including
// undecodable code, comes back as a diagnostic.
StructureReport validate_structure(const ClassFile& cf, std::size_t method);
StructureReport validate_code(const ClassFile& cf, const CodeView& code, std::string_view descriptor, bool is_static);

struct Snippet {
    std::string file;
    std::string text;
};

// Source-level route: dummy template, Node ring, mover threads and guard.
std::vector<Snippet> emit_source_snippets(const DummySpec& spec, Algorithm algorithm);
std::string dummy_template(Shape shape, std::string_view name);
void write_snippets(const std::vector<Snippet>& snippets, const std::filesystem::path& dir);

// Slots taken by a field descriptor or by a method's arguments / return value.
unsigned descriptor_slots(std::string_view field_descriptor);
unsigned argument_slots(std::string_view method_descriptor);
unsigned return_slots(std::string_view method_descriptor);

}  // namespace wmark
