#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wmark/bytes.hpp"

namespace wmark {

namespace op {
inline constexpr std::uint8_t nop = 0x00;
inline constexpr std::uint8_t bipush = 0x10;
inline constexpr std::uint8_t iload_1 = 0x1B;
inline constexpr std::uint8_t iload_2 = 0x1C;
inline constexpr std::uint8_t iload_3 = 0x1D;
inline constexpr std::uint8_t aload_0 = 0x2A;
inline constexpr std::uint8_t istore_1 = 0x3C;
inline constexpr std::uint8_t istore_2 = 0x3D;
inline constexpr std::uint8_t istore_3 = 0x3E;
inline constexpr std::uint8_t iadd = 0x60;
inline constexpr std::uint8_t isub = 0x64;
inline constexpr std::uint8_t imul = 0x68;
inline constexpr std::uint8_t idiv = 0x6C;
inline constexpr std::uint8_t irem = 0x70;
inline constexpr std::uint8_t iand = 0x7E;
inline constexpr std::uint8_t ior = 0x80;
inline constexpr std::uint8_t ixor = 0x82;
inline constexpr std::uint8_t iinc = 0x84;
inline constexpr std::uint8_t ifeq = 0x99;
inline constexpr std::uint8_t ifne = 0x9A;
inline constexpr std::uint8_t iflt = 0x9B;
inline constexpr std::uint8_t ifge = 0x9C;
inline constexpr std::uint8_t ifgt = 0x9D;
inline constexpr std::uint8_t ifle = 0x9E;
inline constexpr std::uint8_t goto_ = 0xA7;
inline constexpr std::uint8_t tableswitch = 0xAA;
inline constexpr std::uint8_t lookupswitch = 0xAB;
inline constexpr std::uint8_t return_ = 0xB1;
inline constexpr std::uint8_t invokevirtual = 0xB6;
inline constexpr std::uint8_t invokespecial = 0xB7;
inline constexpr std::uint8_t invokestatic = 0xB8;
inline constexpr std::uint8_t invokeinterface = 0xB9;
inline constexpr std::uint8_t wide = 0xC4;
inline constexpr std::uint8_t ifnull = 0xC6;
inline constexpr std::uint8_t ifnonnull = 0xC7;
}  // namespace op

// Static facts about one opcode. Stack effects are in slots; kVaries marks
// opcodes whose effect depends on a pool entry or operand.
struct OpcodeInfo {
    static constexpr int kVaries = -1;

    std::string_view mnemonic;
    int length = 0;  // total bytes including opcode; 0 for switches and wide
    int pops = 0;
    int pushes = 0;
};

const OpcodeInfo* opcode_info(std::uint8_t opcode) noexcept;

struct Instruction {
    std::uint32_t offset = 0;
    std::uint8_t opcode = 0;
    bool wide = false;  // prefixed by 0xC4; opcode is the modified instruction
    Bytes operands;     // bytes after the opcode (after the modified opcode when wide)

    std::size_t size() const noexcept { return (wide ? 2 : 1) + operands.size(); }
    std::int32_t branch_offset() const;  // for 2- and 4-byte relative branches
};

std::vector<Instruction> decode_instructions(std::span<const std::uint8_t> code);
Bytes encode_instructions(const std::vector<Instruction>& instructions);

// Absolute branch targets (including switch cases and default) of one instruction.
std::vector<std::int64_t> branch_targets(const Instruction& insn);

enum class CodepointKind { Arith8, Branch4, Branch2, OperandBipush, OperandIinc };
enum class Mode { ReplaceOpcodes, OverwriteOperands, Combined };

unsigned width(CodepointKind kind) noexcept;
std::string_view kind_name(CodepointKind kind) noexcept;
std::string_view mode_name(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view name) noexcept;

// Opcode families in bit order: index i encodes the value i.
inline constexpr std::uint8_t kArith8[8] = {op::iadd, op::isub, op::imul, op::idiv,
                                            op::irem, op::iand, op::ior,  op::ixor};
inline constexpr std::uint8_t kBranch4[4] = {op::iflt, op::ifge, op::ifgt, op::ifle};
inline constexpr std::uint8_t kBranch2[2] = {op::ifnull, op::ifnonnull};

// Family of an opcode taken as a replaceable codepoint; nullopt if none.
std::optional<CodepointKind> opcode_family(std::uint8_t opcode) noexcept;
// Position of the opcode inside its family (its bit value).
unsigned family_value(std::uint8_t opcode);
std::uint8_t family_opcode(CodepointKind kind, unsigned value);

struct Codepoint {
    std::size_t index = 0;  // into the instruction list
    CodepointKind kind = CodepointKind::Arith8;

    bool operator==(const Codepoint&) const = default;
};

std::vector<Codepoint> scan_codepoints(const std::vector<Instruction>& instructions, Mode mode);

// Byte offset within the code array of the byte a codepoint writes.
std::uint32_t codepoint_byte_offset(const Instruction& insn, CodepointKind kind);
// Bit value currently stored at a codepoint.
unsigned codepoint_value(const Instruction& insn, CodepointKind kind);

// In-place rewrites. Code length never changes; only the targeted byte differs.
void rewrite_opcode(Bytes& code, std::vector<Instruction>& instructions, std::size_t index, std::uint8_t new_opcode);
void rewrite_operand(Bytes& code, std::vector<Instruction>& instructions, std::size_t index, std::uint8_t value);

}  // namespace wmark
