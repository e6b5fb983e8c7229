#include "wmark/bytecode.hpp"

#include <array>
#include <string>

namespace wmark {

namespace {

constexpr int V = OpcodeInfo::kVaries;

struct Table {
    std::array<OpcodeInfo, 256> ops{};
    std::array<bool, 256> known{};

    constexpr void set(int code, std::string_view name, int length, int pops, int pushes) {
        ops[code] = OpcodeInfo{name, length, pops, pushes};
        known[code] = true;
    }
};

constexpr Table build_table() {
    Table t;
    t.set(0x00, "nop", 1, 0, 0);
    t.set(0x01, "aconst_null", 1, 0, 1);
    t.set(0x02, "iconst_m1", 1, 0, 1);
    t.set(0x03, "iconst_0", 1, 0, 1);
    t.set(0x04, "iconst_1", 1, 0, 1);
    t.set(0x05, "iconst_2", 1, 0, 1);
    t.set(0x06, "iconst_3", 1, 0, 1);
    t.set(0x07, "iconst_4", 1, 0, 1);
    t.set(0x08, "iconst_5", 1, 0, 1);
    t.set(0x09, "lconst_0", 1, 0, 2);
    t.set(0x0A, "lconst_1", 1, 0, 2);
    t.set(0x0B, "fconst_0", 1, 0, 1);
    t.set(0x0C, "fconst_1", 1, 0, 1);
    t.set(0x0D, "fconst_2", 1, 0, 1);
    t.set(0x0E, "dconst_0", 1, 0, 2);
    t.set(0x0F, "dconst_1", 1, 0, 2);
    t.set(0x10, "bipush", 2, 0, 1);
    t.set(0x11, "sipush", 3, 0, 1);
    t.set(0x12, "ldc", 2, 0, 1);
    t.set(0x13, "ldc_w", 3, 0, 1);
    t.set(0x14, "ldc2_w", 3, 0, 2);
    t.set(0x15, "iload", 2, 0, 1);
    t.set(0x16, "lload", 2, 0, 2);
    t.set(0x17, "fload", 2, 0, 1);
    t.set(0x18, "dload", 2, 0, 2);
    t.set(0x19, "aload", 2, 0, 1);
    t.set(0x1A, "iload_0", 1, 0, 1);
    t.set(0x1B, "iload_1", 1, 0, 1);
    t.set(0x1C, "iload_2", 1, 0, 1);
    t.set(0x1D, "iload_3", 1, 0, 1);
    t.set(0x1E, "lload_0", 1, 0, 2);
    t.set(0x1F, "lload_1", 1, 0, 2);
    t.set(0x20, "lload_2", 1, 0, 2);
    t.set(0x21, "lload_3", 1, 0, 2);
    t.set(0x22, "fload_0", 1, 0, 1);
    t.set(0x23, "fload_1", 1, 0, 1);
    t.set(0x24, "fload_2", 1, 0, 1);
    t.set(0x25, "fload_3", 1, 0, 1);
    t.set(0x26, "dload_0", 1, 0, 2);
    t.set(0x27, "dload_1", 1, 0, 2);
    t.set(0x28, "dload_2", 1, 0, 2);
    t.set(0x29, "dload_3", 1, 0, 2);
    t.set(0x2A, "aload_0", 1, 0, 1);
    t.set(0x2B, "aload_1", 1, 0, 1);
    t.set(0x2C, "aload_2", 1, 0, 1);
    t.set(0x2D, "aload_3", 1, 0, 1);
    t.set(0x2E, "iaload", 1, 2, 1);
    t.set(0x2F, "laload", 1, 2, 2);
    t.set(0x30, "faload", 1, 2, 1);
    t.set(0x31, "daload", 1, 2, 2);
    t.set(0x32, "aaload", 1, 2, 1);
    t.set(0x33, "baload", 1, 2, 1);
    t.set(0x34, "caload", 1, 2, 1);
    t.set(0x35, "saload", 1, 2, 1);
    t.set(0x36, "istore", 2, 1, 0);
    t.set(0x37, "lstore", 2, 2, 0);
    t.set(0x38, "fstore", 2, 1, 0);
    t.set(0x39, "dstore", 2, 2, 0);
    t.set(0x3A, "astore", 2, 1, 0);
    t.set(0x3B, "istore_0", 1, 1, 0);
    t.set(0x3C, "istore_1", 1, 1, 0);
    t.set(0x3D, "istore_2", 1, 1, 0);
    t.set(0x3E, "istore_3", 1, 1, 0);
    t.set(0x3F, "lstore_0", 1, 2, 0);
    t.set(0x40, "lstore_1", 1, 2, 0);
    t.set(0x41, "lstore_2", 1, 2, 0);
    t.set(0x42, "lstore_3", 1, 2, 0);
    t.set(0x43, "fstore_0", 1, 1, 0);
    t.set(0x44, "fstore_1", 1, 1, 0);
    t.set(0x45, "fstore_2", 1, 1, 0);
    t.set(0x46, "fstore_3", 1, 1, 0);
    t.set(0x47, "dstore_0", 1, 2, 0);
    t.set(0x48, "dstore_1", 1, 2, 0);
    t.set(0x49, "dstore_2", 1, 2, 0);
    t.set(0x4A, "dstore_3", 1, 2, 0);
    t.set(0x4B, "astore_0", 1, 1, 0);
    t.set(0x4C, "astore_1", 1, 1, 0);
    t.set(0x4D, "astore_2", 1, 1, 0);
    t.set(0x4E, "astore_3", 1, 1, 0);
    t.set(0x4F, "iastore", 1, 3, 0);
    t.set(0x50, "lastore", 1, 4, 0);
    t.set(0x51, "fastore", 1, 3, 0);
    t.set(0x52, "dastore", 1, 4, 0);
    t.set(0x53, "aastore", 1, 3, 0);
    t.set(0x54, "bastore", 1, 3, 0);
    t.set(0x55, "castore", 1, 3, 0);
    t.set(0x56, "sastore", 1, 3, 0);
    t.set(0x57, "pop", 1, 1, 0);
    t.set(0x58, "pop2", 1, 2, 0);
    t.set(0x59, "dup", 1, 1, 2);
    t.set(0x5A, "dup_x1", 1, 2, 3);
    t.set(0x5B, "dup_x2", 1, 3, 4);
    t.set(0x5C, "dup2", 1, 2, 4);
    t.set(0x5D, "dup2_x1", 1, 3, 5);
    t.set(0x5E, "dup2_x2", 1, 4, 6);
    t.set(0x5F, "swap", 1, 2, 2);
    t.set(0x60, "iadd", 1, 2, 1);
    t.set(0x61, "ladd", 1, 4, 2);
    t.set(0x62, "fadd", 1, 2, 1);
    t.set(0x63, "dadd", 1, 4, 2);
    t.set(0x64, "isub", 1, 2, 1);
    t.set(0x65, "lsub", 1, 4, 2);
    t.set(0x66, "fsub", 1, 2, 1);
    t.set(0x67, "dsub", 1, 4, 2);
    t.set(0x68, "imul", 1, 2, 1);
    t.set(0x69, "lmul", 1, 4, 2);
    t.set(0x6A, "fmul", 1, 2, 1);
    t.set(0x6B, "dmul", 1, 4, 2);
    t.set(0x6C, "idiv", 1, 2, 1);
    t.set(0x6D, "ldiv", 1, 4, 2);
    t.set(0x6E, "fdiv", 1, 2, 1);
    t.set(0x6F, "ddiv", 1, 4, 2);
    t.set(0x70, "irem", 1, 2, 1);
    t.set(0x71, "lrem", 1, 4, 2);
    t.set(0x72, "frem", 1, 2, 1);
    t.set(0x73, "drem", 1, 4, 2);
    t.set(0x74, "ineg", 1, 1, 1);
    t.set(0x75, "lneg", 1, 2, 2);
    t.set(0x76, "fneg", 1, 1, 1);
    t.set(0x77, "dneg", 1, 2, 2);
    t.set(0x78, "ishl", 1, 2, 1);
    t.set(0x79, "lshl", 1, 3, 2);
    t.set(0x7A, "ishr", 1, 2, 1);
    t.set(0x7B, "lshr", 1, 3, 2);
    t.set(0x7C, "iushr", 1, 2, 1);
    t.set(0x7D, "lushr", 1, 3, 2);
    t.set(0x7E, "iand", 1, 2, 1);
    t.set(0x7F, "land", 1, 4, 2);
    t.set(0x80, "ior", 1, 2, 1);
    t.set(0x81, "lor", 1, 4, 2);
    t.set(0x82, "ixor", 1, 2, 1);
    t.set(0x83, "lxor", 1, 4, 2);
    t.set(0x84, "iinc", 3, 0, 0);
    t.set(0x85, "i2l", 1, 1, 2);
    t.set(0x86, "i2f", 1, 1, 1);
    t.set(0x87, "i2d", 1, 1, 2);
    t.set(0x88, "l2i", 1, 2, 1);
    t.set(0x89, "l2f", 1, 2, 1);
    t.set(0x8A, "l2d", 1, 2, 2);
    t.set(0x8B, "f2i", 1, 1, 1);
    t.set(0x8C, "f2l", 1, 1, 2);
    t.set(0x8D, "f2d", 1, 1, 2);
    t.set(0x8E, "d2i", 1, 2, 1);
    t.set(0x8F, "d2l", 1, 2, 2);
    t.set(0x90, "d2f", 1, 2, 1);
    t.set(0x91, "i2b", 1, 1, 1);
    t.set(0x92, "i2c", 1, 1, 1);
    t.set(0x93, "i2s", 1, 1, 1);
    t.set(0x94, "lcmp", 1, 4, 1);
    t.set(0x95, "fcmpl", 1, 2, 1);
    t.set(0x96, "fcmpg", 1, 2, 1);
    t.set(0x97, "dcmpl", 1, 4, 1);
    t.set(0x98, "dcmpg", 1, 4, 1);
    t.set(0x99, "ifeq", 3, 1, 0);
    t.set(0x9A, "ifne", 3, 1, 0);
    t.set(0x9B, "iflt", 3, 1, 0);
    t.set(0x9C, "ifge", 3, 1, 0);
    t.set(0x9D, "ifgt", 3, 1, 0);
    t.set(0x9E, "ifle", 3, 1, 0);
    t.set(0x9F, "if_icmpeq", 3, 2, 0);
    t.set(0xA0, "if_icmpne", 3, 2, 0);
    t.set(0xA1, "if_icmplt", 3, 2, 0);
    t.set(0xA2, "if_icmpge", 3, 2, 0);
    t.set(0xA3, "if_icmpgt", 3, 2, 0);
    t.set(0xA4, "if_icmple", 3, 2, 0);
    t.set(0xA5, "if_acmpeq", 3, 2, 0);
    t.set(0xA6, "if_acmpne", 3, 2, 0);
    t.set(0xA7, "goto", 3, 0, 0);
    t.set(0xA8, "jsr", 3, 0, 1);
    t.set(0xA9, "ret", 2, 0, 0);
    t.set(0xAA, "tableswitch", 0, 1, 0);
    t.set(0xAB, "lookupswitch", 0, 1, 0);
    t.set(0xAC, "ireturn", 1, 1, 0);
    t.set(0xAD, "lreturn", 1, 2, 0);
    t.set(0xAE, "freturn", 1, 1, 0);
    t.set(0xAF, "dreturn", 1, 2, 0);
    t.set(0xB0, "areturn", 1, 1, 0);
    t.set(0xB1, "return", 1, 0, 0);
    t.set(0xB2, "getstatic", 3, V, V);
    t.set(0xB3, "putstatic", 3, V, V);
    t.set(0xB4, "getfield", 3, V, V);
    t.set(0xB5, "putfield", 3, V, V);
    t.set(0xB6, "invokevirtual", 3, V, V);
    t.set(0xB7, "invokespecial", 3, V, V);
    t.set(0xB8, "invokestatic", 3, V, V);
    t.set(0xB9, "invokeinterface", 5, V, V);
    t.set(0xBA, "invokedynamic", 5, V, V);
    t.set(0xBB, "new", 3, 0, 1);
    t.set(0xBC, "newarray", 2, 1, 1);
    t.set(0xBD, "anewarray", 3, 1, 1);
    t.set(0xBE, "arraylength", 1, 1, 1);
    t.set(0xBF, "athrow", 1, 1, 0);
    t.set(0xC0, "checkcast", 3, 1, 1);
    t.set(0xC1, "instanceof", 3, 1, 1);
    t.set(0xC2, "monitorenter", 1, 1, 0);
    t.set(0xC3, "monitorexit", 1, 1, 0);
    t.set(0xC4, "wide", 0, 0, 0);
    t.set(0xC5, "multianewarray", 4, V, 1);
    t.set(0xC6, "ifnull", 3, 1, 0);
    t.set(0xC7, "ifnonnull", 3, 1, 0);
    t.set(0xC8, "goto_w", 5, 0, 0);
    t.set(0xC9, "jsr_w", 5, 0, 1);
    return t;
}

constexpr Table kTable = build_table();

std::int32_t read_s4(const Bytes& b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | b[at + i];
    return static_cast<std::int32_t>(v);
}

bool wide_target_ok(std::uint8_t opcode) {
    return (opcode >= 0x15 && opcode <= 0x19) || (opcode >= 0x36 && opcode <= 0x3A) || opcode == 0xA9 ||
           opcode == op::iinc;
}

}  // namespace

const OpcodeInfo* opcode_info(std::uint8_t opcode) noexcept {
    return kTable.known[opcode] ? &kTable.ops[opcode] : nullptr;
}

std::int32_t Instruction::branch_offset() const {
    if (opcode == 0xC8 || opcode == 0xC9) return read_s4(operands, 0);
    return static_cast<std::int16_t>((operands.at(0) << 8) | operands.at(1));
}

std::vector<Instruction> decode_instructions(std::span<const std::uint8_t> code) {
    std::vector<Instruction> out;
    std::size_t pc = 0;
    auto take = [&](Instruction& insn, std::size_t from, std::size_t n) {
        if (from + n > code.size()) {
            throw Error(Errc::TruncatedInstruction, std::string(opcode_info(insn.opcode)->mnemonic) + " at " +
                                                        std::to_string(insn.offset) + " runs past the code end");
        }
        insn.operands.assign(code.begin() + static_cast<std::ptrdiff_t>(from),
                             code.begin() + static_cast<std::ptrdiff_t>(from + n));
    };
    while (pc < code.size()) {
        Instruction insn;
        insn.offset = static_cast<std::uint32_t>(pc);
        insn.opcode = code[pc];
        const OpcodeInfo* info = opcode_info(insn.opcode);
        if (!info) {
            throw Error(Errc::UnknownOpcode, "0x" + std::to_string(insn.opcode) + " at offset " + std::to_string(pc));
        }
        if (insn.opcode == op::wide) {
            if (pc + 1 >= code.size()) throw Error(Errc::TruncatedInstruction, "wide prefix at code end");
            insn.wide = true;
            insn.opcode = code[pc + 1];
            if (!wide_target_ok(insn.opcode)) {
                throw Error(Errc::UnknownOpcode, "wide applied to opcode " + std::to_string(insn.opcode));
            }
            take(insn, pc + 2, insn.opcode == op::iinc ? 4 : 2);
        } else if (insn.opcode == op::tableswitch || insn.opcode == op::lookupswitch) {
            std::size_t pad = (4 - ((pc + 1) % 4)) % 4;
            std::size_t head = pc + 1 + pad;
            std::size_t fixed = insn.opcode == op::tableswitch ? 12 : 8;
            if (head + fixed > code.size()) throw Error(Errc::TruncatedInstruction, "switch header past code end");
            Bytes hdr(code.begin() + static_cast<std::ptrdiff_t>(head),
                      code.begin() + static_cast<std::ptrdiff_t>(head + fixed));
            std::int64_t entries = 0;
            if (insn.opcode == op::tableswitch) {
                std::int64_t low = read_s4(hdr, 4), high = read_s4(hdr, 8);
                if (high < low) throw Error(Errc::TruncatedInstruction, "tableswitch high < low");
                entries = (high - low + 1) * 4;
            } else {
                std::int64_t npairs = read_s4(hdr, 4);
                if (npairs < 0) throw Error(Errc::TruncatedInstruction, "lookupswitch negative npairs");
                entries = npairs * 8;
            }
            take(insn, pc + 1, pad + fixed + static_cast<std::size_t>(entries));
        } else {
            take(insn, pc + 1, static_cast<std::size_t>(info->length - 1));
        }
        pc += insn.size();
        out.push_back(std::move(insn));
    }
    return out;
}

Bytes encode_instructions(const std::vector<Instruction>& instructions) {
    Bytes out;
    for (const auto& insn : instructions) {
        if (insn.wide) out.push_back(op::wide);
        out.push_back(insn.opcode);
        out.insert(out.end(), insn.operands.begin(), insn.operands.end());
    }
    return out;
}

std::vector<std::int64_t> branch_targets(const Instruction& insn) {
    std::vector<std::int64_t> out;
    if (insn.wide) return out;
    std::uint8_t o = insn.opcode;
    if ((o >= 0x99 && o <= 0xA8) || o == op::ifnull || o == op::ifnonnull || o == 0xC8 || o == 0xC9) {
        out.push_back(static_cast<std::int64_t>(insn.offset) + insn.branch_offset());
    } else if (o == op::tableswitch || o == op::lookupswitch) {
        std::size_t pad = (4 - ((insn.offset + 1) % 4)) % 4;
        const Bytes& b = insn.operands;
        out.push_back(static_cast<std::int64_t>(insn.offset) + read_s4(b, pad));
        if (o == op::tableswitch) {
            std::int64_t n = static_cast<std::int64_t>(read_s4(b, pad + 8)) - read_s4(b, pad + 4) + 1;
            for (std::int64_t i = 0; i < n; ++i) {
                out.push_back(static_cast<std::int64_t>(insn.offset) + read_s4(b, pad + 12 + 4 * i));
            }
        } else {
            std::int64_t n = read_s4(b, pad + 4);
            for (std::int64_t i = 0; i < n; ++i) {
                out.push_back(static_cast<std::int64_t>(insn.offset) + read_s4(b, pad + 8 + 8 * i + 4));
            }
        }
    }
    return out;
}

unsigned width(CodepointKind kind) noexcept {
    switch (kind) {
        case CodepointKind::Arith8: return 3;
        case CodepointKind::Branch4: return 2;
        case CodepointKind::Branch2: return 1;
        case CodepointKind::OperandBipush:
        case CodepointKind::OperandIinc: return 8;
    }
    return 0;
}

std::string_view kind_name(CodepointKind kind) noexcept {
    switch (kind) {
        case CodepointKind::Arith8: return "Arith8";
        case CodepointKind::Branch4: return "Branch4";
        case CodepointKind::Branch2: return "Branch2";
        case CodepointKind::OperandBipush: return "OperandBipush";
        case CodepointKind::OperandIinc: return "OperandIinc";
    }
    return "?";
}

std::string_view mode_name(Mode mode) noexcept {
    switch (mode) {
        case Mode::ReplaceOpcodes: return "replace_opcodes";
        case Mode::OverwriteOperands: return "overwrite_operands";
        case Mode::Combined: return "combined";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view name) noexcept {
    for (Mode m : {Mode::ReplaceOpcodes, Mode::OverwriteOperands, Mode::Combined}) {
        if (mode_name(m) == name) return m;
    }
    return std::nullopt;
}

std::optional<CodepointKind> opcode_family(std::uint8_t opcode) noexcept {
    for (auto o : kArith8) {
        if (o == opcode) return CodepointKind::Arith8;
    }
    for (auto o : kBranch4) {
        if (o == opcode) return CodepointKind::Branch4;
    }
    for (auto o : kBranch2) {
        if (o == opcode) return CodepointKind::Branch2;
    }
    return std::nullopt;
}

unsigned family_value(std::uint8_t opcode) {
    for (unsigned i = 0; i < 8; ++i) {
        if (kArith8[i] == opcode) return i;
    }
    for (unsigned i = 0; i < 4; ++i) {
        if (kBranch4[i] == opcode) return i;
    }
    for (unsigned i = 0; i < 2; ++i) {
        if (kBranch2[i] == opcode) return i;
    }
    throw Error(Errc::NotACodepoint, "opcode " + std::to_string(opcode) + " belongs to no family");
}

std::uint8_t family_opcode(CodepointKind kind, unsigned value) {
    switch (kind) {
        case CodepointKind::Arith8:
            if (value < 8) return kArith8[value];
            break;
        case CodepointKind::Branch4:
            if (value < 4) return kBranch4[value];
            break;
        case CodepointKind::Branch2:
            if (value < 2) return kBranch2[value];
            break;
        default: break;
    }
    throw Error(Errc::NotACodepoint, "no opcode for value " + std::to_string(value) + " in " +
                                         std::string(kind_name(kind)));
}

std::vector<Codepoint> scan_codepoints(const std::vector<Instruction>& instructions, Mode mode) {
    bool opcodes = mode != Mode::OverwriteOperands;
    bool operands = mode != Mode::ReplaceOpcodes;
    std::vector<Codepoint> out;
    for (std::size_t i = 0; i < instructions.size(); ++i) {
        const auto& insn = instructions[i];
        if (insn.wide) continue;
        if (opcodes) {
            if (auto fam = opcode_family(insn.opcode)) out.push_back({i, *fam});
        }
        if (operands) {
            if (insn.opcode == op::bipush) out.push_back({i, CodepointKind::OperandBipush});
            if (insn.opcode == op::iinc) out.push_back({i, CodepointKind::OperandIinc});
        }
    }
    return out;
}

std::uint32_t codepoint_byte_offset(const Instruction& insn, CodepointKind kind) {
    switch (kind) {
        case CodepointKind::OperandBipush: return insn.offset + 1;
        case CodepointKind::OperandIinc: return insn.offset + 2;
        default: return insn.offset;
    }
}

unsigned codepoint_value(const Instruction& insn, CodepointKind kind) {
    switch (kind) {
        case CodepointKind::OperandBipush: return insn.operands.at(0);
        case CodepointKind::OperandIinc: return insn.operands.at(1);
        default: return family_value(insn.opcode);
    }
}

void rewrite_opcode(Bytes& code, std::vector<Instruction>& instructions, std::size_t index, std::uint8_t new_opcode) {
    auto& insn = instructions.at(index);
    auto fam = insn.wide ? std::nullopt : opcode_family(insn.opcode);
    if (!fam) throw Error(Errc::NotACodepoint, "instruction " + std::to_string(index) + " has no replaceable opcode");
    if (opcode_family(new_opcode) != fam) {
        throw Error(Errc::FamilyViolation, std::string(opcode_info(insn.opcode)->mnemonic) + " cannot become opcode " +
                                               std::to_string(new_opcode));
    }
    code.at(insn.offset) = new_opcode;
    insn.opcode = new_opcode;
}

void rewrite_operand(Bytes& code, std::vector<Instruction>& instructions, std::size_t index, std::uint8_t value) {
    auto& insn = instructions.at(index);
    if (insn.wide || (insn.opcode != op::bipush && insn.opcode != op::iinc)) {
        throw Error(Errc::NotACodepoint, "instruction " + std::to_string(index) + " has no overwritable operand");
    }
    CodepointKind kind = insn.opcode == op::bipush ? CodepointKind::OperandBipush : CodepointKind::OperandIinc;
    code.at(codepoint_byte_offset(insn, kind)) = value;
    insn.operands.at(kind == CodepointKind::OperandBipush ? 0 : 1) = value;
}

}  // namespace wmark
