#include "wmark/dummygen.hpp"

#include <fstream>

namespace wmark {

namespace {

// Straight-line carrier units. Each leaves the operand stack empty, so any
// concatenation is balanced; branches jump to the end of their own unit.
// Locals: 0 = this, 1 = k, 2 = i, 3 = j.
enum class Unit { MulAdd, SubXor, SignSkip, NullSkip };

struct UnitCaps {
    std::size_t opcode_bits;
    std::size_t operand_bits;
};

UnitCaps unit_caps(Unit u) {
    switch (u) {
        case Unit::MulAdd: return {9, 8};    // imul iadd iadd, bipush
        case Unit::SubXor: return {6, 8};    // isub ixor, bipush
        case Unit::SignSkip: return {2, 8};  // ifle, iinc
        case Unit::NullSkip: return {1, 8};  // ifnonnull, iinc
    }
    return {0, 0};
}

void emit_unit(Bytes& code, Unit u, std::size_t n) {
    auto c = static_cast<std::uint8_t>(3 + (n * 7) % 90);
    switch (u) {
        case Unit::MulAdd:
            code.insert(code.end(), {op::iload_1, op::iload_2, op::bipush, c, op::imul, op::iload_3, op::iadd,
                                     op::iadd, op::istore_1});
            break;
        case Unit::SubXor:
            code.insert(code.end(), {op::iload_2, op::iload_3, op::isub, op::bipush, c, op::ixor, op::istore_2});
            break;
        case Unit::SignSkip:
            code.insert(code.end(), {op::iload_1, op::ifle, 0x00, 0x06, op::iinc, 0x03, 0x01});
            break;
        case Unit::NullSkip:
            code.insert(code.end(), {op::aload_0, op::ifnonnull, 0x00, 0x06, op::iinc, 0x01, 0xFF});
            break;
    }
}

std::vector<Unit> shape_units(Shape s) {
    switch (s) {
        case Shape::X: return {Unit::MulAdd, Unit::SubXor};
        case Shape::R: return {Unit::MulAdd, Unit::SignSkip};
        case Shape::S: return {Unit::MulAdd, Unit::SubXor, Unit::SignSkip};
        case Shape::Y: return {Unit::MulAdd, Unit::SignSkip, Unit::NullSkip};
        case Shape::Z: return {Unit::MulAdd, Unit::NullSkip, Unit::SubXor};
    }
    return {Unit::MulAdd};
}

std::size_t mode_bits(UnitCaps c, Mode m) {
    switch (m) {
        case Mode::ReplaceOpcodes: return c.opcode_bits;
        case Mode::OverwriteOperands: return c.operand_bits;
        case Mode::Combined: return c.opcode_bits + c.operand_bits;
    }
    return 0;
}

unsigned one_slots(std::string_view d, std::size_t& i) {
    char c = d.at(i);
    switch (c) {
        case 'J':
        case 'D': ++i; return 2;
        case 'V': ++i; return 0;
        case 'L': {
            auto semi = d.find(';', i);
            if (semi == std::string_view::npos) throw Error(Errc::Malformed, "bad descriptor " + std::string(d));
            i = semi + 1;
            return 1;
        }
        case '[':
            while (d.at(i) == '[') ++i;
            one_slots(d, i);
            return 1;
        case 'B':
        case 'C':
        case 'F':
        case 'I':
        case 'S':
        case 'Z': ++i; return 1;
        default: throw Error(Errc::Malformed, "bad descriptor " + std::string(d));
    }
}

}  // namespace

std::string_view shape_name(Shape s) noexcept {
    switch (s) {
        case Shape::R: return "R";
        case Shape::S: return "S";
        case Shape::X: return "X";
        case Shape::Y: return "Y";
        case Shape::Z: return "Z";
    }
    return "?";
}

std::optional<Shape> parse_shape(std::string_view name) noexcept {
    for (Shape s : {Shape::R, Shape::S, Shape::X, Shape::Y, Shape::Z}) {
        if (shape_name(s) == name) return s;
    }
    return std::nullopt;
}

unsigned descriptor_slots(std::string_view field_descriptor) {
    std::size_t i = 0;
    return one_slots(field_descriptor, i);
}

unsigned argument_slots(std::string_view d) {
    if (d.empty() || d[0] != '(') throw Error(Errc::Malformed, "bad method descriptor " + std::string(d));
    std::size_t i = 1;
    unsigned n = 0;
    while (d.at(i) != ')') n += one_slots(d, i);
    return n;
}

unsigned return_slots(std::string_view d) {
    auto close = d.find(')');
    if (close == std::string_view::npos) throw Error(Errc::Malformed, "bad method descriptor " + std::string(d));
    std::size_t i = close + 1;
    return one_slots(d, i);
}

ClassFile synthesize_dummy(const ClassFile& cf, const DummySpec& spec) {
    for (const auto& m : cf.methods) {
        if (cf.name_of(m) == spec.name) {
            throw Error(Errc::NameCollision, "method '" + spec.name + "' already exists in " + cf.this_name());
        }
    }
    Bytes code;
    if (spec.bits > 0) {
        // i = 7; j = 3 -- two more operand sites
        code.insert(code.end(), {op::bipush, 7, op::istore_2, op::bipush, 3, op::istore_3});
        std::size_t have = spec.mode == Mode::ReplaceOpcodes ? 0 : 16;
        auto units = shape_units(spec.shape);
        for (std::size_t n = 0; have < spec.bits; ++n) {
            Unit u = units[n % units.size()];
            emit_unit(code, u, n);
            have += mode_bits(unit_caps(u), spec.mode);
            if (code.size() >= 0xFFFF) {
                throw Error(Errc::InsufficientCapacity, "a dummy carrying " + std::to_string(spec.bits) +
                                                            " bits would exceed the 65535-byte code limit");
            }
        }
    }
    code.push_back(op::return_);

    ClassFile out = cf;
    CodeView view;
    view.max_stack = spec.bits > 0 ? 3 : 0;
    view.max_locals = 4;
    view.code = std::move(code);

    MemberInfo m;
    m.access_flags = acc::Private;
    m.name_index = out.add_utf8(spec.name);
    m.descriptor_index = out.add_utf8("(I)V");
    m.attributes.push_back(Attribute{out.add_utf8("Code"), view.encode()});
    if (out.methods.size() >= 0xFFFF) throw Error(Errc::PoolOverflow, "methods_count would exceed 65535");
    out.methods.push_back(std::move(m));
    return out;
}

StructureReport validate_structure(const ClassFile& cf, std::size_t method) {
    try {
        const auto& m = cf.methods.at(method);
        const Attribute* attr = find_attribute(cf, m.attributes, "Code");
        if (!attr) return StructureReport{false, 0, "method has no Code attribute", 0};
        return validate_code(cf, CodeView::parse(*attr), cf.descriptor_of(m), (m.access_flags & acc::Static) != 0);
    } catch (const std::exception& e) {
        return StructureReport{false, 0, e.what(), 0};
    }
}

namespace {

struct Effect {
    int pops = 0;
    int pushes = 0;
};

Effect effect_of(const ClassFile& cf, const Instruction& insn) {
    const OpcodeInfo* info = opcode_info(insn.opcode);
    if (info->pops != OpcodeInfo::kVaries) return {info->pops, info->pushes};
    auto index = static_cast<std::size_t>((insn.operands.at(0) << 8) | insn.operands.at(1));
    switch (insn.opcode) {
        case 0xB2: return {0, static_cast<int>(descriptor_slots(resolve_ref(cf, index).descriptor))};
        case 0xB3: return {static_cast<int>(descriptor_slots(resolve_ref(cf, index).descriptor)), 0};
        case 0xB4: return {1, static_cast<int>(descriptor_slots(resolve_ref(cf, index).descriptor))};
        case 0xB5: return {1 + static_cast<int>(descriptor_slots(resolve_ref(cf, index).descriptor)), 0};
        case 0xC5: return {insn.operands.at(2), 1};
        default: break;
    }
    MemberRef ref = resolve_ref(cf, index);
    int args = static_cast<int>(argument_slots(ref.descriptor));
    int receiver = insn.opcode == op::invokestatic ? 0 : 1;
    return {args + receiver, static_cast<int>(return_slots(ref.descriptor))};
}

// Local slot touched by a load/store/iinc/ret and its width; width 0 if none.
std::pair<unsigned, unsigned> local_access(const Instruction& insn) {
    std::uint8_t o = insn.opcode;
    auto explicit_index = [&] {
        return insn.wide ? static_cast<unsigned>((insn.operands.at(0) << 8) | insn.operands.at(1))
                         : static_cast<unsigned>(insn.operands.at(0));
    };
    auto wide_type = [](unsigned type) { return (type == 1 || type == 3) ? 2u : 1u; };
    if (o >= 0x15 && o <= 0x19) return {explicit_index(), wide_type(o - 0x15u)};
    if (o >= 0x36 && o <= 0x3A) return {explicit_index(), wide_type(o - 0x36u)};
    if (o >= 0x1A && o <= 0x2D) return {(o - 0x1Au) % 4, wide_type((o - 0x1Au) / 4)};
    if (o >= 0x3B && o <= 0x4E) return {(o - 0x3Bu) % 4, wide_type((o - 0x3Bu) / 4)};
    if (o == op::iinc || o == 0xA9) return {explicit_index(), 1};
    return {0, 0};
}

bool ends_path(std::uint8_t o) {
    return o == op::goto_ || o == 0xC8 || o == 0xA9 || (o >= 0xAC && o <= 0xB1) || o == 0xBF ||
           o == op::tableswitch || o == op::lookupswitch;
}

}  // namespace

StructureReport validate_code(const ClassFile& cf, const CodeView& code, std::string_view descriptor, bool is_static) {
    StructureReport rep;
    auto fail = [&](std::uint32_t off, std::string msg) {
        rep.ok = false;
        rep.offset = off;
        rep.diagnostic = std::move(msg);
        return rep;
    };

    std::vector<Instruction> insns;
    try {
        insns = decode_instructions(code.code);
    } catch (const Error& e) {
        return fail(0, e.what());
    }
    if (insns.empty()) return fail(0, "empty code array");

    std::vector<int> at(code.code.size() + 1, -1);
    for (std::size_t i = 0; i < insns.size(); ++i) at[insns[i].offset] = static_cast<int>(i);
    auto index_of = [&](std::int64_t target) -> int {
        if (target < 0 || target >= static_cast<std::int64_t>(code.code.size())) return -1;
        return at[static_cast<std::size_t>(target)];
    };

    try {
        unsigned params = argument_slots(descriptor) + (is_static ? 0 : 1);
        if (params > code.max_locals) {
            return fail(0, "arguments need " + std::to_string(params) + " locals, max_locals is " +
                               std::to_string(code.max_locals));
        }
    } catch (const Error& e) {
        return fail(0, e.what());
    }

    std::vector<int> depth(insns.size(), -1);
    std::vector<std::pair<int, int>> work{{0, 0}};
    for (const auto& h : code.exception_table) {
        if (index_of(h.start_pc) < 0 || (h.end_pc != code.code.size() && index_of(h.end_pc) < 0) ||
            h.start_pc >= h.end_pc) {
            return fail(h.start_pc, "exception range does not align with instructions");
        }
        int hi = index_of(h.handler_pc);
        if (hi < 0) return fail(h.handler_pc, "exception handler is not an instruction start");
        work.push_back({hi, 1});
    }

    while (!work.empty()) {
        auto [idx, d] = work.back();
        work.pop_back();
        if (depth[idx] >= 0) {
            if (depth[idx] != d) {
                return fail(insns[idx].offset, "stack depth " + std::to_string(d) + " disagrees with earlier " +
                                                   std::to_string(depth[idx]));
            }
            continue;
        }
        depth[idx] = d;
        const Instruction& insn = insns[idx];
        std::string name(opcode_info(insn.opcode)->mnemonic);

        Effect e;
        try {
            e = effect_of(cf, insn);
        } catch (const Error& err) {
            return fail(insn.offset, name + ": " + err.what());
        }
        if (d < e.pops) {
            return fail(insn.offset, name + " pops " + std::to_string(e.pops) + " from depth " + std::to_string(d) +
                                         " (underflow)");
        }
        int nd = d - e.pops + e.pushes;
        if (nd > code.max_stack) {
            return fail(insn.offset, name + " raises depth to " + std::to_string(nd) + " above max_stack " +
                                         std::to_string(code.max_stack));
        }
        rep.max_depth = std::max<std::uint16_t>(rep.max_depth, static_cast<std::uint16_t>(nd));

        auto [slot, w] = local_access(insn);
        if (w && slot + w > code.max_locals) {
            return fail(insn.offset, name + " touches local " + std::to_string(slot) + " beyond max_locals " +
                                         std::to_string(code.max_locals));
        }

        bool is_jsr = insn.opcode == 0xA8 || insn.opcode == 0xC9;
        for (auto t : branch_targets(insn)) {
            int ti = index_of(t);
            if (ti < 0) return fail(insn.offset, name + " targets " + std::to_string(t) + ", not an instruction start");
            work.push_back({ti, nd});
        }
        if (!ends_path(insn.opcode)) {
            if (static_cast<std::size_t>(idx) + 1 >= insns.size()) return fail(insn.offset, "execution falls off the end");
            work.push_back({idx + 1, is_jsr ? d : nd});
        }
    }
    return rep;
}

std::string dummy_template(Shape shape, std::string_view name) {
    std::string head = "private void " + std::string(name) + "(int k){\n";
    switch (shape) {
        case Shape::R:
            return head + R"(    int i, j;
    for(i = 0; i < 100 ; i++){
        if(k % i != 0) {
            System.out.println("no." + i + " is OK.");
        }
    }
    for(i = 0; i < 10 ; i++){
        for(j = 0; j < 10 ; j++){
            k = k * 10 + i * 20 + j * 30;
        }
        for(j = 0; j < 50 ; j++){
            k+=j*3;
        }
    }
    System.out.println("k = " + k);
    for(i = 0; i < 20 ; i++){
        k+=i*5;
    }
    System.out.println("k = " + k);
}
)";
        case Shape::S:
            return head + R"(    int i, j;
    int[] A;
    A = new int[100];
    A[0] = 105;
    A[1] = 127;
    A[2] = 51;
    A[3] = 16;
    A[4] = 44;
    A[5] = 74;
    A[6] = 84;
    System.out.println("k = " + k);
    for(i = 0; i < 7 ; i++){
        System.out.println("A["+ i + "] = " + A[i]);
    }
    for(i = 0; i < 7 ; i++){
        A[i] = k * i;
        System.out.println("A["+ i + "] = " + A[i]);
    }
    for(i = 0; i < 100 ; i++){
        A[i] += k + i * 5;
        System.out.println("A["+ i + "] = " + A[i]);
    }
}
)";
        case Shape::X:
            return head + R"(    int i, j;
    for(i = 0; i < 10 ; i++)
        for(j = 0; j < 10 ; j++) k+=i*10+j;
    System.out.println("k = " + k);
    for(i = 0; i < 20 ; i++)
        for(j = 0; j < 30 ; j++) k+=i*3-j;
    System.out.println("k = " + k);
    for(i = 0; i < 25 ; i++)
        for(j = 0; j < 20 ; j++) k+=i*4-j*3;
    System.out.println("k = " + k);
}
)";
        case Shape::Y:
            return head + R"(    int i, j;
    int t;
    int tmp;
    int[] A;
    if(k > 100) return;
    A = new int[100];
    for(i = 0; i < 100; i++){
        A[i] = i * 10 + k;
    }
    t = 0;
    for(i = 0; i < k; i++){
        t += A[i]/A[i-k];
    }
    System.out.println("k = " + k);
    System.out.println("t = " + t);
    for(i = 0; i < 100 ; i++){
        for(j = 0; j < k ; j++){
            A[i] = k + j;
        }
        System.out.println("A[" + i + "] = " + A[i]);
    }
    for(i = 0; i < 100 ; i++)
        for(j = 0; j < 100 ; j++) k += i * 5;
    System.out.println("k = " + k);
}
)";
        case Shape::Z:
            return head + R"(    int i, j;
    int tmp;
    int[] A;
    A = new int[100];
    A[0] = 5;
    A[1] = 7;
    A[2] = 1;
    A[3] = 6;
    A[4] = 4;
    System.out.println("k = " + k);
    for(i = 0; i < 5 ; i++){
        System.out.println("A[" + i + "] = " + A[i]);
    }
    for(i = 0; i < 4; i++){
        for(j = 1; j < 5; j++){
            if(A[j] < A[i]){
                tmp = A[j];
                A[i] = A[j];
                A[j] = tmp;
            }
        }
    }
    for(i = 0; i < 5 ; i++){
        System.out.println("A["+ i + "] = " + A[i]);
    }
    for(i = 0; i < 5 ; i++){
        for(j = 0; i < 100 ; j++){
            A[i] += k + j * 5;
        }
        System.out.println("A["+ i + "] = " + A[i]);
    }
}
)";
    }
    return head + "}\n";
}

std::vector<Snippet> emit_source_snippets(const DummySpec& spec, Algorithm algorithm) {
    std::vector<Snippet> out;
    out.push_back({"dummy_" + spec.name + ".java.txt", dummy_template(spec.shape, spec.name)});

    out.push_back({"Node.java", R"(public class Node {
    public boolean token;
    public Node head, tail;
    public Node() {
        this.token = false;
        this.head = this.tail = this;
    }
    public Node addNode() {
        Node p = new Node();
        p.head = this.tail;
        this.head = p;
        return p;
    }
    Node MoveNext () {
        return this.tail.head;
    }
    Node MoveBack () {
        return this.head.tail;
    }
}
)"});

    out.push_back({"movers.java.txt", R"(// fields
Node g, h, p, q;
Thread t, s;

// constructor
g = new Node();
g.token = true;
h = new Node();
h.token = true;
p = g.addNode();
q = h.addNode();

// start-up
t = new Thread(this);
s = new Thread(this);
t.start();
s.start();

// Runnable
public void run() {
    while (true) {
        Thread ct = Thread.currentThread();
        if (ct == t) {
            p = p.MoveNext();
        } else if (ct == s) {
            q = q.MoveBack();
        }
        try {
            if (ct == t) {
                Thread.sleep(12000);
            } else if (ct == s) {
                Thread.sleep(4000);
            }
        } catch (InterruptedException ie) {}
    }
}
)"});

    std::string guard;
    if (algorithm == Algorithm::I) {
        guard = "// g and h sit on different rings, so g.equals(h) is always false\n"
                "boolean b1, b2;\n"
                "b2 = (h.equals(p) || p.token);\n"
                "b1 = p.token;\n"
                "if (b2 && b1 && (g.equals(h))) " + spec.name + "(10);\n";
    } else {
        guard = "// p1 and p2 vary between runs; the enforcement line keeps p1 && p2 false\n"
                "boolean p1 = p.token;\n"
                "boolean p2 = q.token;\n"
                "if (p1) p2 = false;\n"
                "if (p1 && p2) " + spec.name + "(10);\n";
    }
    out.push_back({"guard.java.txt", guard});
    return out;
}

void write_snippets(const std::vector<Snippet>& snippets, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& s : snippets) {
        std::ofstream f(dir / s.file, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(Errc::Io, "cannot write " + (dir / s.file).string());
        f << s.text;
    }
}

}  // namespace wmark
