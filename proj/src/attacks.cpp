#include "wmark/attacks.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <random>
#include <sstream>

#include "wmark/bytecode.hpp"
#include "wmark/extractor.hpp"

namespace wmark {

namespace {

bool is_invoke(std::uint8_t o) {
    return o == op::invokevirtual || o == op::invokespecial || o == op::invokestatic || o == op::invokeinterface;
}

std::string generated_name(std::mt19937_64& rng) {
    std::string s = "_";
    for (int i = 0; i < 6; ++i) s.push_back(static_cast<char>('a' + rng() % 26));
    return s;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

}  // namespace

ClassFile attack_rename(const ClassFile& cf, std::uint64_t seed) {
    ClassFile out = cf;
    std::mt19937_64 rng(seed);
    std::set<std::string> taken;
    for (const auto* list : {&cf.fields, &cf.methods}) {
        for (const auto& m : *list) taken.insert(cf.name_of(m));
    }
    const std::string self = cf.this_name();
    const std::size_t pool_end = out.pool.size();

    auto rename_list = [&](std::vector<MemberInfo>& members, bool methods) {
        for (auto& m : members) {
            if (!(m.access_flags & acc::Private)) continue;
            std::string old_name = out.name_of(m);
            if (old_name == "<init>" || old_name == "<clinit>") continue;
            std::string desc = out.descriptor_of(m);
            std::string fresh;
            do {
                fresh = generated_name(rng);
            } while (!taken.insert(fresh).second);
            m.name_index = out.add_utf8(fresh);
            for (std::size_t i = 1; i < pool_end; ++i) {
                Tag t = out.pool[i].tag;
                bool kind_ok = methods ? (t == Tag::Methodref || t == Tag::InterfaceMethodref) : t == Tag::Fieldref;
                if (!kind_ok) continue;
                MemberRef ref = resolve_ref(out, i);
                if (ref.owner != self || ref.name != old_name || ref.descriptor != desc) continue;
                std::uint16_t nat = out.add_name_and_type(fresh, desc);
                out.pool[i].b = nat;
            }
        }
    };
    rename_list(out.fields, false);
    rename_list(out.methods, true);
    return out;
}

ClassFile attack_strip_debug(const ClassFile& cf, DebugStrip how, std::uint64_t seed) {
    ClassFile out = cf;
    std::mt19937_64 rng(seed);
    auto is_name = [&](const Attribute& a, std::string_view n) { return out.attribute_name(a) == n; };

    if (how == DebugStrip::Delete) {
        std::erase_if(out.attributes, [&](const Attribute& a) { return is_name(a, "SourceFile"); });
    }
    for (auto& m : out.methods) {
        Attribute* code = find_attribute(out, m.attributes, "Code");
        if (!code) continue;
        CodeView view = CodeView::parse(*code);
        bool changed = false;
        if (how == DebugStrip::Delete) {
            auto before = view.attributes.size();
            std::erase_if(view.attributes, [&](const Attribute& a) {
                return is_name(a, "LineNumberTable") || is_name(a, "LocalVariableTable");
            });
            changed = before != view.attributes.size();
        } else {
            for (auto& a : view.attributes) {
                if (!is_name(a, "LineNumberTable")) continue;
                auto entries = parse_line_numbers(a);
                for (std::size_t i = entries.size(); i > 1; --i) {
                    std::size_t j = rng() % i;
                    std::swap(entries[i - 1].line_number, entries[j].line_number);
                }
                a.data = encode_line_numbers(entries);
                changed = true;
            }
        }
        if (changed) code->data = view.encode();
    }
    return out;
}

std::set<std::size_t> reachable_methods(const ClassFile& cf, const std::set<std::string>& entry_points) {
    std::set<std::size_t> seen;
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < cf.methods.size(); ++i) {
        const auto& m = cf.methods[i];
        if (!(m.access_flags & acc::Private) || entry_points.count(cf.name_of(m))) {
            seen.insert(i);
            work.push_back(i);
        }
    }
    const std::string self = cf.this_name();
    while (!work.empty()) {
        std::size_t i = work.back();
        work.pop_back();
        const Attribute* code = find_attribute(cf, cf.methods[i].attributes, "Code");
        if (!code) continue;
        for (const auto& insn : decode_instructions(CodeView::parse(*code).code)) {
            if (insn.wide || !is_invoke(insn.opcode)) continue;
            MemberRef ref = resolve_ref(cf, static_cast<std::size_t>((insn.operands[0] << 8) | insn.operands[1]));
            if (ref.owner != self) continue;
            for (std::size_t k = 0; k < cf.methods.size(); ++k) {
                const auto& target = cf.methods[k];
                if (cf.name_of(target) == ref.name && cf.descriptor_of(target) == ref.descriptor &&
                    seen.insert(k).second) {
                    work.push_back(k);
                }
            }
        }
    }
    return seen;
}

ClassFile attack_trim(const ClassFile& cf, const std::set<std::string>& entry_points) {
    auto keep = reachable_methods(cf, entry_points);
    ClassFile out = cf;
    out.methods.clear();
    for (std::size_t i = 0; i < cf.methods.size(); ++i) {
        if (keep.count(i)) out.methods.push_back(cf.methods[i]);
    }
    return out;
}

ClassFile attack_normalize_opcodes(const ClassFile& cf) {
    ClassFile out = cf;
    for (auto& m : out.methods) {
        Attribute* code = find_attribute(out, m.attributes, "Code");
        if (!code) continue;
        CodeView view = CodeView::parse(*code);
        for (const auto& insn : decode_instructions(view.code)) {
            if (insn.wide) continue;
            auto fam = opcode_family(insn.opcode);
            if (fam == CodepointKind::Arith8) code->data.at(CodeView::kCodeOffset + insn.offset) = op::iadd;
            if (fam == CodepointKind::Branch4) code->data.at(CodeView::kCodeOffset + insn.offset) = op::iflt;
        }
    }
    return out;
}

ToolRun attack_external(const std::string& command_template, const std::filesystem::path& in,
                        const std::filesystem::path& out) {
    ToolRun run;
    run.command = command_template;
    replace_all(run.command, "{in}", shell_quote(in.string()));
    replace_all(run.command, "{out}", shell_quote(out.string()));
    std::string full = "sh -c " + shell_quote(run.command) + " 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) {
        run.status = ToolStatus::ToolMissing;
        run.exit_code = -1;
        run.output = "popen failed";
        return run;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) run.output.append(buf, n);
    int status = ::pclose(pipe);
    run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (run.exit_code == 127) {
        run.status = ToolStatus::ToolMissing;
    } else if (run.exit_code != 0) {
        run.status = ToolStatus::ToolFailed;
    } else if (!std::filesystem::exists(out)) {
        run.status = ToolStatus::ToolFailed;
        run.output += "tool exited 0 but wrote no output file";
    }
    return run;
}

std::string AttackSpec::name() const {
    switch (kind) {
        case Kind::Rename: return "rename";
        case Kind::StripDebug: return "strip-debug";
        case Kind::ScrambleLines: return "scramble-lines";
        case Kind::Trim: return "trim";
        case Kind::Normalize: return "normalize";
        case Kind::External: return "external";
    }
    return "?";
}

AttackSpec AttackSpec::parse(std::string_view name) {
    for (auto k : {Kind::Rename, Kind::StripDebug, Kind::ScrambleLines, Kind::Trim, Kind::Normalize, Kind::External}) {
        AttackSpec s;
        s.kind = k;
        if (s.name() == name) return s;
    }
    throw Error(Errc::BadConfig, "unknown attack '" + std::string(name) + "'");
}

std::string_view cell_name(Cell c) noexcept {
    switch (c) {
        case Cell::Survived: return "Survived";
        case Cell::Destroyed: return "Destroyed";
        case Cell::Error: return "Error";
    }
    return "?";
}

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "wmark-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw Error(Errc::Io, "mkdtemp failed");
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::pair<Cell, std::string> run_cell(const ClassFile& model, const Bytes& original, const AttackSpec& attack,
                                      std::string_view message, const WatermarkConfig& config) {
    Bytes attacked;
    std::string note;
    try {
        switch (attack.kind) {
            case AttackSpec::Kind::Rename: attacked = serialize(attack_rename(model, attack.seed)); break;
            case AttackSpec::Kind::StripDebug:
                attacked = serialize(attack_strip_debug(model, DebugStrip::Delete));
                break;
            case AttackSpec::Kind::ScrambleLines:
                attacked = serialize(attack_strip_debug(model, DebugStrip::Scramble, attack.seed));
                break;
            case AttackSpec::Kind::Trim: attacked = serialize(attack_trim(model, attack.entry_points)); break;
            case AttackSpec::Kind::Normalize: attacked = serialize(attack_normalize_opcodes(model)); break;
            case AttackSpec::Kind::External: {
                TempDir dir;
                auto in = dir.path / "in.class";
                auto out = dir.path / "out.class";
                write_file(in, original);
                ToolRun run = attack_external(attack.command, in, out);
                if (run.status != ToolStatus::Ok) {
                    std::string what = run.status == ToolStatus::ToolMissing ? "ToolMissing" : "ToolFailed";
                    return {Cell::Error, what + " (exit " + std::to_string(run.exit_code) + ")"};
                }
                attacked = read_file(out);
                break;
            }
        }
    } catch (const Error& e) {
        return {Cell::Error, e.what()};
    }
    Verdict v = verify_bytes(attacked, message, config);
    if (!v.error.empty()) return {Cell::Error, v.error};
    if (v.found) note = v.method;
    return {v.found ? Cell::Survived : Cell::Destroyed, note};
}

}  // namespace

SurvivalMatrix survival_matrix(const std::vector<CorpusFile>& corpus, const std::vector<AttackSpec>& attacks,
                               std::string_view message, const WatermarkConfig& config) {
    SurvivalMatrix mx;
    for (const auto& a : attacks) mx.attacks.push_back(a.name());
    for (const auto& f : corpus) {
        mx.files.push_back(f.name);
        std::vector<Cell> row;
        std::vector<std::string> notes;
        ClassFile model;
        std::string parse_error;
        try {
            model = parse(f.bytes);
        } catch (const Error& e) {
            parse_error = e.what();
        }
        for (const auto& a : attacks) {
            if (!parse_error.empty()) {
                row.push_back(Cell::Error);
                notes.push_back(parse_error);
                continue;
            }
            auto [cell, note] = run_cell(model, f.bytes, a, message, config);
            row.push_back(cell);
            notes.push_back(note);
        }
        mx.cells.push_back(std::move(row));
        mx.notes.push_back(std::move(notes));
    }
    return mx;
}

std::string SurvivalMatrix::to_json() const {
    nlohmann::json j;
    j["attacks"] = attacks;
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < files.size(); ++r) {
        nlohmann::json row;
        row["file"] = files[r];
        nlohmann::json cellsj = nlohmann::json::object();
        for (std::size_t c = 0; c < attacks.size(); ++c) {
            cellsj[attacks[c]] = {{"result", std::string(cell_name(cells[r][c]))}, {"note", notes[r][c]}};
        }
        row["cells"] = cellsj;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j.dump();
}

std::string SurvivalMatrix::to_text() const {
    std::size_t first = 4;
    for (const auto& f : files) first = std::max(first, f.size());
    std::vector<std::size_t> widths;
    for (const auto& a : attacks) widths.push_back(std::max<std::size_t>(a.size(), 9));
    auto pad = [](std::string s, std::size_t w) {
        s.resize(std::max(w, s.size()), ' ');
        return s;
    };
    std::ostringstream out;
    out << pad("file", first);
    for (std::size_t c = 0; c < attacks.size(); ++c) out << "  " << pad(attacks[c], widths[c]);
    out << '\n';
    for (std::size_t r = 0; r < files.size(); ++r) {
        out << pad(files[r], first);
        for (std::size_t c = 0; c < attacks.size(); ++c) {
            out << "  " << pad(std::string(cell_name(cells[r][c])), widths[c]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace wmark
