#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "wmark/classfile.hpp"
#include "wmark/config.hpp"

namespace wmark {

// Gives private methods and fields fresh generated names and repoints the
// Field/Methodref entries of this class. Code arrays are untouched.
ClassFile attack_rename(const ClassFile& cf, std::uint64_t seed);

enum class DebugStrip { Delete, Scramble };

// Delete: drop LineNumberTable, LocalVariableTable and SourceFile.
// Scramble: keep them, permuting line numbers within each table.
ClassFile attack_strip_debug(const ClassFile& cf, DebugStrip how, std::uint64_t seed = 0);

// Removes private methods unreachable from the roots through invoke
// references to this class. Roots are the named entry points plus every
// non-private method.
ClassFile attack_trim(const ClassFile& cf, const std::set<std::string>& entry_points);

// Methods reachable under the same rule; exposed for independent checks.
std::set<std::size_t> reachable_methods(const ClassFile& cf, const std::set<std::string>& entry_points);

// Every Arith8 opcode becomes iadd and every Branch4 becomes iflt.
ClassFile attack_normalize_opcodes(const ClassFile& cf);

enum class ToolStatus { Ok, ToolMissing, ToolFailed };

struct ToolRun {
    ToolStatus status = ToolStatus::Ok;
    int exit_code = 0;
    std::string command;
    std::string output;
};

// Runs `sh -c` on the template with {in} and {out} replaced by quoted paths.
ToolRun attack_external(const std::string& command_template, const std::filesystem::path& in,
                        const std::filesystem::path& out);

struct AttackSpec {
    enum class Kind { Rename, StripDebug, ScrambleLines, Trim, Normalize, External };

    Kind kind = Kind::Rename;
    std::uint64_t seed = 1;
    std::set<std::string> entry_points{"main", "<init>"};
    std::string command;  // External only

    std::string name() const;
    static AttackSpec parse(std::string_view name);  // BadConfig on unknown names
};

struct CorpusFile {
    std::string name;
    Bytes bytes;
};

enum class Cell { Survived, Destroyed, Error };
std::string_view cell_name(Cell c) noexcept;

struct SurvivalMatrix {
    std::vector<std::string> files;
    std::vector<std::string> attacks;
    std::vector<std::vector<Cell>> cells;  // [file][attack]
    std::vector<std::vector<std::string>> notes;

    std::string to_json() const;
    std::string to_text() const;
};

// Applies each attack to each file independently and re-runs verification.
SurvivalMatrix survival_matrix(const std::vector<CorpusFile>& corpus, const std::vector<AttackSpec>& attacks,
                               std::string_view message, const WatermarkConfig& config);

}  // namespace wmark
