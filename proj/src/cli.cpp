#include "wmark/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "wmark/attacks.hpp"
#include "wmark/dummygen.hpp"
#include "wmark/embedder.hpp"
#include "wmark/extractor.hpp"
#include "wmark/opaque.hpp"

namespace wmark::cli {

namespace {

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::Io:
        case Errc::BadMagic:
        case Errc::Truncated:
        case Errc::BadPoolTag:
        case Errc::DanglingIndex:
        case Errc::Malformed:
        case Errc::TrailingBytes:
        case Errc::IndexOverflow:
        case Errc::PoolOverflow:
        case Errc::UnknownOpcode:
        case Errc::TruncatedInstruction: return kIoOrParse;
        case Errc::InsufficientCapacity: return kCapacity;
        default: return kUsage;
    }
}

WatermarkConfig resolve_config(const std::string& path) {
    if (!path.empty()) return load_config(path);
    if (const char* env = std::getenv("WM_CONFIG"); env && *env) return load_config(env);
    return WatermarkConfig{};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "I") return Algorithm::I;
    if (s == "II") return Algorithm::II;
    throw Error(Errc::BadConfig, "algorithm must be I or II");
}

int do_inspect(const std::string& file, bool json, std::ostream& out) {
    ClassFile cf = parse(read_file(file));
    nlohmann::json methods = nlohmann::json::array();
    std::ostringstream text;
    text << "class " << cf.this_name() << " (version " << cf.major_version << "." << cf.minor_version << ", "
         << cf.pool.size() - 1 << " pool slots, " << cf.methods.size() << " methods)\n";
    text << std::left << std::setw(20) << "method" << std::setw(26) << "descriptor" << std::right << std::setw(6)
         << "insns" << std::setw(7) << "arith8" << std::setw(8) << "branch4" << std::setw(8) << "branch2"
         << std::setw(7) << "bipush" << std::setw(5) << "iinc" << std::setw(8) << "replace" << std::setw(9)
         << "operands" << std::setw(9) << "combined" << '\n';
    for (const auto& hit : find_methods(cf, match_all())) {
        const auto& m = cf.methods[hit.index];
        auto insns = decode_instructions(hit.code.code);
        std::size_t counts[5] = {};
        for (const auto& s : scan_codepoints(insns, Mode::Combined)) ++counts[static_cast<int>(s.kind)];
        std::size_t caps[3];
        int k = 0;
        for (Mode mode : {Mode::ReplaceOpcodes, Mode::OverwriteOperands, Mode::Combined}) {
            caps[k++] = total_width(scan_codepoints(insns, mode));
        }
        methods.push_back({{"name", cf.name_of(m)},
                           {"descriptor", cf.descriptor_of(m)},
                           {"access_flags", m.access_flags},
                           {"instructions", insns.size()},
                           {"arith8", counts[0]},
                           {"branch4", counts[1]},
                           {"branch2", counts[2]},
                           {"bipush", counts[3]},
                           {"iinc", counts[4]},
                           {"capacity",
                            {{"replace_opcodes", caps[0]}, {"overwrite_operands", caps[1]}, {"combined", caps[2]}}}});
        text << std::left << std::setw(20) << cf.name_of(m) << std::setw(26) << cf.descriptor_of(m) << std::right
             << std::setw(6) << insns.size() << std::setw(7) << counts[0] << std::setw(8) << counts[1]
             << std::setw(8) << counts[2] << std::setw(7) << counts[3] << std::setw(5) << counts[4] << std::setw(8)
             << caps[0] << std::setw(9) << caps[1] << std::setw(9) << caps[2] << '\n';
    }
    if (json) {
        out << nlohmann::json{{"class", cf.this_name()}, {"major_version", cf.major_version}, {"methods", methods}}.dump()
            << '\n';
    } else {
        out << text.str();
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Embed, extract and verify class-file watermarks carried by dummy methods"};
    app.name("wmark");
    app.require_subcommand(1);

    bool json = false;
    std::string config_path;
    std::string message;

    auto* inspect = app.add_subcommand("inspect", "Dump methods, codepoint counts and capacities");
    std::string inspect_file;
    inspect->add_option("file", inspect_file, "Class file")->required();
    inspect->add_flag("--json", json, "Machine-readable output");

    auto* gen = app.add_subcommand("gen-dummy", "Synthesize a dummy method and/or emit source snippets");
    std::string gen_file, gen_out, gen_emit, gen_algorithm = "I", gen_shape = "X", gen_mode = "replace_opcodes";
    DummySpec spec;
    gen->add_option("file", gen_file, "Class file to extend");
    gen->add_option("--bits", spec.bits, "Required capacity in bits")->required();
    gen->add_option("--name", spec.name, "Dummy method name")->required();
    gen->add_option("--shape", gen_shape, "Carrier shape R|S|X|Y|Z");
    gen->add_option("--mode", gen_mode, "replace_opcodes|overwrite_operands|combined");
    gen->add_option("--out", gen_out, "Output class file (default: in place)");
    gen->add_option("--emit-source", gen_emit, "Directory for source snippets");
    gen->add_option("--algorithm", gen_algorithm, "Guard grouping I|II");

    auto* emb = app.add_subcommand("embed", "Embed a watermark into one method");
    std::string emb_file, emb_method, emb_out;
    emb->add_option("file", emb_file, "Class file")->required();
    emb->add_option("--method", emb_method, "Target method name")->required();
    emb->add_option("--message", message, "Watermark text")->required();
    emb->add_option("--config", config_path, "Config JSON (default: $WM_CONFIG)");
    emb->add_option("--out", emb_out, "Output class file (default: in place)");
    emb->add_flag("--json", json, "Print the embed plan as JSON");

    auto* ext = app.add_subcommand("extract", "Decode every method's codepoint stream");
    std::vector<std::string> ext_files;
    ext->add_option("files", ext_files, "Class files")->required();
    ext->add_option("--config", config_path, "Config JSON (default: $WM_CONFIG)");
    ext->add_option("--message", message, "Report where this watermark matches");
    ext->add_flag("--json", json, "JSON lines output");

    auto* ver = app.add_subcommand("verify", "Exit 0 iff every file carries the watermark");
    std::vector<std::string> ver_files;
    ver->add_option("files", ver_files, "Class files")->required();
    ver->add_option("--message", message, "Watermark text")->required();
    ver->add_option("--config", config_path, "Config JSON (default: $WM_CONFIG)");
    ver->add_flag("--json", json, "JSON lines output");

    auto* atk = app.add_subcommand("attack", "Run attacks and print the survival matrix");
    std::vector<std::string> atk_files;
    std::string atk_list = "rename,strip-debug,scramble-lines,trim,normalize", atk_external, atk_entry = "main,<init>";
    std::uint64_t atk_seed = 1;
    atk->add_option("files", atk_files, "Class files")->required();
    atk->add_option("--attacks", atk_list, "Comma-separated attack names");
    atk->add_option("--external", atk_external, "Command template with {in} and {out}");
    atk->add_option("--message", message, "Watermark text")->required();
    atk->add_option("--config", config_path, "Config JSON (default: $WM_CONFIG)");
    atk->add_option("--entry", atk_entry, "Comma-separated entry points for trim");
    atk->add_option("--seed", atk_seed, "Seed for rename and scramble");
    atk->add_flag("--json", json, "JSON output");

    auto* sim = app.add_subcommand("simulate", "Observe opaque predicate groups in the two-ring world");
    std::uint64_t sim_seed = 1, sim_ticks = 24;
    unsigned sim_runs = 1;
    std::string sim_algorithm = "I", sim_world = "stylepad";
    sim->add_option("--seed", sim_seed, "Scheduler seed");
    sim->add_option("--runs", sim_runs, "Number of runs")->check(CLI::PositiveNumber);
    sim->add_option("--ticks", sim_ticks, "Ticks per run");
    sim->add_option("--algorithm", sim_algorithm, "Guard grouping I|II");
    sim->add_option("--world", sim_world, "stylepad|myclass");
    sim->add_flag("--json", json, "Print only the stats summary");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "wmark: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*inspect) return do_inspect(inspect_file, json, out);

        if (*gen) {
            auto shape = parse_shape(gen_shape);
            auto mode = parse_mode(gen_mode);
            if (!shape || !mode) throw Error(Errc::BadConfig, "unknown shape or mode");
            spec.shape = *shape;
            spec.mode = *mode;
            if (gen_file.empty() && gen_emit.empty()) {
                err << "wmark: gen-dummy needs a class file, --emit-source, or both\n";
                return kUsage;
            }
            if (!gen_emit.empty()) {
                auto snippets = emit_source_snippets(spec, parse_algorithm(gen_algorithm));
                write_snippets(snippets, gen_emit);
                for (const auto& s : snippets) out << "wrote " << (std::filesystem::path(gen_emit) / s.file).string() << '\n';
            }
            if (!gen_file.empty()) {
                ClassFile cf = synthesize_dummy(parse(read_file(gen_file)), spec);
                std::size_t idx = cf.methods.size() - 1;
                StructureReport rep = validate_structure(cf, idx);
                if (!rep.ok) throw Error(Errc::Malformed, "generated method failed validation: " + rep.diagnostic);
                std::string dest = gen_out.empty() ? gen_file : gen_out;
                write_file(dest, serialize(cf));
                out << "added " << spec.name << "(I)V to " << cf.this_name() << ": " << capacity(cf, idx, spec.mode)
                    << " bits (" << mode_name(spec.mode) << ") -> " << dest << '\n';
            }
            return kOk;
        }

        if (*emb) {
            WatermarkConfig cfg = resolve_config(config_path);
            ClassFile cf = parse(read_file(emb_file));
            std::size_t idx = method_index(cf, emb_method);
            if (!(cf.methods[idx].access_flags & acc::Private)) {
                err << "warning: " << emb_method << " is not private; make sure it is never executed\n";
            }
            EmbedResult r = embed(cf, idx, message, cfg);
            StructureReport rep = validate_structure(r.model, idx);
            if (!rep.ok) throw Error(Errc::Malformed, "embedded method failed validation: " + rep.diagnostic);
            std::string dest = emb_out.empty() ? emb_file : emb_out;
            write_file(dest, serialize(r.model));
            if (json) {
                out << r.plan.to_json() << '\n';
            } else {
                out << "embedded " << r.plan.required_bits << " bits into " << r.plan.method_name << " ("
                    << r.plan.sites_used << "/" << r.plan.sites_available << " sites, capacity " << r.plan.capacity
                    << ", " << mode_name(r.plan.mode) << ") -> " << dest << '\n';
            }
            return kOk;
        }

        if (*ext) {
            WatermarkConfig cfg = resolve_config(config_path);
            Bitstream pattern;
            if (!message.empty()) pattern = apply_key(encode_chars(message, cfg.book), cfg.key);
            for (const auto& f : ext_files) {
                ClassFile cf = parse(read_file(f));
                for (const auto& r : decode_all(cf, cfg.mode, cfg.book)) {
                    auto matches = find_all(r.bits, pattern);
                    if (json) {
                        out << report_json_line(f, r, matches) << '\n';
                    } else {
                        out << f << "  " << r.name << r.descriptor << "  " << r.bits.size() << " bits  \""
                            << r.decoded.text << "\"";
                        if (!matches.empty()) out << "  match@" << matches.front();
                        out << '\n';
                    }
                }
            }
            return kOk;
        }

        if (*ver) {
            WatermarkConfig cfg = resolve_config(config_path);
            std::vector<std::filesystem::path> paths(ver_files.begin(), ver_files.end());
            bool all = true, unreadable = false;
            for (const auto& v : verify_files(paths, message, cfg)) {
                all = all && v.found;
                unreadable = unreadable || !v.error.empty();
                if (json) {
                    out << v.to_json() << '\n';
                } else if (v.found) {
                    out << v.file << ": Found";
                    if (v.degenerate) {
                        out << " (empty watermark)";
                    } else {
                        out << " in " << v.method << " at bit " << v.bit_offset;
                    }
                    out << '\n';
                } else {
                    out << v.file << ": NotFound" << (v.error.empty() ? "" : " (" + v.error + ")") << '\n';
                }
            }
            if (all) return kOk;
            // A file that could not be read or parsed outranks a plain miss.
            return unreadable ? kIoOrParse : kVerifyFailed;
        }

        if (*atk) {
            WatermarkConfig cfg = resolve_config(config_path);
            std::vector<AttackSpec> attacks;
            auto entries = split_list(atk_entry);
            for (const auto& name : split_list(atk_list)) {
                AttackSpec a = AttackSpec::parse(name);
                if (a.kind == AttackSpec::Kind::External) {
                    if (atk_external.empty()) throw Error(Errc::BadConfig, "attack 'external' needs --external");
                    a.command = atk_external;
                }
                a.seed = atk_seed;
                a.entry_points = {entries.begin(), entries.end()};
                attacks.push_back(std::move(a));
            }
            if (!atk_external.empty() &&
                std::none_of(attacks.begin(), attacks.end(),
                             [](const AttackSpec& a) { return a.kind == AttackSpec::Kind::External; })) {
                AttackSpec a;
                a.kind = AttackSpec::Kind::External;
                a.command = atk_external;
                attacks.push_back(std::move(a));
            }
            std::vector<CorpusFile> corpus;
            for (const auto& f : atk_files) {
                CorpusFile c{f, {}};
                try {
                    c.bytes = read_file(f);
                } catch (const Error& e) {
                    err << "warning: " << e.what() << '\n';
                }
                corpus.push_back(std::move(c));
            }
            SurvivalMatrix mx = survival_matrix(corpus, attacks, message, cfg);
            out << (json ? mx.to_json() + "\n" : mx.to_text());
            return kOk;
        }

        if (*sim) {
            WorldShape shape;
            if (sim_world == "stylepad") {
                shape = stylepad_shape();
            } else if (sim_world == "myclass") {
                shape = myclass_shape();
            } else {
                throw Error(Errc::BadConfig, "world must be stylepad or myclass");
            }
            PredicateWorld world(shape);
            PredicateGroup group =
                parse_algorithm(sim_algorithm) == Algorithm::I ? unconditional_guard() : conditional_guard();
            ObservationLog log = run_observation(world, {group}, sim_seed, sim_runs, sim_ticks);
            if (!json) out << log.text();
            out << log.stats_json() << '\n';
            return kOk;
        }
    } catch (const Error& e) {
        err << "wmark: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "wmark: " << e.what() << '\n';
        return kIoOrParse;
    }
    return kUsage;
}

}  // namespace wmark::cli
