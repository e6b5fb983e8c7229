#include "wmark/embedder.hpp"

#include <json.hpp>

namespace wmark {

namespace {

// Abstract and native methods count as code-less even if an attribute lingers.
template <class Model>
auto& code_attribute(Model& cf, std::size_t method) {
    auto& m = cf.methods.at(method);
    if (m.access_flags & (acc::Abstract | acc::Native)) {
        throw Error(Errc::NoCode, cf.name_of(m) + " is abstract or native");
    }
    auto* code = find_attribute(cf, m.attributes, "Code");
    if (!code) throw Error(Errc::NoCode, cf.name_of(m) + " has no Code attribute");
    return *code;
}

}  // namespace

std::size_t capacity(const ClassFile& cf, std::size_t method, Mode mode) {
    CodeView view = CodeView::parse(code_attribute(cf, method));
    return total_width(scan_codepoints(decode_instructions(view.code), mode));
}

EmbedResult embed(const ClassFile& cf, std::size_t method, std::string_view message, const WatermarkConfig& config) {
    EmbedResult result{cf, {}};
    EmbedPlan& plan = result.plan;
    plan.method = method;
    plan.method_name = cf.name_of(cf.methods.at(method));
    plan.mode = config.mode;

    Attribute& attr = code_attribute(result.model, method);
    CodeView view = CodeView::parse(attr);
    auto insns = decode_instructions(view.code);
    auto sites = scan_codepoints(insns, config.mode);
    plan.capacity = total_width(sites);
    plan.sites_available = sites.size();

    Bitstream raw = encode_chars(message, config.book);
    Bitstream keyed = raw.empty() ? raw : apply_key(raw, config.key);
    plan.required_bits = keyed.size();
    plan.keyed_bits = keyed.to_string();
    if (keyed.empty()) return result;

    std::vector<CodepointKind> kinds;
    kinds.reserve(sites.size());
    for (const auto& s : sites) kinds.push_back(s.kind);
    auto assignments = bits_to_codepoints(keyed, kinds);
    plan.sites_used = assignments.size();

    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const auto& a = assignments[i];
        const auto& site = sites[i];
        SiteChange ch;
        ch.kind = a.kind;
        ch.code_offset = codepoint_byte_offset(insns[site.index], site.kind);
        ch.before = view.code.at(ch.code_offset);
        ch.after = a.byte;
        ch.bits_used = a.bits_used;
        if (a.kind == CodepointKind::OperandBipush || a.kind == CodepointKind::OperandIinc) {
            rewrite_operand(view.code, insns, site.index, a.byte);
        } else {
            rewrite_opcode(view.code, insns, site.index, a.byte);
        }
        // Patch the raw attribute directly so nothing outside the code array moves.
        attr.data.at(CodeView::kCodeOffset + ch.code_offset) = a.byte;
        plan.changes.push_back(ch);
    }
    return result;
}

std::string EmbedPlan::to_json() const {
    nlohmann::json j;
    j["method"] = method_name;
    j["method_index"] = method;
    j["mode"] = std::string(mode_name(mode));
    j["required_bits"] = required_bits;
    j["capacity"] = capacity;
    j["sites_used"] = sites_used;
    j["sites_available"] = sites_available;
    j["keyed_bits"] = keyed_bits;
    auto arr = nlohmann::json::array();
    for (const auto& c : changes) {
        arr.push_back({{"offset", c.code_offset},
                       {"kind", std::string(kind_name(c.kind))},
                       {"before", c.before},
                       {"after", c.after},
                       {"bits", c.bits_used}});
    }
    j["changes"] = arr;
    return j.dump();
}

}  // namespace wmark
