#include "wmark/opaque.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>
#include <sstream>

#include "wmark/error.hpp"

namespace wmark {

namespace {

constexpr int kRingG = 0;
constexpr int kRingH = 1;

int ring_of_sym(Sym s) { return (s == Sym::G || s == Sym::P) ? kRingG : kRingH; }

const char* tf(bool b) { return b ? "true" : "false"; }

}  // namespace

const char* sym_name(Sym s) noexcept {
    switch (s) {
        case Sym::G: return "g";
        case Sym::H: return "h";
        case Sym::P: return "p";
        case Sym::Q: return "q";
    }
    return "?";
}

int NodeArena::make(int ring) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back(Node{false, id, id, ring});
    return id;
}

int NodeArena::add_node(int self) {
    int p = make(nodes.at(self).ring);
    nodes[p].head = nodes[self].tail;
    nodes[self].head = p;
    return p;
}

WorldShape stylepad_shape() { return {"stylepad", 3, 1, 2}; }
WorldShape myclass_shape() { return {"myclass", 2, 1, 2}; }

int WorldState::at(Sym s) const noexcept {
    switch (s) {
        case Sym::G: return g;
        case Sym::H: return h;
        case Sym::P: return p;
        case Sym::Q: return q;
    }
    return -1;
}

PredicateWorld::PredicateWorld(WorldShape shape) : shape_(std::move(shape)) {
    if (shape_.period_p == 0 || shape_.period_q == 0) throw Error(Errc::Malformed, "mover period must be positive");
    if (shape_.nodes_per_ring < 2) throw Error(Errc::Malformed, "a ring needs its root plus one added node");
    int g = arena_.make(kRingG);
    arena_.nodes[g].token = true;
    int h = arena_.make(kRingH);
    arena_.nodes[h].token = true;
    int p = arena_.add_node(g);
    int q = arena_.add_node(h);
    for (unsigned i = 2; i < shape_.nodes_per_ring; ++i) {
        arena_.add_node(g);
        arena_.add_node(h);
    }
    initial_ = WorldState{0, g, h, p, q};
}

std::vector<int> PredicateWorld::ring_nodes(int ring) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(arena_.nodes.size()); ++i) {
        if (arena_.nodes[i].ring == ring) out.push_back(i);
    }
    return out;
}

Trajectory step_world(const PredicateWorld& world, std::uint64_t seed, std::uint64_t ticks) {
    Trajectory tr;
    std::mt19937_64 rng(seed);
    tr.phase_p = static_cast<unsigned>(rng() % world.shape().period_p);
    tr.phase_q = static_cast<unsigned>(rng() % world.shape().period_q);
    tr.states.reserve(ticks + 1);
    WorldState s = world.initial();
    tr.states.push_back(s);
    for (std::uint64_t t = 1; t <= ticks; ++t) {
        s.tick = t;
        if ((t + tr.phase_p) % world.shape().period_p == 0) {
            s.p = world.arena().move_next(s.p);
            ++tr.fires_p;
        }
        if ((t + tr.phase_q) % world.shape().period_q == 0) {
            s.q = world.arena().move_back(s.q);
            ++tr.fires_q;
        }
        tr.states.push_back(s);
    }
    return tr;
}

bool pell_holds(std::int64_t x, std::int64_t y) {
    using boost::multiprecision::int256_t;
    int256_t X = x, Y = y;
    return 7 * X * X - 1 == Y * Y;
}

std::string Atom::label() const {
    auto join = [&](const char* sep) {
        std::string s = "(";
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) s += sep;
            s += children[i].label();
        }
        return s + ")";
    };
    switch (kind) {
        case Kind::ConstTrue: return "T";
        case Kind::ConstFalse: return "F";
        case Kind::SameNode: return std::string(sym_name(a)) + " == " + sym_name(b);
        case Kind::TokenOf: return std::string(sym_name(a)) + ".token";
        case Kind::PellFalse: return "7x*x-1 == y*y";
        case Kind::Not: return "!" + children.at(0).label();
        case Kind::And: return join(" && ");
        case Kind::Or: return join(" || ");
    }
    return "?";
}

bool eval_atom(const Atom& atom, const PredicateWorld& world, const WorldState& state, Sampler& sampler) {
    switch (atom.kind) {
        case Atom::Kind::ConstTrue: return true;
        case Atom::Kind::ConstFalse: return false;
        case Atom::Kind::SameNode: return state.at(atom.a) == state.at(atom.b);
        case Atom::Kind::TokenOf: return world.arena().nodes.at(state.at(atom.a)).token;
        case Atom::Kind::PellFalse: {
            auto x = static_cast<std::int64_t>(sampler.rng());
            auto y = static_cast<std::int64_t>(sampler.rng());
            return pell_holds(x, y);
        }
        case Atom::Kind::Not: return !eval_atom(atom.children.at(0), world, state, sampler);
        case Atom::Kind::And: {
            bool v = true;
            for (const auto& c : atom.children) v = eval_atom(c, world, state, sampler) && v;
            return v;
        }
        case Atom::Kind::Or: {
            bool v = false;
            for (const auto& c : atom.children) v = eval_atom(c, world, state, sampler) || v;
            return v;
        }
    }
    return false;
}

bool always_false(const Atom& atom) {
    switch (atom.kind) {
        case Atom::Kind::ConstFalse:
        case Atom::Kind::PellFalse: return true;
        case Atom::Kind::SameNode: return ring_of_sym(atom.a) != ring_of_sym(atom.b);
        case Atom::Kind::Not: return always_true(atom.children.at(0));
        case Atom::Kind::And:
            for (const auto& c : atom.children) {
                if (always_false(c)) return true;
            }
            return false;
        case Atom::Kind::Or:
            for (const auto& c : atom.children) {
                if (!always_false(c)) return false;
            }
            return true;
        default: return false;
    }
}

bool always_true(const Atom& atom) {
    switch (atom.kind) {
        case Atom::Kind::ConstTrue: return true;
        case Atom::Kind::SameNode: return atom.a == atom.b;
        case Atom::Kind::Not: return always_false(atom.children.at(0));
        case Atom::Kind::And:
            for (const auto& c : atom.children) {
                if (!always_true(c)) return false;
            }
            return !atom.children.empty();
        case Atom::Kind::Or:
            for (const auto& c : atom.children) {
                if (always_true(c)) return true;
            }
            return false;
        default: return false;
    }
}

PredicateGroup PredicateGroup::make(std::string name, std::vector<Atom> members, GroupOp op, Algorithm algorithm) {
    if (members.empty()) throw Error(Errc::MalformedGroup, name + ": a group needs members");
    bool ok = false;
    if (algorithm == Algorithm::I) {
        std::size_t false_members = 0;
        for (const auto& m : members) false_members += always_false(m) ? 1 : 0;
        ok = op == GroupOp::And ? false_members > 0 : false_members == members.size();
        if (!ok) throw Error(Errc::MalformedGroup, name + ": no member is false in every state");
    } else {
        ok = op == GroupOp::And && members.size() >= 2;
        if (!ok) throw Error(Errc::MalformedGroup, name + ": conditional grouping needs AND over P1 and P2");
    }
    return PredicateGroup{std::move(name), std::move(members), op, algorithm};
}

GroupValue fold_group(const PredicateGroup& group, std::vector<bool> raw) {
    GroupValue gv;
    gv.raw = raw;
    gv.enforced = std::move(raw);
    if (group.algorithm == Algorithm::II && gv.enforced.size() >= 2 && gv.enforced[0]) gv.enforced[1] = false;
    if (group.op == GroupOp::And) {
        gv.value = true;
        for (bool b : gv.enforced) gv.value = gv.value && b;
    } else {
        gv.value = false;
        for (bool b : gv.enforced) gv.value = gv.value || b;
    }
    return gv;
}

GroupValue eval_group(const PredicateGroup& group, const PredicateWorld& world, const WorldState& state,
                      Sampler& sampler) {
    std::vector<bool> raw;
    raw.reserve(group.members.size());
    for (const auto& m : group.members) raw.push_back(eval_atom(m, world, state, sampler));
    return fold_group(group, std::move(raw));
}

PredicateGroup unconditional_guard() {
    return PredicateGroup::make("b2 && b1 && g == h",
                                {Atom::or_({Atom::same_node(Sym::H, Sym::P), Atom::token_of(Sym::P)}),
                                 Atom::token_of(Sym::P), Atom::same_node(Sym::G, Sym::H)},
                                GroupOp::And, Algorithm::I);
}

PredicateGroup conditional_guard() {
    return PredicateGroup::make("p1 && p2", {Atom::token_of(Sym::P), Atom::token_of(Sym::Q)}, GroupOp::And,
                                Algorithm::II);
}

PredicateGroup pell_guard() {
    return PredicateGroup::make("b1 && pell", {Atom::token_of(Sym::P), Atom::pell_false()}, GroupOp::And,
                                Algorithm::I);
}

std::string ObservationLog::text() const {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string ObservationLog::stats_json() const {
    auto rate = [&](std::uint64_t n) { return observations ? static_cast<double>(n) / observations : 0.0; };
    nlohmann::json j;
    j["observations"] = observations;
    j["p_token_true_rate"] = rate(token_p_true);
    j["q_token_true_rate"] = rate(token_q_true);
    j["p_eq_q_true"] = same_pq_true;
    auto arr = nlohmann::json::array();
    for (const auto& g : groups) {
        nlohmann::json gj;
        gj["group"] = g.name;
        gj["true_count"] = g.true_count;
        auto members = nlohmann::json::array();
        for (const auto& m : g.members) members.push_back({{"member", m.label}, {"true_rate", rate(m.true_count)}});
        gj["members"] = members;
        arr.push_back(gj);
    }
    j["groups"] = arr;
    return j.dump();
}

ObservationLog run_observation(const PredicateWorld& world, const std::vector<PredicateGroup>& groups,
                               std::uint64_t seed, unsigned runs, std::uint64_t ticks_per_run) {
    ObservationLog log;
    for (const auto& g : groups) {
        GroupStats gs{g.name, 0, {}};
        for (const auto& m : g.members) gs.members.push_back({m.label(), 0});
        log.groups.push_back(std::move(gs));
    }
    std::mt19937_64 seeds(seed);
    Sampler sampler(seed ^ 0x9E3779B97F4A7C15ull);
    for (unsigned run = 1; run <= runs; ++run) {
        std::uint64_t run_seed = seeds();
        Trajectory tr = step_world(world, run_seed, ticks_per_run);
        std::ostringstream hdr;
        hdr << "Run " << run << " (" << world.shape().name << ", phase p=" << tr.phase_p << " q=" << tr.phase_q
            << ")";
        log.lines.push_back(hdr.str());
        for (std::size_t i = 1; i < tr.states.size(); ++i) {
            const auto& s = tr.states[i];
            bool pt = world.arena().nodes.at(s.p).token;
            bool qt = world.arena().nodes.at(s.q).token;
            bool pq = s.p == s.q;
            ++log.observations;
            log.token_p_true += pt;
            log.token_q_true += qt;
            log.same_pq_true += pq;
            log.lines.push_back(std::string("P token = ") + tf(pt) + ", Q token = " + tf(qt) + ", P == Q " + tf(pq));
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                GroupValue gv = eval_group(groups[gi], world, s, sampler);
                auto& gs = log.groups[gi];
                gs.true_count += gv.value;
                std::string members;
                for (std::size_t m = 0; m < gv.raw.size(); ++m) {
                    gs.members[m].true_count += gv.raw[m];
                    members += (m ? "," : "");
                    members += gv.raw[m] ? "T" : "F";
                }
                log.lines.push_back("  group " + groups[gi].name + " [" + members + "] " + tf(gv.value));
            }
        }
    }
    return log;
}

}  // namespace wmark
