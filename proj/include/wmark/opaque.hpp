#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace wmark {

enum class Algorithm { I, II };

// Pointer symbols of the two-ring world: roots g and h, movers p and q.
enum class Sym { G, H, P, Q };
const char* sym_name(Sym s) noexcept;

struct Node {
    bool token = false;
    int head = 0;
    int tail = 0;
    int ring = 0;
};

// Arena of Node objects. The operations copy the reference listing exactly,
// including its asymmetry: addNode never touches the new node's tail.
struct NodeArena {
    std::vector<Node> nodes;

    int make(int ring);             // token=false, head=tail=self
    int add_node(int self);         // p.head = this.tail; this.head = p
    int move_next(int n) const { return nodes.at(nodes.at(n).tail).head; }
    int move_back(int n) const { return nodes.at(nodes.at(n).head).tail; }
};

struct WorldShape {
    std::string name;
    unsigned period_p = 1;  // ticks between p = p.MoveNext()
    unsigned period_q = 1;  // ticks between q = q.MoveBack()
    unsigned nodes_per_ring = 2;
};

// Sleeps of 12000 ms and 4000 ms.
WorldShape stylepad_shape();
// Sleeps of 2000 ms and wt = 1000 ms.
WorldShape myclass_shape();

struct WorldState {
    std::uint64_t tick = 0;
    int g = 0, h = 0, p = 0, q = 0;

    int at(Sym s) const noexcept;
    bool operator==(const WorldState&) const = default;
};

class PredicateWorld {
public:
    explicit PredicateWorld(WorldShape shape);

    const WorldShape& shape() const noexcept { return shape_; }
    const NodeArena& arena() const noexcept { return arena_; }
    const WorldState& initial() const noexcept { return initial_; }
    int ring_of(int node) const { return arena_.nodes.at(node).ring; }
    std::vector<int> ring_nodes(int ring) const;

private:
    WorldShape shape_;
    NodeArena arena_;
    WorldState initial_;
};

struct Trajectory {
    std::vector<WorldState> states;  // states[0] is the initial state
    unsigned phase_p = 0;
    unsigned phase_q = 0;
    std::uint64_t fires_p = 0;
    std::uint64_t fires_q = 0;
};

// Virtual-tick scheduler: at tick t (1-based) a mover fires when
// (t + phase) % period == 0. The seed only chooses the phases.
Trajectory step_world(const PredicateWorld& world, std::uint64_t seed, std::uint64_t ticks);

// Exact (7x^2 - 1) == y^2 over 64-bit inputs.
bool pell_holds(std::int64_t x, std::int64_t y);

struct Atom {
    enum class Kind { ConstTrue, ConstFalse, SameNode, TokenOf, PellFalse, Not, And, Or };

    Kind kind = Kind::ConstTrue;
    Sym a = Sym::G;
    Sym b = Sym::G;
    std::vector<Atom> children;

    static Atom const_true() { return {Kind::ConstTrue, Sym::G, Sym::G, {}}; }
    static Atom const_false() { return {Kind::ConstFalse, Sym::G, Sym::G, {}}; }
    static Atom same_node(Sym x, Sym y) { return {Kind::SameNode, x, y, {}}; }
    static Atom token_of(Sym x) { return {Kind::TokenOf, x, Sym::G, {}}; }
    static Atom pell_false() { return {Kind::PellFalse, Sym::G, Sym::G, {}}; }
    static Atom not_(Atom x) { return {Kind::Not, Sym::G, Sym::G, {std::move(x)}}; }
    static Atom and_(std::vector<Atom> xs) { return {Kind::And, Sym::G, Sym::G, std::move(xs)}; }
    static Atom or_(std::vector<Atom> xs) { return {Kind::Or, Sym::G, Sym::G, std::move(xs)}; }

    std::string label() const;
};

// Draws PellFalse samples; seeded so evaluation stays reproducible.
struct Sampler {
    explicit Sampler(std::uint64_t seed) : rng(seed) {}
    std::mt19937_64 rng;
};

bool eval_atom(const Atom& atom, const PredicateWorld& world, const WorldState& state, Sampler& sampler);

// Structural classification, valid for every reachable world state.
bool always_false(const Atom& atom);
bool always_true(const Atom& atom);

enum class GroupOp { And, Or };

struct PredicateGroup {
    std::string name;
    std::vector<Atom> members;
    GroupOp op = GroupOp::And;
    Algorithm algorithm = Algorithm::I;

    // MalformedGroup unless the group is false by construction:
    //   I  - AND with an always-false member, or OR with only always-false members
    //   II - AND over at least two members (P1 forces P2 false)
    static PredicateGroup make(std::string name, std::vector<Atom> members, GroupOp op, Algorithm algorithm);
};

struct GroupValue {
    bool value = false;
    std::vector<bool> raw;       // member values as evaluated
    std::vector<bool> enforced;  // after the Algorithm II rule
};

GroupValue fold_group(const PredicateGroup& group, std::vector<bool> raw);
GroupValue eval_group(const PredicateGroup& group, const PredicateWorld& world, const WorldState& state,
                      Sampler& sampler);

// b2 = (h == p || p.token); b1 = p.token; guard = b2 && b1 && (g == h)
PredicateGroup unconditional_guard();
// p1 = p.token; p2 = q.token; if (p1) p2 = false; guard = p1 && p2
PredicateGroup conditional_guard();
// b1 = p.token; guard = b1 && (7x^2 - 1 == y^2)
PredicateGroup pell_guard();

struct MemberStats {
    std::string label;
    std::uint64_t true_count = 0;
};

struct GroupStats {
    std::string name;
    std::uint64_t true_count = 0;
    std::vector<MemberStats> members;
};

struct ObservationLog {
    std::vector<std::string> lines;
    std::uint64_t observations = 0;
    std::uint64_t token_p_true = 0;
    std::uint64_t token_q_true = 0;
    std::uint64_t same_pq_true = 0;
    std::vector<GroupStats> groups;

    std::string text() const;
    std::string stats_json() const;
};

// Each run restarts the world with its own seed, advances ticks_per_run ticks
// and samples every group after each tick (one guard point per tick).
ObservationLog run_observation(const PredicateWorld& world, const std::vector<PredicateGroup>& groups,
                               std::uint64_t seed, unsigned runs, std::uint64_t ticks_per_run);

}  // namespace wmark
