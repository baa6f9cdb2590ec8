#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace figlearn::dsl {

// Typed AST for concept programs. Nodes are immutable and shared, so
// subtree replacement during search is a cheap path copy.
enum class NodeKind : uint8_t {
    AllRotations,  // union of the four rotations; only at the root
    Rotate,        // rotate every member by a fixed angle
    Attach,        // all configurations of two part sets
    AttachFixed,   // the single indexed configuration per pair
    Map,           // union of the body over a primitive set
    Has,           // every figure with the primitive as a part
    PrimSet,       // one primitive, or S for all four
    Var,           // the Map-bound variable
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    int angle = 0;   // Rotate: 0/90/180/270
    int index = 0;   // AttachFixed: 1..8
    int prim = -1;   // Has/PrimSet: slot 0..3; PrimSet uses -1 for S
    NodePtr a;       // Rotate/AllRotations child; Attach left; Map body
    NodePtr b;       // Attach right; Map over-set
};

NodePtr make_prim_set(int prim);  // -1 for S
NodePtr make_var();
NodePtr make_has(int prim);
NodePtr make_rotate(NodePtr child, int angle);
NodePtr make_attach(NodePtr left, NodePtr right);
NodePtr make_attach_fixed(NodePtr left, NodePtr right, int index);
NodePtr make_map(NodePtr body, NodePtr over);
NodePtr make_all_rotations(NodePtr child);

struct Program {
    NodePtr root;
};

// Structural checks: children present, attribute ranges, AllRotations at
// most once and only at the root, Var only under a Map body, Map over-set a
// PrimSet or Var. Throws IllTypedProgram / UnboundVariable.
void validate(const Program& p);

size_t node_count(const Program& p);

// Surface syntax, e.g. (rotations (attach* p1 p2 1)), (map (lambda x
// (attach x x)) S), (rotate (has p3) 180). parse(print(p)) == p.
Program parse_program(std::string_view text);
std::string print_program(const Program& p);
std::string print_node(const NodePtr& n);

} // namespace figlearn::dsl
