#include "figlearn/program.hpp"

#include "doctest.h"
#include "figlearn/errors.hpp"

using namespace figlearn;
using namespace figlearn::dsl;

namespace {

void check_error(const char* text, const char* code) {
    try {
        parse_program(text);
        FAIL_CHECK("expected ", code, " for ", text);
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

} // namespace

TEST_CASE("parse/print round trips") {
    const char* programs[] = {
        "p1",
        "S",
        "(has p3)",
        "(attach p1 p2)",
        "(attach* p1 p2 1)",
        "(rotate (attach* p1 p2 1) 180)",
        "(rotations (attach p1 p2))",
        "(map (lambda x (attach x x)) S)",
        "(map (lambda x (attach* x p2 3)) p1)",
        "(rotate (map (lambda x x) S) 90)",
        "(map (lambda x (map (lambda x (attach x x)) x)) S)",
    };
    for (const char* text : programs) {
        const Program p = parse_program(text);
        CHECK(print_program(p) == text);
        CHECK(print_program(parse_program(print_program(p))) == text);
    }
}

TEST_CASE("print normalizes whitespace") {
    const Program p = parse_program("  (attach   p1\n\tp2 ) ");
    CHECK(print_program(p) == "(attach p1 p2)");
}

TEST_CASE("the map-attach example parses to a Var-using body") {
    const Program p = parse_program("(map (lambda x (attach x x)) S)");
    REQUIRE(p.root->kind == NodeKind::Map);
    REQUIRE(p.root->a->kind == NodeKind::Attach);
    CHECK(p.root->a->a->kind == NodeKind::Var);
    CHECK(p.root->a->b->kind == NodeKind::Var);
    CHECK(p.root->b->kind == NodeKind::PrimSet);
    CHECK(p.root->b->prim == -1);
}

TEST_CASE("unbound variables are rejected") {
    check_error("(attach x x)", "UnboundVariable");
    check_error("x", "UnboundVariable");
}

TEST_CASE("syntax and arity errors carry positions") {
    check_error("(attach p1)", "SyntaxError");
    check_error("(attach p1 p2 p3)", "SyntaxError");
    check_error("(rotate p1 45)", "InvalidAngle");
    check_error("(attach* p1 p2 9)", "SyntaxError");
    check_error("(attach* p1 p2 0)", "SyntaxError");
    check_error("(frobnicate p1)", "SyntaxError");
    check_error("(attach p1 p5)", "SyntaxError");
    check_error("(has S)", "SyntaxError");
    check_error("(map (lambda y x) S)", "SyntaxError");
    check_error("((attach p1 p2))", "SyntaxError");
    check_error("(attach p1 p2", "SyntaxError");
    check_error("(attach p1 p2) junk", "SyntaxError");
    try {
        parse_program("(attach p1 p5)");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
}

TEST_CASE("rotations is only valid at the root") {
    CHECK_NOTHROW(parse_program("(rotations p1)"));
    check_error("(attach (rotations p1) p2)", "IllTypedProgram");
    check_error("(rotations (rotations p1))", "IllTypedProgram");
}

TEST_CASE("node_count counts every AST node") {
    CHECK(node_count(parse_program("p1")) == 1);
    CHECK(node_count(parse_program("(attach p1 p2)")) == 3);
    CHECK(node_count(parse_program("(map (lambda x (attach x x)) S)")) == 5);
    CHECK(node_count(parse_program("(rotations (rotate (has p1) 90))")) == 3);
}
