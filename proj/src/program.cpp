#include "figlearn/program.hpp"

#include <cctype>
#include <sstream>

#include "figlearn/errors.hpp"

namespace figlearn::dsl {

namespace {

NodePtr node(Node n) { return std::make_shared<const Node>(std::move(n)); }

void check_angle(int angle) {
    if (angle != 0 && angle != 90 && angle != 180 && angle != 270) {
        fail("InvalidAngle", "rotation angle must be one of 0/90/180/270");
    }
}

void check_index(int index) {
    if (index < 1 || index > 8) {
        fail("SyntaxError", "configuration index must be within 1..8");
    }
}

void check_prim(int prim) {
    if (prim < 0 || prim > 3) {
        fail("IllTypedProgram", "primitive slot must be within p1..p4");
    }
}

} // namespace

NodePtr make_prim_set(int prim) {
    if (prim != -1) check_prim(prim);
    return node({NodeKind::PrimSet, 0, 0, prim, nullptr, nullptr});
}

NodePtr make_var() { return node({NodeKind::Var, 0, 0, -1, nullptr, nullptr}); }

NodePtr make_has(int prim) {
    check_prim(prim);
    return node({NodeKind::Has, 0, 0, prim, nullptr, nullptr});
}

NodePtr make_rotate(NodePtr child, int angle) {
    check_angle(angle);
    return node({NodeKind::Rotate, angle, 0, -1, std::move(child), nullptr});
}

NodePtr make_attach(NodePtr left, NodePtr right) {
    return node({NodeKind::Attach, 0, 0, -1, std::move(left), std::move(right)});
}

NodePtr make_attach_fixed(NodePtr left, NodePtr right, int index) {
    check_index(index);
    return node({NodeKind::AttachFixed, 0, index, -1, std::move(left), std::move(right)});
}

NodePtr make_map(NodePtr body, NodePtr over) {
    return node({NodeKind::Map, 0, 0, -1, std::move(body), std::move(over)});
}

NodePtr make_all_rotations(NodePtr child) {
    return node({NodeKind::AllRotations, 0, 0, -1, std::move(child), nullptr});
}

namespace {

void validate_node(const NodePtr& n, bool at_root, bool var_bound) {
    if (!n) fail("IllTypedProgram", "missing child node");
    switch (n->kind) {
        case NodeKind::AllRotations:
            if (!at_root) {
                fail("IllTypedProgram", "rotations is only allowed at the root");
            }
            validate_node(n->a, false, var_bound);
            break;
        case NodeKind::Rotate:
            check_angle(n->angle);
            validate_node(n->a, false, var_bound);
            break;
        case NodeKind::Attach:
            validate_node(n->a, false, var_bound);
            validate_node(n->b, false, var_bound);
            break;
        case NodeKind::AttachFixed:
            check_index(n->index);
            validate_node(n->a, false, var_bound);
            validate_node(n->b, false, var_bound);
            break;
        case NodeKind::Map:
            validate_node(n->a, false, true);
            if (!n->b || (n->b->kind != NodeKind::PrimSet && n->b->kind != NodeKind::Var)) {
                fail("IllTypedProgram", "map ranges over a primitive set");
            }
            validate_node(n->b, false, var_bound);
            break;
        case NodeKind::Has:
            check_prim(n->prim);
            break;
        case NodeKind::PrimSet:
            if (n->prim != -1) check_prim(n->prim);
            break;
        case NodeKind::Var:
            if (!var_bound) {
                fail("UnboundVariable", "x used outside a lambda body");
            }
            break;
    }
}

} // namespace

void validate(const Program& p) {
    if (!p.root) fail("IllTypedProgram", "empty program");
    validate_node(p.root, true, false);
}

namespace {

size_t count_nodes(const NodePtr& n) {
    if (!n) return 0;
    return 1 + count_nodes(n->a) + count_nodes(n->b);
}

} // namespace

size_t node_count(const Program& p) { return count_nodes(p.root); }

// ---------------------------------------------------------------------------
// Surface syntax
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum Kind { LParen, RParen, Symbol, End } kind;
    std::string text;
    size_t pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        if (i_ >= text_.size()) return {Token::End, "", i_};
        const size_t start = i_;
        const char c = text_[i_];
        if (c == '(') {
            ++i_;
            return {Token::LParen, "(", start};
        }
        if (c == ')') {
            ++i_;
            return {Token::RParen, ")", start};
        }
        size_t j = i_;
        while (j < text_.size() && !std::isspace(static_cast<unsigned char>(text_[j])) &&
               text_[j] != '(' && text_[j] != ')') {
            ++j;
        }
        Token t{Token::Symbol, std::string(text_.substr(i_, j - i_)), start};
        i_ = j;
        return t;
    }

private:
    std::string_view text_;
    size_t i_ = 0;
};

[[noreturn]] void syntax_error(const std::string& what, size_t pos) {
    fail("SyntaxError", what + " at position " + std::to_string(pos));
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { advance(); }

    Program parse() {
        NodePtr root = parse_expr(false);
        if (cur_.kind != Token::End) {
            syntax_error("trailing input after program", cur_.pos);
        }
        Program p{root};
        validate(p);
        return p;
    }

private:
    Lexer lex_;
    Token cur_{Token::End, "", 0};

    void advance() { cur_ = lex_.next(); }

    void expect_rparen() {
        if (cur_.kind != Token::RParen) {
            syntax_error("expected ')'", cur_.pos);
        }
        advance();
    }

    int parse_int(const char* what) {
        if (cur_.kind != Token::Symbol) syntax_error(std::string("expected ") + what, cur_.pos);
        const std::string s = cur_.text;
        for (char c : s) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                syntax_error(std::string("expected ") + what, cur_.pos);
            }
        }
        const size_t pos = cur_.pos;
        advance();
        try {
            return std::stoi(s);
        } catch (const std::exception&) {
            syntax_error(std::string("malformed ") + what, pos);
        }
    }

    NodePtr parse_atom(bool in_body) {
        const std::string s = cur_.text;
        const size_t pos = cur_.pos;
        advance();
        if (s == "S") return make_prim_set(-1);
        if (s == "x") {
            if (!in_body) fail("UnboundVariable", "x used outside a lambda body");
            return make_var();
        }
        if (s.size() == 2 && s[0] == 'p' && s[1] >= '1' && s[1] <= '4') {
            return make_prim_set(s[1] - '1');
        }
        syntax_error("unknown symbol '" + s + "'", pos);
    }

    int parse_prim_slot() {
        if (cur_.kind != Token::Symbol || cur_.text.size() != 2 || cur_.text[0] != 'p' ||
            cur_.text[1] < '1' || cur_.text[1] > '4') {
            syntax_error("expected a primitive p1..p4", cur_.pos);
        }
        const int slot = cur_.text[1] - '1';
        advance();
        return slot;
    }

    NodePtr parse_expr(bool in_body) {
        if (cur_.kind == Token::Symbol) return parse_atom(in_body);
        if (cur_.kind != Token::LParen) syntax_error("expected expression", cur_.pos);
        advance();
        if (cur_.kind != Token::Symbol) syntax_error("expected operator", cur_.pos);
        const std::string op = cur_.text;
        const size_t op_pos = cur_.pos;
        advance();

        if (op == "attach") {
            NodePtr l = parse_expr(in_body);
            NodePtr r = parse_expr(in_body);
            expect_rparen();
            return make_attach(std::move(l), std::move(r));
        }
        if (op == "attach*") {
            NodePtr l = parse_expr(in_body);
            NodePtr r = parse_expr(in_body);
            const int idx = parse_int("configuration index");
            check_index(idx);
            expect_rparen();
            return make_attach_fixed(std::move(l), std::move(r), idx);
        }
        if (op == "rotate") {
            NodePtr c = parse_expr(in_body);
            const int angle = parse_int("angle");
            check_angle(angle);
            expect_rparen();
            return make_rotate(std::move(c), angle);
        }
        if (op == "rotations") {
            NodePtr c = parse_expr(in_body);
            expect_rparen();
            return make_all_rotations(std::move(c));
        }
        if (op == "has") {
            const int slot = parse_prim_slot();
            expect_rparen();
            return make_has(slot);
        }
        if (op == "map") {
            if (cur_.kind != Token::LParen) syntax_error("expected (lambda x ...)", cur_.pos);
            advance();
            if (cur_.kind != Token::Symbol || cur_.text != "lambda") {
                syntax_error("expected lambda", cur_.pos);
            }
            advance();
            if (cur_.kind != Token::Symbol || cur_.text != "x") {
                syntax_error("lambda variable must be x", cur_.pos);
            }
            advance();
            NodePtr body = parse_expr(true);
            expect_rparen();
            NodePtr over = parse_expr(in_body);
            expect_rparen();
            return make_map(std::move(body), std::move(over));
        }
        if (op == "lambda") {
            syntax_error("lambda is only allowed as the first argument of map", op_pos);
        }
        syntax_error("unknown operator '" + op + "'", op_pos);
    }
};

void print_rec(std::ostringstream& out, const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::AllRotations:
            out << "(rotations ";
            print_rec(out, n->a);
            out << ")";
            break;
        case NodeKind::Rotate:
            out << "(rotate ";
            print_rec(out, n->a);
            out << " " << n->angle << ")";
            break;
        case NodeKind::Attach:
            out << "(attach ";
            print_rec(out, n->a);
            out << " ";
            print_rec(out, n->b);
            out << ")";
            break;
        case NodeKind::AttachFixed:
            out << "(attach* ";
            print_rec(out, n->a);
            out << " ";
            print_rec(out, n->b);
            out << " " << n->index << ")";
            break;
        case NodeKind::Map:
            out << "(map (lambda x ";
            print_rec(out, n->a);
            out << ") ";
            print_rec(out, n->b);
            out << ")";
            break;
        case NodeKind::Has:
            out << "(has p" << n->prim + 1 << ")";
            break;
        case NodeKind::PrimSet:
            if (n->prim == -1) {
                out << "S";
            } else {
                out << "p" << n->prim + 1;
            }
            break;
        case NodeKind::Var:
            out << "x";
            break;
    }
}

} // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

std::string print_node(const NodePtr& n) {
    std::ostringstream out;
    print_rec(out, n);
    return out.str();
}

std::string print_program(const Program& p) { return print_node(p.root); }

} // namespace figlearn::dsl
