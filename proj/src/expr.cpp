#include "hsf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "hsf/errors.hpp"

namespace hsf {

namespace {
constexpr double kPoleTol = 1e-300;
}  // namespace

ExprPtr make_literal(cplx v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Literal;
    e->value = v;
    return e;
}

ExprPtr make_var(char v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->var = v;
    return e;
}

ExprPtr make_neg(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Neg;
    e->lhs = std::move(a);
    return e;
}

namespace {
ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}
}  // namespace

ExprPtr make_add(ExprPtr a, ExprPtr b) { return binary(ExprKind::Add, std::move(a), std::move(b)); }
ExprPtr make_sub(ExprPtr a, ExprPtr b) { return binary(ExprKind::Sub, std::move(a), std::move(b)); }
ExprPtr make_mul(ExprPtr a, ExprPtr b) { return binary(ExprKind::Mul, std::move(a), std::move(b)); }
ExprPtr make_div(ExprPtr a, ExprPtr b) { return binary(ExprKind::Div, std::move(a), std::move(b)); }

ExprPtr make_pow(ExprPtr a, int n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pow;
    e->lhs = std::move(a);
    e->exponent = n;
    return e;
}

// ----------------------------------------------------------------------
// Lexer + precedence-climbing parser
// ----------------------------------------------------------------------
namespace {

enum class Tok { Number, Imag, VarZ, VarW, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    double number = 0.0;   // Number / Imag magnitude
    bool is_int = false;
};

struct Lexer {
    std::string_view text;
    std::size_t at = 0;
    Token cur;

    explicit Lexer(std::string_view t) : text(t) { advance(); }

    void advance() {
        while (at < text.size() && std::isspace(static_cast<unsigned char>(text[at]))) ++at;
        cur.pos = at;
        if (at >= text.size()) {
            cur.kind = Tok::End;
            return;
        }
        char c = text[at];
        switch (c) {
            case '+': cur.kind = Tok::Plus; ++at; return;
            case '-': cur.kind = Tok::Minus; ++at; return;
            case '*': cur.kind = Tok::Star; ++at; return;
            case '/': cur.kind = Tok::Slash; ++at; return;
            case '^': cur.kind = Tok::Caret; ++at; return;
            case '(': cur.kind = Tok::LParen; ++at; return;
            case ')': cur.kind = Tok::RParen; ++at; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = at;
            bool integral = true;
            while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
            if (at < text.size() && text[at] == '.') {
                integral = false;
                ++at;
                while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
            }
            if (at < text.size() && (text[at] == 'e' || text[at] == 'E')) {
                std::size_t mark = at;
                ++at;
                if (at < text.size() && (text[at] == '+' || text[at] == '-')) ++at;
                if (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) {
                    integral = false;
                    while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
                } else {
                    at = mark;  // 'e' belongs to an identifier, not this number
                }
            }
            std::string s(text.substr(start, at - start));
            double v = std::strtod(s.c_str(), nullptr);
            if (at < text.size() && text[at] == 'i') {
                ++at;
                cur.kind = Tok::Imag;
            } else {
                cur.kind = Tok::Number;
            }
            cur.number = v;
            cur.is_int = integral;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = at;
            while (at < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[at])) || text[at] == '_'))
                ++at;
            std::string id(text.substr(start, at - start));
            if (id == "z") { cur.kind = Tok::VarZ; return; }
            if (id == "w") { cur.kind = Tok::VarW; return; }
            if (id == "i") { cur.kind = Tok::Imag; cur.number = 1.0; return; }
            throw UnknownIdentifier(start, id);
        }
        throw SyntaxError(at, "a number, variable, operator, or parenthesis");
    }
};

struct Parser {
    Lexer lex;

    explicit Parser(std::string_view t) : lex(t) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        if (lex.cur.kind != Tok::End) throw SyntaxError(lex.cur.pos, "end of input");
        return e;
    }

    // Literal or negated-literal value, for folding `a+bi` into one node.
    static bool literal_value(const ExprPtr& e, cplx& out) {
        if (e->kind == ExprKind::Literal) {
            out = e->value;
            return true;
        }
        if (e->kind == ExprKind::Neg && e->lhs->kind == ExprKind::Literal) {
            out = -e->lhs->value;
            return true;
        }
        return false;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            cplx a, b;
            if (lex.cur.kind == Tok::Plus) {
                lex.advance();
                ExprPtr rhs = term();
                if (literal_value(e, a) && literal_value(rhs, b))
                    e = make_literal(a + b);
                else
                    e = make_add(std::move(e), std::move(rhs));
            } else if (lex.cur.kind == Tok::Minus) {
                lex.advance();
                ExprPtr rhs = term();
                if (literal_value(e, a) && literal_value(rhs, b))
                    e = make_literal(a - b);
                else
                    e = make_sub(std::move(e), std::move(rhs));
            } else {
                return e;
            }
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            if (lex.cur.kind == Tok::Star) {
                lex.advance();
                e = make_mul(std::move(e), unary());
            } else if (lex.cur.kind == Tok::Slash) {
                lex.advance();
                e = make_div(std::move(e), unary());
            } else {
                return e;
            }
        }
    }

    ExprPtr unary() {
        if (lex.cur.kind == Tok::Minus) {
            lex.advance();
            return make_neg(unary());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr e = atom();
        while (lex.cur.kind == Tok::Caret) {
            lex.advance();
            e = make_pow(std::move(e), intexp());
        }
        return e;
    }

    int intexp() {
        bool neg = false, paren = false;
        if (lex.cur.kind == Tok::LParen) {
            paren = true;
            lex.advance();
        }
        if (lex.cur.kind == Tok::Minus) {
            neg = true;
            lex.advance();
        }
        if (lex.cur.kind != Tok::Number || !lex.cur.is_int)
            throw SyntaxError(lex.cur.pos, "an integer exponent");
        double v = lex.cur.number;
        if (v > 1e9) throw SyntaxError(lex.cur.pos, "an exponent below 1e9");
        lex.advance();
        if (paren) {
            if (lex.cur.kind != Tok::RParen) throw SyntaxError(lex.cur.pos, "')'");
            lex.advance();
        }
        int n = static_cast<int>(v);
        return neg ? -n : n;
    }

    ExprPtr atom() {
        switch (lex.cur.kind) {
            case Tok::Number: {
                cplx v(lex.cur.number, 0.0);
                lex.advance();
                return make_literal(v);
            }
            case Tok::Imag: {
                cplx v(0.0, lex.cur.number);
                lex.advance();
                return make_literal(v);
            }
            case Tok::VarZ: lex.advance(); return make_var('z');
            case Tok::VarW: lex.advance(); return make_var('w');
            case Tok::LParen: {
                lex.advance();
                ExprPtr e = expr();
                if (lex.cur.kind != Tok::RParen) throw SyntaxError(lex.cur.pos, "')'");
                lex.advance();
                return e;
            }
            default:
                throw SyntaxError(lex.cur.pos, "a number, 'i', 'z', 'w', or '('");
        }
    }
};

}  // namespace

ExprPtr parse_expr(std::string_view text) { return Parser(text).parse(); }

// ----------------------------------------------------------------------
// Evaluation
// ----------------------------------------------------------------------
namespace {

cplx int_pow(cplx base, int n, const Expr& where) {
    if (n < 0) {
        if (std::abs(base) < kPoleTol) throw EvalPole(to_string(where));
        return 1.0 / int_pow(base, -n, where);
    }
    cplx r(1.0, 0.0), b = base;
    unsigned m = static_cast<unsigned>(n);
    while (m) {
        if (m & 1u) r *= b;
        b *= b;
        m >>= 1u;
    }
    return r;
}

}  // namespace

cplx eval_expr(const Expr& e, cplx z, cplx w) {
    switch (e.kind) {
        case ExprKind::Literal: return e.value;
        case ExprKind::Var: return e.var == 'z' ? z : w;
        case ExprKind::Neg: return -eval_expr(*e.lhs, z, w);
        case ExprKind::Add: return eval_expr(*e.lhs, z, w) + eval_expr(*e.rhs, z, w);
        case ExprKind::Sub: return eval_expr(*e.lhs, z, w) - eval_expr(*e.rhs, z, w);
        case ExprKind::Mul: return eval_expr(*e.lhs, z, w) * eval_expr(*e.rhs, z, w);
        case ExprKind::Div: {
            cplx num = eval_expr(*e.lhs, z, w);
            cplx den = eval_expr(*e.rhs, z, w);
            if (std::abs(den) < kPoleTol) throw EvalPole(to_string(*e.rhs));
            return num / den;
        }
        case ExprKind::Pow: return int_pow(eval_expr(*e.lhs, z, w), e.exponent, *e.lhs);
    }
    throw Error("corrupt expression node");
}

// ----------------------------------------------------------------------
// Symbolic differentiation with light simplification
// ----------------------------------------------------------------------
namespace {

bool is_zero(const ExprPtr& e) {
    return e->kind == ExprKind::Literal && e->value == cplx(0.0, 0.0);
}
bool is_one(const ExprPtr& e) {
    return e->kind == ExprKind::Literal && e->value == cplx(1.0, 0.0);
}

ExprPtr add_s(ExprPtr a, ExprPtr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (a->kind == ExprKind::Literal && b->kind == ExprKind::Literal)
        return make_literal(a->value + b->value);
    return make_add(std::move(a), std::move(b));
}

ExprPtr sub_s(ExprPtr a, ExprPtr b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return make_neg(std::move(b));
    if (a->kind == ExprKind::Literal && b->kind == ExprKind::Literal)
        return make_literal(a->value - b->value);
    return make_sub(std::move(a), std::move(b));
}

ExprPtr mul_s(ExprPtr a, ExprPtr b) {
    if (is_zero(a) || is_zero(b)) return make_literal(0.0);
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    if (a->kind == ExprKind::Literal && b->kind == ExprKind::Literal)
        return make_literal(a->value * b->value);
    return make_mul(std::move(a), std::move(b));
}

ExprPtr pow_s(ExprPtr a, int n) {
    if (n == 0) return make_literal(1.0);
    if (n == 1) return a;
    return make_pow(std::move(a), n);
}

}  // namespace

ExprPtr diff_expr(const ExprPtr& e, char var) {
    switch (e->kind) {
        case ExprKind::Literal: return make_literal(0.0);
        case ExprKind::Var: return make_literal(e->var == var ? 1.0 : 0.0);
        case ExprKind::Neg: {
            ExprPtr d = diff_expr(e->lhs, var);
            if (is_zero(d)) return d;
            return make_neg(std::move(d));
        }
        case ExprKind::Add: return add_s(diff_expr(e->lhs, var), diff_expr(e->rhs, var));
        case ExprKind::Sub: return sub_s(diff_expr(e->lhs, var), diff_expr(e->rhs, var));
        case ExprKind::Mul:
            return add_s(mul_s(diff_expr(e->lhs, var), e->rhs),
                         mul_s(e->lhs, diff_expr(e->rhs, var)));
        case ExprKind::Div: {
            // (u/v)' = (u'v - uv') / v^2
            ExprPtr num = sub_s(mul_s(diff_expr(e->lhs, var), e->rhs),
                                mul_s(e->lhs, diff_expr(e->rhs, var)));
            if (is_zero(num)) return num;
            return make_div(std::move(num), pow_s(e->rhs, 2));
        }
        case ExprKind::Pow: {
            // (u^n)' = n u^(n-1) u'
            ExprPtr du = diff_expr(e->lhs, var);
            if (is_zero(du)) return du;
            ExprPtr factor = mul_s(make_literal(cplx(e->exponent, 0.0)),
                                   pow_s(e->lhs, e->exponent - 1));
            return mul_s(std::move(factor), std::move(du));
        }
    }
    throw Error("corrupt expression node");
}

// ----------------------------------------------------------------------
// Printer
// ----------------------------------------------------------------------
namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Precedence levels for parenthesization: add 1, mul 2, unary 3, pow 4, atom 5.
int prec(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        case ExprKind::Literal:
            if (e.value.real() != 0.0 && e.value.imag() != 0.0) return 1;
            if (e.value.real() < 0.0 || e.value.imag() < 0.0) return 3;
            return 5;
        case ExprKind::Var: return 5;
    }
    return 5;
}

void print(const Expr& e, int parent_prec, std::string& out) {
    int p = prec(e);
    bool need = p < parent_prec;
    if (need) out += '(';
    switch (e.kind) {
        case ExprKind::Literal: {
            double re = e.value.real(), im = e.value.imag();
            if (im == 0.0) {
                out += fmt_real(re);
            } else if (re == 0.0) {
                out += fmt_real(im);
                out += 'i';
            } else {
                out += fmt_real(re);
                if (im >= 0.0) out += '+';
                out += fmt_real(im);
                out += 'i';
            }
            break;
        }
        case ExprKind::Var: out += e.var; break;
        case ExprKind::Neg:
            out += '-';
            print(*e.lhs, 4, out);
            break;
        case ExprKind::Add:
            print(*e.lhs, 1, out);
            out += " + ";
            print(*e.rhs, 2, out);
            break;
        case ExprKind::Sub:
            print(*e.lhs, 1, out);
            out += " - ";
            print(*e.rhs, 2, out);
            break;
        case ExprKind::Mul:
            print(*e.lhs, 2, out);
            out += '*';
            print(*e.rhs, 3, out);
            break;
        case ExprKind::Div:
            print(*e.lhs, 2, out);
            out += '/';
            print(*e.rhs, 3, out);
            break;
        case ExprKind::Pow:
            print(*e.lhs, 5, out);
            out += '^';
            if (e.exponent < 0) {
                out += "(-";
                out += std::to_string(-static_cast<long>(e.exponent));
                out += ')';
            } else {
                out += std::to_string(e.exponent);
            }
            break;
    }
    if (need) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

bool uses_var(const Expr& e, char var) {
    switch (e.kind) {
        case ExprKind::Literal: return false;
        case ExprKind::Var: return e.var == var;
        case ExprKind::Neg: return uses_var(*e.lhs, var);
        case ExprKind::Pow: return uses_var(*e.lhs, var);
        default: return uses_var(*e.lhs, var) || uses_var(*e.rhs, var);
    }
}

}  // namespace hsf
