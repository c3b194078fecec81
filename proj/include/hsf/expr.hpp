#ifndef HSF_EXPR_HPP
#define HSF_EXPR_HPP

#include <complex>
#include <memory>
#include <string>
#include <string_view>

namespace hsf {

using cplx = std::complex<double>;

// Immutable AST for complex arithmetic in the variables z, w. Only integer
// powers are allowed, so every expression is meromorphic on C^2.
enum class ExprKind { Literal, Var, Neg, Add, Sub, Mul, Div, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    cplx value{};       // Literal
    char var = 0;       // Var: 'z' or 'w'
    int exponent = 0;   // Pow
    ExprPtr lhs, rhs;   // Neg uses lhs only; Pow uses lhs + exponent
};

ExprPtr make_literal(cplx v);
ExprPtr make_var(char v);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, int n);

// Grammar (precedence ^ > unary- > * / > + -, left associative):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' intexp)*          intexp := ['-'] INT | '(' '-'? INT ')'
//   atom    := NUMBER ['i'] | 'i' | 'z' | 'w' | '(' expr ')'
// Throws SyntaxError / UnknownIdentifier with byte positions.
ExprPtr parse_expr(std::string_view text);

// Throws EvalPole when a divisor, or the base of a negative power, vanishes
// (|.| < 1e-300).
cplx eval_expr(const Expr& e, cplx z, cplx w);

// Symbolic partial derivative; valid for every meromorphic AST form.
ExprPtr diff_expr(const ExprPtr& e, char var);

// Canonical printer; print(parse(print(e))) == print(e).
std::string to_string(const Expr& e);

bool uses_var(const Expr& e, char var);

}  // namespace hsf

#endif
