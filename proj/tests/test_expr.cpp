#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hsf/errors.hpp"
#include "hsf/expr.hpp"

using namespace hsf;

namespace {

bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

// Random meromorphic ASTs for the differentiation and Cauchy-Riemann
// properties. Division and negative powers are included; callers skip
// samples that land near a pole.
ExprPtr random_ast(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    switch (pick(rng)) {
        case 0: return make_literal(cplx(u(rng), u(rng)));
        case 1: return make_var('z');
        case 2: return make_var('w');
        case 3: return make_add(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 4: return make_sub(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 5: return make_mul(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 6: return make_div(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 7: return make_neg(random_ast(rng, depth - 1));
        default: {
            std::uniform_int_distribution<int> ex(-3, 3);
            int n = ex(rng);
            if (n == 0) n = 2;
            return make_pow(random_ast(rng, depth - 1), n);
        }
    }
}

cplx annulus_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ur(0.7, 1.3), ua(-M_PI, M_PI);
    return std::polar(ur(rng), ua(rng));
}

}  // namespace

TEST_CASE("parse basic forms") {
    ExprPtr e = parse_expr("z + w");
    REQUIRE(e->kind == ExprKind::Add);
    CHECK(e->lhs->kind == ExprKind::Var);
    CHECK(e->lhs->var == 'z');
    CHECK(e->rhs->var == 'w');

    e = parse_expr("i*z + w^2");
    REQUIRE(e->kind == ExprKind::Add);
    CHECK(e->lhs->kind == ExprKind::Mul);
    CHECK(e->lhs->lhs->kind == ExprKind::Literal);
    CHECK(close(e->lhs->lhs->value, cplx(0, 1)));
    CHECK(e->rhs->kind == ExprKind::Pow);
    CHECK(e->rhs->exponent == 2);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_expr("z + "), SyntaxError);
    CHECK_THROWS_AS(parse_expr("(z + w"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("z^w"), SyntaxError);
    CHECK_THROWS_AS(parse_expr("z^1.5"), SyntaxError);
    try {
        parse_expr("z + x");
        FAIL("expected UnknownIdentifier");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.name == "x");
        CHECK(e.position == 4);
    }
}

TEST_CASE("precedence and associativity") {
    // ^ binds tighter than unary minus, which binds tighter than * /
    CHECK(close(eval_expr(*parse_expr("-z^2"), cplx(2, 0), 0), cplx(-4, 0)));
    CHECK(close(eval_expr(*parse_expr("2*z^2"), cplx(3, 0), 0), cplx(18, 0)));
    CHECK(close(eval_expr(*parse_expr("1 - 2 - 3"), 0, 0), cplx(-4, 0)));
    CHECK(close(eval_expr(*parse_expr("8/2/2"), 0, 0), cplx(2, 0)));
    CHECK(close(eval_expr(*parse_expr("z^-2"), cplx(2, 0), 0), cplx(0.25, 0)));
    CHECK(close(eval_expr(*parse_expr("z^(-2)"), cplx(2, 0), 0), cplx(0.25, 0)));
}

TEST_CASE("eval examples") {
    CHECK(close(eval_expr(*parse_expr("z+w"), cplx(1, 0), cplx(0, 2)), cplx(1, 2)));
    CHECK(close(eval_expr(*parse_expr("w^2"), cplx(0, 0), cplx(1, 1)), cplx(0, 2)));
    CHECK_THROWS_AS(eval_expr(*parse_expr("1/w"), cplx(0, 0), cplx(0, 0)), EvalPole);
    CHECK_THROWS_AS(eval_expr(*parse_expr("w^-1"), cplx(0, 0), cplx(0, 0)), EvalPole);
    CHECK(close(eval_expr(*parse_expr("1/(2*w)"), 0, cplx(2, 0)), cplx(0.25, 0)));
}

TEST_CASE("literal forms a, bi, a+bi") {
    CHECK(close(eval_expr(*parse_expr("3"), 0, 0), cplx(3, 0)));
    CHECK(close(eval_expr(*parse_expr("2.5i"), 0, 0), cplx(0, 2.5)));
    CHECK(close(eval_expr(*parse_expr("3+2i"), 0, 0), cplx(3, 2)));
    CHECK(close(eval_expr(*parse_expr("3-2i"), 0, 0), cplx(3, -2)));
    CHECK(close(eval_expr(*parse_expr("1e-3"), 0, 0), cplx(1e-3, 0)));
}

TEST_CASE("diff examples") {
    // d/dz (alpha z + beta w) = alpha
    ExprPtr e = parse_expr("(2+1i)*z + (3-1i)*w");
    ExprPtr d = diff_expr(e, 'z');
    CHECK(close(eval_expr(*d, cplx(0.3, 0.7), cplx(-0.2, 0.1)), cplx(2, 1)));

    d = diff_expr(parse_expr("w^2"), 'w');
    CHECK(close(eval_expr(*d, 0, cplx(3, 0)), cplx(6, 0)));

    // d/dw (1/w^n) = -n w^(-n-1), finite differences at 5 random points
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 5; ++n) {
        ExprPtr f = parse_expr("1/w^" + std::to_string(n));
        ExprPtr fd = diff_expr(f, 'w');
        cplx w = annulus_point(rng);
        double h = 1e-6;
        cplx num = (eval_expr(*f, 0, w + h) - eval_expr(*f, 0, w - h)) / (2 * h);
        cplx sym = eval_expr(*fd, 0, w);
        CHECK(std::abs(num - sym) / (1.0 + std::abs(sym)) < 1e-6);
        cplx expect = -double(n) * std::pow(w, -n - 1);
        CHECK(close(sym, expect, 1e-10 * std::abs(expect)));
    }
}

TEST_CASE("property: symbolic derivative matches finite differences") {
    std::mt19937_64 rng(12345);
    int done = 0;
    while (done < 100) {
        ExprPtr e = random_ast(rng, 4);
        cplx z = annulus_point(rng), w = annulus_point(rng);
        ExprPtr dz = diff_expr(e, 'z');
        double h = 1e-5;
        try {
            cplx v = eval_expr(*e, z, w);
            cplx sym = eval_expr(*dz, z, w);
            cplx num = (eval_expr(*e, z + h, w) - eval_expr(*e, z - h, w)) / (2 * h);
            if (std::abs(v) > 1e4 || std::abs(sym) > 1e4) continue;  // ill-conditioned draw
            CHECK(std::abs(num - sym) / (1.0 + std::abs(sym)) < 1e-6);
            ++done;
        } catch (const EvalPole&) {
            continue;
        }
    }
}

TEST_CASE("property: evaluation satisfies the Cauchy-Riemann equations") {
    std::mt19937_64 rng(999);
    int done = 0;
    while (done < 60) {
        ExprPtr e = random_ast(rng, 3);
        cplx z = annulus_point(rng), w = annulus_point(rng);
        double h = 1e-5;
        try {
            if (std::abs(eval_expr(*e, z, w)) > 1e4) continue;
            auto u = [&](double x, double y) { return eval_expr(*e, cplx(x, y), w).real(); };
            auto v = [&](double x, double y) { return eval_expr(*e, cplx(x, y), w).imag(); };
            double x = z.real(), y = z.imag();
            double ux = (u(x + h, y) - u(x - h, y)) / (2 * h);
            double uy = (u(x, y + h) - u(x, y - h)) / (2 * h);
            double vx = (v(x + h, y) - v(x - h, y)) / (2 * h);
            double vy = (v(x, y + h) - v(x, y - h)) / (2 * h);
            double scale = 1.0 + std::abs(ux) + std::abs(vy);
            if (scale > 1e4) continue;
            CHECK(std::abs(ux - vy) / scale < 1e-6);
            CHECK(std::abs(uy + vx) / scale < 1e-6);
            ++done;
        } catch (const EvalPole&) {
            continue;
        }
    }
}

TEST_CASE("printer round trip is a fixed point") {
    const char* corpus[] = {
        "z + w",        "i*z + w^2",       "1/w^2 - (3-2i)*z", "-z^2 + 3*w",
        "(z + w)^3",    "z*w/(1 + w^2)",   "2.5i*z - 0.5",     "w^(-2)",
        "1/(2*w)",      "i*z + w^2 - z*w", "(1+1i)*z^2/(w - 1)",
    };
    for (const char* s : corpus) {
        std::string p1 = to_string(*parse_expr(s));
        std::string p2 = to_string(*parse_expr(p1));
        CHECK(p1 == p2);
    }
    // the same property over random ASTs, after one canonicalizing pass
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 200; ++i) {
        ExprPtr e = random_ast(rng, 4);
        std::string p1 = to_string(*parse_expr(to_string(*e)));
        std::string p2 = to_string(*parse_expr(p1));
        CHECK(p1 == p2);
    }
}

TEST_CASE("round trip preserves evaluation") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        ExprPtr e = random_ast(rng, 4);
        ExprPtr r = parse_expr(to_string(*e));
        cplx z = annulus_point(rng), w = annulus_point(rng);
        try {
            cplx a = eval_expr(*e, z, w);
            cplx b = eval_expr(*r, z, w);
            if (std::abs(a) > 1e6) continue;
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
        } catch (const EvalPole&) {
            continue;
        }
    }
}
