#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hsf/errors.hpp"
#include "hsf/series.hpp"

using namespace hsf;

namespace {

bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

Series1 from_list(char var, std::initializer_list<cplx> cs) {
    Series1 s(var, static_cast<int>(cs.size()) - 1);
    int k = 0;
    for (cplx c : cs) s.set(k++, c);
    return s;
}

Series1 random_series(std::mt19937_64& rng, char var, int order, bool unit_c0) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Series1 s(var, order);
    for (int k = 0; k <= order; ++k) s.set(k, cplx(u(rng), u(rng)));
    if (unit_c0) s.set(0, cplx(1.0, 0.0) + 0.3 * s.coeff(0));
    return s;
}

}  // namespace

TEST_CASE("mul truncates at the joint order") {
    Series1 a = from_list('z', {1, 1, 0, 0});   // 1 + z
    Series1 b = from_list('z', {1, -1, 0, 0});  // 1 - z
    Series1 r = s1_mul(a, b);
    CHECK(close(r.coeff(0), 1.0));
    CHECK(close(r.coeff(1), 0.0));
    CHECK(close(r.coeff(2), -1.0));
    CHECK(close(r.coeff(3), 0.0));
    CHECK(r.order() == 3);

    CHECK_THROWS_AS(s1_mul(from_list('z', {1}), from_list('w', {1})), VariableMismatch);
}

TEST_CASE("exp(z) exp(-z) = 1 up to truncation") {
    int N = 6;
    Series1 e('z', N), em('z', N);
    double f = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) f *= k;
        e.set(k, 1.0 / f);
        em.set(k, (k % 2 ? -1.0 : 1.0) / f);
    }
    Series1 r = s1_mul(e, em);
    CHECK(close(r.coeff(0), 1.0, 1e-15));
    for (int k = 1; k <= N; ++k) CHECK(std::abs(r.coeff(k)) < 1e-15);
}

TEST_CASE("scale") {
    Series1 r = s1_scale(s1_identity('z', 3), cplx(0, 2));
    CHECK(close(r.coeff(1), cplx(0, 2)));
}

TEST_CASE("compose") {
    // outer = w^2, inner = z + z^2 -> z^2 + 2z^3 + z^4
    Series1 outer = s1_monomial('w', 2, 1.0, 4);
    Series1 inner = from_list('z', {0, 1, 1, 0, 0});
    Series1 r = s1_compose(outer, inner);
    CHECK(close(r.coeff(2), 1.0));
    CHECK(close(r.coeff(3), 2.0));
    CHECK(close(r.coeff(4), 1.0));

    // identity outer passes inner through
    Series1 id = s1_identity('w', 4);
    r = s1_compose(id, inner);
    for (int k = 0; k <= 4; ++k) CHECK(close(r.coeff(k), inner.coeff(k)));

    // outer = 1 + w + w^2, inner = 2z at N=2 -> 1 + 2z + 4z^2
    Series1 o2 = from_list('w', {1, 1, 1});
    Series1 i2 = s1_monomial('z', 1, 2.0, 2);
    r = s1_compose(o2, i2);
    CHECK(close(r.coeff(0), 1.0));
    CHECK(close(r.coeff(1), 2.0));
    CHECK(close(r.coeff(2), 4.0));

    CHECK_THROWS_AS(s1_compose(o2, from_list('z', {1, 1})), NonzeroConstantTerm);
}

TEST_CASE("reciprocal") {
    // 1/(1+z) = 1 - z + z^2 - z^3 + z^4
    Series1 a = from_list('z', {1, 1, 0, 0, 0});
    Series1 r = s1_reciprocal(a);
    for (int k = 0; k <= 4; ++k) CHECK(close(r.coeff(k), (k % 2 ? -1.0 : 1.0)));

    Series1 two = from_list('z', {2, 0, 0});
    CHECK(close(s1_reciprocal(two).coeff(0), 0.5));

    // 1/(1+z+z^2) = 1 - z + z^3 at N=3
    Series1 b = from_list('z', {1, 1, 1, 0});
    Series1 rb = s1_reciprocal(b);
    CHECK(close(rb.coeff(0), 1.0));
    CHECK(close(rb.coeff(1), -1.0));
    CHECK(close(rb.coeff(2), 0.0));
    CHECK(close(rb.coeff(3), 1.0));

    CHECK_THROWS_AS(s1_reciprocal(s1_identity('z', 3)), ZeroConstantTerm);
}

TEST_CASE("property: a * reciprocal(a) = 1") {
    std::mt19937_64 rng(2024);
    for (int it = 0; it < 50; ++it) {
        Series1 a = random_series(rng, 'z', 12, true);
        Series1 prod = s1_mul(a, s1_reciprocal(a));
        double bound = 1e-12 * (1.0 + a.max_abs());
        CHECK(std::abs(prod.coeff(0) - 1.0) < bound);
        for (int k = 1; k <= prod.order(); ++k) CHECK(std::abs(prod.coeff(k)) < bound);
    }
}

TEST_CASE("bivariate evaluation along a curve") {
    // F = z w, curve = z -> z^2
    Series2 F(4);
    F.set(1, 1, 1.0);
    Series1 r = s2_eval_on_curve(F, s1_identity('z', 4));
    CHECK(close(r.coeff(2), 1.0));

    // F = w^2, curve = z + z^2 -> z^2 + 2z^3 + z^4
    Series2 F2(4);
    F2.set(0, 2, 1.0);
    Series1 curve = from_list('z', {0, 1, 1, 0, 0});
    r = s2_eval_on_curve(F2, curve);
    CHECK(close(r.coeff(2), 1.0));
    CHECK(close(r.coeff(3), 2.0));
    CHECK(close(r.coeff(4), 1.0));

    // F = z^2 + z w + w^2 on curve -z -> z^2
    Series2 F3(3);
    F3.set(2, 0, 1.0);
    F3.set(1, 1, 1.0);
    F3.set(0, 2, 1.0);
    r = s2_eval_on_curve(F3, s1_monomial('z', 1, -1.0, 3));
    CHECK(close(r.coeff(2), 1.0));
    CHECK(close(r.coeff(3), 0.0));
}

TEST_CASE("bivariate reciprocal multiplies back to 1") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Series2 a(6);
    for (int d = 0; d <= 6; ++d)
        for (int l = 0; l <= d; ++l) a.set(d - l, l, cplx(u(rng), u(rng)));
    a.set(0, 0, cplx(1.0, 0.2));
    Series2 prod = s2_mul(a, s2_reciprocal(a));
    CHECK(std::abs(prod.coeff(0, 0) - 1.0) < 1e-12);
    for (int d = 1; d <= 6; ++d)
        for (int l = 0; l <= d; ++l) CHECK(std::abs(prod.coeff(d - l, l)) < 1e-12);
}

TEST_CASE("implicit solve examples") {
    // Theta = z + w^2 -> L = -w^2
    Series2 t1(4);
    t1.set(1, 0, 1.0);
    t1.set(0, 2, 1.0);
    Series1 L = implicit_series_solve(t1, 1.0, 4);
    CHECK(close(L.coeff(2), -1.0));
    CHECK(close(L.coeff(1), 0.0));
    CHECK(close(L.coeff(3), 0.0));
    CHECK(close(L.coeff(4), 0.0));

    // Theta = z -> L = 0
    Series2 t2(4);
    t2.set(1, 0, 1.0);
    L = implicit_series_solve(t2, 1.0, 4);
    for (int k = 0; k <= 4; ++k) CHECK(close(L.coeff(k), 0.0));

    // Theta = z + z w + w^2 -> L = -w^2 + w^3 - w^4
    Series2 t3(4);
    t3.set(1, 0, 1.0);
    t3.set(1, 1, 1.0);
    t3.set(0, 2, 1.0);
    L = implicit_series_solve(t3, 1.0, 4);
    CHECK(close(L.coeff(2), -1.0));
    CHECK(close(L.coeff(3), 1.0));
    CHECK(close(L.coeff(4), -1.0));

    CHECK_THROWS_AS(implicit_series_solve(t3, 0.0, 4), DegenerateLinearPart);
}

TEST_CASE("property: implicit solve residual vanishes") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 30; ++it) {
        int N = 10;
        Series2 theta(N);
        cplx alpha(u(rng), u(rng));
        if (std::abs(alpha) < 0.3) alpha += cplx(1.0, 0.0);
        theta.set(1, 0, alpha);
        for (int d = 2; d <= N; ++d)
            for (int l = 0; l <= d; ++l) theta.set(d - l, l, cplx(u(rng), u(rng)));
        Series1 L = implicit_series_solve(theta, alpha, N);
        Series1 res = s2_eval_on_curve_first(theta, L);
        double scale = 1.0 + std::max(theta.max_abs(), L.max_abs());
        for (int k = 1; k <= N; ++k) CHECK(std::abs(res.coeff(k)) < 1e-12 * scale);
    }
}

TEST_CASE("radius estimate: geometric, factorial, entire") {
    int N = 24;
    // c_k = 2^k: radius 1/2
    Series1 geo('z', N);
    for (int k = 0; k <= N; ++k) geo.set(k, std::pow(2.0, k));
    ConvergenceVerdict v = radius_estimate(geo, 8);
    CHECK(v.verdict == Verdict::Convergent);
    CHECK(std::abs(v.radius - 0.5) < 0.025);

    // c_{k+1} = -eps^k k!: divergent
    Series1 fac('w', N);
    double eps = 0.1, f = 1.0;
    for (int k = 0; k + 1 <= N; ++k) {
        if (k > 0) f *= k;
        fac.set(k + 1, -std::pow(eps, k) * f);
    }
    v = radius_estimate(fac, 8);
    CHECK(v.verdict == Verdict::Divergent);
    CHECK(v.radius == 0.0);

    // c_k = 1/k!: entire, radius reported large
    Series1 ent('z', N);
    f = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) f *= k;
        ent.set(k, 1.0 / f);
    }
    v = radius_estimate(ent, 8);
    CHECK(v.verdict == Verdict::Convergent);
    CHECK(v.radius >= 10.0);
    CHECK(v.large_radius);
}

TEST_CASE("radius estimate recovers geometric radii within 5%") {
    for (double r : {0.25, 1.0, 4.0}) {
        Series1 s('z', 24);
        for (int k = 0; k <= 24; ++k) s.set(k, std::pow(1.0 / r, k));
        ConvergenceVerdict v = radius_estimate(s, 8);
        CHECK(v.verdict == Verdict::Convergent);
        CHECK(std::abs(v.radius - r) <= 0.05 * r);
    }
}

TEST_CASE("radius estimate on sparse support") {
    // support every 3rd index with geometric growth 8^j: per-index ratio 2
    Series1 s('z', 30);
    for (int j = 0; 3 * j <= 30; ++j) s.set(3 * j, std::pow(8.0, j));
    ConvergenceVerdict v = radius_estimate(s, 8);
    CHECK(v.verdict == Verdict::Convergent);
    CHECK(std::abs(v.radius - 0.5) < 0.05);
}

TEST_CASE("radius estimate guards") {
    Series1 s('z', 10);
    CHECK_THROWS_AS(radius_estimate(s, 3), TooFewCoefficients);          // window too small
    CHECK_THROWS_AS(radius_estimate(s, 8), TooFewCoefficients);          // order < 2m
    // a polynomial reads as entire
    Series1 p('z', 24);
    p.set(1, 1.0);
    ConvergenceVerdict v = radius_estimate(p, 8);
    CHECK(v.verdict == Verdict::Convergent);
    CHECK(std::isinf(v.radius));
}
