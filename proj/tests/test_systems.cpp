#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hsf/errors.hpp"
#include "hsf/systems.hpp"

using namespace hsf;

namespace {
bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }
}

TEST_CASE("build general system") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z+w","g":"w^2","eps":[0.1]})js");
    CHECK(s.family == Family::General);
    REQUIRE(s.eps.size() == 1);
    CHECK(s.eps[0] == 0.1);
    CHECK(close(eval_expr(*s.f, cplx(1, 0), cplx(2, 0)), cplx(3, 0)));
}

TEST_CASE("build SF3 coupled system derives alpha and beta") {
    SystemSpec s = build_system(
        R"js({"family":"SF3","f":"i*z+w^2","g":"1/(2*w)","params":{"G":"w^2"},"eps":[0.1]})js");
    REQUIRE(s.coupled.has_value());
    CHECK(close(s.coupled->alpha, cplx(0, 1), 1e-10));
    CHECK(close(s.coupled->beta, cplx(1, 0), 1e-10));
    CHECK(close(s.coupled->big_g(cplx(2, 0)), cplx(4, 0), 1e-12));
}

TEST_CASE("SF3 with inconsistent primitive is rejected") {
    CHECK_THROWS_AS(build_system(R"js({"family":"SF3","f":"i*z+w^2","g":"w","params":{"G":"w^2"}})js"),
                    FamilyInvariantViolated);
}

TEST_CASE("SF2 linear tail coefficients are rejected") {
    CHECK_THROWS_AS(
        build_system(
            R"js({"family":"SF2","params":{"alpha":[1,0],"beta":[0,1],"ftilde":[[1,0,0.5,0]]}})js"),
        FamilyInvariantViolated);
    // a well-formed quadratic tail passes
    SystemSpec s = build_system(
        R"js({"family":"SF2","params":{"alpha":[1,0],"beta":[0,1],"gtilde":[[2,0,1,0]]}})js");
    REQUIRE(s.sf2.has_value());
    CHECK(close(s.sf2->gtilde.coeff(2, 0), 1.0));
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(build_system("not json"), SchemaError);
    CHECK_THROWS_AS(build_system(R"js({"f":"z"})js"), SchemaError);
    CHECK_THROWS_AS(build_system(R"js({"family":"general","f":"z","g":"w","eps":[0.0]})js"),
                    SchemaError);
    CHECK_THROWS_AS(build_system(R"js({"family":"general","f":"z","g":"w","eps":[1.5]})js"),
                    SchemaError);
    CHECK_THROWS_AS(build_system(R"js({"family":"nope","f":"z","g":"w"})js"), SchemaError);
}

TEST_CASE("SF4 param styles") {
    SystemSpec s = build_system(
        R"js({"family":"SF4","params":{"alpha":[1,0],"beta":[1,0],"g":{"kind":"power","n":2}},"eps":[0.1]})js");
    REQUIRE(s.sf4.has_value());
    CHECK(s.sf4->g.kind == NormalForm::Power);
    CHECK(close(eval_expr(*s.g, 0, cplx(3, 0)), cplx(9, 0)));

    s = build_system(
        R"js({"family":"SF4","params":{"matrix":{"a":[1,0],"b":[1,0],"c":[0,0],"d":[0,1]}}})js");
    REQUIRE(s.linear2.has_value());
    CHECK(close(s.linear2->reduced_rate(), cplx(0, 1)));

    CHECK_THROWS_AS(
        build_system(
            R"js({"family":"SF4","params":{"alpha":[1,0],"beta":[1,0],"g":{"kind":"power","n":1}}})js"),
        FamilyParamError);
}

TEST_CASE("uncoupled family validates variable separation") {
    CHECK_THROWS_AS(build_system(R"js({"family":"uncoupled","f":"z+w","g":"w"})js"),
                    FamilyInvariantViolated);
    SystemSpec s = build_system(R"js({"family":"uncoupled","f":"z^2","g":"w^2"})js");
    CHECK(s.family == Family::Uncoupled);
}

TEST_CASE("critical manifold: linear f") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z+w","g":"w^2","eps":[0.1]})js");
    CriticalManifoldSample cm = critical_manifold_solve(s, {cplx(1, -1)});
    REQUIRE(cm.points.size() == 1);
    CHECK(close(cm.points[0].z, cplx(-1, 1), 1e-10));
    CHECK(cm.points[0].margin == doctest::Approx(1.0));
}

TEST_CASE("critical manifold: coupled closed form z = -beta G(w)/alpha") {
    SystemSpec s = build_system(
        R"js({"family":"SF3","f":"i*z+w^2","g":"1/(2*w)","params":{"G":"w^2"},"eps":[0.1]})js");
    CriticalManifoldSample cm = critical_manifold_solve(s, {cplx(1, 0)});
    REQUIRE(cm.points.size() == 1);
    CHECK(close(cm.points[0].z, cplx(0, 1), 1e-9));  // z = i w^2 at w = 1
    CHECK(std::abs(cm.points[0].margin) < 1e-12);    // Re(df/dz) = Re(i) = 0
}

TEST_CASE("critical manifold: degenerate root") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z^2","g":"w","eps":[0.1]})js");
    CHECK_THROWS_AS(critical_manifold_solve(s, {cplx(0.5, 0.5)}), DegenerateRoot);
}

TEST_CASE("real embedding matches complex evaluation") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z","g":"0","eps":[1.0]})js");
    auto emb = real_embedding(s);
    auto v = emb({1, 0, 0.3, 0.4}, 1.0);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0));
    CHECK(v[2] == doctest::Approx(0.0));
    CHECK(v[3] == doctest::Approx(0.0));

    s = build_system(R"js({"family":"general","f":"i*z","g":"0","eps":[1.0]})js");
    emb = real_embedding(s);
    v = emb({1, 0, 0, 0}, 1.0);
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(1.0));

    s = build_system(R"js({"family":"general","f":"z+w","g":"w^2","eps":[0.5]})js");
    emb = real_embedding(s);
    v = emb({1, 0, 0, 1}, 0.5);  // (z, w) = (1, i)
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == doctest::Approx(2.0));
    CHECK(v[2] == doctest::Approx(-1.0));
    CHECK(v[3] == doctest::Approx(0.0));
}

TEST_CASE("property: embedding agrees with complex evaluation at random points") {
    SystemSpec s = build_system(
        R"js({"family":"general","f":"z^2 - i*w + z*w","g":"w^2 + (2-1i)*z","eps":[0.3]})js");
    auto emb = real_embedding(s);
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        cplx z(u(rng), u(rng)), w(u(rng), u(rng));
        double eps = 0.3;
        cplx f = eval_expr(*s.f, z, w) / eps;
        cplx g = eval_expr(*s.g, z, w);
        auto v = emb({z.real(), z.imag(), w.real(), w.imag()}, eps);
        CHECK(std::abs(v[0] - f.real()) < 1e-14 * (1 + std::abs(f)));
        CHECK(std::abs(v[1] - f.imag()) < 1e-14 * (1 + std::abs(f)));
        CHECK(std::abs(v[2] - g.real()) < 1e-14 * (1 + std::abs(g)));
        CHECK(std::abs(v[3] - g.imag()) < 1e-14 * (1 + std::abs(g)));
    }
}

TEST_CASE("critical manifold roots are fixed points of re-solving") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z^2+z+w","g":"w","eps":[0.1]})js");
    std::vector<cplx> ws = {cplx(0.1, 0.2), cplx(-0.3, 0.1), cplx(0.05, -0.15)};
    CriticalManifoldSample cm = critical_manifold_solve(s, ws);
    for (std::size_t i = 0; i < cm.points.size(); ++i) {
        CHECK(std::abs(eval_expr(*s.f, cm.points[i].z, cm.points[i].w)) < 1e-10);
        CriticalManifoldSample again =
            critical_manifold_solve(s, {cm.points[i].w}, cm.points[i].z);
        CHECK(close(again.points[0].z, cm.points[i].z, 1e-9));
    }
    CHECK(cm.multiple_roots);  // the quadratic has two sheets
}

TEST_CASE("sf2_from_linear: triangular case is exact") {
    LinearLinearSpec m{cplx(1, 0), cplx(1, 0), cplx(0, 0), cplx(0, 1)};
    double eps = 0.1;
    SF2FromLinear r = sf2_from_linear(m, eps, 8);
    cplx expect = -m.b / (m.a - eps * m.d);
    CHECK(close(r.lambda1, expect, 1e-14));
    CHECK(close(r.sf2.alpha, m.a));
    CHECK(close(r.sf2.beta, m.d));
    CHECK(r.sf2.ftilde.max_abs() == 0.0);
    CHECK(r.sf2.gtilde.max_abs() == 0.0);
    // z = lambda1 w satisfies both equations of the linear system
    cplx w(0.37, -0.22);
    cplx z = r.lambda1 * w;
    cplx zdot = (m.a * z + m.b * w) / eps;
    cplx wdot = m.c * z + m.d * w;
    CHECK(std::abs(zdot - r.lambda1 * wdot) < 1e-12);
}

TEST_CASE("sf2_from_linear: full matrix eigenpair") {
    LinearLinearSpec m{cplx(1, 0.2), cplx(0.5, -0.1), cplx(0.3, 0.1), cplx(-0.4, 0.9)};
    double eps = 0.05;
    SF2FromLinear r = sf2_from_linear(m, eps, 8);
    // (lambda1, 1) is an eigenvector of [[a/eps, b/eps], [c, d]] for mu_slow
    cplx top = (m.a / eps) * r.lambda1 + m.b / eps;
    cplx bot = m.c * r.lambda1 + m.d;
    CHECK(std::abs(top - r.mu_slow * r.lambda1) < 1e-9 * std::abs(r.mu_slow));
    CHECK(std::abs(bot - r.mu_slow) < 1e-9 * std::abs(r.mu_slow));
}
