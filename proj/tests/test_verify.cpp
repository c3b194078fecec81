#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hsf/briot_bouquet.hpp"
#include "hsf/errors.hpp"
#include "hsf/verify.hpp"

using namespace hsf;

namespace {

SystemSpec example_coupled(double eps = 0.1) {
    std::string spec = R"js({"family":"SF3","f":"i*z+w^2","g":"1/(2*w)","params":{"G":"w^2"},"eps":[)js";
    spec += std::to_string(eps) + "]}";
    return build_system(spec);
}

}  // namespace

TEST_CASE("invariance residual: on-manifold trajectory stays on the graph") {
    SystemSpec sys = example_coupled();
    double eps = 0.1;
    GraphManifold m = coupled_manifold(*sys.coupled, eps);
    cplx w0(1, 0);
    cplx z0 = m.h(w0);  // = eps + i
    IntegrationControls ctl;
    ctl.rtol = 1e-11;
    ctl.atol = 1e-13;
    Trajectory t = integrate_full(sys, eps, z0, w0, 1.0, ctl);
    InvarianceResult r = invariance_residual(m, t);
    CHECK(r.max_residual < 1e-8);
}

TEST_CASE("invariance residual: reduced flow lives on the critical graph") {
    SystemSpec sys = example_coupled();
    GraphManifold m0 = coupled_manifold(*sys.coupled, 0.0);  // z = i w^2
    ExprPtr g = sys.g;
    Trajectory t = integrate_reduced([g](cplx w) { return eval_expr(*g, 0.0, w); }, cplx(1, 0), 1.0);
    // embed the reduced orbit on C0
    for (auto& s : t.samples) s.z = m0.h(s.w);
    InvarianceResult r = invariance_residual(m0, t);
    CHECK(r.max_residual < 1e-8);
}

TEST_CASE("invariance residual: off-manifold start measures |v|") {
    SystemSpec sys = example_coupled();
    double eps = 0.1;
    GraphManifold m = coupled_manifold(*sys.coupled, eps);
    cplx w0(1, 0);
    cplx z0 = m.h(w0) + 1.0;
    Trajectory t = integrate_full(sys, eps, z0, w0, 0.5);
    InvarianceResult r = invariance_residual(m, t);
    CHECK(r.max_residual > 0.9);   // |v| is conserved in real time for alpha = i
    CHECK(r.max_residual < 1.1);
}

TEST_CASE("invariance residual: implicit manifold path and domain exits") {
    SystemSpec sys = build_system(R"js({"family":"uncoupled","f":"z^2","g":"w^2"})js");
    Primitive P2 = primitive_catalog(NormalFormKind::power(2));
    ImplicitManifold m =
        separable_manifold(sys, parse_expr("z^-2"), parse_expr("w^2"), P2, P2, 0.25);
    Trajectory t;
    t.samples = {{0.0, 0.25 * cplx(0.5, 0.1), cplx(0.5, 0.1)},
                 {0.5, 0.25 * cplx(0.6, 0.2), cplx(0.6, 0.2)}};
    InvarianceResult r = invariance_residual(m, t);
    CHECK(r.max_raw < 1e-12);
    // the origin is excluded from the domain
    t.samples.push_back({1.0, cplx(0.1, 0), cplx(0, 0)});
    CHECK_THROWS_AS(invariance_residual(m, t), DomainExit);
}

TEST_CASE("hausdorff scaling: coupled family has slope 1 and constant |beta/alpha^2|") {
    SystemSpec sys = example_coupled();
    const CoupledSpec c = *sys.coupled;
    auto family = [&](double eps) {
        GraphManifold m0 = coupled_manifold(c, 0.0);
        GraphManifold me = coupled_manifold(c, eps);
        return std::make_pair(m0.h, me.h);
    };
    ScalingReport rep = hausdorff_scaling(family, {0.2, 0.1, 0.05, 0.025}, 1.0);
    CHECK(std::abs(rep.slope - 1.0) < 0.05);
    CHECK(std::abs(rep.constant - 1.0) < 0.01);  // |beta/alpha^2| = |1/i^2| = 1
    CHECK(rep.r_squared > 0.9999);
    CHECK(rep.points_per_set >= 200);

    // alpha = 1+i, beta = 2: |beta/alpha^2| = 1 as well
    SystemSpec sys2 = build_system(
        R"js({"family":"SF3","f":"(1+1i)*z+2*w","g":"1","params":{"G":"w"},"eps":[0.1]})js");
    const CoupledSpec c2 = *sys2.coupled;
    auto family2 = [&](double eps) {
        return std::make_pair(coupled_manifold(c2, 0.0).h, coupled_manifold(c2, eps).h);
    };
    rep = hausdorff_scaling(family2, {0.2, 0.1, 0.05, 0.025}, 1.0);
    CHECK(std::abs(rep.constant - 1.0) < 0.01);
}

TEST_CASE("hausdorff scaling: separable family f=z^2, g=w^2") {
    // C_eps is the graph z = eps w over the window; C_0 is z = 0
    auto family = [](double eps) {
        std::function<cplx(cplx)> h0 = [](cplx) { return cplx(0.0); };
        std::function<cplx(cplx)> he = [eps](cplx w) { return eps * w; };
        return std::make_pair(h0, he);
    };
    ScalingReport rep = hausdorff_scaling(family, {0.2, 0.1, 0.05, 0.025}, 1.0);
    CHECK(std::abs(rep.slope - 1.0) < 0.05);
}

TEST_CASE("hausdorff scaling guards") {
    auto family = [](double eps) {
        std::function<cplx(cplx)> h = [eps](cplx w) { return eps * w; };
        return std::make_pair(h, h);
    };
    CHECK_THROWS_AS(hausdorff_scaling(family, {0.1, 0.05, 0.025}, 1.0), ValidationError);
    CHECK_THROWS_AS(hausdorff_scaling(family, {0.1, 0.09, 0.08, 0.07}, 1.0), ValidationError);
}

TEST_CASE("attraction: measured decay matches the predicted exponent") {
    for (double eps : {0.1, 0.05}) {
        SystemSpec sys = example_coupled(eps);
        GraphManifold m = coupled_manifold(*sys.coupled, eps);
        cplx w0 = std::polar(1.0, M_PI / 4);
        cplx z0 = m.h(w0) + 1.0;
        AttractionReport rep = attraction_report(*sys.coupled, eps, z0, w0, 0.2);
        CHECK(rep.retained > 50);
        CHECK(rep.max_rel_log_deviation < 0.02);
        CHECK(rep.eta > 0.0);
        for (const auto& s : rep.samples)
            if (s.in_region) CHECK(s.margin >= rep.eta);
    }
}

TEST_CASE("attraction: on-manifold start is flagged degenerate") {
    double eps = 0.1;
    SystemSpec sys = example_coupled(eps);
    GraphManifold m = coupled_manifold(*sys.coupled, eps);
    cplx w0 = std::polar(1.0, M_PI / 4);
    AttractionReport rep = attraction_report(*sys.coupled, eps, m.h(w0), w0, 0.2);
    CHECK(rep.degenerate_on_manifold);
    CHECK(rep.max_abs_v < 1e-10);
}

TEST_CASE("attraction: real alpha is rejected") {
    SystemSpec sys = build_system(
        R"js({"family":"SF3","f":"z+w","g":"1","params":{"G":"w"},"eps":[0.1]})js");
    CHECK_THROWS_AS(attraction_report(*sys.coupled, 0.1, cplx(1, 0), cplx(0.5, 0), 0.2),
                    AlphaNotPureImaginary);
}

TEST_CASE("normal hyperbolicity margins") {
    SystemSpec s = build_system(R"js({"family":"general","f":"z+w","g":"w^2","eps":[0.1]})js");
    std::vector<cplx> ws = {cplx(0.5, 0.1), cplx(-0.2, 0.4), cplx(0.1, -0.6)};
    HyperbolicityReport rep = normal_hyperbolicity_check(s, ws);
    CHECK(rep.min_margin == doctest::Approx(1.0));
    CHECK(rep.sign_pattern == "+");
    CHECK(rep.hyperbolic);

    s = example_coupled();
    rep = normal_hyperbolicity_check(s, ws);
    CHECK(rep.min_margin < 1e-12);
    CHECK(!rep.hyperbolic);

    s = build_system(R"js({"family":"general","f":"-z+w^2","g":"w","eps":[0.1]})js");
    rep = normal_hyperbolicity_check(s, ws);
    CHECK(rep.min_margin == doctest::Approx(1.0));
    CHECK(rep.sign_pattern == "-");
}

TEST_CASE("persistence: SF2 center/focus/node with hypothesis satisfied") {
    std::vector<double> grid = {0.1, 0.05, 0.02};
    // both full complex: focus persists
    SF2Spec foc(cplx(1, 1), cplx(2, 3), Series2(8), Series2(8));
    PersistenceReport rep = persistence_report(foc, grid);
    REQUIRE(rep.hypothesis_H.has_value());
    CHECK(*rep.hypothesis_H);
    REQUIRE(rep.persistent.has_value());
    CHECK(*rep.persistent);
    CHECK(rep.reduced.kind == PointKind::FocusRepelling);

    // both pure imaginary: center persists
    SF2Spec cen(cplx(0, 2), cplx(0, -1), Series2(8), Series2(8));
    rep = persistence_report(cen, grid);
    CHECK(*rep.hypothesis_H);
    CHECK(*rep.persistent);
    CHECK(rep.reduced.kind == PointKind::Center);

    // both real: node persists
    SF2Spec nod(cplx(-2, 0), cplx(1.5, 0), Series2(8), Series2(8));
    rep = persistence_report(nod, grid);
    CHECK(*rep.hypothesis_H);
    CHECK(*rep.persistent);
    CHECK(rep.reduced.kind == PointKind::NodeRepelling);
}

TEST_CASE("persistence: hypothesis violation suppresses the claim") {
    SF2Spec s(cplx(0, 1), cplx(1, 0), Series2(8), Series2(8));
    PersistenceReport rep = persistence_report(s, {0.1, 0.05});
    REQUIRE(rep.hypothesis_H.has_value());
    CHECK(!*rep.hypothesis_H);
    CHECK(!rep.persistent.has_value());
    CHECK(!rep.note.empty());
}

TEST_CASE("persistence: nonlinear tails do not change the SF2 verdict") {
    Series2 ft(8), gt(8);
    ft.set(2, 0, cplx(0.3, -0.2));
    ft.set(1, 1, cplx(0.1, 0.1));
    gt.set(0, 2, cplx(-0.4, 0.25));
    SF2Spec s(cplx(0, 2), cplx(0, -3), ft, gt);
    PersistenceReport rep = persistence_report(s, {0.1, 0.05, 0.02});
    CHECK(rep.reduced.kind == PointKind::Center);
    for (const auto& e : rep.entries) CHECK(e.perturbed.kind == PointKind::Center);
    CHECK(*rep.persistent);
}

TEST_CASE("persistence: linear-linear center case") {
    // a=1, d=i, b=c=0: reduced rate i is a center; dynamics on C_eps is i w
    LinearLinearSpec m{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(0, 1)};
    PersistenceReport rep = persistence_report(m, {0.1, 0.05});
    CHECK(rep.reduced.kind == PointKind::Center);
    for (const auto& e : rep.entries) CHECK(e.perturbed.kind == PointKind::Center);
    CHECK(*rep.persistent);
    REQUIRE(rep.global_verdict.has_value());
    CHECK(*rep.global_verdict == "center persists");
    CHECK(!rep.ju.has_value());  // j counts undefined on the imaginary axis
    REQUIRE(rep.ku.has_value());
    CHECK(*rep.ku == 2);
    CHECK(*rep.ks == 0);
}

TEST_CASE("persistence: the three sign regimes of the linear-linear table") {
    auto verdict = [](cplx a, cplx d) {
        LinearLinearSpec m{a, cplx(0.5, 0), cplx(0, 0), d};
        PersistenceReport rep = persistence_report(m, {0.1});
        REQUIRE(rep.global_verdict.has_value());
        return *rep.global_verdict;
    };
    CHECK(verdict(cplx(1, 0), cplx(2, 0)) == "global repelling point");
    CHECK(verdict(cplx(-1, 0), cplx(-2, 0)) == "global attracting point");
    CHECK(verdict(cplx(1, 0), cplx(-2, 0)) == "saddle point");
    CHECK(verdict(cplx(-1, 0), cplx(2, 0)) == "saddle point");

    // dimension counts add up
    LinearLinearSpec m{cplx(1, 0), cplx(0.5, 0), cplx(0, 0), cplx(2, 0)};
    PersistenceReport rep = persistence_report(m, {0.1});
    CHECK(*rep.ju + *rep.js == 2);
    CHECK(*rep.ku + *rep.ks == 2);
}

TEST_CASE("persistence: linear-pole keeps the pole order with coefficient eps") {
    for (int n : {1, 2, 3}) {
        SF4Spec s{cplx(0.8, 0.1), cplx(1.2, -0.3), NormalFormKind::pole(n)};
        std::vector<double> grid = {0.1, 0.05};
        PersistenceReport rep = persistence_report(s, grid, 24);
        CHECK(rep.reduced.kind == PointKind::PoleOfOrder);
        CHECK(rep.reduced.order == n);
        REQUIRE(rep.entries.size() == grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& e = rep.entries[i];
            CHECK(e.perturbed.kind == PointKind::PoleOfOrder);
            CHECK(e.perturbed.order == n);
            CHECK(std::abs(e.perturbed.witness - cplx(grid[i], 0)) < 1e-10);
        }
        CHECK(*rep.persistent);
    }
}

TEST_CASE("persistence: divergent SF4 families are unsupported") {
    SF4Spec s{cplx(1, 0), cplx(1, 0), NormalFormKind::power(2)};
    CHECK_THROWS_AS(persistence_report(s, {0.1}, 16), UnsupportedFamily);
}

TEST_CASE("persistence: uncoupled systems inherit the reduced classification") {
    SystemSpec sys = build_system(R"js({"family":"uncoupled","f":"z^2","g":"i*w"})js");
    PersistenceReport rep = persistence_report_uncoupled(sys, cplx(0, 0), {0.1, 0.05});
    CHECK(rep.reduced.kind == PointKind::Center);
    CHECK(*rep.persistent);

    SystemSpec pole = build_system(R"js({"family":"uncoupled","f":"z^2","g":"1/w^2"})js");
    rep = persistence_report_uncoupled(pole, cplx(0, 0), {0.1});
    CHECK(rep.reduced.kind == PointKind::PoleOfOrder);
    CHECK(rep.reduced.order == 2);
}

TEST_CASE("eigen types") {
    CHECK(eigen_type(cplx(0, 2)) == EigenType::PureImaginary);
    CHECK(eigen_type(cplx(-3, 0)) == EigenType::Real);
    CHECK(eigen_type(cplx(1, -1)) == EigenType::FullComplex);
    CHECK(eigen_type(cplx(0, 0)) == EigenType::Zero);
}
