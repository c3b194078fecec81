#ifndef HSF_MANIFOLDS_HPP
#define HSF_MANIFOLDS_HPP

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "hsf/expr.hpp"
#include "hsf/series.hpp"
#include "hsf/systems.hpp"

namespace hsf {

// Complex logarithm with the branch cut along the ray at angle theta_c
// (default pi, the principal branch).
cplx log_cut(cplx w, double ray_angle);

// Closed-form antiderivative G with G' = scale / g_kind:
//   constant-1 -> w            linear(eta) -> ln(w)/eta
//   power(m)   -> w^(1-m)/(1-m)   pole(m)  -> w^(m+1)/(m+1)
//   rational(gamma, m) -> (w^(1-m)/(1-m) + ln w)/gamma
struct Primitive {
    NormalFormKind kind;
    cplx scale{1.0, 0.0};
    double ray_angle;  // branch cut used by the log terms

    cplx eval(cplx w) const;
    cplx deriv(cplx w) const;  // scale / g_kind(w)
    bool has_log() const;
    bool excludes_origin() const;
    std::string label() const;
};

Primitive primitive_catalog(const NormalFormKind& kind, cplx scale = cplx(1.0, 0.0),
                            std::optional<double> ray_angle = std::nullopt);

struct DomainDescription {
    double disc_radius = std::numeric_limits<double>::infinity();
    std::optional<double> excluded_ray_angle;
    double excluded_ball_radius = 0.0;  // around the origin
    bool contains(cplx p) const;
};

// Level set H_eps(z, w) = 0 with a nonvanishing gradient along it.
struct ImplicitManifold {
    std::function<cplx(cplx, cplx)> H;
    std::function<std::pair<cplx, cplx>(cplx, cplx)> gradient;  // (dH/dz, dH/dw)
    DomainDescription domain_z, domain_w;
    std::string note;
};

enum class GraphDirection { ZofW, WofZ };

struct GraphManifold {
    GraphDirection direction = GraphDirection::ZofW;
    std::function<cplx(cplx)> h;
    std::optional<Series1> series;
    std::optional<ConvergenceVerdict> verdict;
    DomainDescription domain;
};

// H_eps = G(w) - eps F(z) for systems whose orbit equation separates as
// dw/dz = eps eta(z) kappa(w); F' = eta and G' = 1/kappa are validated on 20
// random domain points, as is the factorization of g/f itself.
ImplicitManifold separable_manifold(const SystemSpec& sys, const ExprPtr& eta,
                                    const ExprPtr& kappa, const Primitive& F,
                                    const Primitive& G, double eps);

// Exact closed-form graph z = -(beta/alpha^2)(alpha G(w) + eps).
GraphManifold coupled_manifold(const CoupledSpec& c, double eps);

enum class GraphFamily { LinearWn, LinearRational, LinearLinear, LinearPole };

std::string graph_family_label(GraphFamily f);

// Formal graph z = h_eps(w) for the explicit linear-fast families, computed
// by degree matching of alpha h + beta w = eps h' g(w) (the authoritative
// route), cross-checked against the printed product formulas.
struct FormalGraphResult {
    GraphFamily family = GraphFamily::LinearWn;
    GraphManifold manifold;
    Series1 recurrence;                      // authoritative coefficients
    std::optional<Series1> product_formula;  // printed closed form, when any
    bool product_mismatch = false;
    double max_product_deviation = 0.0;
    cplx lambda1{};  // linear-linear: the single graph coefficient
    double eps = 0.0;
};

FormalGraphResult formal_graph_series(const SF4Spec& s, double eps, int N);
FormalGraphResult formal_graph_series(const LinearLinearSpec& m, double eps, int N);

}  // namespace hsf

#endif
