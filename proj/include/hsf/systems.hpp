#ifndef HSF_SYSTEMS_HPP
#define HSF_SYSTEMS_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hsf/expr.hpp"
#include "hsf/series.hpp"

namespace hsf {

// Fast-field normal forms of the slow family g: w' = 1, (a+ib)w, w^n, w^-n,
// gamma w^n / (1 + w^(n-1)).
enum class NormalForm { ConstantOne, Linear, Power, Pole, Rational };

struct NormalFormKind {
    NormalForm kind = NormalForm::ConstantOne;
    int n = 0;        // power/pole/rational order
    cplx rate{};      // linear a+ib
    cplx gamma{};     // rational scale

    static NormalFormKind constant_one();
    static NormalFormKind linear(cplx rate);
    static NormalFormKind power(int n);    // n >= 2
    static NormalFormKind pole(int n);     // n >= 1
    static NormalFormKind rational(cplx gamma, int n);  // n >= 2

    cplx eval(cplx w) const;   // g(w)
    std::string label() const;
};

enum class Family { General, SF2Series, SF3Coupled, SF4LinearFast, Uncoupled };

std::string family_label(Family f);

// Slow-fast normal form eps z' = alpha z + ftilde, w' = beta w + gtilde with
// ftilde, gtilde = O2 (zero constant and linear parts, enforced).
struct SF2Spec {
    cplx alpha, beta;
    Series2 ftilde, gtilde;

    SF2Spec(cplx a, cplx b, Series2 ft, Series2 gt);
};

// eps z' = alpha z + beta G(w), w' = g(w) with G' = 1/g. G is either a
// parsed expression or a catalog primitive (see manifolds).
struct CoupledSpec {
    cplx alpha, beta;
    ExprPtr g;                              // fast field of w
    std::function<cplx(cplx)> big_g;        // primitive G
    std::function<cplx(cplx)> big_g_deriv;  // G', kept for validation/reports
    std::string g_label;
};

// Full 2x2 linear system eps z' = a z + b w, w' = c z + d w.
struct LinearLinearSpec {
    cplx a, b, c, d;
    cplx reduced_rate() const { return (a * d - b * c) / a; }  // G'(0) on C0
};

// SF4: eps z' = alpha z + beta w, w' = normal form.
struct SF4Spec {
    cplx alpha, beta;
    NormalFormKind g;
};

struct DomainSpec {
    double window_radius = 1.0;
    std::optional<double> excluded_ray_angle;  // log branch cut, radians
};

struct SystemSpec {
    Family family = Family::General;
    ExprPtr f, g;
    std::vector<double> eps;
    DomainSpec domain;
    // family payloads (populated when the family requires one)
    std::optional<SF2Spec> sf2;
    std::optional<CoupledSpec> coupled;
    std::optional<SF4Spec> sf4;
    std::optional<LinearLinearSpec> linear2;
    unsigned long long seed = 12345;
};

// Parse + validate the JSON system spec (schema documented in the README).
// Throws SchemaError / FamilyInvariantViolated.
SystemSpec build_system(const std::string& json_text);
SystemSpec build_system_file(const std::string& path);

struct CriticalPoint {
    cplx z, w;
    double margin;  // Re df/dz at the root
};

struct CriticalManifoldSample {
    std::vector<CriticalPoint> points;
    char graph_direction = 'w';  // 'w': z = h(w) graphs; 'z': w = lambda(z)
    bool multiple_roots = false; // different seeds reached distinct roots
    double min_abs_margin() const;
};

// Newton-solve f(z, w) = 0 for each w sample. Seeds default to 0 plus eight
// points on the unit circle; the first converged root is kept and multi-root
// situations are flagged rather than resolved.
CriticalManifoldSample critical_manifold_solve(const SystemSpec& sys,
                                               const std::vector<cplx>& w_samples,
                                               std::optional<cplx> seed = std::nullopt);

// Evaluator of the real 4-dimensional field (Re f/eps, Im f/eps, Re g, Im g)
// at (x1, y1, x2, y2) = (Re z, Im z, Re w, Im w).
std::function<std::array<double, 4>(const std::array<double, 4>&, double)>
real_embedding(const SystemSpec& sys);

// Exact eps-dependent diagonalization of the linear system: picks the slow
// eigendirection z = lambda1 * w and returns the system in eigencoordinates
// as an SF2 with vanishing tails.
struct SF2FromLinear {
    SF2Spec sf2;
    cplx lambda1;    // slow eigendirection z = lambda1 w
    cplx mu_slow;    // slow eigenvalue of [[a/eps, b/eps], [c, d]]
    cplx alpha_hat;  // fast linear coefficient in eigencoordinates
};
SF2FromLinear sf2_from_linear(const LinearLinearSpec& m, double eps, int order);

}  // namespace hsf

#endif
