#ifndef HSF_BRIOT_BOUQUET_HPP
#define HSF_BRIOT_BOUQUET_HPP

#include <optional>
#include <string>

#include "hsf/manifolds.hpp"
#include "hsf/series.hpp"
#include "hsf/systems.hpp"

namespace hsf {

// Singular equation z phi' = lambda phi + mu z + Q(z, phi) with Q = O2.
struct BBProblem {
    cplx lambda;
    cplx mu;
    Series2 Q;           // in (z, phi); zero constant and linear parts
    std::string source;  // which spec/eps produced it
};

struct BBSolution {
    Series1 phi;  // sum_{k>=1} d_k z^k, phi(0) = 0
    std::optional<int> overflow_at;  // first k where |d_k| exceeded 1e300
};

// Recursive coefficient matching: d_k = (k - lambda)^-1 [z^k](mu z + Q(z, phi_<k)).
// Rejects lambda within 1e-9 of {1..N} (Resonance). Coefficient overflow is
// reported, not fatal: divergent formal series are legitimate outputs.
BBSolution bb_solve(const BBProblem& p, int N);

enum class Provenance { BBPipeline, Recurrence, ClosedForm };

struct ManifoldSeries {
    GraphDirection direction = GraphDirection::WofZ;
    Series1 h;
    double eps = 0.0;
    double residual_norm = 0.0;         // defect of (alpha z + ft) h' = eps (beta h + gt)
    double transformed_residual = 0.0;  // defect of the z phi' equation
    Provenance provenance = Provenance::BBPipeline;
    bool normally_hyperbolic = false;   // Re(alpha) != 0; reported, not enforced
    std::optional<int> overflow_at;
    std::string source;
};

// Invariant-manifold series w = h_eps(z) with h(0) = h'(0) = 0 for an SF2
// system: substitute w = z phi, divide by alpha z, reduce to a Briot-Bouquet
// problem with lambda = eps beta / alpha - 1, and match coefficients.
ManifoldSeries fenichel_series(const SF2Spec& s, double eps, int N);

// Reduced field on the critical graph z = L(w): G(w) = beta w + gt(L(w), w).
Series1 reduced_vector_field(const SF2Spec& s, int N);

// Field along the invariant manifold: Gamma_eps(z) = (alpha/eps) z + ft(z, h)/eps.
Series1 slow_dynamics_on_manifold(const SF2Spec& s, double eps, int N);

// Max coefficient defect of (alpha z + ft(z,h)) h' - eps (beta h + gt(z,h))
// for degrees 1..N; the acceptance-level residual.
double sf2_invariance_residual(const SF2Spec& s, double eps, const Series1& h);

}  // namespace hsf

#endif
