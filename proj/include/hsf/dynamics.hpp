#ifndef HSF_DYNAMICS_HPP
#define HSF_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsf/expr.hpp"
#include "hsf/series.hpp"
#include "hsf/systems.hpp"

namespace hsf {

enum class Timescale { Slow, Fast };

enum class Termination { Completed, StepUnderflow, MaxSteps, EvalPoleHit, RegionExit };

struct TrajectorySample {
    double tau;  // slow time (arc length along the ray when time is rotated)
    cplx z, w;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    double min_step = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Timescale timescale = Timescale::Slow;
    double eps = 1.0;
    double time_rotation = 0.0;
    StepStats stats;
    Termination termination = Termination::Completed;
};

struct IntegrationControls {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  // 0: pick automatically
    long max_steps = 10'000'000;
    double fast_time_threshold = 1e-2;  // integrate in fast time below this eps
    bool force_fast = false;
    bool force_slow = false;
    // Integrate along tau = s e^{i theta}: the holomorphic flow continued in
    // a rotated time direction. Samples are indexed by the real arc s.
    double time_rotation = 0.0;
    std::vector<double> sample_times;  // exact output times; empty = each step
};

// Adaptive Dormand-Prince 5(4) on the real embedding of the full system.
// Throws on failures at the initial point; mid-run failures terminate the
// trajectory with the corresponding reason.
Trajectory integrate_full(const SystemSpec& sys, double eps, cplx z0, cplx w0, double t_end,
                          const IntegrationControls& controls = {});

// Two-complex-dimensional flow given directly as (z', w') evaluators in
// slow time; used by verification drivers that are not backed by an Expr.
Trajectory integrate_pair(const std::function<std::pair<cplx, cplx>(cplx, cplx)>& rhs, cplx z0,
                          cplx w0, double t_end, const IntegrationControls& controls = {});

// One-complex-dimensional flows.
Trajectory integrate_scalar(const std::function<cplx(cplx)>& field, cplx y0, double t_end,
                            const IntegrationControls& controls = {});

// Reduced problem w' = G(w); pass a series field or any evaluator.
Trajectory integrate_reduced(const std::function<cplx(cplx)>& G, cplx w0, double t_end,
                             const IntegrationControls& controls = {});
Trajectory integrate_reduced(const Series1& G, cplx w0, double t_end,
                             const IntegrationControls& controls = {});

// Layer problem z' = f(z, w_frozen) in fast time.
Trajectory layer_flow(const SystemSpec& sys, cplx w_frozen, cplx z0, double t_end,
                      const IntegrationControls& controls = {});

enum class PointKind {
    RegularPoint,
    Center,
    FocusAttracting,
    FocusRepelling,
    NodeAttracting,
    NodeRepelling,
    ZeroOfOrder,
    PoleOfOrder
};

struct ClassificationResult {
    PointKind kind = PointKind::RegularPoint;
    int order = 0;     // zero/pole order
    cplx witness{};    // derivative at a simple zero, or the leading coefficient
    bool same_base_kind(const ClassificationResult& other) const;
    std::string label() const;
};

// Local type of a one-variable holomorphic/meromorphic field at a point.
// Simple zeros classify by lambda = field'(w0) with a relative tolerance on
// the vanishing of Re/Im; both below tolerance is an explicit error, never
// silently rounded.
ClassificationResult classify_point(const ExprPtr& field, cplx w0, double tol = 1e-9);
// Series centered at the expansion point (coefficient k is the k-th
// derivative over k!).
ClassificationResult classify_point(const Series1& field, double tol = 1e-9);
// Meromorphic quotient num/den of two series centered at the same point;
// supports pole classification through the valuation difference.
ClassificationResult classify_series_quotient(const Series1& num, const Series1& den,
                                              double tol = 1e-9);

}  // namespace hsf

#endif
