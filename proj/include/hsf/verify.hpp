#ifndef HSF_VERIFY_HPP
#define HSF_VERIFY_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsf/dynamics.hpp"
#include "hsf/manifolds.hpp"
#include "hsf/systems.hpp"

namespace hsf {

struct InvarianceResult {
    double max_residual = 0.0;  // normalized by max(1, |grad H|) for level sets
    double max_raw = 0.0;       // plain max |H| (or |z - h(w)|)
    std::size_t worst_index = 0;
};

// Residual of a trajectory against a manifold representation. Throws
// DomainExit when a sample leaves the declared domain.
InvarianceResult invariance_residual(const ImplicitManifold& M, const Trajectory& traj);
InvarianceResult invariance_residual(const GraphManifold& M, const Trajectory& traj);

struct ScalingReport {
    std::vector<double> eps_grid;
    std::vector<double> distances;  // Hausdorff distance per eps
    double slope = 0.0;             // fit of log d = slope log eps + log constant
    double constant = 0.0;
    double r_squared = 0.0;
    double window_radius = 0.0;
    int points_per_set = 0;
};

// Symmetric Hausdorff distance between two graphs z = h(w) sampled on a
// polar grid over |w| <= window_radius, fitted against eps in log-log.
// The grid must have at least 4 eps values spanning a decade.
ScalingReport hausdorff_scaling(
    const std::function<std::pair<std::function<cplx(cplx)>, std::function<cplx(cplx)>>(double)>&
        family,
    const std::vector<double>& eps_grid, double window_radius, int rings = 10, int angles = 24);

struct AttractionSample {
    double s;        // arc parameter along the rotated time direction
    double abs_v;    // |z - h_eps(w)|
    double margin;   // alpha2 Im(G(w) - G(w0))
    bool in_region;  // margin >= eta
    double measured_log_v;
    double predicted_log_v;
};

struct AttractionReport {
    double eps = 0.0;
    double eta = 0.0;  // attraction margin actually used
    double alpha2 = 0.0;
    double time_rotation = 0.0;
    std::vector<AttractionSample> samples;
    int retained = 0;  // samples inside the region
    double max_rel_log_deviation = 0.0;  // over retained samples
    double max_abs_v = 0.0;
    bool degenerate_on_manifold = false;  // started with v0 = 0
    Termination termination = Termination::Completed;
};

// Verifies |v(w)| = |v0| exp(-alpha2 Im(G(w) - G(w0)) / eps) along the flow
// continued in a rotated time direction (real time keeps Im G constant, so
// the contraction only shows along paths that ascend Im G). Requires alpha
// pure imaginary. eta <= 0 picks half the minimal later-sample margin.
AttractionReport attraction_report(const CoupledSpec& c, double eps, cplx z0, cplx w0,
                                   double span, double eta = 0.0,
                                   double time_rotation = M_PI / 2.0,
                                   const IntegrationControls& controls = {});

struct HyperbolicityReport {
    double min_margin = 0.0;        // min |Re df/dz| over the samples
    std::string sign_pattern;       // "+", "-", "mixed"
    bool hyperbolic = false;
    CriticalManifoldSample sample;
};

HyperbolicityReport normal_hyperbolicity_check(const SystemSpec& sys,
                                               const std::vector<cplx>& w_samples);

struct PersistenceEntry {
    double eps;
    ClassificationResult perturbed;
    bool same_kind = false;
};

struct PersistenceReport {
    std::string family;
    ClassificationResult reduced;
    std::vector<PersistenceEntry> entries;
    std::optional<bool> hypothesis_H;   // eigenvalue-type agreement, SF2 path
    std::optional<bool> persistent;     // unset when no claim is made
    std::optional<int> ju, js, ku, ks;  // linear-linear dimension counts
    std::optional<std::string> global_verdict;
    std::string note;
};

// Eigenvalue type used by hypothesis (H).
enum class EigenType { PureImaginary, Real, FullComplex, Zero };
EigenType eigen_type(cplx v, double tol = 1e-12);

PersistenceReport persistence_report(const SF2Spec& s, const std::vector<double>& eps_grid,
                                     int N = 12);
PersistenceReport persistence_report(const LinearLinearSpec& m,
                                     const std::vector<double>& eps_grid);
// SF4 families: linear goes through the 2x2 path, pole through the
// on-manifold Laurent quotient; power/rational have no holomorphic graph.
PersistenceReport persistence_report(const SF4Spec& s, const std::vector<double>& eps_grid,
                                     int N = 24);
// Uncoupled systems: the on-manifold slow field coincides with g itself.
PersistenceReport persistence_report_uncoupled(const SystemSpec& sys, cplx w0,
                                               const std::vector<double>& eps_grid);

}  // namespace hsf

#endif
