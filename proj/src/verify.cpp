#include "hsf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsf/briot_bouquet.hpp"
#include "hsf/errors.hpp"

namespace hsf {

// ----------------------------------------------------------------------
// Invariance residuals
// ----------------------------------------------------------------------

InvarianceResult invariance_residual(const ImplicitManifold& M, const Trajectory& traj) {
    InvarianceResult out;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        if (!M.domain_z.contains(s.z) || !M.domain_w.contains(s.w)) throw DomainExit(i);
        double raw = std::abs(M.H(s.z, s.w));
        auto grad = M.gradient(s.z, s.w);
        double gn = std::hypot(std::abs(grad.first), std::abs(grad.second));
        double norm = raw / std::max(1.0, gn);
        if (raw > out.max_raw) out.max_raw = raw;
        if (norm > out.max_residual) {
            out.max_residual = norm;
            out.worst_index = i;
        }
    }
    return out;
}

InvarianceResult invariance_residual(const GraphManifold& M, const Trajectory& traj) {
    InvarianceResult out;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        cplx base = M.direction == GraphDirection::ZofW ? s.w : s.z;
        cplx value = M.direction == GraphDirection::ZofW ? s.z : s.w;
        if (!M.domain.contains(base)) throw DomainExit(i);
        double raw = std::abs(value - M.h(base));
        if (raw > out.max_residual) {
            out.max_residual = raw;
            out.max_raw = raw;
            out.worst_index = i;
        }
    }
    out.max_raw = out.max_residual;
    return out;
}

// ----------------------------------------------------------------------
// Hausdorff scaling
// ----------------------------------------------------------------------
namespace {

double directed_hausdorff(const std::vector<std::pair<cplx, cplx>>& A,
                          const std::vector<std::pair<cplx, cplx>>& B) {
    double sup = 0.0;
    for (const auto& p : A) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : B) {
            double dz = std::abs(p.first - q.first);
            double dw = std::abs(p.second - q.second);
            double d2 = dz * dz + dw * dw;
            if (d2 < best) best = d2;
        }
        sup = std::max(sup, best);
    }
    return std::sqrt(sup);
}

}  // namespace

ScalingReport hausdorff_scaling(
    const std::function<std::pair<std::function<cplx(cplx)>, std::function<cplx(cplx)>>(double)>&
        family,
    const std::vector<double>& eps_grid, double window_radius, int rings, int angles) {
    if (eps_grid.size() < 4)
        throw ValidationError("eps grid must contain at least 4 values");
    double lo = *std::min_element(eps_grid.begin(), eps_grid.end());
    double hi = *std::max_element(eps_grid.begin(), eps_grid.end());
    // three octaves minimum, e.g. {0.2, 0.1, 0.05, 0.025}
    if (!(lo > 0.0) || hi / lo < 7.5)
        throw ValidationError("eps grid must span close to a decade of positive values");

    // Polar grid including the center and the boundary circle.
    std::vector<cplx> ws;
    ws.push_back(0.0);
    for (int i = 1; i <= rings; ++i)
        for (int k = 0; k < angles; ++k)
            ws.push_back(std::polar(window_radius * i / rings, 2.0 * M_PI * k / angles));

    ScalingReport rep;
    rep.eps_grid = eps_grid;
    rep.window_radius = window_radius;

    for (double eps : eps_grid) {
        auto [h0, heps] = family(eps);
        std::vector<std::pair<cplx, cplx>> A, B;
        std::size_t failures = 0;
        for (cplx w : ws) {
            try {
                A.push_back({h0(w), w});
                B.push_back({heps(w), w});
            } catch (const EvalPole&) {
                ++failures;
            }
        }
        if (failures * 10 > ws.size())
            throw WindowMismatch("manifold graphs are not sampleable over the window");
        double d = std::max(directed_hausdorff(A, B), directed_hausdorff(B, A));
        rep.distances.push_back(d);
    }
    rep.points_per_set = static_cast<int>(ws.size());

    // least squares on (log eps, log d)
    std::size_t n = eps_grid.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(eps_grid[i]);
        double y = std::log(std::max(rep.distances[i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    double dn = static_cast<double>(n);
    double denom = dn * sxx - sx * sx;
    rep.slope = (dn * sxy - sx * sy) / denom;
    double intercept = (sy - rep.slope * sx) / dn;
    rep.constant = std::exp(intercept);
    double ss_tot = syy - sy * sy / dn;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::log(eps_grid[i]);
        double y = std::log(std::max(rep.distances[i], 1e-300));
        double f = rep.slope * x + intercept;
        ss_res += (y - f) * (y - f);
    }
    rep.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return rep;
}

// ----------------------------------------------------------------------
// Exponential attraction
// ----------------------------------------------------------------------

AttractionReport attraction_report(const CoupledSpec& c, double eps, cplx z0, cplx w0,
                                   double span, double eta, double time_rotation,
                                   const IntegrationControls& controls) {
    if (std::abs(c.alpha.real()) > 1e-12 * std::max(1.0, std::abs(c.alpha)))
        throw AlphaNotPureImaginary("attraction estimate requires alpha = i alpha2");
    double alpha2 = c.alpha.imag();
    if (alpha2 == 0.0) throw AlphaNotPureImaginary("alpha2 must be nonzero");

    GraphManifold man = coupled_manifold(c, eps);

    cplx alpha = c.alpha, beta = c.beta;
    ExprPtr g = c.g;
    auto big_g = c.big_g;
    std::function<std::pair<cplx, cplx>(cplx, cplx)> rhs = [alpha, beta, big_g, g, eps](cplx z,
                                                                                        cplx w) {
        return std::make_pair((alpha * z + beta * big_g(w)) / eps, eval_expr(*g, z, w));
    };

    IntegrationControls ctl = controls;
    ctl.time_rotation = time_rotation;
    if (ctl.sample_times.empty()) {
        for (int i = 1; i <= 200; ++i) ctl.sample_times.push_back(span * i / 200.0);
    }
    Trajectory traj = integrate_pair(rhs, z0, w0, span, ctl);

    AttractionReport rep;
    rep.eps = eps;
    rep.alpha2 = alpha2;
    rep.time_rotation = time_rotation;
    rep.termination = traj.termination;

    cplx G0 = big_g(w0);
    double v0 = std::abs(z0 - man.h(w0));
    rep.degenerate_on_manifold = v0 < 1e-14;
    double log_v0 = rep.degenerate_on_manifold ? 0.0 : std::log(v0);

    std::vector<AttractionSample> all;
    for (const auto& s : traj.samples) {
        AttractionSample a;
        a.s = s.tau;
        a.abs_v = std::abs(s.z - man.h(s.w));
        a.margin = alpha2 * (big_g(s.w) - G0).imag();
        a.measured_log_v = a.abs_v > 0.0 ? std::log(a.abs_v) : -745.0;
        a.predicted_log_v = log_v0 - a.margin / eps;
        a.in_region = false;
        all.push_back(a);
        rep.max_abs_v = std::max(rep.max_abs_v, a.abs_v);
    }

    if (eta <= 0.0) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& a : all)
            if (a.s >= span / 5.0 && a.margin > 0.0) m = std::min(m, a.margin);
        if (!std::isfinite(m))
            throw RegionExit("trajectory never enters the attraction region");
        eta = 0.5 * m;
    }
    rep.eta = eta;

    bool entered = false;
    for (auto& a : all) {
        if (a.margin >= eta) {
            entered = true;
            a.in_region = true;
            ++rep.retained;
            if (!rep.degenerate_on_manifold) {
                double predicted_decay = a.margin / eps;
                double measured_decay = log_v0 - a.measured_log_v;
                double dev = std::abs(measured_decay - predicted_decay) / predicted_decay;
                rep.max_rel_log_deviation = std::max(rep.max_rel_log_deviation, dev);
            }
        } else if (entered) {
            rep.termination = Termination::RegionExit;
            break;
        }
    }
    rep.samples = std::move(all);
    return rep;
}

// ----------------------------------------------------------------------
// Normal hyperbolicity
// ----------------------------------------------------------------------

HyperbolicityReport normal_hyperbolicity_check(const SystemSpec& sys,
                                               const std::vector<cplx>& w_samples) {
    HyperbolicityReport rep;
    rep.sample = critical_manifold_solve(sys, w_samples);
    double minm = std::numeric_limits<double>::infinity();
    bool pos = false, neg = false;
    for (const auto& p : rep.sample.points) {
        minm = std::min(minm, std::abs(p.margin));
        if (p.margin > 1e-12) pos = true;
        if (p.margin < -1e-12) neg = true;
    }
    rep.min_margin = rep.sample.points.empty() ? 0.0 : minm;
    rep.hyperbolic = rep.min_margin > 1e-9;
    rep.sign_pattern = (pos && neg) ? "mixed" : (neg ? "-" : (pos ? "+" : "0"));
    return rep;
}

// ----------------------------------------------------------------------
// Persistence
// ----------------------------------------------------------------------

EigenType eigen_type(cplx v, double tol) {
    double m = std::abs(v);
    if (m == 0.0) return EigenType::Zero;
    bool re0 = std::abs(v.real()) <= tol * m;
    bool im0 = std::abs(v.imag()) <= tol * m;
    if (re0 && !im0) return EigenType::PureImaginary;
    if (im0 && !re0) return EigenType::Real;
    return EigenType::FullComplex;
}

namespace {

ClassificationResult classify_linear(cplx lambda, double tol = 1e-9) {
    Series1 s('w', 2);
    s.set(1, lambda);
    return classify_point(s, tol);
}

}  // namespace

PersistenceReport persistence_report(const SF2Spec& s, const std::vector<double>& eps_grid,
                                     int N) {
    PersistenceReport rep;
    rep.family = "SF2-series";
    Series1 G = reduced_vector_field(s, N);
    rep.reduced = classify_point(G);
    bool H = eigen_type(s.alpha) == eigen_type(s.beta) && eigen_type(s.alpha) != EigenType::Zero;
    rep.hypothesis_H = H;
    bool all_same = true;
    for (double eps : eps_grid) {
        // Gamma_eps'(0) = alpha/eps exactly; the nonlinear tail never moves
        // the linear type.
        PersistenceEntry e;
        e.eps = eps;
        e.perturbed = classify_linear(s.alpha / eps);
        e.same_kind = e.perturbed.same_base_kind(rep.reduced);
        all_same = all_same && e.same_kind;
        rep.entries.push_back(e);
    }
    if (H) {
        rep.persistent = all_same;
    } else {
        rep.note = "eigenvalue types of alpha and beta differ; no persistence claim";
    }
    return rep;
}

PersistenceReport persistence_report(const LinearLinearSpec& m,
                                     const std::vector<double>& eps_grid) {
    PersistenceReport rep;
    rep.family = "linear-linear";
    cplx rate = m.reduced_rate();
    double al = rate.real(), be = rate.imag();
    double rea = m.a.real();
    rep.reduced = classify_linear(rate);

    bool all_same = true;
    for (double eps : eps_grid) {
        FormalGraphResult fg = formal_graph_series(m, eps, 4);
        PersistenceEntry e;
        e.eps = eps;
        e.perturbed = classify_linear(m.c * fg.lambda1 + m.d);
        e.same_kind = e.perturbed.same_base_kind(rep.reduced);
        all_same = all_same && e.same_kind;
        rep.entries.push_back(e);
    }
    rep.persistent = all_same;

    double tol = 1e-12;
    if (std::abs(al) > tol) {
        rep.ju = al > 0 ? 2 : 0;
        rep.js = al > 0 ? 0 : 2;
    }
    if (std::abs(rea) > tol) {
        rep.ku = rea > 0 ? 2 : 0;
        rep.ks = rea > 0 ? 0 : 2;
    }
    if (std::abs(al) <= tol) {
        rep.global_verdict = "center persists";
    } else if (al > 0 && rea > 0) {
        rep.global_verdict = "global repelling point";
    } else if (al < 0 && rea < 0) {
        rep.global_verdict = "global attracting point";
    } else if (std::abs(rea) > tol) {
        rep.global_verdict = "saddle point";
    }
    return rep;
}

PersistenceReport persistence_report(const SF4Spec& s, const std::vector<double>& eps_grid,
                                     int N) {
    switch (s.g.kind) {
        case NormalForm::Linear:
            return persistence_report(LinearLinearSpec{s.alpha, s.beta, 0.0, s.g.rate}, eps_grid);
        case NormalForm::Pole: {
            PersistenceReport rep;
            rep.family = "linear-pole";
            int n = s.g.n;
            // reduced field 1/w^n as a Laurent quotient
            Series1 one('w', N), wn('w', N);
            one.set(0, 1.0);
            wn.set(n, 1.0);
            rep.reduced = classify_series_quotient(one, wn);
            bool all_same = true;
            for (double eps : eps_grid) {
                FormalGraphResult fg = formal_graph_series(s, eps, N);
                const Series1& h = fg.recurrence;
                Series1 num = s1_add(s1_scale(h, s.alpha), s1_monomial('w', 1, s.beta, h.order()));
                Series1 den = s1_derivative(h);
                PersistenceEntry e;
                e.eps = eps;
                e.perturbed = classify_series_quotient(num, den);
                e.same_kind = e.perturbed.same_base_kind(rep.reduced);
                all_same = all_same && e.same_kind;
                rep.entries.push_back(e);
            }
            rep.persistent = all_same;
            rep.note = "on-manifold field is the Laurent quotient (alpha h + beta w)/h'";
            return rep;
        }
        default:
            throw UnsupportedFamily(
                "no holomorphic graph family: " + s.g.label() +
                " (the formal series diverges; see the series/analyze reports)");
    }
}

PersistenceReport persistence_report_uncoupled(const SystemSpec& sys, cplx w0,
                                               const std::vector<double>& eps_grid) {
    if (!sys.g) throw SchemaError("uncoupled persistence requires a closed-form g");
    if (uses_var(*sys.g, 'z'))
        throw UnsupportedFamily("uncoupled persistence requires g = g(w)");
    PersistenceReport rep;
    rep.family = "uncoupled";
    rep.reduced = classify_point(sys.g, w0);
    // The on-manifold slow dynamics is w' = g(z, w) = g(w): the same field,
    // so the classification transfers verbatim for every eps.
    for (double eps : eps_grid) {
        PersistenceEntry e;
        e.eps = eps;
        e.perturbed = rep.reduced;
        e.same_kind = true;
        rep.entries.push_back(e);
    }
    rep.persistent = true;
    rep.note = "slow field on the invariant set equals g itself";
    return rep;
}

}  // namespace hsf
