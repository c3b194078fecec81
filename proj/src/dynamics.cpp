#include "hsf/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hsf/errors.hpp"

namespace hsf {

// ----------------------------------------------------------------------
// Dormand-Prince 5(4)
// ----------------------------------------------------------------------
namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t D>
using CState = std::array<cplx, D>;

template <std::size_t D>
CState<D> axpy(const CState<D>& y, double h, std::initializer_list<std::pair<double, const CState<D>*>> ks) {
    CState<D> r = y;
    for (const auto& [c, k] : ks)
        for (std::size_t i = 0; i < D; ++i) r[i] += h * c * (*k)[i];
    return r;
}

template <std::size_t D>
bool finite(const CState<D>& y) {
    for (const cplx& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

template <std::size_t D>
struct DriverResult {
    std::vector<std::pair<double, CState<D>>> samples;
    StepStats stats;
    Termination termination = Termination::Completed;
};

// Adaptive driver over a real parameter t in [0, t_end]. The first RHS
// evaluation happens before any stepping, so singular initial data throws
// out of here; later failures end the run with a recorded reason.
template <std::size_t D>
DriverResult<D> dopri5(const std::function<CState<D>(const CState<D>&)>& f, CState<D> y0,
                       double t_end, const IntegrationControls& c,
                       const std::vector<double>& sample_times) {
    DriverResult<D> out;
    double t = 0.0;
    CState<D> y = y0;
    CState<D> k1 = f(y);  // throws EvalPole for singular initial conditions

    out.samples.push_back({0.0, y});
    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= 0.0) ++next_sample;

    auto err_norm = [&](const CState<D>& a, const CState<D>& b, const CState<D>& err) {
        double s = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            double sc_re = c.atol + c.rtol * std::max(std::abs(a[i].real()), std::abs(b[i].real()));
            double sc_im = c.atol + c.rtol * std::max(std::abs(a[i].imag()), std::abs(b[i].imag()));
            double er = err[i].real() / sc_re, ei = err[i].imag() / sc_im;
            s += er * er + ei * ei;
        }
        return std::sqrt(s / (2.0 * D));
    };

    double h = c.initial_step;
    if (h <= 0.0) {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            ny = std::max(ny, std::abs(y[i]));
            nf = std::max(nf, std::abs(k1[i]));
        }
        h = (nf > 1e-12) ? 0.01 * (1.0 + ny) / nf : t_end / 100.0;
        h = std::min(h, t_end / 10.0);
        if (h <= 0.0) h = t_end / 100.0;
    }
    const double h_min = 1e-14 * std::max(1.0, t_end);
    out.stats.min_step = h;

    while (t < t_end) {
        if (out.stats.accepted + out.stats.rejected >= c.max_steps) {
            out.termination = Termination::MaxSteps;
            return out;
        }
        double target = t_end;
        bool at_sample = false;
        if (next_sample < sample_times.size() && sample_times[next_sample] < t_end) {
            target = sample_times[next_sample];
            at_sample = true;
        }
        if (t + h >= target) {
            h = target - t;
            if (h <= 0.0) {  // degenerate repeated sample
                if (at_sample) {
                    out.samples.push_back({t, y});
                    ++next_sample;
                    continue;
                }
                break;
            }
        } else {
            at_sample = false;
        }

        CState<D> k2, k3, k4, k5, k6, k7, ynew, yerr;
        try {
            k2 = f(axpy<D>(y, h, {{a21, &k1}}));
            k3 = f(axpy<D>(y, h, {{a31, &k1}, {a32, &k2}}));
            k4 = f(axpy<D>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = f(axpy<D>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = f(axpy<D>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            ynew = axpy<D>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            k7 = f(ynew);
        } catch (const EvalPole&) {
            out.termination = Termination::EvalPoleHit;
            return out;
        }
        for (std::size_t i = 0; i < D; ++i)
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
        if (!finite(ynew)) {
            out.termination = Termination::EvalPoleHit;
            return out;
        }

        double err = err_norm(y, ynew, yerr);
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++out.stats.accepted;
            out.stats.min_step = std::min(out.stats.min_step, h);
            if (at_sample && t >= target) {
                out.samples.push_back({t, y});
                ++next_sample;
            } else if (sample_times.empty()) {
                out.samples.push_back({t, y});
            } else if (t >= t_end) {
                out.samples.push_back({t, y});
            }
        } else {
            ++out.stats.rejected;
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < h_min) {
            out.termination = Termination::StepUnderflow;
            return out;
        }
    }
    if (!sample_times.empty()) {
        // make sure the final time is present exactly once
        if (out.samples.empty() || out.samples.back().first < t_end)
            out.samples.push_back({t, y});
    }
    return out;
}

}  // namespace

Trajectory integrate_full(const SystemSpec& sys, double eps, cplx z0, cplx w0, double t_end,
                          const IntegrationControls& controls) {
    if (!(t_end > 0.0)) throw ValidationError("integration span must be positive");
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (!sys.f || !sys.g) throw SchemaError("system has no closed-form f, g to integrate");

    bool fast = controls.force_fast ||
                (!controls.force_slow && eps < controls.fast_time_threshold);
    cplx rot = std::polar(1.0, controls.time_rotation);
    ExprPtr f = sys.f, g = sys.g;

    std::function<CState<2>(const CState<2>&)> rhs;
    double scale_to_tau = 1.0, internal_end = t_end;
    std::vector<double> internal_samples = controls.sample_times;
    if (fast) {
        // z' = f, w' = eps g over t in [0, T/eps]
        rhs = [f, g, eps, rot](const CState<2>& y) {
            return CState<2>{rot * eval_expr(*f, y[0], y[1]),
                             rot * eps * eval_expr(*g, y[0], y[1])};
        };
        scale_to_tau = eps;
        internal_end = t_end / eps;
        for (double& s : internal_samples) s /= eps;
    } else {
        rhs = [f, g, eps, rot](const CState<2>& y) {
            return CState<2>{rot * eval_expr(*f, y[0], y[1]) / eps,
                             rot * eval_expr(*g, y[0], y[1])};
        };
    }

    DriverResult<2> r = dopri5<2>(rhs, {z0, w0}, internal_end, controls, internal_samples);

    Trajectory traj;
    traj.timescale = fast ? Timescale::Fast : Timescale::Slow;
    traj.eps = eps;
    traj.time_rotation = controls.time_rotation;
    traj.stats = r.stats;
    traj.termination = r.termination;
    traj.samples.reserve(r.samples.size());
    for (const auto& [t, y] : r.samples)
        traj.samples.push_back({t * scale_to_tau, y[0], y[1]});
    return traj;
}

Trajectory integrate_pair(const std::function<std::pair<cplx, cplx>(cplx, cplx)>& rhs, cplx z0,
                          cplx w0, double t_end, const IntegrationControls& controls) {
    if (!(t_end > 0.0)) throw ValidationError("integration span must be positive");
    cplx rot = std::polar(1.0, controls.time_rotation);
    std::function<CState<2>(const CState<2>&)> f = [rhs, rot](const CState<2>& y) {
        auto [dz, dw] = rhs(y[0], y[1]);
        return CState<2>{rot * dz, rot * dw};
    };
    DriverResult<2> r = dopri5<2>(f, {z0, w0}, t_end, controls, controls.sample_times);
    Trajectory traj;
    traj.time_rotation = controls.time_rotation;
    traj.stats = r.stats;
    traj.termination = r.termination;
    for (const auto& [t, y] : r.samples) traj.samples.push_back({t, y[0], y[1]});
    return traj;
}

Trajectory integrate_scalar(const std::function<cplx(cplx)>& field, cplx y0, double t_end,
                            const IntegrationControls& controls) {
    if (!(t_end > 0.0)) throw ValidationError("integration span must be positive");
    cplx rot = std::polar(1.0, controls.time_rotation);
    std::function<CState<1>(const CState<1>&)> rhs = [field, rot](const CState<1>& y) {
        return CState<1>{rot * field(y[0])};
    };
    DriverResult<1> r = dopri5<1>(rhs, {y0}, t_end, controls, controls.sample_times);
    Trajectory traj;
    traj.eps = 1.0;
    traj.time_rotation = controls.time_rotation;
    traj.stats = r.stats;
    traj.termination = r.termination;
    for (const auto& [t, y] : r.samples) traj.samples.push_back({t, cplx(0.0), y[0]});
    return traj;
}

Trajectory integrate_reduced(const std::function<cplx(cplx)>& G, cplx w0, double t_end,
                             const IntegrationControls& controls) {
    return integrate_scalar(G, w0, t_end, controls);
}

Trajectory integrate_reduced(const Series1& G, cplx w0, double t_end,
                             const IntegrationControls& controls) {
    Series1 s = G;
    return integrate_scalar([s](cplx w) { return s1_eval(s, w); }, w0, t_end, controls);
}

Trajectory layer_flow(const SystemSpec& sys, cplx w_frozen, cplx z0, double t_end,
                      const IntegrationControls& controls) {
    if (!sys.f) throw SchemaError("system has no closed-form f for the layer problem");
    ExprPtr f = sys.f;
    Trajectory traj = integrate_scalar(
        [f, w_frozen](cplx z) { return eval_expr(*f, z, w_frozen); }, z0, t_end, controls);
    for (TrajectorySample& s : traj.samples) {
        s.z = s.w;     // scalar state is the fast variable here
        s.w = w_frozen;
    }
    traj.timescale = Timescale::Fast;
    return traj;
}

// ----------------------------------------------------------------------
// Local classification
// ----------------------------------------------------------------------

bool ClassificationResult::same_base_kind(const ClassificationResult& other) const {
    auto base = [](PointKind k) {
        switch (k) {
            case PointKind::FocusAttracting:
            case PointKind::FocusRepelling: return PointKind::FocusAttracting;
            case PointKind::NodeAttracting:
            case PointKind::NodeRepelling: return PointKind::NodeAttracting;
            default: return k;
        }
    };
    if (base(kind) != base(other.kind)) return false;
    if (kind == PointKind::ZeroOfOrder || kind == PointKind::PoleOfOrder)
        return order == other.order;
    return true;
}

std::string ClassificationResult::label() const {
    switch (kind) {
        case PointKind::RegularPoint: return "regular-point";
        case PointKind::Center: return "center";
        case PointKind::FocusAttracting: return "focus(attracting)";
        case PointKind::FocusRepelling: return "focus(repelling)";
        case PointKind::NodeAttracting: return "node(attracting)";
        case PointKind::NodeRepelling: return "node(repelling)";
        case PointKind::ZeroOfOrder: return "zero-of-order-" + std::to_string(order);
        case PointKind::PoleOfOrder: return "pole-of-order-" + std::to_string(order);
    }
    return "regular-point";
}

namespace {

constexpr int kMaxOrder = 12;

// Shared tail: classify from local Taylor coefficients d_k = f^(k)(w0)/k!.
ClassificationResult classify_coefficients(const std::vector<cplx>& d, double tol) {
    double scale = 0.0;
    for (const cplx& v : d) scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        throw UnclassifiableAtTolerance("field vanishes identically near the point");
    double thr = tol * scale;

    int first = -1;
    for (std::size_t k = 0; k < d.size(); ++k)
        if (std::abs(d[k]) > thr) {
            first = static_cast<int>(k);
            break;
        }
    if (first < 0)
        throw UnclassifiableAtTolerance("no coefficient is significant at the tolerance");

    ClassificationResult r;
    if (first == 0) {
        r.kind = PointKind::RegularPoint;
        r.witness = d[0];
        return r;
    }
    if (first == 1) {
        cplx lam = d[1];
        r.witness = lam;
        bool re_zero = std::abs(lam.real()) <= thr;
        bool im_zero = std::abs(lam.imag()) <= thr;
        if (re_zero && im_zero)
            throw UnclassifiableAtTolerance(
                "both Re and Im of the derivative are below tolerance");
        if (re_zero) {
            r.kind = PointKind::Center;
        } else if (im_zero) {
            r.kind = lam.real() < 0 ? PointKind::NodeAttracting : PointKind::NodeRepelling;
        } else {
            r.kind = lam.real() < 0 ? PointKind::FocusAttracting : PointKind::FocusRepelling;
        }
        return r;
    }
    r.kind = PointKind::ZeroOfOrder;
    r.order = first;
    r.witness = d[static_cast<std::size_t>(first)];
    return r;
}

ClassificationResult classify_pole(const ExprPtr& field, char var, cplx w0, double tol) {
    // Contour means of (w - w0)^n field(w) over shrinking circles estimate
    // the Laurent coefficients c_{-n}; uniform angles cancel every other
    // index up to an O(r^K) alias.
    constexpr int K = 32;
    const double radii[2] = {1e-2, 1e-3};
    std::array<std::array<cplx, kMaxOrder + 1>, 2> est{};
    for (int ri = 0; ri < 2; ++ri) {
        double r = radii[ri];
        std::array<cplx, K> vals;
        for (int k = 0; k < K; ++k) {
            cplx dw = std::polar(r, 2.0 * M_PI * k / K);
            cplx p = w0 + dw;
            cplx v = var == 'w' ? eval_expr(*field, 0.0, p) : eval_expr(*field, p, 0.0);
            vals[static_cast<std::size_t>(k)] = v;
        }
        for (int n = 1; n <= kMaxOrder; ++n) {
            cplx acc(0.0);
            for (int k = 0; k < K; ++k) {
                cplx dw = std::polar(r, 2.0 * M_PI * k / K);
                acc += std::pow(dw, n) * vals[static_cast<std::size_t>(k)];
            }
            est[static_cast<std::size_t>(ri)][static_cast<std::size_t>(n)] = acc / double(K);
        }
    }
    double scale = 0.0;
    for (int n = 1; n <= kMaxOrder; ++n)
        scale = std::max(scale, std::abs(est[1][static_cast<std::size_t>(n)]));
    if (scale == 0.0)
        throw UnclassifiableAtTolerance("no Laurent tail detected at the singular point");
    int order = 0;
    for (int n = kMaxOrder; n >= 1; --n) {
        cplx c1 = est[0][static_cast<std::size_t>(n)], c2 = est[1][static_cast<std::size_t>(n)];
        if (std::abs(c2) > 1e-6 * scale &&
            std::abs(c1 - c2) <= 1e-3 * std::max(std::abs(c2), tol * scale)) {
            order = n;
            break;
        }
    }
    if (order == 0)
        throw UnclassifiableAtTolerance("Laurent coefficients did not stabilize; the "
                                        "singularity may be essential or beyond order 12");
    ClassificationResult r;
    r.kind = PointKind::PoleOfOrder;
    r.order = order;
    r.witness = est[1][static_cast<std::size_t>(order)];
    return r;
}

}  // namespace

ClassificationResult classify_point(const ExprPtr& field, cplx w0, double tol) {
    bool uz = uses_var(*field, 'z'), uw = uses_var(*field, 'w');
    if (uz && uw)
        throw ValidationError("classification expects a field in a single variable");
    char var = uz ? 'z' : 'w';

    try {
        std::vector<cplx> d;
        ExprPtr cur = field;
        double kfact = 1.0;
        for (int k = 0; k <= kMaxOrder; ++k) {
            if (k > 0) {
                cur = diff_expr(cur, var);
                kfact *= k;
            }
            cplx v = var == 'w' ? eval_expr(*cur, 0.0, w0) : eval_expr(*cur, w0, 0.0);
            d.push_back(v / kfact);
        }
        return classify_coefficients(d, tol);
    } catch (const EvalPole&) {
        return classify_pole(field, var, w0, tol);
    }
}

ClassificationResult classify_point(const Series1& field, double tol) {
    std::vector<cplx> d;
    for (int k = 0; k <= std::min(field.order(), kMaxOrder); ++k) d.push_back(field.coeff(k));
    return classify_coefficients(d, tol);
}

ClassificationResult classify_series_quotient(const Series1& num, const Series1& den,
                                              double tol) {
    int vn = num.valuation(), vd = den.valuation();
    if (vd < 0) throw ZeroConstantTerm("quotient denominator is identically zero");
    if (vn < 0)
        throw UnclassifiableAtTolerance("quotient numerator is identically zero");

    // Strip the valuations and divide the analytic parts.
    int n = std::min(num.order() - vn, den.order() - vd);
    Series1 an(num.var, n), ad(num.var, n);
    for (int k = 0; k <= n; ++k) {
        an.set(k, num.coeff(k + vn));
        ad.set(k, den.coeff(k + vd));
    }
    Series1 q = s1_mul(an, s1_reciprocal(ad));
    int shift = vn - vd;
    if (shift < 0) {
        ClassificationResult r;
        r.kind = PointKind::PoleOfOrder;
        r.order = -shift;
        r.witness = q.coeff(0);
        return r;
    }
    std::vector<cplx> d(static_cast<std::size_t>(shift), cplx(0.0));
    for (int k = 0; k <= q.order() && static_cast<int>(d.size()) <= kMaxOrder; ++k)
        d.push_back(q.coeff(k));
    return classify_coefficients(d, tol);
}

}  // namespace hsf
