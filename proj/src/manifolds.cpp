#include "hsf/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hsf/errors.hpp"
#include "hsf/systems.hpp"

namespace hsf {

cplx log_cut(cplx w, double ray_angle) {
    if (std::abs(w) < 1e-300) throw EvalPole("log(w)");
    // Rotate so the requested ray lands on the principal cut, take the
    // principal log, rotate the argument back.
    double rot = ray_angle - M_PI;
    cplx lw = std::log(w * std::polar(1.0, -rot));
    return cplx(lw.real(), lw.imag() + rot);
}

// ----------------------------------------------------------------------
// Primitive catalog
// ----------------------------------------------------------------------

cplx Primitive::eval(cplx w) const {
    switch (kind.kind) {
        case NormalForm::ConstantOne: return scale * w;
        case NormalForm::Linear: return scale * log_cut(w, ray_angle) / kind.rate;
        case NormalForm::Power: {
            int m = kind.n;
            if (std::abs(w) < 1e-300) throw EvalPole("w^(1-m)");
            return scale * std::pow(w, 1 - m) / cplx(1 - m, 0);
        }
        case NormalForm::Pole: {
            int m = kind.n;
            return scale * std::pow(w, m + 1) / cplx(m + 1, 0);
        }
        case NormalForm::Rational: {
            int m = kind.n;
            if (std::abs(w) < 1e-300) throw EvalPole("w^(1-m)");
            cplx inner = std::pow(w, 1 - m) / cplx(1 - m, 0) + log_cut(w, ray_angle);
            return scale * inner / kind.gamma;
        }
    }
    throw Error("corrupt primitive");
}

cplx Primitive::deriv(cplx w) const {
    cplx g = kind.eval(w);
    if (std::abs(g) < 1e-300) throw EvalPole("1/g(w)");
    return scale / g;
}

bool Primitive::has_log() const {
    return kind.kind == NormalForm::Linear || kind.kind == NormalForm::Rational;
}

bool Primitive::excludes_origin() const { return kind.kind != NormalForm::ConstantOne; }

std::string Primitive::label() const {
    std::ostringstream os;
    os << "primitive[" << kind.label();
    if (scale != cplx(1.0, 0.0)) os << ", scale=(" << scale.real() << "," << scale.imag() << ")";
    os << "]";
    return os.str();
}

Primitive primitive_catalog(const NormalFormKind& kind, cplx scale,
                            std::optional<double> ray_angle) {
    Primitive p{kind, scale, ray_angle.value_or(M_PI)};
    return p;
}

bool DomainDescription::contains(cplx p) const {
    double r = std::abs(p);
    if (r > disc_radius) return false;
    if (r <= excluded_ball_radius) return false;
    if (excluded_ray_angle) {
        // a thin sliver around the cut counts as excluded
        double d = std::remainder(std::arg(p) - *excluded_ray_angle, 2.0 * M_PI);
        if (std::abs(d) < 1e-9) return false;
    }
    return true;
}

// ----------------------------------------------------------------------
// Separable systems: H = G(w) - eps F(z)
// ----------------------------------------------------------------------
namespace {

std::vector<cplx> annulus_samples(std::mt19937_64& rng, double radius,
                                  std::optional<double> cut, int count) {
    std::uniform_real_distribution<double> ur(0.25, 0.9), ua(-M_PI, M_PI);
    std::vector<cplx> out;
    while (static_cast<int>(out.size()) < count) {
        double a = ua(rng);
        if (cut) {
            double d = std::remainder(a - *cut, 2.0 * M_PI);
            if (std::abs(d) < 0.25) continue;
        }
        out.push_back(std::polar(ur(rng) * radius, a));
    }
    return out;
}

}  // namespace

ImplicitManifold separable_manifold(const SystemSpec& sys, const ExprPtr& eta,
                                    const ExprPtr& kappa, const Primitive& F,
                                    const Primitive& G, double eps) {
    if (!sys.f || !sys.g) throw SchemaError("separable construction needs closed-form f, g");
    std::mt19937_64 rng(sys.seed + 101);
    double R = sys.domain.window_radius;
    std::optional<double> cut = sys.domain.excluded_ray_angle;
    if (!cut && (F.has_log() || G.has_log())) cut = M_PI;

    auto zs = annulus_samples(rng, R, cut, 20);
    auto ws = annulus_samples(rng, R, cut, 20);

    // g/f must factor as eta(z) kappa(w).
    for (int i = 0; i < 20; ++i) {
        cplx z = zs[static_cast<std::size_t>(i)], w = ws[static_cast<std::size_t>(i)];
        cplx fv, gv, ev, kv;
        try {
            fv = eval_expr(*sys.f, z, w);
            gv = eval_expr(*sys.g, z, w);
            ev = eval_expr(*eta, z, 0.0);
            kv = eval_expr(*kappa, 0.0, w);
        } catch (const EvalPole&) {
            continue;
        }
        if (std::abs(fv) < 1e-12) continue;
        cplx lhs = gv / fv, rhs = ev * kv;
        if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(rhs)))
            throw FactorizationMismatch("g/f does not factor as eta(z) kappa(w) on samples");
    }
    // F' = eta and G' = 1/kappa.
    for (cplx z : zs) {
        cplx fp, ev;
        try {
            fp = F.deriv(z);
            ev = eval_expr(*eta, z, 0.0);
        } catch (const EvalPole&) {
            continue;
        }
        if (std::abs(fp - ev) > 1e-8 * std::max(1.0, std::abs(ev)))
            throw PrimitiveMismatch("F' does not match eta on samples");
    }
    for (cplx w : ws) {
        cplx gp, kv;
        try {
            gp = G.deriv(w);
            kv = eval_expr(*kappa, 0.0, w);
        } catch (const EvalPole&) {
            continue;
        }
        if (std::abs(gp * kv - 1.0) > 1e-8)
            throw PrimitiveMismatch("G' does not match 1/kappa on samples");
    }

    ImplicitManifold m;
    ExprPtr eta_e = eta, kappa_e = kappa;
    Primitive Fp = F, Gp = G;
    m.H = [Gp, Fp, eps](cplx z, cplx w) { return Gp.eval(w) - eps * Fp.eval(z); };
    m.gradient = [eta_e, kappa_e, eps](cplx z, cplx w) {
        cplx kv = eval_expr(*kappa_e, 0.0, w);
        if (std::abs(kv) < 1e-300) throw EvalPole("1/kappa(w)");
        return std::make_pair(-eps * eval_expr(*eta_e, z, 0.0), 1.0 / kv);
    };
    m.domain_z.disc_radius = R;
    m.domain_w.disc_radius = R;
    if (F.excludes_origin()) m.domain_z.excluded_ball_radius = 1e-9;
    if (G.excludes_origin()) m.domain_w.excluded_ball_radius = 1e-9;
    if (F.has_log()) m.domain_z.excluded_ray_angle = cut;
    if (G.has_log()) m.domain_w.excluded_ray_angle = cut;
    m.note = "on-manifold slow dynamics: w' = g(z, w)";

    // Rank-1 condition: the gradient must not vanish along the zero set.
    // Walk the set by solving G(w) = eps F(z_i) with Newton in w.
    int found = 0;
    for (int attempt = 0; attempt < 100 && found < 20; ++attempt) {
        cplx z = annulus_samples(rng, R, cut, 1)[0];
        cplx target;
        try {
            target = eps * Fp.eval(z);
        } catch (const EvalPole&) {
            continue;
        }
        cplx w = annulus_samples(rng, R, cut, 1)[0];
        bool ok = false;
        try {
            for (int it = 0; it < 60; ++it) {
                cplx r = Gp.eval(w) - target;
                cplx gp = Gp.deriv(w);
                if (std::abs(gp) < 1e-300) break;
                cplx step = r / gp;
                w -= step;
                if (std::abs(step) < 1e-13 * (1.0 + std::abs(w))) {
                    ok = std::abs(Gp.eval(w) - target) < 1e-9;
                    break;
                }
            }
        } catch (const EvalPole&) {
            continue;
        }
        if (!ok || !m.domain_w.contains(w)) continue;
        auto grad = m.gradient(z, w);
        double gn = std::hypot(std::abs(grad.first), std::abs(grad.second));
        if (gn < 1e-12)
            throw PrimitiveMismatch("gradient of H vanishes on the zero set");
        ++found;
    }
    return m;
}

// ----------------------------------------------------------------------
// Coupled systems: z = -(beta/alpha^2)(alpha G(w) + eps)
// ----------------------------------------------------------------------

GraphManifold coupled_manifold(const CoupledSpec& c, double eps) {
    GraphManifold gm;
    gm.direction = GraphDirection::ZofW;
    cplx alpha = c.alpha, beta = c.beta;
    auto big_g = c.big_g;
    gm.h = [alpha, beta, big_g, eps](cplx w) {
        return -(beta / (alpha * alpha)) * (alpha * big_g(w) + eps);
    };
    return gm;
}

// ----------------------------------------------------------------------
// Formal graph series for the linear-fast families
// ----------------------------------------------------------------------

std::string graph_family_label(GraphFamily f) {
    switch (f) {
        case GraphFamily::LinearWn: return "linear-wn";
        case GraphFamily::LinearRational: return "linear-rational";
        case GraphFamily::LinearLinear: return "linear-linear";
        case GraphFamily::LinearPole: return "linear-pole";
    }
    return "linear-wn";
}

namespace {

void compare_product(FormalGraphResult& out) {
    if (!out.product_formula) return;
    const Series1& a = out.recurrence;
    const Series1& b = *out.product_formula;
    for (int k = 0; k <= std::min(a.order(), b.order()); ++k) {
        double m = std::max(std::abs(a.coeff(k)), std::abs(b.coeff(k)));
        if (m < 1e-300) continue;
        double d = std::abs(a.coeff(k) - b.coeff(k)) / m;
        out.max_product_deviation = std::max(out.max_product_deviation, d);
    }
    out.product_mismatch = out.max_product_deviation > 1e-9;
}

void finish(FormalGraphResult& out, int window) {
    Series1 s = out.recurrence;
    GraphManifold gm;
    gm.direction = GraphDirection::ZofW;
    gm.series = s;
    gm.h = [s](cplx w) { return s1_eval(s, w); };
    window = std::clamp(s.order() / 2, 4, window);
    try {
        gm.verdict = radius_estimate(s, window);
    } catch (const TooFewCoefficients&) {
        // leave the verdict unset when the truncation is too short
    }
    out.manifold = std::move(gm);
    compare_product(out);
}

}  // namespace

FormalGraphResult formal_graph_series(const SF4Spec& s, double eps, int N) {
    if (std::abs(s.alpha) < 1e-12)
        throw RecurrenceBreakdown("graph recurrence divides by alpha = 0");
    FormalGraphResult out;
    out.eps = eps;

    switch (s.g.kind) {
        case NormalForm::Power: {
            // alpha h + beta w = eps h' w^n
            out.family = GraphFamily::LinearWn;
            int n = s.g.n;
            Series1 a('w', N);
            for (int k = 1; k <= N; ++k) {
                cplx v(0.0);
                if (k == 1) v -= s.beta;
                int j = k - n + 1;
                if (j >= 1) v += eps * cplx(j, 0) * a.coeff(j);
                v /= s.alpha;
                if (!std::isfinite(std::abs(v))) break;
                a.set(k, v);
            }
            out.recurrence = a;
            // printed closed form: support k_j = j(n-1)+1 with
            // a_{k_j} = -beta^j eps^j prod_{i=1}^{j-1} k_i / alpha^{j+1}, j >= 1
            Series1 prod('w', N);
            prod.set(1, -s.beta / s.alpha);
            cplx beta_pow(1.0), alpha_pow = s.alpha, running(1.0);
            double eps_pow = 1.0;
            for (int j = 1;; ++j) {
                int kj = j * (n - 1) + 1;
                if (kj > N) break;
                beta_pow *= s.beta;
                eps_pow *= eps;
                alpha_pow *= s.alpha;
                if (j >= 2) running *= cplx((j - 1) * (n - 1) + 1, 0);
                prod.set(kj, -beta_pow * eps_pow * running / alpha_pow);
            }
            out.product_formula = prod;
            break;
        }
        case NormalForm::Rational: {
            // (alpha h + beta w)(1 + w^{n-1}) = eps gamma h' w^n
            out.family = GraphFamily::LinearRational;
            int n = s.g.n;
            cplx gamma = s.g.gamma;
            Series1 a('w', N);
            for (int k = 1; k <= N; ++k) {
                cplx v(0.0);
                if (k == 1) v -= s.beta;
                if (k == n) v -= s.beta;
                int j = k - n + 1;
                if (j >= 1) v += (eps * gamma * cplx(j, 0) - s.alpha) * a.coeff(j);
                v /= s.alpha;
                if (!std::isfinite(std::abs(v))) break;
                a.set(k, v);
            }
            out.recurrence = a;
            // printed form: a_{k_j} = -beta gamma eps prod_{i=1}^{j-1}
            // [alpha - k_i gamma eps] / alpha^{j+1}
            Series1 prod('w', N);
            prod.set(1, -s.beta / s.alpha);
            cplx acc = -s.beta * gamma * eps / (s.alpha * s.alpha);
            for (int j = 1;; ++j) {
                int kj = j * (n - 1) + 1;
                if (kj > N) break;
                if (j > 1) {
                    int kprev = (j - 1) * (n - 1) + 1;
                    acc *= (s.alpha - cplx(kprev, 0) * gamma * eps) / s.alpha;
                }
                prod.set(kj, acc);
            }
            out.product_formula = prod;
            break;
        }
        case NormalForm::Pole: {
            // (alpha h + beta w) w^n = eps h'
            out.family = GraphFamily::LinearPole;
            int n = s.g.n;
            Series1 a('w', N);
            for (int m = 1; m <= N; ++m) {
                cplx v(0.0);
                if (m == n + 2) v += s.beta;
                if (m - n - 1 >= 1) v += s.alpha * a.coeff(m - n - 1);
                v /= eps * cplx(m, 0);
                if (!std::isfinite(std::abs(v))) break;
                a.set(m, v);
            }
            out.recurrence = a;
            // printed form: a_{k_j} = alpha^{j-1} beta / (eps^j prod_{i=1}^j k_i)
            Series1 prod('w', N);
            cplx acc = s.beta;
            for (int j = 1;; ++j) {
                int kj = j * (n + 1) + 1;
                if (kj > N) break;
                acc *= (j == 1 ? cplx(1.0) : s.alpha) / (eps * cplx(kj, 0));
                prod.set(kj, acc);
            }
            out.product_formula = prod;
            break;
        }
        case NormalForm::Linear: {
            return formal_graph_series(LinearLinearSpec{s.alpha, s.beta, 0.0, s.g.rate}, eps, N);
        }
        case NormalForm::ConstantOne:
            throw FamilyParamError("w' = 1 has no graph-through-origin family");
    }
    finish(out, 8);
    return out;
}

FormalGraphResult formal_graph_series(const LinearLinearSpec& m, double eps, int N) {
    if (std::abs(m.a) < 1e-12)
        throw RecurrenceBreakdown("graph recurrence divides by a = 0");
    FormalGraphResult out;
    out.family = GraphFamily::LinearLinear;
    out.eps = eps;
    cplx rate = m.reduced_rate();  // (ad - bc)/a, the reduced field slope
    cplx den = m.a - eps * rate;
    if (std::abs(den) < 1e-14)
        throw RecurrenceBreakdown("a - eps (ad-bc)/a vanishes; no graph coefficient");
    out.lambda1 = -m.b / den;
    out.recurrence = s1_monomial('w', 1, out.lambda1, N);
    finish(out, 8);
    return out;
}

}  // namespace hsf
