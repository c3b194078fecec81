#include "hsf/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hsf/errors.hpp"

namespace hsf {

double Series1::max_abs() const {
    double m = 0.0;
    for (const cplx& v : c) m = std::max(m, std::abs(v));
    return m;
}

int Series1::valuation(double rel_tol) const {
    double thr = rel_tol * std::max(1e-300, max_abs());
    for (int k = 0; k <= order(); ++k)
        if (std::abs(coeff(k)) > thr) return k;
    return -1;
}

Series1 s1_monomial(char var, int degree, cplx coeff, int order) {
    Series1 r(var, order);
    if (degree <= order) r.set(degree, coeff);
    return r;
}

Series1 s1_identity(char var, int order) { return s1_monomial(var, 1, 1.0, order); }

namespace {
void check_vars(const Series1& a, const Series1& b) {
    if (a.var != b.var)
        throw VariableMismatch(std::string("series variable mismatch: '") + a.var + "' vs '" +
                               b.var + "'");
}
}  // namespace

Series1 s1_add(const Series1& a, const Series1& b) {
    check_vars(a, b);
    Series1 r(a.var, std::min(a.order(), b.order()));
    for (int k = 0; k <= r.order(); ++k) r.set(k, a.coeff(k) + b.coeff(k));
    return r;
}

Series1 s1_sub(const Series1& a, const Series1& b) {
    check_vars(a, b);
    Series1 r(a.var, std::min(a.order(), b.order()));
    for (int k = 0; k <= r.order(); ++k) r.set(k, a.coeff(k) - b.coeff(k));
    return r;
}

Series1 s1_mul(const Series1& a, const Series1& b) {
    check_vars(a, b);
    int n = std::min(a.order(), b.order());
    Series1 r(a.var, n);
    for (int k = 0; k <= n; ++k) {
        cplx acc(0.0);
        for (int j = 0; j <= k; ++j) acc += a.coeff(j) * b.coeff(k - j);
        r.set(k, acc);
    }
    return r;
}

Series1 s1_scale(const Series1& a, cplx s) {
    Series1 r = a;
    for (cplx& v : r.c) v *= s;
    return r;
}

Series1 s1_compose(const Series1& outer, const Series1& inner) {
    if (std::abs(inner.coeff(0)) != 0.0)
        throw NonzeroConstantTerm("composition requires inner series with zero constant term");
    int n = std::min(outer.order(), inner.order());
    Series1 inn(inner.var, n);
    for (int k = 0; k <= n; ++k) inn.set(k, inner.coeff(k));
    // Horner over the outer coefficients; inner has valuation >= 1, so outer
    // terms beyond degree n drop out of the truncation on their own.
    Series1 acc(inner.var, n);
    for (int k = outer.order(); k >= 0; --k) {
        acc = s1_mul(acc, inn);
        acc.set(0, acc.coeff(0) + outer.coeff(k));
    }
    return acc;
}

Series1 s1_reciprocal(const Series1& a) {
    cplx c0 = a.coeff(0);
    if (std::abs(c0) == 0.0)
        throw ZeroConstantTerm("reciprocal requires nonzero constant term");
    Series1 r(a.var, a.order());
    r.set(0, 1.0 / c0);
    for (int k = 1; k <= a.order(); ++k) {
        cplx acc(0.0);
        for (int j = 1; j <= k; ++j) acc += a.coeff(j) * r.coeff(k - j);
        r.set(k, -acc / c0);
    }
    return r;
}

Series1 s1_derivative(const Series1& a) {
    Series1 r(a.var, std::max(0, a.order() - 1));
    for (int k = 1; k <= a.order(); ++k) r.set(k - 1, static_cast<double>(k) * a.coeff(k));
    return r;
}

Series1 s1_mul_by_x(const Series1& a, int new_order) {
    Series1 r(a.var, new_order);
    for (int k = 0; k < new_order && k <= a.order(); ++k) r.set(k + 1, a.coeff(k));
    return r;
}

cplx s1_eval(const Series1& a, cplx x) {
    cplx acc(0.0);
    for (int k = a.order(); k >= 0; --k) acc = acc * x + a.coeff(k);
    return acc;
}

// ----------------------------------------------------------------------
// Series2
// ----------------------------------------------------------------------

double Series2::max_abs() const {
    double m = 0.0;
    for (const cplx& v : c) m = std::max(m, std::abs(v));
    return m;
}

Series2 s2_extend(const Series2& a, int order) {
    if (order <= a.N) return a;
    Series2 r(order);
    for (int d = 0; d <= a.N; ++d)
        for (int l = 0; l <= d; ++l) r.set(d - l, l, a.coeff(d - l, l));
    return r;
}

Series2 s2_add(const Series2& a, const Series2& b) {
    int n = std::min(a.N, b.N);
    Series2 r(n);
    for (int d = 0; d <= n; ++d)
        for (int l = 0; l <= d; ++l) r.set(d - l, l, a.coeff(d - l, l) + b.coeff(d - l, l));
    return r;
}

Series2 s2_scale(const Series2& a, cplx s) {
    Series2 r = a;
    for (cplx& v : r.c) v *= s;
    return r;
}

Series2 s2_mul(const Series2& a, const Series2& b) {
    int n = std::min(a.N, b.N);
    Series2 r(n);
    for (int da = 0; da <= n; ++da)
        for (int la = 0; la <= da; ++la) {
            cplx av = a.coeff(da - la, la);
            if (av == cplx(0.0)) continue;
            for (int db = 0; db + da <= n; ++db)
                for (int lb = 0; lb <= db; ++lb) {
                    cplx bv = b.coeff(db - lb, lb);
                    if (bv == cplx(0.0)) continue;
                    r.add(da - la + db - lb, la + lb, av * bv);
                }
        }
    return r;
}

Series2 s2_reciprocal(const Series2& a) {
    cplx c0 = a.coeff(0, 0);
    if (std::abs(c0) == 0.0)
        throw ZeroConstantTerm("bivariate reciprocal requires nonzero constant term");
    // r_d determined degree by degree: sum_{j<=d} a_j r_{d-j} = delta_{d0}.
    Series2 r(a.N);
    r.set(0, 0, 1.0 / c0);
    for (int d = 1; d <= a.N; ++d) {
        for (int l = 0; l <= d; ++l) {
            int s = d - l;
            cplx acc(0.0);
            // sum over a-terms of degree >= 1 combined with lower-degree r
            for (int ds = 1; ds <= d; ++ds)
                for (int ls = std::max(0, ds - s); ls <= std::min(l, ds); ++ls) {
                    cplx av = a.coeff(ds - ls, ls);
                    if (av == cplx(0.0)) continue;
                    acc += av * r.coeff(s - (ds - ls), l - ls);
                }
            r.set(s, l, -acc / c0);
        }
    }
    return r;
}

Series1 s2_eval_path(const Series2& F, const Series1& xc, const Series1& yc) {
    if (xc.var != yc.var)
        throw VariableMismatch("path components must share a variable");
    int n = std::min({F.N, xc.order(), yc.order()});
    char var = xc.var;
    // Precompute truncated powers of the two curves.
    std::vector<Series1> xp(static_cast<std::size_t>(n) + 1), yp(static_cast<std::size_t>(n) + 1);
    xp[0] = s1_monomial(var, 0, 1.0, n);
    yp[0] = xp[0];
    Series1 xt(var, n), yt(var, n);
    for (int k = 0; k <= n; ++k) {
        xt.set(k, xc.coeff(k));
        yt.set(k, yc.coeff(k));
    }
    for (int k = 1; k <= n; ++k) {
        xp[static_cast<std::size_t>(k)] = s1_mul(xp[static_cast<std::size_t>(k - 1)], xt);
        yp[static_cast<std::size_t>(k)] = s1_mul(yp[static_cast<std::size_t>(k - 1)], yt);
    }
    Series1 acc(var, n);
    for (int d = 0; d <= F.N; ++d)
        for (int l = 0; l <= d; ++l) {
            int s = d - l;
            cplx v = F.coeff(s, l);
            if (v == cplx(0.0)) continue;
            if (s > n || l > n) continue;
            Series1 term = s1_mul(xp[static_cast<std::size_t>(s)], yp[static_cast<std::size_t>(l)]);
            acc = s1_add(acc, s1_scale(term, v));
        }
    return acc;
}

Series1 s2_eval_on_curve(const Series2& F, const Series1& curve) {
    if (std::abs(curve.coeff(0)) != 0.0)
        throw NonzeroConstantTerm("curve through the origin required (zero constant term)");
    return s2_eval_path(F, s1_identity(curve.var, curve.order()), curve);
}

Series1 s2_eval_on_curve_first(const Series2& F, const Series1& curve) {
    return s2_eval_path(F, curve, s1_identity(curve.var, curve.order()));
}

Series1 implicit_series_solve(const Series2& theta, cplx alpha, int N) {
    if (std::abs(alpha) < 1e-12)
        throw DegenerateLinearPart("implicit solve requires a nonzero linear coefficient");
    Series1 L('w', N);
    // Adding delta*w^k to L perturbs Theta(L(w), w) by alpha*delta*w^k plus
    // higher order, so one sweep per degree settles each coefficient.
    for (int k = 1; k <= N; ++k) {
        Series1 res = s2_eval_on_curve_first(theta, L);
        L.set(k, L.coeff(k) - res.coeff(k) / alpha);
    }
    return L;
}

// ----------------------------------------------------------------------
// Convergence-radius estimation
// ----------------------------------------------------------------------

ConvergenceVerdict radius_estimate(const Series1& a, int window_m) {
    if (window_m < 4) throw TooFewCoefficients("ratio window must be at least 4");
    if (a.order() < 2 * window_m)
        throw TooFewCoefficients("series order must be at least twice the ratio window");

    double scale = a.max_abs();
    ConvergenceVerdict out;
    if (scale == 0.0) {  // identically zero: trivially entire
        out.verdict = Verdict::Convergent;
        out.radius = std::numeric_limits<double>::infinity();
        out.large_radius = true;
        return out;
    }
    // Support means actual nonzero coefficients: recurrences produce exact
    // structural zeros, and a threshold tied to the global max would discard
    // the small early terms of factorially growing series.
    std::vector<int> support;
    for (int k = 0; k <= a.order(); ++k)
        if (std::abs(a.coeff(k)) > 1e-250) support.push_back(k);

    auto polynomial_like = [&]() {
        return support.empty() || support.back() <= a.order() - 4;
    };
    if (static_cast<int>(support.size()) < 5) {
        if (polynomial_like()) {
            out.verdict = Verdict::Convergent;
            out.radius = std::numeric_limits<double>::infinity();
            out.large_radius = true;
            return out;
        }
        throw TooFewCoefficients("not enough nonzero coefficients for a ratio test");
    }

    std::size_t nr = support.size() - 1;
    std::vector<double> raw(nr), norm(nr);  // raw ratio and gap-normalized ratio
    for (std::size_t j = 0; j < nr; ++j) {
        double m0 = std::abs(a.coeff(support[j]));
        double m1 = std::abs(a.coeff(support[j + 1]));
        int gap = support[j + 1] - support[j];
        raw[j] = m1 / m0;
        norm[j] = std::pow(raw[j], 1.0 / gap);
    }

    std::size_t win = std::min<std::size_t>(static_cast<std::size_t>(window_m), nr);
    std::size_t first = nr - win;
    out.window_used = static_cast<int>(win);

    bool tail_increasing = true, tail_decreasing = true;
    for (std::size_t j = first + 1; j < nr; ++j) {
        if (raw[j] <= raw[j - 1]) tail_increasing = false;
        if (raw[j] >= raw[j - 1]) tail_decreasing = false;
    }
    double overall_growth = raw[nr - 1] / raw[0];

    if (tail_increasing && overall_growth > 10.0) {
        out.verdict = Verdict::Divergent;
        out.radius = 0.0;
        return out;
    }

    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = first; j < nr; ++j) {
        rmax = std::max(rmax, norm[j]);
        rmin = std::min(rmin, norm[j]);
    }

    if (tail_decreasing && overall_growth < 0.1) {
        // Ratios shrink by 10x and keep falling: factorial-type decay, report
        // the most recent ratio as the limsup estimate.
        out.verdict = Verdict::Convergent;
        out.radius = 1.0 / norm[nr - 1];
        out.large_radius = out.radius >= 10.0;
        return out;
    }

    if (rmax / rmin <= 10.0) {
        out.verdict = Verdict::Convergent;
        out.radius = 1.0 / rmax;
        out.large_radius = out.radius >= 10.0;
        return out;
    }

    // Ratios are wild; fall back to a root test over the window.
    double hmax = 0.0, hmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = support.size() - win; j < support.size(); ++j) {
        int k = support[static_cast<std::size_t>(j)];
        if (k == 0) continue;
        double h = std::pow(std::abs(a.coeff(k)), 1.0 / k);
        hmax = std::max(hmax, h);
        hmin = std::min(hmin, h);
    }
    if (hmax > 0.0 && hmax / hmin <= 2.0) {
        out.verdict = Verdict::Convergent;
        out.method = "cauchy-hadamard";
        out.radius = 1.0 / hmax;
        out.large_radius = out.radius >= 10.0;
        return out;
    }
    out.verdict = Verdict::Inconclusive;
    out.method = "cauchy-hadamard";
    out.radius = hmax > 0.0 ? 1.0 / hmax : 0.0;
    return out;
}

std::string to_string(const Series1& a, int max_terms) {
    std::string out;
    char buf[96];
    int printed = 0;
    for (int k = 0; k <= a.order() && printed < max_terms; ++k) {
        cplx v = a.coeff(k);
        if (v == cplx(0.0)) continue;
        std::snprintf(buf, sizeof(buf), "%s(%.6g%+.6gi)*%c^%d", printed ? " + " : "", v.real(),
                      v.imag(), a.var, k);
        out += buf;
        ++printed;
    }
    if (out.empty()) out = "0";
    return out;
}

}  // namespace hsf
