#ifndef HSF_SERIES_HPP
#define HSF_SERIES_HPP

#include <complex>
#include <string>
#include <vector>

namespace hsf {

using cplx = std::complex<double>;

// Truncated univariate power series sum c_k x^k, k = 0..order. Arithmetic
// truncates at the minimum of the operand orders.
struct Series1 {
    char var = 'z';
    std::vector<cplx> c;  // c[0]..c[order]

    Series1() = default;
    Series1(char v, int order) : var(v), c(static_cast<std::size_t>(order) + 1) {}

    int order() const { return static_cast<int>(c.size()) - 1; }
    cplx coeff(int k) const {
        return (k >= 0 && k <= order()) ? c[static_cast<std::size_t>(k)] : cplx(0.0);
    }
    void set(int k, cplx v) { c[static_cast<std::size_t>(k)] = v; }
    double max_abs() const;
    // Lowest index with a coefficient above rel_tol * max_abs(); -1 if none.
    int valuation(double rel_tol = 1e-13) const;
};

Series1 s1_monomial(char var, int degree, cplx coeff, int order);
Series1 s1_identity(char var, int order);  // the series "x"

Series1 s1_add(const Series1& a, const Series1& b);
Series1 s1_sub(const Series1& a, const Series1& b);
Series1 s1_mul(const Series1& a, const Series1& b);
Series1 s1_scale(const Series1& a, cplx s);
// outer(inner); inner must have zero constant term.
Series1 s1_compose(const Series1& outer, const Series1& inner);
// 1/a; a must have nonzero constant term. a * reciprocal(a) = 1 + O(x^{N+1}).
Series1 s1_reciprocal(const Series1& a);
Series1 s1_derivative(const Series1& a);
Series1 s1_mul_by_x(const Series1& a, int new_order);  // x * a, truncated
cplx s1_eval(const Series1& a, cplx x);

// Truncated bivariate series sum c_{s,l} x^s y^l over s + l <= order.
struct Series2 {
    int N = 0;
    std::vector<cplx> c;  // triangular layout, index = (s+l)(s+l+1)/2 + l

    Series2() = default;
    explicit Series2(int order)
        : N(order), c(static_cast<std::size_t>((order + 1) * (order + 2) / 2)) {}

    int order() const { return N; }
    static std::size_t index(int s, int l) {
        int d = s + l;
        return static_cast<std::size_t>(d * (d + 1) / 2 + l);
    }
    cplx coeff(int s, int l) const {
        return (s >= 0 && l >= 0 && s + l <= N) ? c[index(s, l)] : cplx(0.0);
    }
    void set(int s, int l, cplx v) { c[index(s, l)] = v; }
    void add(int s, int l, cplx v) { c[index(s, l)] += v; }
    double max_abs() const;
};

// Zero-pad to a higher truncation order (exact for polynomial tails).
Series2 s2_extend(const Series2& a, int order);
Series2 s2_add(const Series2& a, const Series2& b);
Series2 s2_scale(const Series2& a, cplx s);
Series2 s2_mul(const Series2& a, const Series2& b);
// 1/a with nonzero constant term.
Series2 s2_reciprocal(const Series2& a);
// F evaluated along a parametrized path (x(t), y(t)); both curves share a
// variable and the result is truncated at min(F.N, curve orders).
Series1 s2_eval_path(const Series2& F, const Series1& xc, const Series1& yc);
// F(t, curve(t)): the path (t, curve); curve must vanish at 0.
Series1 s2_eval_on_curve(const Series2& F, const Series1& curve);
// F(curve(t), t): first-slot substitution.
Series1 s2_eval_on_curve_first(const Series2& F, const Series1& curve);

// Solve Theta(L(w), w) = O(w^{N+1}) for L with L(0) = 0, where
// Theta = alpha*z + higher-order terms. Degree-by-degree Newton matching.
Series1 implicit_series_solve(const Series2& theta, cplx alpha, int N);

enum class Verdict { Convergent, Divergent, Inconclusive };

struct ConvergenceVerdict {
    Verdict verdict = Verdict::Inconclusive;
    double radius = 0.0;  // estimate; +inf for polynomial/entire tails
    std::string method = "ratio";  // "ratio" or "cauchy-hadamard"
    int window_used = 0;           // number of consecutive-support ratios used
    bool large_radius = false;     // radius >= 10: "large/entire"
};

// Ratio test over the arithmetic support of the series (sparse series are
// re-indexed to their nonzero coefficients first). Divergent means the
// support ratios grow monotonically over the window and by more than 10x
// across the series; bounded ratios give radius = 1/limsup with each ratio
// normalized by the index gap.
ConvergenceVerdict radius_estimate(const Series1& a, int window_m = 8);

std::string to_string(const Series1& a, int max_terms = 12);

}  // namespace hsf

#endif
