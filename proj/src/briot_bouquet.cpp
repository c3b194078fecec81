#include "hsf/briot_bouquet.hpp"

#include <cmath>
#include <sstream>

#include "hsf/errors.hpp"

namespace hsf {

BBSolution bb_solve(const BBProblem& p, int N) {
    for (int k = 1; k <= N; ++k)
        if (std::abs(p.lambda - cplx(k, 0)) < 1e-9) throw Resonance(k);

    BBSolution out;
    out.phi = Series1('z', N);
    for (int k = 1; k <= N; ++k) {
        // [z^k] of Q(z, phi) only involves d_1..d_{k-1} because Q is O2.
        Series1 rhs = s2_eval_on_curve(p.Q, out.phi);
        cplx num = rhs.coeff(k);
        if (k == 1) num += p.mu;
        cplx dk = num / (cplx(k, 0) - p.lambda);
        if (!std::isfinite(std::abs(dk)) || std::abs(dk) > 1e300) {
            out.overflow_at = k;
            break;
        }
        out.phi.set(k, dk);
    }
    return out;
}

namespace {

// p(z, phi) = ft(z, z phi)/(alpha z): the term a_{s,l} z^s w^l lands at
// z-degree s+l-1, phi-degree l. Entries past the truncation cannot influence
// coefficients through degree N after phi = O(z) is substituted.
Series2 divided_substitution(const Series2& tail, cplx alpha, int N) {
    Series2 out(N);
    for (int d = 2; d <= tail.order(); ++d)
        for (int l = 0; l <= d; ++l) {
            cplx v = tail.coeff(d - l, l);
            if (v == cplx(0.0)) continue;
            if (d - 1 + l > N) continue;
            out.add(d - 1, l, v / alpha);
        }
    return out;
}

}  // namespace

double sf2_invariance_residual(const SF2Spec& s, double eps, const Series1& h) {
    int N = h.order();
    Series1 ft_h = s2_eval_on_curve(s2_extend(s.ftilde, N), h);
    Series1 gt_h = s2_eval_on_curve(s2_extend(s.gtilde, N), h);
    Series1 lhs_factor = s1_add(s1_monomial('z', 1, s.alpha, N), ft_h);
    Series1 dh(h.var, N);
    for (int k = 1; k <= N; ++k) dh.set(k - 1, static_cast<double>(k) * h.coeff(k));
    Series1 lhs = s1_mul(lhs_factor, dh);
    Series1 rhs = s1_add(s1_scale(h, eps * s.beta), s1_scale(gt_h, eps));
    Series1 r = s1_sub(lhs, rhs);
    double m = 0.0;
    for (int k = 1; k <= r.order(); ++k) m = std::max(m, std::abs(r.coeff(k)));
    return m;
}

ManifoldSeries fenichel_series(const SF2Spec& s, double eps, int N) {
    if (std::abs(s.alpha) < 1e-12)
        throw DegenerateAlpha("SF2 pipeline requires alpha != 0");
    if (N < 2) N = 2;

    int M = N - 1;  // order of the phi series; h = z phi has order N
    Series2 p = divided_substitution(s.ftilde, s.alpha, M);
    Series2 q = divided_substitution(s.gtilde, s.alpha, M);

    Series2 phi_lin(M);
    phi_lin.set(0, 1, 1.0);

    Series2 one_plus_p = p;
    one_plus_p.add(0, 0, 1.0);

    // F = -phi + eps (beta phi / alpha + q) / (1 + p)
    Series2 F = s2_add(s2_scale(phi_lin, -1.0),
                       s2_scale(s2_mul(s2_add(s2_scale(phi_lin, s.beta / s.alpha), q),
                                       s2_reciprocal(one_plus_p)),
                                eps));

    BBProblem prob;
    prob.lambda = F.coeff(0, 1);
    prob.mu = F.coeff(1, 0);
    prob.Q = F;
    prob.Q.set(0, 0, 0.0);
    prob.Q.set(1, 0, 0.0);
    prob.Q.set(0, 1, 0.0);
    {
        std::ostringstream os;
        os << "sf2(alpha=" << s.alpha << ", beta=" << s.beta << "), eps=" << eps;
        prob.source = os.str();
    }

    BBSolution sol = bb_solve(prob, M);

    ManifoldSeries out;
    out.direction = GraphDirection::WofZ;
    out.h = s1_mul_by_x(sol.phi, N);
    out.eps = eps;
    out.provenance = Provenance::BBPipeline;
    out.normally_hyperbolic = std::abs(s.alpha.real()) > 1e-12;
    out.overflow_at = sol.overflow_at;
    out.source = prob.source;
    out.residual_norm = sf2_invariance_residual(s, eps, out.h);

    // Defect of z phi' = F(z, phi) itself; catches algebra bugs in p, q and
    // the reciprocal independently of the original-equation residual.
    {
        Series1 zphip('z', M);
        for (int k = 1; k <= M; ++k) zphip.set(k, static_cast<double>(k) * sol.phi.coeff(k));
        Series1 rhs = s2_eval_on_curve(F, sol.phi);
        Series1 r = s1_sub(zphip, rhs);
        double m = 0.0;
        for (int k = 1; k <= r.order(); ++k) m = std::max(m, std::abs(r.coeff(k)));
        out.transformed_residual = m;
    }
    return out;
}

Series1 reduced_vector_field(const SF2Spec& s, int N) {
    if (std::abs(s.alpha) < 1e-12)
        throw DegenerateAlpha("reduced field requires alpha != 0");
    Series2 theta = s2_extend(s.ftilde, N);
    theta.add(1, 0, s.alpha);
    Series1 L = implicit_series_solve(theta, s.alpha, N);
    Series1 G = s1_monomial('w', 1, s.beta, N);
    return s1_add(G, s2_eval_path(s2_extend(s.gtilde, N), L, s1_identity('w', N)));
}

Series1 slow_dynamics_on_manifold(const SF2Spec& s, double eps, int N) {
    ManifoldSeries m = fenichel_series(s, eps, N);
    Series1 gamma = s1_monomial('z', 1, s.alpha / eps, N);
    return s1_add(gamma, s1_scale(s2_eval_on_curve(s2_extend(s.ftilde, N), m.h), 1.0 / eps));
}

}  // namespace hsf
