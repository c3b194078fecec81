#include "hsf/systems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hsf/errors.hpp"
#include "hsf/manifolds.hpp"

namespace hsf {

using nlohmann::json;

// ----------------------------------------------------------------------
// Normal forms
// ----------------------------------------------------------------------

NormalFormKind NormalFormKind::constant_one() { return {NormalForm::ConstantOne, 0, {}, {}}; }

NormalFormKind NormalFormKind::linear(cplx rate) {
    NormalFormKind k{NormalForm::Linear, 0, rate, {}};
    return k;
}

NormalFormKind NormalFormKind::power(int n) {
    if (n < 2) throw FamilyParamError("power normal form requires n >= 2");
    return {NormalForm::Power, n, {}, {}};
}

NormalFormKind NormalFormKind::pole(int n) {
    if (n < 1) throw FamilyParamError("pole normal form requires n >= 1");
    return {NormalForm::Pole, n, {}, {}};
}

NormalFormKind NormalFormKind::rational(cplx gamma, int n) {
    if (n < 2) throw FamilyParamError("rational normal form requires n >= 2");
    return {NormalForm::Rational, n, {}, gamma};
}

cplx NormalFormKind::eval(cplx w) const {
    switch (kind) {
        case NormalForm::ConstantOne: return 1.0;
        case NormalForm::Linear: return rate * w;
        case NormalForm::Power: return std::pow(w, n);
        case NormalForm::Pole:
            if (std::abs(w) < 1e-300) throw EvalPole("w^-" + std::to_string(n));
            return 1.0 / std::pow(w, n);
        case NormalForm::Rational: {
            cplx den = 1.0 + std::pow(w, n - 1);
            if (std::abs(den) < 1e-300) throw EvalPole("1 + w^" + std::to_string(n - 1));
            return gamma * std::pow(w, n) / den;
        }
    }
    throw Error("corrupt normal form");
}

std::string NormalFormKind::label() const {
    std::ostringstream os;
    switch (kind) {
        case NormalForm::ConstantOne: os << "constant-1"; break;
        case NormalForm::Linear: os << "linear(" << rate.real() << "+" << rate.imag() << "i)"; break;
        case NormalForm::Power: os << "power(" << n << ")"; break;
        case NormalForm::Pole: os << "pole(" << n << ")"; break;
        case NormalForm::Rational:
            os << "rational(" << gamma.real() << "+" << gamma.imag() << "i," << n << ")";
            break;
    }
    return os.str();
}

std::string family_label(Family f) {
    switch (f) {
        case Family::General: return "general";
        case Family::SF2Series: return "SF2-series";
        case Family::SF3Coupled: return "SF3-coupled";
        case Family::SF4LinearFast: return "SF4-linear-fast";
        case Family::Uncoupled: return "uncoupled";
    }
    return "general";
}

SF2Spec::SF2Spec(cplx a, cplx b, Series2 ft, Series2 gt)
    : alpha(a), beta(b), ftilde(std::move(ft)), gtilde(std::move(gt)) {
    for (const Series2* s : {&ftilde, &gtilde}) {
        if (std::abs(s->coeff(0, 0)) != 0.0 || std::abs(s->coeff(1, 0)) != 0.0 ||
            std::abs(s->coeff(0, 1)) != 0.0)
            throw FamilyInvariantViolated(
                "SF2 tails must have zero constant and linear coefficients");
    }
}

double CriticalManifoldSample::min_abs_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : points) m = std::min(m, std::abs(p.margin));
    return points.empty() ? 0.0 : m;
}

// ----------------------------------------------------------------------
// JSON system specs
// ----------------------------------------------------------------------
namespace {

cplx jcplx(const json& j, const char* what) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw SchemaError(std::string(what) + " must be a number or an [re, im] pair");
}

Family parse_family(const std::string& s) {
    if (s == "general") return Family::General;
    if (s == "SF2-series" || s == "SF2") return Family::SF2Series;
    if (s == "SF3-coupled" || s == "SF3") return Family::SF3Coupled;
    if (s == "SF4-linear-fast" || s == "SF4") return Family::SF4LinearFast;
    if (s == "uncoupled") return Family::Uncoupled;
    throw SchemaError("unknown family '" + s + "'");
}

NormalFormKind parse_normal_form(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SchemaError("normal form must be an object with a 'kind'");
    std::string k = j.at("kind").get<std::string>();
    if (k == "constant" || k == "constant-1") return NormalFormKind::constant_one();
    if (k == "linear") return NormalFormKind::linear(jcplx(j.at("rate"), "rate"));
    if (k == "power") return NormalFormKind::power(j.at("n").get<int>());
    if (k == "pole") return NormalFormKind::pole(j.at("n").get<int>());
    if (k == "rational")
        return NormalFormKind::rational(jcplx(j.at("gamma"), "gamma"), j.at("n").get<int>());
    throw SchemaError("unknown normal form kind '" + k + "'");
}

Series2 parse_tail(const json& j, int order, const char* what) {
    Series2 s(order);
    if (j.is_null()) return s;
    if (!j.is_array()) throw SchemaError(std::string(what) + " must be a list of [s, l, re, im]");
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 4)
            throw SchemaError(std::string(what) + " entries must be [s, l, re, im]");
        int ds = t[0].get<int>(), dl = t[1].get<int>();
        if (ds < 0 || dl < 0) throw SchemaError(std::string(what) + " indices must be nonnegative");
        if (ds + dl > order) continue;  // beyond truncation
        s.add(ds, dl, cplx(t[2].get<double>(), t[3].get<double>()));
    }
    return s;
}

ExprPtr normal_form_expr(const NormalFormKind& k) {
    switch (k.kind) {
        case NormalForm::ConstantOne: return make_literal(1.0);
        case NormalForm::Linear: return make_mul(make_literal(k.rate), make_var('w'));
        case NormalForm::Power: return make_pow(make_var('w'), k.n);
        case NormalForm::Pole: return make_pow(make_var('w'), -k.n);
        case NormalForm::Rational:
            return make_div(make_mul(make_literal(k.gamma), make_pow(make_var('w'), k.n)),
                            make_add(make_literal(1.0), make_pow(make_var('w'), k.n - 1)));
    }
    throw Error("corrupt normal form");
}

// Random points in the annulus 0.2R..0.9R, avoiding the excluded ray.
std::vector<cplx> domain_samples(const DomainSpec& dom, std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> ur(0.2, 0.9), ua(-M_PI, M_PI);
    std::vector<cplx> out;
    while (static_cast<int>(out.size()) < count) {
        double r = ur(rng) * dom.window_radius, a = ua(rng);
        if (dom.excluded_ray_angle) {
            double d = std::remainder(a - *dom.excluded_ray_angle, 2.0 * M_PI);
            if (std::abs(d) < 0.2) continue;
        }
        out.push_back(std::polar(r, a));
    }
    return out;
}

void validate_coupled(const SystemSpec& spec, CoupledSpec& c) {
    if (std::abs(c.alpha) == 0.0 || std::abs(c.beta) == 0.0)
        throw FamilyInvariantViolated("SF3 requires nonzero alpha and beta");
    std::mt19937_64 rng(spec.seed);
    auto samples = domain_samples(spec.domain, rng, 20);
    for (cplx w : samples) {
        cplx gp, gv;
        try {
            gp = c.big_g_deriv(w);
            gv = eval_expr(*c.g, 0.0, w);
        } catch (const EvalPole&) {
            continue;
        }
        if (std::abs(gp * gv - 1.0) > 1e-8)
            throw FamilyInvariantViolated("G' * g differs from 1 on the declared domain");
    }
    // f must be alpha z + beta G(w)
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (cplx w : samples) {
        cplx z(u(rng), u(rng));
        cplx fv;
        cplx gw;
        try {
            fv = eval_expr(*spec.f, z, w);
            gw = c.big_g(w);
        } catch (const EvalPole&) {
            continue;
        }
        cplx expect = c.alpha * z + c.beta * gw;
        if (std::abs(fv - expect) > 1e-8 * std::max(1.0, std::abs(expect)))
            throw FamilyInvariantViolated("f does not match alpha z + beta G(w) on samples");
    }
}

}  // namespace

SystemSpec build_system(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("system spec must be a JSON object");

    SystemSpec spec;
    if (!j.contains("family")) throw SchemaError("missing 'family'");
    spec.family = parse_family(j.at("family").get<std::string>());

    if (j.contains("seed")) spec.seed = j.at("seed").get<unsigned long long>();

    if (j.contains("domain")) {
        const json& d = j.at("domain");
        if (d.contains("window_radius")) spec.domain.window_radius = d.at("window_radius").get<double>();
        if (spec.domain.window_radius <= 0.0) throw SchemaError("window_radius must be positive");
        if (d.contains("excluded_ray_angle") && !d.at("excluded_ray_angle").is_null())
            spec.domain.excluded_ray_angle = d.at("excluded_ray_angle").get<double>();
    }

    if (j.contains("eps")) {
        if (!j.at("eps").is_array()) throw SchemaError("'eps' must be a list");
        for (const auto& e : j.at("eps")) {
            double v = e.get<double>();
            if (!(v > 0.0) || v > 1.0)
                throw SchemaError("eps values must lie in (0, 1]");
            spec.eps.push_back(v);
        }
    }

    if (j.contains("f")) spec.f = parse_expr(j.at("f").get<std::string>());
    if (j.contains("g")) spec.g = parse_expr(j.at("g").get<std::string>());

    const json params = j.contains("params") ? j.at("params") : json::object();

    switch (spec.family) {
        case Family::General:
            if (!spec.f || !spec.g) throw SchemaError("general family requires 'f' and 'g'");
            break;

        case Family::SF2Series: {
            if (!params.contains("alpha") || !params.contains("beta"))
                throw SchemaError("SF2 requires params.alpha and params.beta");
            int order = params.contains("order") ? params.at("order").get<int>() : 16;
            Series2 ft = parse_tail(params.contains("ftilde") ? params.at("ftilde") : json(),
                                    order, "ftilde");
            Series2 gt = parse_tail(params.contains("gtilde") ? params.at("gtilde") : json(),
                                    order, "gtilde");
            spec.sf2.emplace(jcplx(params.at("alpha"), "alpha"), jcplx(params.at("beta"), "beta"),
                             std::move(ft), std::move(gt));
            break;
        }

        case Family::SF3Coupled: {
            if (!spec.f || !spec.g) throw SchemaError("SF3 requires 'f' and 'g'");
            json gref = params.contains("G") ? params.at("G")
                        : (j.contains("G") ? j.at("G") : json());
            if (gref.is_null()) throw SchemaError("SF3 requires a primitive 'G'");
            CoupledSpec c;
            c.g = spec.g;
            if (gref.is_string()) {
                ExprPtr G = parse_expr(gref.get<std::string>());
                ExprPtr Gp = diff_expr(G, 'w');
                c.big_g = [G](cplx w) { return eval_expr(*G, 0.0, w); };
                c.big_g_deriv = [Gp](cplx w) { return eval_expr(*Gp, 0.0, w); };
                c.g_label = to_string(*G);
            } else {
                NormalFormKind kind = parse_normal_form(gref);
                cplx scale = gref.contains("scale") ? jcplx(gref.at("scale"), "scale") : cplx(1.0);
                Primitive prim = primitive_catalog(kind, scale, spec.domain.excluded_ray_angle);
                c.big_g = [prim](cplx w) { return prim.eval(w); };
                c.big_g_deriv = [prim](cplx w) { return prim.deriv(w); };
                c.g_label = kind.label();
            }
            // alpha from df/dz (constant for SF3), beta from (f - alpha z)/G.
            if (params.contains("alpha")) {
                c.alpha = jcplx(params.at("alpha"), "alpha");
            } else {
                ExprPtr fz = diff_expr(spec.f, 'z');
                c.alpha = eval_expr(*fz, 0.3, 0.4);
            }
            if (params.contains("beta")) {
                c.beta = jcplx(params.at("beta"), "beta");
            } else {
                std::mt19937_64 rng(spec.seed + 7);
                for (cplx w : domain_samples(spec.domain, rng, 8)) {
                    cplx gw = c.big_g(w);
                    if (std::abs(gw) < 1e-6) continue;
                    c.beta = (eval_expr(*spec.f, 0.0, w)) / gw;
                    break;
                }
            }
            validate_coupled(spec, c);
            spec.coupled = std::move(c);
            break;
        }

        case Family::SF4LinearFast: {
            if (params.contains("matrix")) {
                const json& m = params.at("matrix");
                LinearLinearSpec ls{jcplx(m.at("a"), "a"), jcplx(m.at("b"), "b"),
                                    jcplx(m.at("c"), "c"), jcplx(m.at("d"), "d")};
                if (std::abs(ls.a) == 0.0)
                    throw FamilyInvariantViolated("linear-linear requires a != 0");
                spec.linear2 = ls;
                spec.f = make_add(make_mul(make_literal(ls.a), make_var('z')),
                                  make_mul(make_literal(ls.b), make_var('w')));
                spec.g = make_add(make_mul(make_literal(ls.c), make_var('z')),
                                  make_mul(make_literal(ls.d), make_var('w')));
            } else {
                if (!params.contains("alpha") || !params.contains("beta") || !params.contains("g"))
                    throw SchemaError("SF4 requires params.alpha, params.beta, params.g");
                SF4Spec s{jcplx(params.at("alpha"), "alpha"), jcplx(params.at("beta"), "beta"),
                          parse_normal_form(params.at("g"))};
                if (std::abs(s.alpha) == 0.0)
                    throw FamilyInvariantViolated("SF4 requires alpha != 0");
                spec.sf4 = s;
                spec.f = make_add(make_mul(make_literal(s.alpha), make_var('z')),
                                  make_mul(make_literal(s.beta), make_var('w')));
                spec.g = normal_form_expr(s.g);
                if (s.g.kind == NormalForm::Linear)
                    spec.linear2 = LinearLinearSpec{s.alpha, s.beta, 0.0, s.g.rate};
            }
            break;
        }

        case Family::Uncoupled: {
            if (!spec.f || !spec.g) throw SchemaError("uncoupled family requires 'f' and 'g'");
            if (uses_var(*spec.f, 'w'))
                throw FamilyInvariantViolated("uncoupled family: f must depend on z only");
            if (uses_var(*spec.g, 'z'))
                throw FamilyInvariantViolated("uncoupled family: g must depend on w only");
            break;
        }
    }
    return spec;
}

SystemSpec build_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return build_system(ss.str());
}

// ----------------------------------------------------------------------
// Critical manifold
// ----------------------------------------------------------------------

CriticalManifoldSample critical_manifold_solve(const SystemSpec& sys,
                                               const std::vector<cplx>& w_samples,
                                               std::optional<cplx> seed) {
    if (!sys.f) throw SchemaError("system has no closed-form f to solve");
    ExprPtr fz = diff_expr(sys.f, 'z');

    std::vector<cplx> seeds;
    if (seed) {
        seeds.push_back(*seed);
    } else {
        seeds.push_back(0.0);
        for (int k = 0; k < 8; ++k) seeds.push_back(std::polar(1.0, 2.0 * M_PI * k / 8.0));
    }

    CriticalManifoldSample out;
    for (cplx w : w_samples) {
        std::vector<cplx> roots;
        for (cplx z0 : seeds) {
            cplx z = z0;
            bool ok = false;
            try {
                for (int it = 0; it < 100; ++it) {
                    cplx fv = eval_expr(*sys.f, z, w);
                    cplx dv = eval_expr(*fz, z, w);
                    if (std::abs(dv) < 1e-300) break;
                    cplx step = fv / dv;
                    z -= step;
                    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) ok = std::abs(eval_expr(*sys.f, z, w)) < 1e-12;
            } catch (const EvalPole&) {
                continue;
            }
            if (!ok) continue;
            if (std::abs(eval_expr(*sys.f, z, w)) > 1e-10) continue;
            roots.push_back(z);
        }
        if (roots.empty()) {
            std::ostringstream os;
            os << "Newton failed to locate a root of f(., w) at w = (" << w.real() << ", "
               << w.imag() << ")";
            throw NewtonDivergence(os.str());
        }
        for (std::size_t i = 1; i < roots.size(); ++i)
            if (std::abs(roots[i] - roots[0]) > 1e-6 * (1.0 + std::abs(roots[0])))
                out.multiple_roots = true;
        cplx z = roots[0];
        cplx dv = eval_expr(*fz, z, w);
        if (std::abs(dv) < 1e-10) {
            std::ostringstream os;
            os << "degenerate root of f(., w): |df/dz| = " << std::abs(dv) << " at w = ("
               << w.real() << ", " << w.imag() << ")";
            throw DegenerateRoot(os.str());
        }
        out.points.push_back({z, w, dv.real()});
    }
    return out;
}

std::function<std::array<double, 4>(const std::array<double, 4>&, double)>
real_embedding(const SystemSpec& sys) {
    if (!sys.f || !sys.g) throw SchemaError("system has no closed-form f, g to embed");
    ExprPtr f = sys.f, g = sys.g;
    return [f, g](const std::array<double, 4>& x, double eps) {
        cplx z(x[0], x[1]), w(x[2], x[3]);
        cplx fv = eval_expr(*f, z, w) / eps;
        cplx gv = eval_expr(*g, z, w);
        return std::array<double, 4>{fv.real(), fv.imag(), gv.real(), gv.imag()};
    };
}

// ----------------------------------------------------------------------
// Linear systems in eigencoordinates
// ----------------------------------------------------------------------

SF2FromLinear sf2_from_linear(const LinearLinearSpec& m, double eps, int order) {
    if (std::abs(m.a) == 0.0) throw FamilyInvariantViolated("linear system requires a != 0");
    cplx mu_slow, alpha_hat;
    if (m.c == cplx(0.0)) {
        mu_slow = m.d;   // exact eigenpair for triangular systems
        alpha_hat = m.a;
    } else {
        // Eigenvalues of [[a/eps, b/eps], [c, d]]; take the root of smaller
        // modulus (the slow one) via the product identity to avoid
        // cancellation.
        cplx tr = m.a / eps + m.d;
        cplx det = (m.a * m.d - m.b * m.c) / eps;
        cplx disc = std::sqrt(tr * tr - 4.0 * det);
        cplx big = (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) / 2.0
                                                                : (tr - disc) / 2.0;
        if (std::abs(big) == 0.0) throw DegenerateRoot("linear system has a nilpotent matrix");
        mu_slow = det / big;
        alpha_hat = m.a - eps * (-m.b / (m.a - eps * mu_slow)) * m.c;
    }
    cplx denom = m.a - eps * mu_slow;
    if (std::abs(denom) < 1e-14)
        throw DegenerateRoot("slow and fast eigenvalues collide; cannot form eigencoordinates");
    cplx lambda1 = -m.b / denom;
    SF2FromLinear out{SF2Spec(alpha_hat, mu_slow, Series2(order), Series2(order)), lambda1,
                      mu_slow, alpha_hat};
    return out;
}

}  // namespace hsf
