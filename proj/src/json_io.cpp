#include "hsf/json_io.hpp"

#include <cstdio>

namespace hsf {

using nlohmann::json;

json to_json(cplx v) { return json::array({v.real(), v.imag()}); }

json to_json(const Series1& s) {
    json coeffs = json::array();
    for (int k = 0; k <= s.order(); ++k) coeffs.push_back(to_json(s.coeff(k)));
    return json{{"var", std::string(1, s.var)}, {"order", s.order()}, {"coeffs", coeffs}};
}

json to_json(const ConvergenceVerdict& v) {
    const char* verdict = v.verdict == Verdict::Convergent
                              ? "convergent"
                              : (v.verdict == Verdict::Divergent ? "divergent" : "inconclusive");
    json j{{"verdict", verdict},
           {"method", v.method},
           {"window_used", v.window_used},
           {"large_radius", v.large_radius}};
    if (std::isinf(v.radius))
        j["radius"] = "inf";
    else
        j["radius"] = v.radius;
    return j;
}

json to_json(const ManifoldSeries& m) {
    json j{{"direction", m.direction == GraphDirection::WofZ ? "w-of-z" : "z-of-w"},
           {"series", to_json(m.h)},
           {"eps", m.eps},
           {"residual_norm", m.residual_norm},
           {"transformed_residual", m.transformed_residual},
           {"provenance", m.provenance == Provenance::BBPipeline
                              ? "bb-pipeline"
                              : (m.provenance == Provenance::Recurrence ? "recurrence"
                                                                        : "closed-form")},
           {"normally_hyperbolic", m.normally_hyperbolic},
           {"source", m.source}};
    if (m.overflow_at) j["overflow_at"] = *m.overflow_at;
    return j;
}

json to_json(const FormalGraphResult& r) {
    json j{{"family", graph_family_label(r.family)},
           {"eps", r.eps},
           {"recurrence", to_json(r.recurrence)},
           {"product_mismatch", r.product_mismatch},
           {"max_product_deviation", r.max_product_deviation}};
    if (r.product_formula) j["product_formula"] = to_json(*r.product_formula);
    if (r.manifold.verdict) j["verdict"] = to_json(*r.manifold.verdict);
    if (r.family == GraphFamily::LinearLinear) j["lambda1"] = to_json(r.lambda1);
    return j;
}

json to_json(const Trajectory& t) {
    json samples = json::array();
    for (const auto& s : t.samples)
        samples.push_back(json::array({s.tau, s.z.real(), s.z.imag(), s.w.real(), s.w.imag()}));
    const char* term = "completed";
    switch (t.termination) {
        case Termination::Completed: term = "completed"; break;
        case Termination::StepUnderflow: term = "step-underflow"; break;
        case Termination::MaxSteps: term = "max-steps"; break;
        case Termination::EvalPoleHit: term = "eval-pole"; break;
        case Termination::RegionExit: term = "region-exit"; break;
    }
    return json{{"timescale", t.timescale == Timescale::Fast ? "fast" : "slow"},
                {"eps", t.eps},
                {"time_rotation", t.time_rotation},
                {"samples", samples},
                {"accepted_steps", t.stats.accepted},
                {"rejected_steps", t.stats.rejected},
                {"min_step", t.stats.min_step},
                {"termination", term}};
}

json to_json(const ClassificationResult& c) {
    json j{{"kind", c.label()}, {"witness", to_json(c.witness)}};
    if (c.kind == PointKind::ZeroOfOrder || c.kind == PointKind::PoleOfOrder)
        j["order"] = c.order;
    return j;
}

json to_json(const ScalingReport& r) {
    return json{{"eps_grid", r.eps_grid},
                {"distances", r.distances},
                {"slope", r.slope},
                {"constant", r.constant},
                {"r_squared", r.r_squared},
                {"window_radius", r.window_radius},
                {"points_per_set", r.points_per_set}};
}

json to_json(const AttractionReport& r) {
    json samples = json::array();
    for (const auto& a : r.samples)
        samples.push_back(json{{"s", a.s},
                               {"abs_v", a.abs_v},
                               {"margin", a.margin},
                               {"in_region", a.in_region},
                               {"measured_log_v", a.measured_log_v},
                               {"predicted_log_v", a.predicted_log_v}});
    const char* term = r.termination == Termination::RegionExit ? "region-exit" : "completed";
    return json{{"eps", r.eps},
                {"eta", r.eta},
                {"alpha2", r.alpha2},
                {"time_rotation", r.time_rotation},
                {"samples", samples},
                {"retained", r.retained},
                {"max_rel_log_deviation", r.max_rel_log_deviation},
                {"max_abs_v", r.max_abs_v},
                {"degenerate_on_manifold", r.degenerate_on_manifold},
                {"termination", term}};
}

json to_json(const HyperbolicityReport& r) {
    json pts = json::array();
    for (const auto& p : r.sample.points)
        pts.push_back(json{{"z", to_json(p.z)}, {"w", to_json(p.w)}, {"margin", p.margin}});
    return json{{"min_margin", r.min_margin},
                {"sign_pattern", r.sign_pattern},
                {"hyperbolic", r.hyperbolic},
                {"multiple_roots", r.sample.multiple_roots},
                {"points", pts}};
}

json to_json(const PersistenceReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back(json{
            {"eps", e.eps}, {"perturbed", to_json(e.perturbed)}, {"same_kind", e.same_kind}});
    json j{{"family", r.family}, {"reduced", to_json(r.reduced)}, {"entries", entries}};
    if (r.hypothesis_H) j["hypothesis_H"] = *r.hypothesis_H;
    if (r.persistent) j["persistent"] = *r.persistent;
    if (r.ju) j["j_unstable"] = *r.ju;
    if (r.js) j["j_stable"] = *r.js;
    if (r.ku) j["k_unstable"] = *r.ku;
    if (r.ks) j["k_stable"] = *r.ks;
    if (r.global_verdict) j["global_verdict"] = *r.global_verdict;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

std::string trajectory_csv(const Trajectory& t) {
    std::string out = "tau,re_z,im_z,re_w,im_w\n";
    char buf[160];
    for (const auto& s : t.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.tau, s.z.real(),
                      s.z.imag(), s.w.real(), s.w.imag());
        out += buf;
    }
    return out;
}

}  // namespace hsf
