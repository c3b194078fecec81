// Command-line front end: ingest a JSON system spec, run the requested
// analysis, write plot-ready JSON/CSV reports.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hsf/briot_bouquet.hpp"
#include "hsf/dynamics.hpp"
#include "hsf/errors.hpp"
#include "hsf/json_io.hpp"
#include "hsf/manifolds.hpp"
#include "hsf/systems.hpp"
#include "hsf/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hsf;

namespace {

constexpr const char* kSchemaId = "hsf/report/v1";

struct Options {
    std::string spec_path;
    std::string out_dir = ".";
    int order = 24;
    std::vector<double> eps;
    double tol = 1e-9;
    unsigned long long seed = 12345;
    std::string format = "json";
    // integrate/verify extras
    std::string check = "invariance";
    std::vector<double> ic;
    double span = 2.0;
    double window = 1.0;
    double margin = 0.0;
    double offset = 1.0;
    double rtol = 1e-10;
    double atol = 1e-12;
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw ValidationError("output path is not writable: " + p.string());
    out << text;
}

void emit(const Options& opt, const std::string& name, json payload) {
    payload["schema"] = kSchemaId;
    payload["seed"] = opt.seed;
    fs::create_directories(opt.out_dir);
    fs::path p = fs::path(opt.out_dir) / (name + ".json");
    write_file(p, payload.dump(2) + "\n");
    std::cout << "wrote " << p.string() << "\n";
}

std::vector<double> eps_or_default(const Options& opt, const SystemSpec& sys) {
    if (!opt.eps.empty()) return opt.eps;
    if (!sys.eps.empty()) return sys.eps;
    return {0.1};
}

std::vector<cplx> window_samples(double radius, unsigned long long seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(0.2, 0.9), ua(-M_PI, M_PI);
    std::vector<cplx> out;
    for (int i = 0; i < count; ++i) out.push_back(std::polar(ur(rng) * radius, ua(rng)));
    return out;
}

// ------------------------------------------------------------------
// Shape detection for general-family specs: f = alpha z + beta w with g one
// of the catalog fast fields makes the formal-series analysis available.
// ------------------------------------------------------------------

struct LinearFastShape {
    cplx alpha, beta;
    NormalFormKind g;
};

bool constant_on_samples(const std::function<cplx(cplx, cplx)>& fn, cplx& value,
                         unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    std::vector<cplx> vals;
    for (int i = 0; i < 12; ++i) {
        try {
            vals.push_back(fn(cplx(u(rng), u(rng)), cplx(u(rng), u(rng))));
        } catch (const EvalPole&) {
            continue;
        }
    }
    if (vals.size() < 6) return false;
    cplx mean(0.0);
    for (cplx v : vals) mean += v;
    mean /= double(vals.size());
    for (cplx v : vals)
        if (std::abs(v - mean) > 1e-9 * (1.0 + std::abs(mean))) return false;
    value = mean;
    return true;
}

std::optional<LinearFastShape> detect_linear_fast(const SystemSpec& sys) {
    if (!sys.f || !sys.g) return std::nullopt;
    ExprPtr fz = diff_expr(sys.f, 'z');
    ExprPtr fw = diff_expr(sys.f, 'w');
    cplx alpha, beta, origin;
    auto eval_fz = [&](cplx z, cplx w) { return eval_expr(*fz, z, w); };
    auto eval_fw = [&](cplx z, cplx w) { return eval_expr(*fw, z, w); };
    if (!constant_on_samples(eval_fz, alpha, sys.seed + 1)) return std::nullopt;
    if (!constant_on_samples(eval_fw, beta, sys.seed + 2)) return std::nullopt;
    try {
        origin = eval_expr(*sys.f, 0.0, 0.0);
    } catch (const EvalPole&) {
        return std::nullopt;
    }
    if (std::abs(origin) > 1e-12 || std::abs(alpha) < 1e-12) return std::nullopt;
    if (uses_var(*sys.g, 'z')) return std::nullopt;

    ExprPtr g = sys.g;
    auto ratio_const = [&](const std::function<cplx(cplx)>& model, cplx& scale) {
        auto fn = [&](cplx, cplx w) { return eval_expr(*g, 0.0, w) / model(w); };
        return constant_on_samples(fn, scale, sys.seed + 3);
    };
    cplx s;
    if (ratio_const([](cplx w) { return w; }, s))
        return LinearFastShape{alpha, beta, NormalFormKind::linear(s)};
    for (int n = 2; n <= 8; ++n)
        if (ratio_const([n](cplx w) { return std::pow(w, n); }, s) && std::abs(s - 1.0) < 1e-9)
            return LinearFastShape{alpha, beta, NormalFormKind::power(n)};
    for (int n = 1; n <= 8; ++n)
        if (ratio_const([n](cplx w) { return 1.0 / std::pow(w, n); }, s) &&
            std::abs(s - 1.0) < 1e-9)
            return LinearFastShape{alpha, beta, NormalFormKind::pole(n)};
    for (int n = 2; n <= 8; ++n)
        if (ratio_const([n](cplx w) { return std::pow(w, n) / (1.0 + std::pow(w, n - 1)); }, s))
            return LinearFastShape{alpha, beta, NormalFormKind::rational(s, n)};
    return std::nullopt;
}

json formal_family_json(const SF4Spec& sf4, const std::vector<double>& grid, int order) {
    json out = json::array();
    for (double eps : grid) {
        FormalGraphResult r = formal_graph_series(sf4, eps, order);
        json j = to_json(r);
        if (r.manifold.verdict && r.manifold.verdict->verdict == Verdict::Divergent)
            j["graph_manifold"] = "divergent formal series: no holomorphic graph manifold";
        out.push_back(std::move(j));
    }
    return out;
}

// ------------------------------------------------------------------
// Subcommands
// ------------------------------------------------------------------

int cmd_analyze(const Options& opt) {
    SystemSpec sys = build_system_file(opt.spec_path);
    std::vector<double> grid = eps_or_default(opt, sys);
    json rep{{"command", "analyze"}, {"family", family_label(sys.family)}};

    auto add_hyperbolicity = [&](const SystemSpec& s) {
        auto ws = window_samples(s.domain.window_radius, opt.seed, 16);
        try {
            rep["hyperbolicity"] = to_json(normal_hyperbolicity_check(s, ws));
        } catch (const NumericalError& e) {
            rep["hyperbolicity"] = json{{"error", e.what()}};
        }
    };

    switch (sys.family) {
        case Family::SF2Series: {
            rep["persistence"] = to_json(persistence_report(*sys.sf2, grid, opt.order));
            rep["alpha_margin"] = sys.sf2->alpha.real();
            json manifolds = json::array();
            for (double eps : grid) {
                ManifoldSeries m = fenichel_series(*sys.sf2, eps, opt.order);
                manifolds.push_back(to_json(m));
            }
            rep["invariant_manifolds"] = std::move(manifolds);
            break;
        }
        case Family::SF4LinearFast: {
            if (sys.linear2) {
                rep["persistence"] = to_json(persistence_report(*sys.linear2, grid));
            } else if (sys.sf4 && sys.sf4->g.kind == NormalForm::Pole) {
                rep["persistence"] = to_json(persistence_report(*sys.sf4, grid, opt.order));
            }
            if (sys.sf4)
                rep["formal_series"] = formal_family_json(*sys.sf4, grid, opt.order);
            else if (sys.linear2) {
                json arr = json::array();
                for (double eps : grid)
                    arr.push_back(to_json(formal_graph_series(*sys.linear2, eps, opt.order)));
                rep["formal_series"] = std::move(arr);
            }
            add_hyperbolicity(sys);
            break;
        }
        case Family::SF3Coupled: {
            add_hyperbolicity(sys);
            json forms = json::array();
            for (double eps : grid) {
                GraphManifold m = coupled_manifold(*sys.coupled, eps);
                forms.push_back(json{{"eps", eps},
                                     {"h_at_1", to_json(m.h(cplx(1, 0)))},
                                     {"hausdorff_constant",
                                      std::abs(sys.coupled->beta /
                                               (sys.coupled->alpha * sys.coupled->alpha))}});
            }
            rep["coupled_manifold"] = std::move(forms);
            rep["attraction_available"] =
                std::abs(sys.coupled->alpha.real()) <
                1e-12 * std::max(1.0, std::abs(sys.coupled->alpha));
            break;
        }
        case Family::Uncoupled: {
            rep["persistence"] = to_json(persistence_report_uncoupled(sys, cplx(0, 0), grid));
            add_hyperbolicity(sys);
            break;
        }
        case Family::General: {
            if (auto shape = detect_linear_fast(sys)) {
                SF4Spec sf4{shape->alpha, shape->beta, shape->g};
                rep["detected_shape"] =
                    json{{"alpha", to_json(sf4.alpha)}, {"beta", to_json(sf4.beta)},
                         {"g", sf4.g.label()}};
                rep["formal_series"] = formal_family_json(sf4, grid, opt.order);
                if (sf4.g.kind == NormalForm::Pole || sf4.g.kind == NormalForm::Linear)
                    rep["persistence"] = to_json(persistence_report(sf4, grid, opt.order));
            }
            add_hyperbolicity(sys);
            break;
        }
    }
    emit(opt, "analyze", std::move(rep));
    return 0;
}

int cmd_series(const Options& opt) {
    SystemSpec sys = build_system_file(opt.spec_path);
    std::vector<double> grid = eps_or_default(opt, sys);
    json rep{{"command", "series"}, {"family", family_label(sys.family)}};
    bool numerical_failure = false;

    if (sys.family == Family::SF2Series) {
        json arr = json::array();
        for (double eps : grid) {
            json entry{{"eps", eps}};
            try {
                ManifoldSeries m = fenichel_series(*sys.sf2, eps, opt.order);
                entry["manifold"] = to_json(m);
                try {
                    entry["verdict"] = to_json(radius_estimate(m.h));
                } catch (const TooFewCoefficients&) {
                    // short truncations carry no verdict
                }
                entry["reduced_field"] = to_json(reduced_vector_field(*sys.sf2, opt.order));
                entry["slow_dynamics"] =
                    to_json(slow_dynamics_on_manifold(*sys.sf2, eps, opt.order));
            } catch (const NumericalError& e) {
                entry["error"] = e.what();
                numerical_failure = true;
            }
            arr.push_back(std::move(entry));
        }
        rep["series"] = std::move(arr);
    } else if (sys.sf4 || sys.linear2) {
        json arr = json::array();
        for (double eps : grid) {
            json entry{{"eps", eps}};
            try {
                FormalGraphResult r = sys.sf4 ? formal_graph_series(*sys.sf4, eps, opt.order)
                                              : formal_graph_series(*sys.linear2, eps, opt.order);
                entry["result"] = to_json(r);
            } catch (const NumericalError& e) {
                entry["error"] = e.what();
                numerical_failure = true;
            }
            arr.push_back(std::move(entry));
        }
        rep["series"] = std::move(arr);
    } else {
        throw ValidationError("series command supports SF2 and SF4 family specs");
    }
    emit(opt, "series", std::move(rep));
    return numerical_failure ? 3 : 0;
}

int cmd_integrate(const Options& opt) {
    SystemSpec sys = build_system_file(opt.spec_path);
    if (opt.ic.size() != 4)
        throw ValidationError("--ic expects four reals: reZ,imZ,reW,imW");
    double eps = eps_or_default(opt, sys).front();
    IntegrationControls ctl;
    ctl.rtol = opt.rtol;
    ctl.atol = opt.atol;
    Trajectory t = integrate_full(sys, eps, cplx(opt.ic[0], opt.ic[1]),
                                  cplx(opt.ic[2], opt.ic[3]), opt.span, ctl);
    fs::create_directories(opt.out_dir);
    if (opt.format == "csv") {
        fs::path p = fs::path(opt.out_dir) / "trajectory.csv";
        write_file(p, trajectory_csv(t));
        std::cout << "wrote " << p.string() << "\n";
    } else {
        json rep{{"command", "integrate"}, {"trajectory", to_json(t)}};
        emit(opt, "trajectory", std::move(rep));
    }
    return t.termination == Termination::Completed ? 0 : 3;
}

int cmd_verify(const Options& opt) {
    SystemSpec sys = build_system_file(opt.spec_path);
    std::vector<double> grid = eps_or_default(opt, sys);
    json rep{{"command", "verify"}, {"check", opt.check}};

    if (opt.check == "invariance") {
        if (!sys.coupled) throw ValidationError("invariance check needs an SF3 spec");
        double eps = grid.front();
        GraphManifold m = coupled_manifold(*sys.coupled, eps);
        cplx w0 = opt.ic.size() == 4 ? cplx(opt.ic[2], opt.ic[3]) : cplx(1, 0);
        cplx z0 = opt.ic.size() == 4 ? cplx(opt.ic[0], opt.ic[1]) : m.h(w0);
        IntegrationControls ctl;
        ctl.rtol = opt.rtol;
        ctl.atol = opt.atol;
        Trajectory t = integrate_full(sys, eps, z0, w0, opt.span, ctl);
        InvarianceResult r = invariance_residual(m, t);
        rep["eps"] = eps;
        rep["max_residual"] = r.max_residual;
        rep["samples"] = t.samples.size();
        emit(opt, "verify_invariance", std::move(rep));
        return 0;
    }

    if (opt.check == "hausdorff") {
        ScalingReport sr;
        if (sys.coupled) {
            CoupledSpec c = *sys.coupled;
            sr = hausdorff_scaling(
                [c](double eps) {
                    return std::make_pair(coupled_manifold(c, 0.0).h,
                                          coupled_manifold(c, eps).h);
                },
                grid, opt.window);
        } else if (sys.family == Family::Uncoupled) {
            // f = z^n, g = w^m: the level set G(w) = eps F(z) is the graph
            // z = [eps (m-1)/(n-1)]^{1/(n-1)} w^{(m-1)/(n-1)}
            ExprPtr fz = diff_expr(sys.f, 'z');
            ClassificationResult cf = classify_point(sys.f, cplx(0, 0));
            ClassificationResult cg = classify_point(sys.g, cplx(0, 0));
            if (cf.kind != PointKind::ZeroOfOrder && cg.kind != PointKind::ZeroOfOrder)
                throw UnsupportedFamily("hausdorff check needs power-law uncoupled fields");
            int n = cf.kind == PointKind::ZeroOfOrder ? cf.order : 1;
            int mm = cg.kind == PointKind::ZeroOfOrder ? cg.order : 1;
            if (n < 2 || (mm - 1) % (n - 1) != 0)
                throw UnsupportedFamily("graph exponent (m-1)/(n-1) must be an integer");
            int q = (mm - 1) / (n - 1);
            sr = hausdorff_scaling(
                [n, mm, q](double eps) {
                    std::function<cplx(cplx)> h0 = [](cplx) { return cplx(0.0); };
                    std::function<cplx(cplx)> he = [n, mm, q, eps](cplx w) {
                        cplx scale = std::pow(cplx(eps * (mm - 1) / double(n - 1), 0),
                                              1.0 / (n - 1));
                        return scale * std::pow(w, q);
                    };
                    return std::make_pair(h0, he);
                },
                grid, opt.window);
        } else {
            throw UnsupportedFamily("hausdorff check supports SF3 and uncoupled specs");
        }
        rep["scaling"] = to_json(sr);
        emit(opt, "verify_hausdorff", std::move(rep));
        if (opt.format == "csv") {
            std::string csv = "eps,distance\n";
            char buf[80];
            for (std::size_t i = 0; i < sr.eps_grid.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", sr.eps_grid[i],
                              sr.distances[i]);
                csv += buf;
            }
            write_file(fs::path(opt.out_dir) / "hausdorff.csv", csv);
        }
        return 0;
    }

    if (opt.check == "attraction") {
        if (!sys.coupled) throw ValidationError("attraction check needs an SF3 spec");
        json arr = json::array();
        for (double eps : grid) {
            GraphManifold m = coupled_manifold(*sys.coupled, eps);
            cplx w0 = opt.ic.size() == 4 ? cplx(opt.ic[2], opt.ic[3])
                                         : std::polar(1.0, M_PI / 4);
            cplx z0 = opt.ic.size() == 4 ? cplx(opt.ic[0], opt.ic[1]) : m.h(w0) + opt.offset;
            AttractionReport ar =
                attraction_report(*sys.coupled, eps, z0, w0, opt.span, opt.margin);
            arr.push_back(to_json(ar));
        }
        rep["attraction"] = std::move(arr);
        emit(opt, "verify_attraction", std::move(rep));
        return 0;
    }

    throw ValidationError("unknown check '" + opt.check + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invariant complex manifolds of holomorphic slow-fast systems"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--spec", opt.spec_path, "JSON system spec")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--order", opt.order, "series truncation order");
        sub->add_option("--eps", opt.eps, "epsilon grid")->delimiter(',');
        sub->add_option("--tol", opt.tol, "classification tolerance");
        sub->add_option("--seed", opt.seed, "seed for sampling");
        sub->add_option("--format", opt.format, "json|csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "persistence + hyperbolicity reports");
    add_common(analyze);

    CLI::App* series = app.add_subcommand("series", "manifold series and verdicts");
    add_common(series);

    CLI::App* integrate = app.add_subcommand("integrate", "integrate the full system");
    add_common(integrate);
    integrate->add_option("--ic", opt.ic, "initial condition reZ,imZ,reW,imW")
        ->delimiter(',');
    integrate->add_option("--span", opt.span, "time span");
    integrate->add_option("--rtol", opt.rtol, "relative tolerance");
    integrate->add_option("--atol", opt.atol, "absolute tolerance");

    CLI::App* verify = app.add_subcommand("verify", "invariance/hausdorff/attraction checks");
    add_common(verify);
    verify->add_option("--check", opt.check, "invariance|hausdorff|attraction")
        ->check(CLI::IsMember({"invariance", "hausdorff", "attraction"}));
    verify->add_option("--ic", opt.ic, "initial condition reZ,imZ,reW,imW")->delimiter(',');
    verify->add_option("--span", opt.span, "time span / arc length");
    verify->add_option("--window", opt.window, "sampling window radius");
    verify->add_option("--margin", opt.margin, "attraction margin eta (0 = auto)");
    verify->add_option("--offset", opt.offset, "off-manifold offset for attraction");
    verify->add_option("--rtol", opt.rtol, "relative tolerance");
    verify->add_option("--atol", opt.atol, "absolute tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(opt);
        if (app.got_subcommand(series)) return cmd_series(opt);
        if (app.got_subcommand(integrate)) return cmd_integrate(opt);
        if (app.got_subcommand(verify)) return cmd_verify(opt);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
