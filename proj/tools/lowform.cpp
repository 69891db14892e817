// lowform: detect few-linear-form structure in polynomials and optimize through it.
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "lowform/error.hpp"
#include "lowform/generator.hpp"

#ifndef LOWFORM_VERSION
#define LOWFORM_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace lowform;
using io::json;

namespace {

enum Exit { ok = 0, failure = 1, parse_error = 2, infeasible = 3, not_converged = 4 };

struct Globals {
    std::uint64_t seed = 0;
    double rank_tol = kDefaultRankTol;
    double tol = 1e-9;
    std::size_t starts = 32;
    std::size_t max_iter = 500;
    fs::path out = ".";
};

// A command's result: report contents plus the exit code it implies.
struct Outcome {
    json report;
    int code = Exit::ok;
};

class Run {
public:
    Run(std::string command, const Globals& g) : command_(std::move(command)), g_(g) {}

    json input(const fs::path& path) {
        inputs_.push_back({{"path", path.string()}, {"fnv1a64", io::content_hash(path)}});
        return io::read_json(path);
    }

    SolveOptions solve_options() const {
        SolveOptions o;
        o.starts = g_.starts;
        o.max_iter = g_.max_iter;
        o.tol = g_.tol;
        o.seed = g_.seed;
        return o;
    }

    const Globals& globals() const { return g_; }

    void write(const std::string& name, const json& j) const { io::write_json(g_.out / name, j); }

    // Every emitted file set ends with the manifest.
    void finish(const std::vector<std::string>& outputs) const {
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write("manifest.json", {{"command", command_},
                                {"version", LOWFORM_VERSION},
                                {"inputs", inputs_},
                                {"outputs", outputs},
                                {"seed", g_.seed},
                                {"tolerances", {{"rank_tol", g_.rank_tol}, {"tol", g_.tol}}},
                                {"starts", g_.starts},
                                {"max_iter", g_.max_iter},
                                {"wall_time_s", seconds}});
    }

private:
    std::string command_;
    Globals g_;
    json inputs_ = json::array();
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Accepts a bare polynomial or an object holding one under h, g, f or poly.
Polynomial load_polynomial(Run& run, const fs::path& path) {
    const json j = run.input(path);
    if (j.is_object() && j.contains("num_vars")) return io::polynomial_from_json(j);
    for (const char* key : {"h", "g", "f", "poly"})
        if (j.is_object() && j.contains(key) && j.at(key).is_object() && j.at(key).contains("num_vars"))
            return io::polynomial_from_json(j.at(key));
    throw ParseError(path.string() + ": no polynomial found");
}

int status_code(SolveStatus s) { return s == SolveStatus::converged ? Exit::ok : Exit::not_converged; }

DetectionReport run_detection(const Polynomial& h, const std::string& method, const Globals& g, std::size_t max_k) {
    if (method == "randomized") return detect_randomized(h, g.seed, g.rank_tol, max_k);
    return detect_exact(h, g.rank_tol);
}

Polytope load_polytope(Run& run, const std::string& a_path, const std::string& b_path) {
    if (a_path.empty() || b_path.empty()) throw ParseError("--A and --b are required for this domain");
    Polytope poly{io::matrix_from_json(run.input(a_path)), io::vector_from_json(run.input(b_path))};
    if (poly.A.rows() != poly.b.size()) throw ParseError("A and b disagree on the number of rows");
    return poly;
}

json cut_loop_json(const CutLoopResult& r, const Vector& b) {
    return {{"rho", r.rho},
            {"X_star", r.x_star},
            {"cuts", io::to_json(r.cuts, b)},
            {"iterations", r.iterations},
            {"status", std::string(to_string(r.status))},
            {"bounds", r.bounds},
            {"taus", r.taus},
            {"x", r.x}};
}

struct ApproxOptions {
    std::size_t m = 0;
    std::string path = "exact";
    int degree = 0;
    std::size_t samples = 100000;
};

json approx_json(const Polynomial& h, std::size_t m, const ApproxOptions& a, const SolveOptions& opts) {
    const SpectrumSplit split = split_spectrum(h, m);
    LiftedPolynomial fhat;
    if (a.path == "cubature") {
        const int degree = a.degree > 0 ? a.degree : std::max(h.degree(), 0);
        fhat = conditional_expectation_cubature(h, split, build_cubature(h.num_vars() - m, degree, opts.seed));
    } else {
        fhat = conditional_expectation_exact(h, split);
    }
    const QSolution q = solve_Q(fhat, opts);
    const L2Estimate l2 = l2_error(h, fhat, split, a.samples, opts.seed);
    double total = split.tail_sum();
    for (double v : split.lambda_head) total += std::max(v, 0.0);
    return {{"m", m},
            {"path", a.path},
            {"fhat", io::to_json(fhat)},
            {"split", io::to_json(split)},
            {"tail_ratio", total > 0.0 ? split.tail_sum() / total : 0.0},
            {"y_mass", y_mass(fhat)},
            {"rho", q.rho},
            {"rho_plus", q.rho_plus},
            {"rho_minus", q.rho_minus},
            {"point", q.point},
            {"status", std::string(to_string(q.status))},
            {"l2_error", l2.mean},
            {"l2_std_error", l2.std_error}};
}

// Ω as G·x ≤ c in full dimension, for direct solves.
Polyhedron full_dimensional(const std::string& domain, std::size_t n, const Polytope& poly) {
    Polyhedron region{Matrix(0, n), {}};
    auto add = [&](const Vector& row, double rhs) {
        Matrix rows(region.rows.rows() + 1, n);
        for (std::size_t i = 0; i < region.rows.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) rows(i, j) = region.rows(i, j);
        for (std::size_t j = 0; j < n; ++j) rows(region.rows.rows(), j) = row[j];
        region.rows = std::move(rows);
        region.rhs.push_back(rhs);
    };
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = -1.0;
        add(e, domain == "box" ? 1.0 : 0.0);
        if (domain == "box") {
            e[j] = 1.0;
            add(e, 1.0);
        }
    }
    if (domain != "box")
        for (std::size_t i = 0; i < poly.A.rows(); ++i) {
            const Vector a(poly.A.row(i).begin(), poly.A.row(i).end());
            add(a, poly.b[i]);
            add(scaled(-1.0, a), -poly.b[i]);
        }
    return region;
}

struct PipelineOptions {
    std::string domain = "sphere";
    std::string a_path, b_path;
    double residual_threshold = 1e-8;
    double tail_threshold = 1e-10;
    ApproxOptions approx;
};

Outcome pipeline(Run& run, const fs::path& input, const PipelineOptions& p) {
    const Polynomial h = load_polynomial(run, input);
    const std::size_t n = h.num_vars();
    const SolveOptions opts = run.solve_options();
    Polytope poly;
    if (p.domain == "polytope") poly = load_polytope(run, p.a_path, p.b_path);
    if (p.domain == "simplex") poly = {Matrix(1, n, 1.0), Vector{1.0}};

    Outcome out;
    json& r = out.report;
    const DetectionReport det = detect_exact(h, run.globals().rank_tol);
    double total = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < det.spectrum.size(); ++i) {
        total += std::max(det.spectrum[i], 0.0);
        if (i >= det.m) tail += std::max(det.spectrum[i], 0.0);
    }
    const double tail_ratio = total > 0.0 ? tail / total : 0.0;
    r["n"] = n;
    r["domain"] = p.domain;
    r["detection"] = io::to_json(det);
    r["tail_ratio"] = tail_ratio;

    std::optional<SparseForm> sf;
    if (det.m < n) {
        sf = extract_sparse_form(h, det.basis);
        const double residual = verify_sparse_form(h, *sf, 200, run.globals().seed);
        r["residual"] = residual;
        if (residual >= p.residual_threshold || tail_ratio >= p.tail_threshold) sf.reset();
    }

    if (sf) {
        r["m"] = det.m;
        r["sparse_form"] = io::to_json(*sf);
        if (p.domain == "sphere" || p.domain == "ball") {
            r["route"] = "exact/" + p.domain;
            const ReducedBallProblem prob = reduce_sphere(*sf);
            const SolveResult s = minimize_ball(prob.g, opts);
            r["reduced"] = {{"g", io::to_json(prob.g)}, {"L", io::to_json(prob.L)}, {"solve", io::to_json(s)}};
            r["rho"] = s.value;
            if (p.domain == "ball" || det.m < n) {
                const Vector x = p.domain == "sphere" ? lift_minimizer(prob, s.point) : lift_to_ball(prob, s.point);
                r["point"] = x;
                r["h_at_point"] = h.evaluate(x);
            }
            out.code = status_code(s.status);
        } else {
            r["route"] = "exact/polytope";
            CutLoopResult c;
            if (p.domain == "simplex") {
                c = reduce_simplex(*sf, opts);
            } else if (p.domain == "box") {
                c = reduce_box(*sf, opts);
            } else {
                CutLoopOptions co;
                co.inner = opts;
                c = cut_loop(*sf, poly, co);
            }
            r["cut_loop"] = cut_loop_json(c, poly.b);
            r["rho"] = c.rho;
            r["point"] = c.x;
            r["h_at_point"] = h.evaluate(c.x);
            if (c.status != CutLoopStatus::converged) out.code = Exit::not_converged;
        }
        return out;
    }

    // Not exactly sparse.
    std::size_t m = p.approx.m > 0 ? p.approx.m : choose_m(h);
    if ((p.domain == "sphere" || p.domain == "ball") && m >= 1 && m < n) {
        r["route"] = "approx";
        r["m"] = m;
        r["approx"] = approx_json(h, m, p.approx, opts);
        r["rho"] = r["approx"]["rho"];
        r["rho_plus"] = r["approx"]["rho_plus"];
        r["rho_minus"] = r["approx"]["rho_minus"];
        r["l2_error"] = r["approx"]["l2_error"];
        if (r["approx"]["status"] != "converged") out.code = Exit::not_converged;
        return out;
    }
    r["route"] = "direct/" + p.domain;
    r["m"] = n;
    SolveResult s;
    if (p.domain == "sphere") {
        s = minimize_sphere(h, opts);
    } else if (p.domain == "ball") {
        s = minimize_ball(h, opts);
    } else {
        if (p.domain == "polytope") check_polytope(poly);
        s = minimize_polytope(h, full_dimensional(p.domain, n, poly), opts);
    }
    r["solve"] = io::to_json(s);
    r["rho"] = s.value;
    r["point"] = s.point;
    out.code = status_code(s.status);
    return out;
}

int guarded(const std::string& command, const Globals& g, const std::function<Outcome(Run&)>& body) {
    Run run(command, g);
    try {
        Outcome o = body(run);
        run.write("report.json", o.report);
        run.finish({"report.json"});
        return o.code;
    } catch (const ParseError& e) {
        std::cerr << "lowform: parse error: " << e.what() << '\n';
        return Exit::parse_error;
    } catch (const InfeasibleError& e) {
        std::cerr << "lowform: infeasible: " << e.what() << '\n';
        return Exit::infeasible;
    } catch (const ConvergenceError& e) {
        std::cerr << "lowform: did not converge: " << e.what() << '\n';
        run.write("report.json", {{"command", command}, {"error", e.what()}, {"status", "not_converged"}});
        run.finish({"report.json"});
        return Exit::not_converged;
    } catch (const std::exception& e) {
        std::cerr << "lowform: " << e.what() << '\n';
        return Exit::failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect and exploit few-linear-form structure in polynomial optimization"};
    app.set_version_flag("--version", std::string(LOWFORM_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--rank-tol", g.rank_tol, "Relative eigenvalue tolerance deciding m")->capture_default_str();
    app.add_option("--tol", g.tol, "Solver stationarity tolerance")->capture_default_str();
    app.add_option("--starts", g.starts, "Multi-start count")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--max-iter", g.max_iter, "Iterations per start")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();

    int code = Exit::ok;
    std::string input, method = "exact";
    std::size_t max_k = 0;

    auto* detect = app.add_subcommand("detect", "Find m and a basis of the gradient subspace");
    detect->add_option("--input", input, "Polynomial h (JSON)")->required();
    detect->add_option("--method", method)->check(CLI::IsMember({"exact", "randomized"}))->capture_default_str();
    detect->add_option("--max-k", max_k, "Sample cap for the randomized method (0 = n+2)");
    detect->callback([&] {
        code = guarded("detect", g, [&](Run& run) {
            return Outcome{io::to_json(run_detection(load_polynomial(run, input), method, g, max_k))};
        });
    });

    auto* extract = app.add_subcommand("extract", "Write h as f(ellᵀx)");
    extract->add_option("--input", input, "Polynomial h (JSON)")->required();
    extract->add_option("--method", method)->check(CLI::IsMember({"exact", "randomized"}))->capture_default_str();
    extract->callback([&] {
        code = guarded("extract", g, [&](Run& run) {
            const Polynomial h = load_polynomial(run, input);
            const DetectionReport det = run_detection(h, method, g, 0);
            const SparseForm sf = extract_sparse_form(h, det.basis);
            json r = io::to_json(sf);
            r["m"] = det.m;
            r["residual"] = verify_sparse_form(h, sf, 200, g.seed);
            return Outcome{r};
        });
    });

    std::string sparse;
    auto* rsphere = app.add_subcommand("reduce-sphere", "Reduce min over the sphere to the m-ball");
    rsphere->add_option("--sparse", sparse, "Sparse form {f, ell} (JSON)")->required();
    rsphere->callback([&] {
        code = guarded("reduce-sphere", g, [&](Run& run) {
            const ReducedBallProblem prob = reduce_sphere(io::sparse_form_from_json(run.input(sparse)));
            return Outcome{{{"g", io::to_json(prob.g)}, {"L", io::to_json(prob.L)}}};
        });
    });

    std::string a_path, b_path, preset = "none";
    std::size_t max_cuts = 50;
    auto* rpoly = app.add_subcommand("reduce-polytope", "Reduce min over {x ≥ 0 : Ax = b} by Farkas cuts");
    rpoly->add_option("--sparse", sparse, "Sparse form {f, ell} (JSON)")->required();
    rpoly->add_option("--A", a_path, "Constraint matrix (JSON rows)");
    rpoly->add_option("--b", b_path, "Right-hand side (JSON array)");
    rpoly->add_option("--preset", preset)->check(CLI::IsMember({"none", "simplex", "box"}))->capture_default_str();
    rpoly->add_option("--max-cuts", max_cuts, "Iteration cap of the cut loop")->capture_default_str();
    rpoly->callback([&] {
        code = guarded("reduce-polytope", g, [&](Run& run) {
            const SparseForm sf = io::sparse_form_from_json(run.input(sparse));
            CutLoopResult r;
            Vector b;
            if (preset == "simplex") {
                r = reduce_simplex(sf, run.solve_options());
                b = {1.0};
            } else if (preset == "box") {
                r = reduce_box(sf, run.solve_options());
            } else {
                const Polytope poly = load_polytope(run, a_path, b_path);
                CutLoopOptions o;
                o.inner = run.solve_options();
                o.max_iter = max_cuts;
                r = cut_loop(sf, poly, o);
                b = poly.b;
            }
            return Outcome{cut_loop_json(r, b),
                           r.status == CutLoopStatus::converged ? Exit::ok : Exit::not_converged};
        });
    });

    ApproxOptions ao;
    auto* approx = app.add_subcommand("approx", "Conditional-expectation surrogate and problem Q");
    approx->add_option("--input", input, "Polynomial h (JSON)")->required();
    approx->add_option("--m", ao.m, "Number of leading directions (0 = spectral-gap choice)");
    approx->add_option("--path", ao.path)->check(CLI::IsMember({"exact", "cubature"}))->capture_default_str();
    approx->add_option("--degree", ao.degree, "Cubature degree (0 = degree of h)");
    approx->add_option("--samples", ao.samples, "Monte Carlo samples for the L2 error")->capture_default_str();
    approx->callback([&] {
        code = guarded("approx", g, [&](Run& run) {
            const Polynomial h = load_polynomial(run, input);
            const std::size_t m = ao.m > 0 ? ao.m : choose_m(h);
            if (m < 1 || m >= h.num_vars())
                throw DimensionError("approx: need 1 <= m < n, spectral gap gave m = " + std::to_string(m));
            json r = approx_json(h, m, ao, run.solve_options());
            const int c = r["status"] == "converged" ? Exit::ok : Exit::not_converged;
            return Outcome{r, c};
        });
    });

    std::string objective, domain = "sphere";
    auto* solve = app.add_subcommand("solve", "Minimize a polynomial over the ball, sphere or a cut polyhedron");
    solve->add_option("--objective", objective, "Polynomial (JSON)")->required();
    solve->add_option("--domain", domain, "ball, sphere, or a {G, c} JSON file")->capture_default_str();
    solve->callback([&] {
        code = guarded("solve", g, [&](Run& run) {
            const Polynomial p = load_polynomial(run, objective);
            SolveResult r;
            if (domain == "ball") {
                r = minimize_ball(p, run.solve_options());
            } else if (domain == "sphere") {
                r = minimize_sphere(p, run.solve_options());
            } else {
                r = minimize_polytope(p, io::polyhedron_from_json(run.input(domain)), run.solve_options());
            }
            return Outcome{io::to_json(r), status_code(r.status)};
        });
    });

    PipelineOptions po;
    auto* pipe = app.add_subcommand("pipeline", "Detect, then reduce exactly or approximately, then solve");
    pipe->add_option("--input", input, "Polynomial h (JSON)")->required();
    pipe->add_option("--domain", po.domain)
        ->check(CLI::IsMember({"sphere", "ball", "simplex", "box", "polytope"}))
        ->capture_default_str();
    pipe->add_option("--A", po.a_path, "Constraint matrix for --domain polytope");
    pipe->add_option("--b", po.b_path, "Right-hand side for --domain polytope");
    pipe->add_option("--residual-threshold", po.residual_threshold)->capture_default_str();
    pipe->add_option("--tail-threshold", po.tail_threshold)->capture_default_str();
    pipe->add_option("--m", po.approx.m, "Approximate path: number of directions (0 = spectral gap)");
    pipe->add_option("--path", po.approx.path)->check(CLI::IsMember({"exact", "cubature"}))->capture_default_str();
    pipe->add_option("--samples", po.approx.samples)->capture_default_str();
    pipe->callback([&] { code = guarded("pipeline", g, [&](Run& run) { return pipeline(run, input, po); }); });

    std::size_t gn = 0, gm = 0;
    int gdeg = 3;
    double geps = 0.0;
    bool raw_forms = false;
    auto* gen = app.add_subcommand("gen", "Write a random instance h = f0(ell0ᵀx) + eps·g0");
    gen->add_option("--n", gn)->required()->check(CLI::PositiveNumber);
    gen->add_option("--m", gm)->required();
    gen->add_option("--degree", gdeg)->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--epsilon", geps)->capture_default_str();
    gen->add_flag("--raw-forms", raw_forms, "Keep ell0 Gaussian instead of orthonormalizing");
    gen->callback([&] {
        Run run("gen", g);
        try {
            const GeneratedInstance inst = generate_instance(g.seed, gn, gm, gdeg, geps, !raw_forms);
            run.write("h.json", io::to_json(inst.h));
            run.write("truth.json", {{"f0", io::to_json(inst.f0)},
                                     {"ell0", io::to_json(inst.ell0)},
                                     {"g0", io::to_json(inst.g0)},
                                     {"epsilon", inst.epsilon},
                                     {"seed", inst.seed},
                                     {"n", gn},
                                     {"m", gm},
                                     {"degree", gdeg}});
            run.finish({"h.json", "truth.json"});
        } catch (const std::exception& e) {
            std::cerr << "lowform: " << e.what() << '\n';
            code = Exit::failure;
        }
    });

    CLI11_PARSE(app, argc, argv);
    return code;
}
