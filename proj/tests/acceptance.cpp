// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--cli PATH --golden DIR --work DIR] [--only N]
//
// Criterion 8 compares CLI output against the checked-in golden reports when
// --cli and --golden are given.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>

#include "lowform/approx.hpp"
#include "lowform/ball_moments.hpp"
#include "lowform/detection.hpp"
#include "lowform/generator.hpp"
#include "lowform/lp.hpp"
#include "lowform/polytope_reduction.hpp"
#include "lowform/solvers.hpp"
#include "lowform/sphere_reduction.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lowform;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages and a running pass flag.
class Tally {
public:
    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass_ = false;
        if (++failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
    }
    Verdict verdict(const std::string& summary) const {
        std::string d = summary;
        if (!pass_) d += " | " + std::to_string(failures_) + " failure(s): " + notes_;
        return {pass_, d};
    }

private:
    bool pass_ = true;
    int failures_ = 0;
    std::string notes_;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SolveOptions solver(std::uint64_t seed, std::size_t starts = 24) {
    SolveOptions o;
    o.starts = starts;
    o.seed = seed;
    return o;
}

// 1. Closed-form ball moments against rejection-sampling Monte Carlo.
Verdict moment_oracle() {
    Tally t;
    Rng rng(101);
    double worst_z = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 5;
        Exponent alpha(n);
        for (auto& a : alpha) a = 2 * static_cast<int>(rng.uniform() * 3.0);  // 0, 2, 4
        const double closed = ball_monomial_moment(alpha);
        const oracle::Estimate mc = oracle::monte_carlo_ball(Polynomial::monomial(alpha, 1.0), 1'000'000, 500 + k);
        const double z = mc.std_error > 0.0 ? std::abs(closed - mc.mean) / mc.std_error : 0.0;
        worst_z = std::max(worst_z, z);
        t.check(z <= 3.0 || (mc.std_error == 0.0 && closed == mc.mean), "monomial " + std::to_string(k) + " z=" + fmt(z));
    }
    int odd = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + k % 5;
        Exponent alpha(n);
        for (auto& a : alpha) a = static_cast<int>(rng.uniform() * 5.0);
        alpha[k % n] = 2 * (alpha[k % n] / 2) + 1;
        t.check(ball_monomial_moment(alpha) == 0.0, "odd monomial not exactly 0");
        ++odd;
    }
    return t.verdict("50 even monomials at 1e6 samples, max |z| = " + fmt(worst_z) + "; " + std::to_string(odd) +
                     " odd monomials exactly 0");
}

// 2. Both detection methods on exactly sparse instances.
Verdict detection_round_trip() {
    Tally t;
    double worst_residual = 0.0, worst_angle = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 2 + seed % 9;
        const std::size_t m = 1 + seed % std::min<std::size_t>(3, n - 1);
        const int degree = 2 + static_cast<int>(seed % 3);
        const GeneratedInstance inst = generate_instance(seed, n, m, degree, 0.0, false);
        const DetectionReport exact = detect_exact(inst.h);
        t.check(exact.m == m, "exact m wrong at seed " + std::to_string(seed));
        if (exact.m != m) continue;
        const double residual = verify_sparse_form(inst.h, extract_sparse_form(inst.h, exact.basis), 200, seed);
        worst_residual = std::max(worst_residual, residual);
        t.check(residual < 1e-8, "residual " + fmt(residual));
        for (std::uint64_t s = 0; s < 5; ++s) {
            const DetectionReport rnd = detect_randomized(inst.h, s);
            t.check(rnd.m == m, "randomized m wrong at seed " + std::to_string(seed));
            if (rnd.m != m) continue;
            const double angle = max_principal_angle(exact.basis, rnd.basis);
            worst_angle = std::max(worst_angle, angle);
            t.check(angle < 1e-6, "angle " + fmt(angle));
        }
    }
    return t.verdict("50 instances, m recovered; max residual " + fmt(worst_residual) + ", max angle " +
                     fmt(worst_angle));
}

// 3. Sphere problem in n dimensions against the reduced ball problem.
Verdict sphere_reduction() {
    Tally t;
    double worst_gap = 0.0, worst_norm = 0.0, worst_value = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 2 + seed % 5;
        const std::size_t m = 1 + seed % std::min<std::size_t>(2, n - 1);
        const int degree = 2 + static_cast<int>(seed % 3);
        const GeneratedInstance inst = generate_instance(1000 + seed, n, m, degree, 0.0, false);
        const ReducedBallProblem prob = reduce_sphere({inst.f0, inst.ell0});
        const SolveResult reduced = minimize_ball(prob.g, solver(seed));
        const double full = brute_force_min(inst.h, SphereDomain{}, 20000, seed).value;
        const double gap = std::abs(full - reduced.value);
        worst_gap = std::max(worst_gap, gap);
        t.check(gap < 1e-6, "seed " + std::to_string(seed) + " gap " + fmt(gap));
        const Vector x = lift_minimizer(prob, reduced.point);
        const double dn = std::abs(norm2(x) - 1.0);
        const double dv = std::abs(inst.h.evaluate(x) - prob.g.evaluate(reduced.point));
        worst_norm = std::max(worst_norm, dn);
        worst_value = std::max(worst_value, dv);
        t.check(dn < 1e-9, "lift norm " + fmt(dn));
        t.check(dv < 1e-8, "lift value " + fmt(dv));
    }
    return t.verdict("30 instances, max |min_S h - min_E g| = " + fmt(worst_gap) + ", lift norm err " +
                     fmt(worst_norm) + ", lift value err " + fmt(worst_value));
}

// 4. Cut loop on simplex and box instances.
Verdict polytope_cut_loop() {
    Tally t;
    double worst_gap = 0.0, worst_cut = -kInf;
    std::size_t max_iters = 0, instances = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const bool box = seed % 2 == 1;
        const std::size_t n = 3 + seed % 6;  // 3..8
        const std::size_t m = 1 + (seed / 2) % 2;
        const GeneratedInstance inst = generate_instance(2000 + seed, n, m, 2 + static_cast<int>(seed % 3), 0.0, false);
        Rng rng(seed, 4);

        // Ω in standard form. The box [-1,1]^n becomes z + w = 2e, z, w ≥ 0 with x = z − e.
        Polytope poly;
        Matrix ell;
        Polynomial f = inst.f0;
        if (!box) {
            poly = {Matrix(1, n, 1.0), Vector{1.0}};
            ell = inst.ell0;
        } else {
            poly = {Matrix(n, 2 * n), Vector(n, 2.0)};
            ell = Matrix(2 * n, m);
            for (std::size_t i = 0; i < n; ++i) {
                poly.A(i, i) = poly.A(i, n + i) = 1.0;
                for (std::size_t j = 0; j < m; ++j) ell(i, j) = inst.ell0(i, j);
            }
            const Vector shift = transpose_times(inst.ell0, Vector(n, 1.0));
            std::vector<Polynomial> forms;
            for (std::size_t j = 0; j < m; ++j)
                forms.push_back(Polynomial::variable(m, j) - Polynomial::constant(m, shift[j]));
            f = substitute_linear(inst.f0, forms);
        }
        CutLoopOptions o;
        o.inner = solver(seed, 16);
        const CutLoopResult r = cut_loop({f, ell}, poly, o);
        ++instances;
        const std::string tag = (box ? "box" : "simplex") + std::string(" seed ") + std::to_string(seed);
        t.check(r.status == CutLoopStatus::converged && r.taus.back() >= -1e-8, tag + " did not terminate");
        t.check(r.iterations <= 50, tag + " iterations");
        max_iters = std::max(max_iters, r.iterations);
        for (std::size_t k = 1; k < r.bounds.size(); ++k)
            t.check(r.bounds[k] >= r.bounds[k - 1] - 1e-9, tag + " P_k values decreased");

        auto h = [&](const Vector& x) { return inst.h.evaluate(x); };
        const double brute =
            box ? oracle::box_brute_min(h, n, 20000, seed) : oracle::simplex_brute_min(h, n, 20000, seed);
        const double gap = std::abs(r.rho - brute);
        worst_gap = std::max(worst_gap, gap);
        t.check(gap < 1e-6, tag + " gap " + fmt(gap));

        for (int k = 0; k < 200; ++k) {
            Vector x(poly.dim());
            if (!box) {
                double total = 0.0;
                for (auto& v : x) total += v = -std::log(rng.uniform_open());
                for (auto& v : x) v /= total;
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] = rng.uniform(0.0, 2.0);
                    x[n + i] = 2.0 - x[i];
                }
            }
            const Vector X = transpose_times(ell, x);
            for (const Cut& c : r.cuts.cuts) {
                const double excess = dot(c.u, X) - dot(c.lambda, poly.b);
                worst_cut = std::max(worst_cut, excess);
                t.check(excess <= 1e-8, tag + " invalid cut");
            }
        }
    }
    return t.verdict(std::to_string(instances) + " simplex/box instances, max iterations " +
                     std::to_string(max_iters) + ", max |rho - brute| = " + fmt(worst_gap) +
                     ", max cut excess " + fmt(worst_cut));
}

// Mean and standard error of h(ell·y + √(1−‖y‖²)·s·v) over v uniform in the tail ball.
oracle::Estimate conditional_sample(const Polynomial& h, const SpectrumSplit& split, const Vector& y,
                                    std::size_t samples, std::uint64_t seed) {
    Rng rng(seed, 31);
    // Restricting h to the fibre first keeps the sampling loop cheap.
    const std::size_t k = split.s.cols();
    const double r = std::sqrt(std::max(0.0, 1.0 - dot(y, y)));
    const Vector base = split.ell * y;
    std::vector<Polynomial> forms;
    for (std::size_t i = 0; i < h.num_vars(); ++i) {
        Vector row(k);
        for (std::size_t j = 0; j < k; ++j) row[j] = r * split.s(i, j);
        forms.push_back(Polynomial::linear(row, base[i]));
    }
    const Polynomial fibre = substitute_linear(h, forms);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double v = fibre.evaluate(oracle::rejection_ball_point(rng, k));
        s += v;
        s2 += v * v;
    }
    const double N = static_cast<double>(samples);
    const double mean = s / N;
    return {mean, std::sqrt(std::max(0.0, s2 / N - mean * mean) / N)};
}

// 5. Exact conditional expectation against sampling and the cubature path.
Verdict conditional_expectation() {
    Tally t;
    double worst_z = 0.0, worst_cub = 0.0, worst_odd = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 4 + seed % 2;
        const std::size_t m = 1 + seed % 2;
        const GeneratedInstance inst = generate_instance(3000 + seed, n, m, 3 + static_cast<int>(seed % 2), 0.3);
        const SpectrumSplit split = split_spectrum(inst.h, m);
        const LiftedPolynomial exact = conditional_expectation_exact(inst.h, split);
        worst_odd = std::max(worst_odd, odd_y_mass(exact));
        t.check(odd_y_mass(exact) < 1e-12, "odd Y terms");
        Rng rng(seed, 9);
        for (int k = 0; k < 10; ++k) {
            Vector y = rng.ball_point(m);
            const oracle::Estimate est = conditional_sample(inst.h, split, y, 1'000'000, seed * 100 + k);
            y.push_back(std::sqrt(std::max(0.0, 1.0 - dot(y, y))));
            const double z = std::abs(exact.poly.evaluate(y) - est.mean) / est.std_error;
            worst_z = std::max(worst_z, z);
            t.check(z <= 3.0, "seed " + std::to_string(seed) + " y " + std::to_string(k) + " z=" + fmt(z));
        }
        const CubatureRule rule = build_cubature(n - m, inst.h.degree(), seed);
        const double gap = max_coefficient_gap(exact.poly, conditional_expectation_cubature(inst.h, split, rule).poly);
        worst_cub = std::max(worst_cub, gap);
        t.check(gap < 1e-8, "cubature gap " + fmt(gap));
    }
    return t.verdict("10 instances x 10 points at 1e6 samples, max |z| = " + fmt(worst_z) +
                     "; cubature gap " + fmt(worst_cub) + "; odd-Y mass " + fmt(worst_odd));
}

// 6. min ĥ over the sphere and the ball against problem Q.
Verdict sphere_ball_and_Q() {
    Tally t;
    double worst = 0.0, worst_pm = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 3 + seed % 4;
        const std::size_t m = 1 + seed % 2;
        const GeneratedInstance inst = generate_instance(4000 + seed, n, m, 2 + static_cast<int>(seed % 3), 0.2);
        const SpectrumSplit split = split_spectrum(inst.h, m);
        const LiftedPolynomial fhat = conditional_expectation_exact(inst.h, split);
        const Polynomial hhat = hhat_polynomial(fhat, split);
        const QSolution q = solve_Q(fhat, solver(seed));
        const double sphere = minimize_sphere(hhat, solver(seed)).value;
        const double ball = minimize_ball(hhat, solver(seed)).value;
        const double gap = std::max(std::abs(sphere - q.rho), std::abs(ball - q.rho));
        worst = std::max(worst, gap);
        worst_pm = std::max(worst_pm, std::abs(q.rho_plus - q.rho_minus));
        t.check(gap < 1e-6, "seed " + std::to_string(seed) + " gap " + fmt(gap));
        t.check(std::abs(q.rho_plus - q.rho_minus) < 1e-8, "rho+ != rho-");
    }
    return t.verdict("10 instances, max gap " + fmt(worst) + ", max |rho+ - rho-| = " + fmt(worst_pm));
}

// 7. ε-family approaching exact sparsity.
Verdict limit_case() {
    Tally t;
    std::string table;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const std::size_t n = 5, m = 2;
        const GeneratedInstance base = generate_instance(5000 + seed, n, m, 3, 0.0);
        const double target = minimize_ball(reduce_sphere({base.f0, base.ell0}).g, solver(seed)).value;
        double prev[4] = {kInf, kInf, kInf, kInf};
        for (double eps : {1e-1, 1e-2, 1e-3, 0.0}) {
            Polynomial h = base.h;
            h += eps * base.g0;
            const SpectrumSplit split = split_spectrum(h, m);
            const LiftedPolynomial fhat = conditional_expectation_exact(h, split);
            const double cur[4] = {split.tail_sum(), y_mass(fhat), l2_error(h, fhat, split, 100000, seed).mean,
                                   std::abs(solve_Q(fhat, solver(seed)).rho - target)};
            const char* names[4] = {"tail", "Y-mass", "l2", "rho gap"};
            for (int k = 0; k < 4; ++k) t.check(cur[k] < prev[k], std::string(names[k]) + " not decreasing at eps " + fmt(eps));
            if (eps == 0.0) {
                t.check(cur[0] < 1e-10 && cur[1] < 1e-10 && cur[3] < 1e-10, "eps = 0 values not below 1e-10");
                t.check(cur[2] < 1e-12, "eps = 0 l2 not below 1e-12");
            }
            table += (eps == 1e-1 ? " | s" + std::to_string(seed) : std::string()) + " eps=" + fmt(eps) + ":(" + fmt(cur[0]) + "," + fmt(cur[1]) + "," + fmt(cur[2]) + "," + fmt(cur[3]) + ")";
            std::copy(cur, cur + 4, prev);
        }
    }
    return t.verdict("3 families, (tail,Ymass,l2,|rho gap|) per eps:" + table);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CliSetup {
    std::string cli;
    fs::path golden;
    fs::path work;
};

// 8. Gradients, eigen, LP, determinism and golden files.
Verdict numerical_hygiene(const CliSetup& cli) {
    Tally t;
    Rng rng(808);
    double worst_fd = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + k % 6;
        const Polynomial p = oracle::random_polynomial(n, 1 + k % 4, rng, 0.7);
        const auto g = gradient(p);
        for (int s = 0; s < 10; ++s) {
            const Vector x = rng.ball_point(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double an = g[i].evaluate(x);
                const double rel = std::abs(oracle::central_difference(p, x, i, 1e-5) - an) / std::max(1.0, std::abs(an));
                worst_fd = std::max(worst_fd, rel);
                t.check(rel < 1e-6, "finite difference");
            }
        }
    }
    double worst_eig = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Matrix a = oracle::random_symmetric(1 + k % 12, rng);
        const SymEig e = sym_eig(a);
        Matrix lambda(a.rows(), a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i) lambda(i, i) = e.eigenvalues[i];
        const double err = frobenius_norm(e.eigenvectors * lambda * e.eigenvectors.transpose() - a) / frobenius_norm(a);
        worst_eig = std::max(worst_eig, err);
        t.check(err < 1e-8, "eigen reconstruction");
    }
    double worst_lp = 0.0;
    int lps = 0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + k % 3;
        LpProblem p(n);
        for (double& c : p.objective) c = rng.normal();
        p.lower.assign(n, -3.0);
        p.upper.assign(n, 3.0);
        const std::size_t rows = 1 + static_cast<std::size_t>(rng.uniform() * 6);
        for (std::size_t i = 0; i < rows; ++i) p.add_inequality(rng.normal_vector(n), rng.uniform(-1.0, 2.0));
        const double brute = oracle::vertex_enumeration_min(p);
        const LpResult r = lp_solve(p);
        if (std::isinf(brute)) {
            t.check(r.status == LpStatus::infeasible, "LP status");
            continue;
        }
        ++lps;
        const double err = std::abs(r.value - brute);
        worst_lp = std::max(worst_lp, err);
        t.check(r.status == LpStatus::optimal && err <= 1e-9 * std::max(1.0, std::abs(brute)), "LP value");
    }
    // Same seed, same bits.
    const GeneratedInstance inst = generate_instance(6000, 5, 2, 3, 0.1);
    auto run = [&] {
        const SpectrumSplit split = split_spectrum(inst.h, 2);
        const LiftedPolynomial fhat = conditional_expectation_exact(inst.h, split);
        const QSolution q = solve_Q(fhat, solver(3));
        return std::tuple{detect_randomized(inst.h, 3).basis, q.point, q.rho, l2_error(inst.h, fhat, split, 20000, 3).mean,
                          minimize_polytope(inst.f0, Polyhedron{Matrix{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}},
                                                                Vector{1.0, 1.0, 1.0, 1.0}},
                                            solver(3))
                              .point};
    };
    t.check(run() == run(), "repeated run differs");

    std::string golden = "golden files not checked (no --cli given)";
    if (!cli.cli.empty()) {
        const std::string g = cli.golden.string();
        const std::pair<std::string, std::string> cases[] = {
            {"sphere", "pipeline --input " + g + "/sphere/h.json --domain sphere"},
            {"approx", "pipeline --input " + g + "/approx/h.json --domain ball --samples 20000"},
            {"polytope", "pipeline --input " + g + "/polytope/h.json --domain polytope --A " + g + "/polytope/A.json --b " +
                             g + "/polytope/b.json"},
        };
        int matched = 0;
        for (const auto& [name, args] : cases) {
            const fs::path out = cli.work / ("golden_" + name);
            fs::remove_all(out);
            const std::string cmd = "\"" + cli.cli + "\" --seed 1 " + args + " --out \"" + out.string() + "\"";
            const int rc = std::system(cmd.c_str());
            const bool same = rc == 0 && slurp(out / "report.json") == slurp(cli.golden / name / "report.json");
            t.check(same, "golden " + name + " differs");
            matched += same;
        }
        golden = std::to_string(matched) + "/3 golden reports bitwise equal";
    }
    return t.verdict("fd " + fmt(worst_fd) + ", eigen " + fmt(worst_eig) + ", LP " + fmt(worst_lp) + " over " +
                     std::to_string(lps) + " LPs, repeat runs identical, " + golden);
}

}  // namespace

int main(int argc, char** argv) {
    CliSetup cli;
    cli.work = fs::temp_directory_path() / "lowform_acceptance";
    int only = 0;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--cli") cli.cli = argv[i + 1];
        else if (key == "--golden") cli.golden = argv[i + 1];
        else if (key == "--work") cli.work = argv[i + 1];
        else if (key == "--only") only = std::atoi(argv[i + 1]);
    }
    fs::create_directories(cli.work);

    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"moment oracle", moment_oracle},
        {"detection round trip", detection_round_trip},
        {"sphere reduction equivalence", sphere_reduction},
        {"polytope cut loop", polytope_cut_loop},
        {"conditional expectation exactness", conditional_expectation},
        {"sphere, ball and problem Q agree", sphere_ball_and_Q},
        {"limit case", limit_case},
        {"numerical hygiene", [&] { return numerical_hygiene(cli); }},
    };
    int failed = 0;
    for (int k = 0; k < 8; ++k) {
        if (only != 0 && only != k + 1) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  [%d] %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
