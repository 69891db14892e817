#include "lowform/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>

#include "lowform/error.hpp"
#include "lowform/lp.hpp"
#include "lowform/parallel.hpp"
#include "lowform/random.hpp"

namespace lowform {

std::size_t worker_threads() {
    if (const char* env = std::getenv("LOWFORM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

double Polyhedron::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) worst = std::max(worst, dot(rows.row(i), x) - rhs[i]);
    return worst;
}

namespace {

// Armijo constants: initial step 1, shrink 0.5, sufficient decrease 1e-4.
constexpr double kArmijoShrink = 0.5;
constexpr double kArmijoSigma = 1e-4;
constexpr double kMinStep = 1e-20;

struct LocalRun {
    double value = 0.0;
    Vector point;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

bool lexicographically_better(const LocalRun& a, const LocalRun& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::lexicographical_compare(a.point.begin(), a.point.end(), b.point.begin(), b.point.end());
}

class Objective {
public:
    explicit Objective(const Polynomial& p) : p_(p), grad_(gradient(p)) {}
    double value(std::span<const double> x) const { return p_.evaluate(x); }
    Vector grad(std::span<const double> x) const { return evaluate_all(grad_, x); }
    std::size_t dim() const { return p_.num_vars(); }

private:
    const Polynomial& p_;
    std::vector<Polynomial> grad_;
};

using Projection = std::function<Vector(const Vector&)>;

Vector project_ball(const Vector& x) {
    const double r = norm2(x);
    if (r <= 1.0) return x;
    return scaled(1.0 / r, x);
}

Vector normalize_or(const Vector& x, const Vector& fallback) {
    const double r = norm2(x);
    if (r <= 1e-300) return fallback;
    return scaled(1.0 / r, x);
}

Projection sphere_projection(HalfSphere half) {
    return [half](const Vector& z) {
        Vector y = z;
        if (!y.empty() && half != HalfSphere::none) {
            double& last = y.back();
            const bool wrong = half == HalfSphere::y_nonneg ? last < 0.0 : last > 0.0;
            if (wrong) {
                Vector clamped = y;
                clamped.back() = 0.0;
                if (norm2(clamped) > 1e-12) return normalize_or(clamped, clamped);
                last = -last;  // reflection when clamping would collapse to 0
            }
        }
        Vector e(y.size(), 0.0);
        if (!e.empty()) e[0] = 1.0;
        return normalize_or(y, e);
    };
}

// Projected gradient with Armijo backtracking along the projection arc.
// On the sphere the Euclidean gradient is replaced by its tangential part.
LocalRun projected_gradient(const Objective& f, const Projection& project, bool riemannian, Vector x0,
                            const SolveOptions& opts) {
    LocalRun run;
    Vector x = project(x0);
    double fx = f.value(x);
    auto tangent_grad = [&](const Vector& at) {
        Vector g = f.grad(at);
        if (riemannian) g = axpy(-dot(at, g), at, g);
        return g;
    };
    Vector g = tangent_grad(x);
    if (opts.record_traces) run.trace.push_back(fx);
    double step = 1.0;
    for (; run.iterations < opts.max_iter; ++run.iterations) {
        if (norm2(subtract(x, project(axpy(-1.0, g, x)))) < opts.tol) {
            run.converged = true;
            break;
        }
        Vector x_new;
        double f_new = fx;
        bool accepted = false;
        for (double t = step; t >= kMinStep; t *= kArmijoShrink) {
            x_new = project(axpy(-t, g, x));
            f_new = f.value(x_new);
            if (f_new <= fx + kArmijoSigma * dot(g, subtract(x_new, x))) {
                accepted = true;
                step = t;
                break;
            }
        }
        if (!accepted || x_new == x) {
            // No representable descent left: the point is stationary to machine precision.
            run.converged = true;
            break;
        }
        const Vector g_new = tangent_grad(x_new);
        // Barzilai-Borwein estimate for the next trial step.
        const Vector s = subtract(x_new, x);
        const Vector y = subtract(g_new, g);
        const double sy = dot(s, y);
        step = sy > 0.0 ? std::clamp(dot(s, s) / sy, 1e-12, 1e12) : std::min(2.0 * step, 1e12);
        x = x_new;
        fx = f_new;
        g = g_new;
        if (opts.record_traces) run.trace.push_back(fx);
    }
    run.value = f.value(x);
    run.point = std::move(x);
    return run;
}

SolveResult multistart(const std::function<LocalRun(std::size_t)>& run_start, const SolveOptions& opts) {
    if (opts.starts == 0) throw DimensionError("SolveOptions: starts must be positive");
    std::vector<LocalRun> runs(opts.starts);
    parallel_for(opts.starts, [&](std::size_t i) { runs[i] = run_start(i); });

    auto best_two_disagree = [&] {
        if (runs.size() < 2) return false;
        std::vector<double> values;
        for (const auto& r : runs) values.push_back(r.value);
        std::partial_sort(values.begin(), values.begin() + 2, values.end());
        return values[1] - values[0] > 1e-4;
    };
    if (best_two_disagree()) {
        const std::size_t first = runs.size();
        runs.resize(2 * first);
        parallel_for(first, [&](std::size_t i) { runs[first + i] = run_start(first + i); });
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (lexicographically_better(runs[i], runs[best])) best = i;

    SolveResult out;
    out.value = runs[best].value;
    out.point = runs[best].point;
    out.status = runs[best].converged ? SolveStatus::converged : SolveStatus::max_iter;
    out.iterations = runs[best].iterations;
    out.starts_used = runs.size();
    if (opts.record_traces)
        for (auto& r : runs) out.traces.push_back(std::move(r.trace));
    return out;
}

}  // namespace

SolveResult minimize_ball(const Polynomial& p, const SolveOptions& opts) {
    const Objective f(p);
    const std::size_t n = p.num_vars();
    if (n == 0) return SolveResult{p.evaluate(Vector{}), {}, SolveStatus::converged, 0, 1, {}};
    return multistart(
        [&](std::size_t i) {
            Rng rng(opts.seed, i);
            return projected_gradient(f, project_ball, false, rng.ball_point(n), opts);
        },
        opts);
}

SolveResult minimize_sphere(const Polynomial& p, const SolveOptions& opts, HalfSphere half) {
    const Objective f(p);
    const std::size_t n = p.num_vars();
    if (n == 0) throw DimensionError("minimize_sphere: the sphere in R^0 is empty");
    const Projection project = sphere_projection(half);
    return multistart(
        [&](std::size_t i) {
            Rng rng(opts.seed, i);
            Vector x0 = rng.sphere_point(n);
            if (half == HalfSphere::y_nonneg) x0.back() = std::abs(x0.back());
            if (half == HalfSphere::y_nonpos) x0.back() = -std::abs(x0.back());
            return projected_gradient(f, project, true, std::move(x0), opts);
        },
        opts);
}

namespace {

class LinearOracle {
public:
    explicit LinearOracle(const Polyhedron& region) : problem_(region.dim()) {
        problem_.make_free();
        problem_.inequality_lhs = region.rows;
        problem_.inequality_rhs = region.rhs;
    }

    Vector argmin(std::span<const double> direction) {
        problem_.objective.assign(direction.begin(), direction.end());
        const LpResult r = lp_solve(problem_);
        if (r.status == LpStatus::infeasible) throw InfeasibleError("polyhedron is empty");
        if (r.status == LpStatus::unbounded) throw InfeasibleError("polyhedron is unbounded");
        if (r.status != LpStatus::optimal) throw ConvergenceError("linear oracle stalled");
        return r.x;
    }

private:
    LpProblem problem_;
};

struct Atom {
    Vector vertex;
    double weight;
};

void add_atom(std::vector<Atom>& atoms, const Vector& v, double w) {
    for (auto& a : atoms)
        if (norm2(subtract(a.vertex, v)) <= 1e-12 * std::max(1.0, norm2(v))) {
            a.weight += w;
            return;
        }
    atoms.push_back({v, w});
}

// Curvature of p along d at x, from the symbolic Hessian.
double directional_curvature(const std::vector<std::vector<Polynomial>>& hessian, const Vector& x, const Vector& d) {
    double c = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d[i] != 0.0 && d[j] != 0.0) c += d[i] * d[j] * hessian[i][j].evaluate(x);
    return c;
}

LocalRun away_step_frank_wolfe(const Objective& f, const std::vector<std::vector<Polynomial>>& hessian,
                               const LinearMinimizer& oracle, std::vector<Atom> atoms, const SolveOptions& opts) {
    LocalRun run;
    Vector x(f.dim(), 0.0);
    for (const auto& a : atoms) x = axpy(a.weight, a.vertex, x);
    double fx = f.value(x);
    if (opts.record_traces) run.trace.push_back(fx);

    for (; run.iterations < opts.max_iter; ++run.iterations) {
        const Vector g = f.grad(x);
        const Vector s = oracle(g);
        const Vector d_fw = subtract(s, x);
        const double gap = -dot(g, d_fw);
        if (gap <= opts.tol) {
            run.converged = true;
            break;
        }
        std::size_t away = 0;
        for (std::size_t k = 1; k < atoms.size(); ++k)
            if (dot(g, atoms[k].vertex) > dot(g, atoms[away].vertex)) away = k;
        const Vector d_away = subtract(x, atoms[away].vertex);

        const bool use_fw = atoms.size() == 1 || atoms[away].weight >= 1.0 || -dot(g, d_fw) >= -dot(g, d_away);
        const Vector& d = use_fw ? d_fw : d_away;
        const double gamma_max = use_fw ? 1.0 : atoms[away].weight / (1.0 - atoms[away].weight);
        const double slope = dot(g, d);
        if (slope >= 0.0) {
            run.converged = true;
            break;
        }
        // Trial step: minimizer of the local quadratic model when it is convex, else the full step.
        const double curvature = directional_curvature(hessian, x, d);
        double gamma = curvature > 0.0 ? std::min(gamma_max, -slope / curvature) : gamma_max;
        Vector x_new;
        double f_new = fx;
        bool accepted = false;
        for (; gamma >= kMinStep; gamma *= kArmijoShrink) {
            x_new = axpy(gamma, d, x);
            f_new = f.value(x_new);
            if (f_new <= fx + kArmijoSigma * gamma * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            run.converged = true;
            break;
        }

        if (use_fw) {
            for (auto& a : atoms) a.weight *= 1.0 - gamma;
            add_atom(atoms, s, gamma);
        } else {
            for (auto& a : atoms) a.weight *= 1.0 + gamma;
            atoms[away].weight -= gamma;
        }
        std::erase_if(atoms, [](const Atom& a) { return a.weight <= 1e-15; });
        double total = 0.0;
        for (const auto& a : atoms) total += a.weight;
        for (auto& a : atoms) a.weight /= total;

        x = std::move(x_new);
        fx = f_new;
        if (opts.record_traces) run.trace.push_back(fx);
    }
    run.value = f.value(x);
    run.point = std::move(x);
    return run;
}

}  // namespace

SolveResult minimize_polytope(const Polynomial& p, const Polyhedron& region, const SolveOptions& opts) {
    const std::size_t n = p.num_vars();
    if (region.dim() != n) throw DimensionError("minimize_polytope: region dimension differs from the polynomial");
    if (region.rows.rows() != region.rhs.size()) throw DimensionError("minimize_polytope: rhs length mismatch");
    if (n == 0) return SolveResult{p.evaluate(Vector{}), {}, SolveStatus::converged, 0, 1, {}};

    // Validate once up front so an empty or unbounded region fails fast.
    {
        LinearOracle probe(region);
        for (std::size_t j = 0; j < n; ++j) {
            Vector e(n, 0.0);
            e[j] = 1.0;
            probe.argmin(e);
            e[j] = -1.0;
            probe.argmin(e);
        }
    }

    return minimize_with_oracle(
        p,
        [&region](std::span<const double> direction) {
            LinearOracle oracle(region);
            return oracle.argmin(direction);
        },
        opts);
}

SolveResult minimize_with_oracle(const Polynomial& p, const LinearMinimizer& oracle, const SolveOptions& opts) {
    const std::size_t n = p.num_vars();
    if (n == 0) return SolveResult{p.evaluate(Vector{}), {}, SolveStatus::converged, 0, 1, {}};
    const Objective f(p);
    std::vector<std::vector<Polynomial>> hessian;
    for (const auto& gi : gradient(p)) hessian.push_back(gradient(gi));

    return multistart(
        [&](std::size_t i) {
            Rng rng(opts.seed, i);
            // Start at a random convex combination of n+1 random vertices.
            std::vector<Atom> atoms;
            double total = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                const double w = -std::log(rng.uniform_open());
                add_atom(atoms, oracle(rng.normal_vector(n)), w);
                total += w;
            }
            for (auto& a : atoms) a.weight /= total;
            return away_step_frank_wolfe(f, hessian, oracle, std::move(atoms), opts);
        },
        opts);
}

namespace {

struct Pattern {
    std::function<bool(const Vector&)> feasible;
    std::function<Vector(const Vector&)> project;
    std::vector<Vector> directions;
};

Vector polish(const Polynomial& p, const Pattern& pattern, Vector x, double step) {
    double fx = p.evaluate(x);
    for (int halving = 0; halving < 50; ++halving) {
        bool improved = true;
        for (int guard = 0; improved && guard < 100; ++guard) {
            improved = false;
            for (const auto& d : pattern.directions)
                for (double sign : {1.0, -1.0}) {
                    Vector y = pattern.project(axpy(sign * step, d, x));
                    if (!pattern.feasible(y)) continue;
                    const double fy = p.evaluate(y);
                    if (fy < fx) {
                        x = std::move(y);
                        fx = fy;
                        improved = true;
                    }
                }
        }
        step *= 0.5;
    }
    return x;
}

std::vector<Vector> axis_directions(std::size_t n) {
    std::vector<Vector> dirs;
    for (std::size_t i = 0; i < n; ++i) {
        Vector e(n, 0.0);
        e[i] = 1.0;
        dirs.push_back(e);
    }
    return dirs;
}

}  // namespace

BruteForceResult brute_force_min(const Polynomial& p, const Domain& domain, std::size_t resolution,
                                 std::uint64_t seed) {
    const std::size_t n = p.num_vars();
    if (n > kBruteForceMaxDim)
        throw DimensionError("brute_force_min: dimension " + std::to_string(n) + " exceeds " +
                             std::to_string(kBruteForceMaxDim));
    if (n == 0) return {p.evaluate(Vector{}), {}};
    Rng rng(seed, 0xb007);
    std::vector<std::pair<double, Vector>> samples;
    Pattern pattern;
    pattern.directions = axis_directions(n);
    double step = 0.1;

    if (std::holds_alternative<BallDomain>(domain)) {
        pattern.feasible = [](const Vector&) { return true; };
        pattern.project = [](const Vector& x) {
            const double r = norm2(x);
            return r <= 1.0 ? x : scaled(1.0 / r, x);
        };
        for (std::size_t k = 0; k < resolution; ++k) {
            // Half interior, half boundary: minima of non-convex objectives often sit on the sphere.
            Vector x = k % 2 == 0 ? rng.ball_point(n) : rng.sphere_point(n);
            samples.emplace_back(p.evaluate(x), std::move(x));
        }
    } else if (std::holds_alternative<SphereDomain>(domain)) {
        pattern.feasible = [](const Vector&) { return true; };
        pattern.project = [](const Vector& x) { return scaled(1.0 / norm2(x), x); };
        for (std::size_t k = 0; k < resolution; ++k) {
            Vector x = rng.sphere_point(n);
            samples.emplace_back(p.evaluate(x), std::move(x));
        }
    } else {
        const auto& region = std::get<Polyhedron>(domain);
        if (region.dim() != n) throw DimensionError("brute_force_min: region dimension differs from the polynomial");
        LpProblem lp(n);
        lp.make_free();
        lp.inequality_lhs = region.rows;
        lp.inequality_rhs = region.rhs;
        Vector lo(n), hi(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (double sign : {1.0, -1.0}) {
                lp.objective.assign(n, 0.0);
                lp.objective[j] = sign;
                const LpResult r = lp_solve(lp);
                if (r.status == LpStatus::infeasible) throw InfeasibleError("brute_force_min: empty region");
                if (r.status != LpStatus::optimal) throw InfeasibleError("brute_force_min: unbounded region");
                (sign > 0 ? lo : hi)[j] = r.x[j];
                samples.emplace_back(p.evaluate(r.x), r.x);
            }
        }
        // Vertices reached from random directions.
        std::vector<Vector> vertices;
        for (std::size_t k = 0; k < 64 * n; ++k) {
            lp.objective = rng.normal_vector(n);
            const LpResult r = lp_solve(lp);
            if (r.status != LpStatus::optimal) continue;
            samples.emplace_back(p.evaluate(r.x), r.x);
            const bool seen = std::any_of(vertices.begin(), vertices.end(),
                                          [&](const Vector& v) { return norm2(subtract(v, r.x)) < 1e-9; });
            if (!seen && vertices.size() < 40) vertices.push_back(r.x);
        }
        // Vertex-to-vertex directions keep the polish moving inside low-dimensional faces.
        for (std::size_t a = 0; a < vertices.size(); ++a)
            for (std::size_t b = a + 1; b < vertices.size(); ++b) {
                const Vector d = subtract(vertices[b], vertices[a]);
                pattern.directions.push_back(scaled(1.0 / norm2(d), d));
            }
        const double slack = 1e-12;
        pattern.feasible = [&region, slack](const Vector& x) { return region.max_violation(x) <= slack; };
        pattern.project = [](const Vector& x) { return x; };
        // Moves along each facet, plus edge directions in 3-D.
        for (std::size_t i = 0; i < region.rows.rows(); ++i) {
            const Vector a(region.rows.row(i).begin(), region.rows.row(i).end());
            const double aa = dot(a, a);
            if (aa == 0.0) continue;
            for (const auto& e : axis_directions(n)) {
                Vector t = axpy(-dot(a, e) / aa, a, e);
                const double tn = norm2(t);
                if (tn > 1e-9) pattern.directions.push_back(scaled(1.0 / tn, t));
            }
            if (n == 3)
                for (std::size_t k = i + 1; k < region.rows.rows(); ++k) {
                    const auto b = region.rows.row(k);
                    Vector c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
                    const double cn = norm2(c);
                    if (cn > 1e-9) pattern.directions.push_back(scaled(1.0 / cn, c));
                }
        }
        double width = 0.0;
        for (std::size_t j = 0; j < n; ++j) width = std::max(width, hi[j] - lo[j]);
        step = 0.1 * std::max(width, 1e-6);
        std::size_t drawn = 0;
        for (std::size_t attempts = 0; drawn < resolution && attempts < 1000 * resolution; ++attempts) {
            Vector x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform(lo[j], hi[j]);
            if (region.max_violation(x) > 0.0) continue;
            samples.emplace_back(p.evaluate(x), std::move(x));
            ++drawn;
        }
    }

    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    BruteForceResult best{std::numeric_limits<double>::infinity(), {}};
    const std::size_t keep = std::min<std::size_t>(10, samples.size());
    for (std::size_t k = 0; k < keep; ++k) {
        Vector x = polish(p, pattern, samples[k].second, step);
        const double v = p.evaluate(x);
        if (v < best.value) best = {v, std::move(x)};
    }
    return best;
}

}  // namespace lowform
