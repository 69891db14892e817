#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lowform/approx.hpp"
#include "lowform/ball_moments.hpp"
#include "lowform/detection.hpp"
#include "lowform/error.hpp"
#include "lowform/generator.hpp"
#include "lowform/polytope_reduction.hpp"
#include "lowform/solvers.hpp"
#include "lowform/sphere_reduction.hpp"

namespace py = pybind11;
using namespace lowform;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) view(i, j) = m(i, j);
    return out;
}

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
    Matrix m(a.shape(0), a.shape(1));
    auto view = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = view(i, j);
    return m;
}

SolveOptions options(std::size_t starts, std::size_t max_iter, double tol, std::uint64_t seed) {
    SolveOptions o;
    o.starts = starts;
    o.max_iter = max_iter;
    o.tol = tol;
    o.seed = seed;
    return o;
}

Polynomial from_terms(std::size_t num_vars, const std::map<Exponent, double>& terms) {
    Polynomial p(num_vars);
    for (const auto& [e, c] : terms) {
        if (e.size() != num_vars) throw DimensionError("exponent length does not match num_vars");
        p.add_term(e, c);
    }
    return p;
}

// Tuple keys so the result is a usable Python dict.
py::dict terms_of(const Polynomial& p) {
    py::dict d;
    for (const auto& [e, c] : p.terms()) d[py::tuple(py::cast(e))] = c;
    return d;
}

#define SOLVER_ARGS                                                                                         \
    py::arg("starts") = SolveOptions{}.starts, py::arg("max_iter") = SolveOptions{}.max_iter,              \
        py::arg("tol") = SolveOptions{}.tol, py::arg("seed") = SolveOptions{}.seed

}  // namespace

PYBIND11_MODULE(_lowform, mod) {
    mod.doc() = "lowform core bindings";

    auto base = py::register_exception<Error>(mod, "Error");
    py::register_exception<DimensionError>(mod, "DimensionError", base.ptr());
    py::register_exception<InfeasibleError>(mod, "InfeasibleError", base.ptr());
    py::register_exception<ConvergenceError>(mod, "ConvergenceError", base.ptr());
    py::register_exception<ParseError>(mod, "ParseError", base.ptr());

    py::class_<Polynomial>(mod, "Polynomial")
        .def(py::init(&from_terms), py::arg("num_vars"), py::arg("terms") = std::map<Exponent, double>{},
             "Build from {exponent tuple: coefficient}.")
        .def_static("constant", &Polynomial::constant)
        .def_static("variable", &Polynomial::variable)
        .def_property_readonly("num_vars", &Polynomial::num_vars)
        .def_property_readonly("degree", &Polynomial::degree)
        .def("terms", &terms_of)
        .def("coefficient", &Polynomial::coefficient)
        .def("__call__", [](const Polynomial& p, const Vector& x) { return p.evaluate(x); })
        .def("derivative", &Polynomial::derivative)
        .def("gradient", [](const Polynomial& p) { return gradient(p); })
        .def("substitute", [](const Polynomial& p, const Array& m) { return substitute_matrix(p, to_matrix(m)); },
             "p(M y) as a polynomial in y.")
        .def("__pow__", [](const Polynomial& p, int k) { return pow(p, k); })
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self * double())
        .def(double() * py::self)
        .def(-py::self)
        .def(py::self == py::self)
        .def("__repr__", [](const Polynomial& p) {
            return "<Polynomial num_vars=" + std::to_string(p.num_vars()) + " terms=" + std::to_string(p.size()) + ">";
        });

    mod.def("ball_moment", [](const Exponent& alpha) { return ball_monomial_moment(alpha); }, py::arg("alpha"),
            "Mean of x^alpha under the uniform distribution on the unit ball.");
    mod.def("expectation_ball", &expectation_uniform_ball);

    py::class_<DetectionReport>(mod, "DetectionReport")
        .def_readonly("m", &DetectionReport::m)
        .def_property_readonly("basis", [](const DetectionReport& r) { return to_numpy(r.basis); })
        .def_readonly("spectrum", &DetectionReport::spectrum)
        .def_property_readonly("method", [](const DetectionReport& r) { return std::string(to_string(r.method)); })
        .def_readonly("samples_used", &DetectionReport::samples_used);

    mod.def("detect_exact", &detect_exact, py::arg("h"), py::arg("rank_tol") = kDefaultRankTol);
    mod.def("detect_randomized", &detect_randomized, py::arg("h"), py::arg("seed"),
            py::arg("rank_tol") = kDefaultRankTol, py::arg("max_k") = 0);
    mod.def(
        "extract_sparse_form",
        [](const Polynomial& h, const Array& basis) {
            const SparseForm sf = extract_sparse_form(h, to_matrix(basis));
            return py::make_tuple(sf.f, to_numpy(sf.ell));
        },
        py::arg("h"), py::arg("basis"), "Returns (f, ell) with h(x) = f(ell^T x).");

    py::class_<SolveResult>(mod, "SolveResult")
        .def_readonly("value", &SolveResult::value)
        .def_readonly("point", &SolveResult::point)
        .def_property_readonly("status", [](const SolveResult& r) { return std::string(to_string(r.status)); })
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("starts_used", &SolveResult::starts_used);

    mod.def(
        "minimize_ball",
        [](const Polynomial& p, std::size_t starts, std::size_t max_iter, double tol, std::uint64_t seed) {
            py::gil_scoped_release release;
            return minimize_ball(p, options(starts, max_iter, tol, seed));
        },
        py::arg("p"), SOLVER_ARGS);
    mod.def(
        "minimize_sphere",
        [](const Polynomial& p, std::size_t starts, std::size_t max_iter, double tol, std::uint64_t seed) {
            py::gil_scoped_release release;
            return minimize_sphere(p, options(starts, max_iter, tol, seed));
        },
        py::arg("p"), SOLVER_ARGS);
    mod.def(
        "minimize_polytope",
        [](const Polynomial& p, const Array& G, const Vector& c, std::size_t starts, std::size_t max_iter, double tol,
           std::uint64_t seed) {
            const Polyhedron region{to_matrix(G), c};
            py::gil_scoped_release release;
            return minimize_polytope(p, region, options(starts, max_iter, tol, seed));
        },
        py::arg("p"), py::arg("G"), py::arg("c"), SOLVER_ARGS, "Minimize over {x : G x <= c}.");

    mod.def(
        "reduce_sphere",
        [](const Polynomial& f, const Array& ell) {
            const ReducedBallProblem prob = reduce_sphere({f, to_matrix(ell)});
            return py::make_tuple(prob.g, to_numpy(prob.L));
        },
        py::arg("f"), py::arg("ell"), "Returns (g, L): min of f(ell^T x) on the sphere equals min of g on the ball.");
    mod.def(
        "lift_minimizer",
        [](const Polynomial& f, const Array& ell, const Vector& y) {
            return lift_minimizer(reduce_sphere({f, to_matrix(ell)}), y);
        },
        py::arg("f"), py::arg("ell"), py::arg("y"));

    py::class_<CutLoopResult>(mod, "CutLoopResult")
        .def_readonly("rho", &CutLoopResult::rho)
        .def_readonly("x_star", &CutLoopResult::x_star)
        .def_readonly("x", &CutLoopResult::x)
        .def_readonly("iterations", &CutLoopResult::iterations)
        .def_property_readonly("status", [](const CutLoopResult& r) { return std::string(to_string(r.status)); })
        .def_readonly("bounds", &CutLoopResult::bounds)
        .def_readonly("taus", &CutLoopResult::taus)
        .def_property_readonly("num_cuts", [](const CutLoopResult& r) { return r.cuts.cuts.size(); });

    mod.def(
        "cut_loop",
        [](const Polynomial& f, const Array& ell, const Array& A, const Vector& b, std::size_t max_cuts,
           std::size_t starts, std::size_t max_iter, double tol, std::uint64_t seed) {
            CutLoopOptions o;
            o.inner = options(starts, max_iter, tol, seed);
            o.max_iter = max_cuts;
            const SparseForm sf{f, to_matrix(ell)};
            const Polytope poly{to_matrix(A), b};
            py::gil_scoped_release release;
            return cut_loop(sf, poly, o);
        },
        py::arg("f"), py::arg("ell"), py::arg("A"), py::arg("b"), py::arg("max_cuts") = CutLoopOptions{}.max_iter,
        SOLVER_ARGS, "Minimize f(ell^T x) over {x >= 0 : A x = b}.");
    mod.def(
        "reduce_simplex",
        [](const Polynomial& f, const Array& ell, std::size_t starts, std::size_t max_iter, double tol,
           std::uint64_t seed) { return reduce_simplex({f, to_matrix(ell)}, options(starts, max_iter, tol, seed)); },
        py::arg("f"), py::arg("ell"), SOLVER_ARGS);
    mod.def(
        "reduce_box",
        [](const Polynomial& f, const Array& ell, std::size_t starts, std::size_t max_iter, double tol,
           std::uint64_t seed) { return reduce_box({f, to_matrix(ell)}, options(starts, max_iter, tol, seed)); },
        py::arg("f"), py::arg("ell"), SOLVER_ARGS);

    py::class_<SpectrumSplit>(mod, "SpectrumSplit")
        .def_property_readonly("ell", [](const SpectrumSplit& s) { return to_numpy(s.ell); })
        .def_property_readonly("s", [](const SpectrumSplit& s) { return to_numpy(s.s); })
        .def_readonly("lambda_head", &SpectrumSplit::lambda_head)
        .def_readonly("lambda_tail", &SpectrumSplit::lambda_tail)
        .def("tail_sum", &SpectrumSplit::tail_sum);

    py::class_<LiftedPolynomial>(mod, "LiftedPolynomial")
        .def_readonly("m", &LiftedPolynomial::m)
        .def_readonly("poly", &LiftedPolynomial::poly)
        .def("y_mass", [](const LiftedPolynomial& f) { return y_mass(f); })
        .def("odd_y_mass", [](const LiftedPolynomial& f) { return odd_y_mass(f); });

    py::class_<CubatureRule>(mod, "CubatureRule")
        .def_readonly("dim", &CubatureRule::dim)
        .def_readonly("degree", &CubatureRule::degree)
        .def_readonly("nodes", &CubatureRule::nodes)
        .def_readonly("weights", &CubatureRule::weights);

    py::class_<QSolution>(mod, "QSolution")
        .def_readonly("rho", &QSolution::rho)
        .def_readonly("rho_plus", &QSolution::rho_plus)
        .def_readonly("rho_minus", &QSolution::rho_minus)
        .def_readonly("point", &QSolution::point)
        .def_property_readonly("status", [](const QSolution& q) { return std::string(to_string(q.status)); });

    mod.def("split_spectrum", &split_spectrum, py::arg("h"), py::arg("m"));
    mod.def("conditional_expectation_exact", &conditional_expectation_exact, py::arg("h"), py::arg("split"));
    mod.def("build_cubature", &build_cubature, py::arg("dim"), py::arg("degree"), py::arg("seed") = 0);
    mod.def("conditional_expectation_cubature", &conditional_expectation_cubature, py::arg("h"), py::arg("split"),
            py::arg("rule"));
    mod.def(
        "solve_Q",
        [](const LiftedPolynomial& fhat, std::size_t starts, std::size_t max_iter, double tol, std::uint64_t seed) {
            py::gil_scoped_release release;
            return solve_Q(fhat, options(starts, max_iter, tol, seed));
        },
        py::arg("fhat"), SOLVER_ARGS);
    mod.def("hhat_eval", [](const LiftedPolynomial& f, const SpectrumSplit& s, const Vector& x) {
        return hhat_eval(f, s, x);
    }, py::arg("fhat"), py::arg("split"), py::arg("x"));

    mod.def(
        "generate_instance",
        [](std::uint64_t seed, std::size_t n, std::size_t m, int degree, double epsilon, bool orthonormal) {
            const GeneratedInstance g = generate_instance(seed, n, m, degree, epsilon, orthonormal);
            py::dict d;
            d["h"] = g.h;
            d["f0"] = g.f0;
            d["ell0"] = to_numpy(g.ell0);
            d["g0"] = g.g0;
            d["epsilon"] = g.epsilon;
            return d;
        },
        py::arg("seed"), py::arg("n"), py::arg("m"), py::arg("degree"), py::arg("epsilon") = 0.0,
        py::arg("orthonormal_forms") = true);
}
