#include <doctest.h>

#include <cmath>

#include "lowform/error.hpp"
#include "lowform/generator.hpp"
#include "lowform/solvers.hpp"
#include "lowform/sphere_reduction.hpp"
#include "oracles.hpp"

using namespace lowform;

namespace {

SparseForm square_of_sum() { return {Polynomial::monomial({2}, 1.0), Matrix{{1.0}, {1.0}}}; }

}  // namespace

TEST_CASE("reduce_sphere examples") {
    SUBCASE("X^2 with ell = (1,1)") {
        const ReducedBallProblem prob = reduce_sphere(square_of_sum());
        CHECK(prob.L(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        CHECK(prob.g.size() == 1);
        CHECK(prob.g.coefficient({2}) == doctest::Approx(2.0).epsilon(1e-14));
        SolveOptions o;
        o.starts = 8;
        CHECK(std::abs(minimize_ball(prob.g, o).value) < 1e-12);
        const Polynomial h = substitute_matrix(Polynomial::monomial({2}, 1.0), Matrix{{1.0, 1.0}});
        CHECK(std::abs(minimize_sphere(h, o).value) < 1e-10);
    }
    SUBCASE("orthonormal ell keeps f") {
        Rng rng(3);
        const Matrix ell = random_forms(5, 2, rng, true);
        const Polynomial f = oracle::random_polynomial(2, 4, rng);
        const ReducedBallProblem prob = reduce_sphere({f, ell});
        CHECK(max_abs(prob.L - Matrix::identity(2)) < 1e-10);
        CHECK(max_coefficient_gap(prob.g, f) < 1e-10);
    }
    SUBCASE("linear f = X, ell = e1") {
        const ReducedBallProblem prob = reduce_sphere({Polynomial::variable(1, 0), Matrix{{1.0}, {0.0}, {0.0}}});
        CHECK(prob.g == Polynomial::variable(1, 0));
        CHECK(minimize_ball(prob.g).value == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(minimize_sphere(Polynomial::variable(3, 0)).value == doctest::Approx(-1.0).epsilon(1e-10));
    }
    SUBCASE("dependent columns") {
        CHECK_THROWS_AS(reduce_sphere({Polynomial::variable(2, 0), Matrix{{1.0, 2.0}, {1.0, 2.0}}}), DimensionError);
    }
}

TEST_CASE("lift_minimizer examples") {
    SUBCASE("y = 0 from ell = (1,1)") {
        const ReducedBallProblem prob = reduce_sphere(square_of_sum());
        const Vector x = lift_minimizer(prob, Vector{0.0});
        CHECK(std::abs(x[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(x[1] == doctest::Approx(-x[0]));
        CHECK(std::abs(std::pow(x[0] + x[1], 2)) < 1e-15);
    }
    SUBCASE("unit y with orthonormal ell") {
        const Matrix ell{{0.6}, {0.8}, {0.0}};
        const ReducedBallProblem prob = reduce_sphere({Polynomial::variable(1, 0), ell});
        const Vector x = lift_minimizer(prob, Vector{-1.0});
        CHECK(x[0] == doctest::Approx(-0.6));
        CHECK(x[1] == doctest::Approx(-0.8));
        CHECK(std::abs(x[2]) < 1e-15);
    }
    SUBCASE("m = n") {
        const ReducedBallProblem prob = reduce_sphere({Polynomial::variable(1, 0), Matrix{{2.0}}});
        CHECK_THROWS_AS(lift_minimizer(prob, Vector{0.5}), DimensionError);
        CHECK(lift_minimizer(prob, Vector{-1.0})[0] == doctest::Approx(-1.0));
    }
    SUBCASE("outside the ball") {
        CHECK_THROWS_AS(lift_minimizer(reduce_sphere(square_of_sum()), Vector{1.1}), DimensionError);
    }
}

TEST_CASE("sphere and reduced ball agree on random instances") {
    SolveOptions o;
    o.starts = 24;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 2 + seed % 5;                                // 2..6
        const std::size_t m = 1 + seed % std::min<std::size_t>(2, n - 1); // 1..2, < n
        const int degree = 2 + static_cast<int>(seed % 3);                 // 2..4
        const GeneratedInstance inst = generate_instance(seed, n, m, degree, 0.0, false);
        CAPTURE(seed);
        const ReducedBallProblem prob = reduce_sphere({inst.f0, inst.ell0});
        o.seed = seed;
        const SolveResult full = minimize_sphere(inst.h, o);
        const SolveResult reduced = minimize_ball(prob.g, o);
        const double bf = brute_force_min(prob.g, BallDomain{}, 5000, seed).value;
        CHECK(std::abs(full.value - reduced.value) < 1e-6);
        CHECK(std::abs(reduced.value - bf) < 1e-6);

        const Vector x = lift_minimizer(prob, reduced.point);
        CHECK(std::abs(norm2(x) - 1.0) < 1e-9);
        CHECK(std::abs(inst.h.evaluate(x) - reduced.value) < 1e-8);
    }
}

TEST_CASE("lift preserves values at random points") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 4);
        const std::size_t m = 1 + static_cast<std::size_t>(t % 2);
        const Matrix ell = random_forms(n, m, rng, false);
        const Polynomial f = oracle::random_polynomial(m, 3, rng);
        const Polynomial h = substitute_matrix(f, ell.transpose());
        const ReducedBallProblem prob = reduce_sphere({f, ell});
        const Vector y = rng.ball_point(m);
        const Vector x = lift_minimizer(prob, y);
        CHECK(std::abs(norm2(x) - 1.0) < 1e-9);
        CHECK(std::abs(h.evaluate(x) - prob.g.evaluate(y)) < 1e-8 * std::max(1.0, std::abs(h.evaluate(x))));
        const Vector xb = lift_to_ball(prob, y);
        CHECK(std::abs(norm2(xb) - norm2(y)) < 1e-12);
    }
}
