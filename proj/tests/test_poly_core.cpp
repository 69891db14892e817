#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lowform/ball_moments.hpp"
#include "lowform/error.hpp"
#include "lowform/polynomial.hpp"
#include "oracles.hpp"

using namespace lowform;

namespace {

Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

}  // namespace

TEST_CASE("evaluate") {
    const Polynomial p = x(2, 0) * x(2, 0) + 2.0 * x(2, 0) * x(2, 1);
    CHECK(p.evaluate(Vector{1.0, 1.0}) == doctest::Approx(3.0));
    CHECK(Polynomial(2).evaluate(Vector{0.3, -4.0}) == 0.0);
    const Polynomial sq = pow(x(2, 0) + x(2, 1), 2);
    CHECK(std::abs(sq.evaluate(Vector{1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)})) < 1e-15);
    CHECK_THROWS_AS(p.evaluate(Vector{1.0}), DimensionError);
}

TEST_CASE("zero polynomial has no terms") {
    Polynomial p = x(3, 1) - x(3, 1);
    CHECK(p.is_zero());
    CHECK(p.degree() == -1);
    p.add_term({0, 0, 0}, 1e-15);
    CHECK(p.is_zero());
}

TEST_CASE("gradient") {
    SUBCASE("power rule") {
        const Polynomial p = x(2, 0) * x(2, 0) * x(2, 1);
        const auto g = gradient(p);
        REQUIRE(g.size() == 2);
        CHECK(g[0] == 2.0 * x(2, 0) * x(2, 1));
        CHECK(g[1] == x(2, 0) * x(2, 0));
    }
    SUBCASE("constant") {
        for (const auto& gi : gradient(Polynomial::constant(3, 4.0))) CHECK(gi.is_zero());
    }
    SUBCASE("chain rule") {
        const auto g = gradient(pow(x(2, 0) + x(2, 1), 2));
        const Polynomial expected = 2.0 * (x(2, 0) + x(2, 1));
        CHECK(max_coefficient_gap(g[0], expected) < 1e-15);
        CHECK(max_coefficient_gap(g[1], expected) < 1e-15);
    }
}

TEST_CASE("gradient matches central finite differences") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
        const Polynomial p = oracle::random_polynomial(n, 1 + trial % 4, rng, 0.7);
        const auto g = gradient(p);
        for (int k = 0; k < 20; ++k) {
            const Vector pt = rng.ball_point(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double fd = oracle::central_difference(p, pt, i, 1e-5);
                const double an = g[i].evaluate(pt);
                CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
            }
        }
    }
}

TEST_CASE("substitute_linear") {
    SUBCASE("expansion") {
        const Polynomial p = pow(x(1, 0), 2);
        const Polynomial q = substitute_linear(p, {x(2, 0) + x(2, 1)});
        const Polynomial expected = x(2, 0) * x(2, 0) + 2.0 * x(2, 0) * x(2, 1) + x(2, 1) * x(2, 1);
        CHECK(max_coefficient_gap(q, expected) < 1e-15);
    }
    SUBCASE("identity") {
        Rng rng(3);
        const Polynomial p = oracle::random_polynomial(3, 3, rng);
        CHECK(substitute_linear(p, {x(3, 0), x(3, 1), x(3, 2)}) == p);
    }
    SUBCASE("scaling") {
        const double c = 2.5;
        const Polynomial q = substitute_linear(x(2, 0) * x(2, 1), {x(2, 0), c * x(2, 1)});
        CHECK(max_coefficient_gap(q, c * x(2, 0) * x(2, 1)) < 1e-15);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(substitute_linear(x(2, 0), {x(2, 0)}), DimensionError);
        CHECK_THROWS_AS(substitute_linear(x(2, 0), {x(2, 0), x(3, 0)}), DimensionError);
    }
}

TEST_CASE("substitute_linear is a ring homomorphism") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const std::size_t k = 1 + static_cast<std::size_t>(trial % 4);
        const Polynomial p = oracle::random_polynomial(n, 2, rng, 0.8);
        const Polynomial q = oracle::random_polynomial(n, 2, rng, 0.8);
        std::vector<Polynomial> forms;
        for (std::size_t i = 0; i < n; ++i) forms.push_back(oracle::random_polynomial(k, 1, rng));
        CHECK(max_coefficient_gap(substitute_linear(p * q, forms),
                                  substitute_linear(p, forms) * substitute_linear(q, forms)) < 1e-10);
        CHECK(max_coefficient_gap(substitute_linear(p + q, forms),
                                  substitute_linear(p, forms) + substitute_linear(q, forms)) < 1e-10);
    }
}

TEST_CASE("evaluate commutes with substitution") {
    Rng rng(13);
    const Polynomial p = oracle::random_polynomial(3, 4, rng);
    std::vector<Polynomial> forms;
    for (int i = 0; i < 3; ++i) forms.push_back(oracle::random_polynomial(2, 1, rng));
    const Polynomial q = substitute_linear(p, forms);
    for (int k = 0; k < 50; ++k) {
        const Vector t = rng.ball_point(2);
        const double direct = p.evaluate(evaluate_all(forms, t));
        CHECK(std::abs(q.evaluate(t) - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("graded lex order") {
    GradedLex less;
    CHECK(less({0, 0}, {1, 0}));
    CHECK(less({2, 0}, {1, 1}));
    CHECK(less({1, 1}, {0, 2}));
    CHECK_FALSE(less({0, 2}, {2, 0}));
}

TEST_CASE("ball_monomial_moment") {
    for (std::size_t n = 1; n <= 6; ++n) CHECK(ball_monomial_moment(Exponent(n, 0), n) == 1.0);
    CHECK(ball_monomial_moment({3, 0}, 2) == 0.0);
    CHECK(ball_monomial_moment({2, 1, 4}, 3) == 0.0);
    // Frozen from a 2·10⁶-sample rejection Monte Carlo run (see the MC test below).
    CHECK(ball_monomial_moment({2, 0, 0}, 3) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(ball_monomial_moment({2, 0}, 3), DimensionError);
}

TEST_CASE("ball moments agree with the log-Gamma closed form") {
    for (std::size_t n = 1; n <= 8; ++n) {
        Exponent e(n, 0);
        for (int trial = 0; trial < 40; ++trial) {
            for (std::size_t i = 0; i < n; ++i) e[i] = 2 * ((trial * 7 + static_cast<int>(i) * 3) % 4);
            const double a = ball_monomial_moment(e);
            const double b = oracle::gamma_ball_moment(e);
            CHECK(std::abs(a - b) <= 1e-12 * b);
        }
    }
}

TEST_CASE("ball moment (2,0,0) against Monte Carlo") {
    const Polynomial p = Polynomial::monomial({2, 0, 0}, 1.0);
    const auto mc = oracle::monte_carlo_ball(p, 1'000'000, 5);
    CHECK(std::abs(mc.mean - 0.2) < 3.0 * mc.std_error);
}

TEST_CASE("expectation_uniform_ball") {
    CHECK(expectation_uniform_ball(Polynomial::constant(4, 1.0)) == 1.0);
    CHECK(expectation_uniform_ball(x(2, 0) * x(2, 1)) == 0.0);
    const Polynomial r2 = x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1);
    CHECK(expectation_uniform_ball(r2) == doctest::Approx(0.5).epsilon(1e-15));
    const auto mc = oracle::monte_carlo_ball(r2, 1'000'000, 9);
    CHECK(std::abs(mc.mean - 0.5) < 3.0 * mc.std_error);
}

TEST_CASE("expectation agrees with Monte Carlo on random polynomials") {
    Rng rng(21);
    int within = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 5);
        const Polynomial p = oracle::random_polynomial(n, 1 + t % 6, rng, 0.5);
        const double exact = expectation_uniform_ball(p);
        const auto mc = oracle::monte_carlo_ball(p, 200'000, 100 + static_cast<std::uint64_t>(t));
        if (std::abs(exact - mc.mean) < 3.0 * mc.std_error + 1e-15) ++within;
    }
    // A 3σ band fails with probability ~0.27% per instance; allow one miss in 50.
    CHECK(within >= trials - 1);
}
