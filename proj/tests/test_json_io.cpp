#include <doctest.h>

#include "json_io.hpp"
#include "lowform/error.hpp"
#include "oracles.hpp"

using namespace lowform;
using io::json;

TEST_CASE("polynomial round trip is exact") {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const Polynomial p = oracle::random_polynomial(1 + t % 4, 4, rng);
        const json j = json::parse(io::to_json(p).dump());
        CHECK(io::polynomial_from_json(j) == p);
    }
}

TEST_CASE("terms are written in graded order") {
    const Polynomial p = Polynomial::monomial({0, 2}, 1.0) + Polynomial::monomial({1, 0}, 2.0) +
                         Polynomial::monomial({2, 0}, 3.0);
    const json j = io::to_json(p);
    CHECK(j["terms"][0]["exp"] == json::array({1, 0}));
    CHECK(j["terms"][1]["exp"] == json::array({2, 0}));
    CHECK(j["terms"][2]["exp"] == json::array({0, 2}));
}

TEST_CASE("matrices and sparse forms") {
    const Matrix a{{1.0, 2.0}, {3.0, 4.5}};
    CHECK(io::matrix_from_json(io::to_json(a)) == a);
    const SparseForm sf{Polynomial::monomial({2}, 1.0), Matrix{{0.6}, {0.8}}};
    const SparseForm back = io::sparse_form_from_json(io::to_json(sf));
    CHECK(back.f == sf.f);
    CHECK(back.ell == sf.ell);
    const Polyhedron region{a, {1.0, 2.0}};
    CHECK(io::polyhedron_from_json(io::to_json(region)).rhs == region.rhs);
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"terms": []})")), ParseError);
    CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"num_vars": 2, "terms": [{"exp": [1], "coef": 1}]})")),
                    ParseError);
    CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"num_vars": 1, "terms": [{"exp": [-1], "coef": 1}]})")),
                    ParseError);
    CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"num_vars": 1, "terms": [{"exp": [1], "coef": "x"}]})")),
                    ParseError);
    CHECK_THROWS_AS(io::matrix_from_json(json::parse("[[1, 2], [3]]")), ParseError);
    CHECK_THROWS_AS(io::sparse_form_from_json(json::parse(
                        R"({"f": {"num_vars": 2, "terms": []}, "ell": [[1.0], [0.0]]})")),
                    ParseError);
}
