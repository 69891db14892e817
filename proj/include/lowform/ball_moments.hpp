#pragma once

#include "lowform/polynomial.hpp"

namespace lowform {

/// E[x^alpha] for x uniform on the closed unit ball of R^n, n = alpha.size().
///
/// Zero unless every exponent is even; otherwise
///   prod_i (alpha_i - 1)!!  /  prod_{k=1}^{|alpha|/2} (n + 2k),
/// which is the Gamma-function expression with all half-integer Gamma ratios
/// cancelled. For n = 0 (a point) only the empty monomial is defined and equals 1.
double ball_monomial_moment(const Exponent& alpha);

/// Same as above with an explicit dimension check.
double ball_monomial_moment(const Exponent& alpha, std::size_t n);

/// E[p] under the uniform distribution on the unit ball of R^{p.num_vars()}.
double expectation_uniform_ball(const Polynomial& p);

}  // namespace lowform
