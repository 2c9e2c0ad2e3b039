#pragma once

/**
 * Polynomial and rational-function helpers.
 *
 * These exist for two purposes only: building state-space realizations of
 * transfer functions whose coefficients are known in closed form, and serving
 * as independent evaluation oracles in tests.  All system-level analysis is
 * done on state-space models (see state_space.hpp).
 */

#include <vector>

#include "gfmcert/types.hpp"

namespace gfmcert {

/// Real polynomial in ascending-power coefficient order: c[0] + c[1] s + ...
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() : coeffs{0.0} {}
    explicit Polynomial(std::vector<double> c);
    static Polynomial constant(double k) { return Polynomial({k}); }
    /// The monomial s.
    static Polynomial s() { return Polynomial({0.0, 1.0}); }

    int degree() const;  ///< -1 for the zero polynomial
    bool is_zero() const;
    double leading() const;
    Complex eval(Complex z) const;
    /// Drop trailing coefficients below `tol` relative to the largest one.
    void trim(double tol = 0.0);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double k) const;

    /// Roots via the companion-matrix eigenproblem.
    std::vector<Complex> roots() const;

    /// Divide by the monomial s (requires coeffs[0] == 0 exactly or within
    /// `tol` relative to the largest coefficient, which is then discarded).
    Polynomial deflate_origin(double tol = 1e-12) const;
};

/// Ratio of two real polynomials.  Not automatically reduced.
struct Rational {
    Polynomial num;
    Polynomial den;

    Rational() : num(Polynomial::constant(0)), den(Polynomial::constant(1)) {}
    Rational(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {}
    static Rational constant(double k) { return {Polynomial::constant(k), Polynomial::constant(1)}; }

    Complex eval(Complex z) const;
    bool proper() const { return num.degree() <= den.degree(); }
    bool strictly_proper() const { return num.degree() < den.degree(); }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
};

/// State-space realization of a proper SISO rational function in
/// controllable canonical form.  Throws IllPosed if improper.
struct SisoRealization {
    Mat a, b, c, d;  // d is 1x1
};
SisoRealization realize_siso(const Rational& r);

/**
 * Columnwise realization of a p×1 transfer vector with a shared denominator:
 * entries num[k](s)/den(s), all proper.  Produces deg(den) states.
 */
SisoRealization realize_column(const Polynomial& den, const std::vector<Polynomial>& nums);

}  // namespace gfmcert
