#pragma once

// Special functions attached to principal series parameters (sigma, lambda):
// Pi-ratios, the polynomials P_j, the Omega function and its partial-fraction
// form, the Plancherel polynomial and the explicit c-function.

#include <complex>
#include <span>
#include <vector>

#include "geoflow/rootdata.hpp"

namespace geoflow::specfun {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;

// log Gamma, analytic on C minus (-inf, 0]; throws PoleError at 0, -1, -2, ...
cplx log_gamma(cplx z);
cplx digamma(cplx z);

// Polynomial in lambda^2: coeffs[k] multiplies lambda^(2k).
struct EvenPolynomial {
    std::vector<double> coeffs;
    int degree_bound = 0;  // bound on the degree in lambda

    int degree() const;
    cplx operator()(cplx lambda) const;
    // Integral of r -> P(r) over the segment [0, s].
    cplx integral(cplx s) const;
    // Integral of r -> P(i r) over the segment [0, s].
    cplx integral_imaginary(cplx s) const;
};

// a_j = k_j(sigma) + rho_j for j = 2..n+1 (index 0 holds j = 2).
std::vector<double> shifted_weight(const rootdata::Irrep& sigma);

// Pi(xi)/Pi(rho_M) with Pi = product over i<j of (xi_i^2 - xi_j^2).
cplx pi_ratio(std::span<const cplx> xi);

// P_j(sigma, lambda) from the reflected Pi-ratio; j runs over 2..n+1.
cplx p_j(const rootdata::Irrep& sigma, int j, cplx lambda);

enum class ClosedForm {
    Lagrange,   // denominators (k_j+rho_j)^2 - (k_p+rho_p)^2
    AsPrinted,  // denominators (k_j+rho_j)^2 - (k_p-rho_p)^2
};
// Product formula for P_j; throws DegenerateError when a denominator is below 1e-6.
cplx p_j_closed(const rootdata::Irrep& sigma, int j, cplx lambda,
                ClosedForm form = ClosedForm::Lagrange);

struct CjlEntry {
    int j;
    Rational l;
    long value;
};
// c_{j,l}(sigma) = P_j(sigma, i l) for m0 <= l < |k_j| + rho_j, m0 = |k_{n+1}|.
std::vector<CjlEntry> c_jl(const rootdata::Irrep& sigma);

cplx omega_direct(const rootdata::Irrep& sigma, cplx lambda);
// Partial-fraction form without the polynomial part Q.
cplx omega_explicit_terms(const rootdata::Irrep& sigma, cplx lambda);
cplx omega_decomposed(const rootdata::Irrep& sigma, cplx lambda);

struct QFit {
    EvenPolynomial q;
    std::vector<double> raw;  // coefficients of lambda^0..lambda^(raw.size()-1)
    double residual = 0.0;    // max abs misfit at the sample points
    double violation = 0.0;   // largest odd or above-bound coefficient
};
// Least-squares fit of Q(sigma, lambda) with an unconstrained polynomial basis.
QFit fit_Q(const rootdata::Irrep& sigma, std::span<const double> samples = {});
// Throws InternalError if the fit residual or the parity/degree violation exceeds 1e-8.
EvenPolynomial extract_Q(const rootdata::Irrep& sigma);

EvenPolynomial plancherel_poly(const rootdata::Irrep& sigma, double c_norm = 1.0);

// Requires [nu:sigma] != 0.
cplx c_function(const rootdata::Irrep& sigma, const rootdata::Irrep& nu, cplx lambda,
                cplx alpha_n = 1.0);
cplx c_function_logderiv(const rootdata::Irrep& sigma, const rootdata::Irrep& nu, cplx lambda);

struct ResolventPair {
    cplx lhs;
    cplx rhs;
};
ResolventPair resolvent_weights(std::span<const cplx> s, cplx z);

}  // namespace geoflow::specfun
