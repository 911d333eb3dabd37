#pragma once

// Selberg and Ruelle zeta functions evaluated from length-spectrum data in
// their half-planes of absolute convergence.

#include <complex>

#include "geoflow/rootdata.hpp"
#include "geoflow/specfun.hpp"
#include "geoflow/spectrum.hpp"

namespace geoflow::zeta {

using cplx = std::complex<double>;
using rootdata::Irrep;
using rootdata::VirtualRep;
using spectrum::LengthSpectrum;

struct ZetaValue {
    cplx value;
    double tail_bound = 0.0;  // certified bound on |value - exact|
    double cutoff_used = 0.0;
};

struct EvalOptions {
    double tail_target = 1e-12;
    int workers = 1;
};

// Half-plane of the class series; complete spectra converge further left.
double selberg_abscissa(const LengthSpectrum& spectrum);
double ruelle_abscissa(const LengthSpectrum& spectrum);

// log Z(s, sigma) from the class series; sigma may be virtual.
ZetaValue log_selberg(cplx s, const VirtualRep& sigma, const LengthSpectrum& spectrum,
                      const EvalOptions& options = {});
ZetaValue selberg_Z(cplx s, const VirtualRep& sigma, const LengthSpectrum& spectrum,
                    const EvalOptions& options = {});

struct ProductValue {
    cplx log_value;
    cplx value;
    double tail_bound = 0.0;  // bound on |log_value - log Z|
    int k_max = 0;
    double cutoff = 0.0;
};
// Product over primes of length <= cutoff and symmetric powers k <= k_max.
// k_max < 0 picks the smallest order meeting tail_target; a NaN cutoff
// takes the spectrum's own cutoff (all primes if complete).
ProductValue log_selberg_product(cplx s, const VirtualRep& sigma, const LengthSpectrum& spectrum,
                                 int k_max = -1, double cutoff = std::numeric_limits<double>::quiet_NaN(),
                                 double tail_target = 1e-12);
cplx selberg_Z_product(cplx s, const VirtualRep& sigma, const LengthSpectrum& spectrum, int k_max,
                       double cutoff);

// S = Z(sigma) Z(w0 sigma) (or Z(sigma) when sigma = w0 sigma); S_a = Z(sigma)/Z(w0 sigma).
ZetaValue symmetrized_S(cplx s, const Irrep& sigma, const LengthSpectrum& spectrum,
                        const EvalOptions& options = {});
ZetaValue antisymmetric_Sa(cplx s, const Irrep& sigma, const LengthSpectrum& spectrum,
                           const EvalOptions& options = {});

ZetaValue log_ruelle_sigma(cplx s, const VirtualRep& sigma, const LengthSpectrum& spectrum,
                           const EvalOptions& options = {});
// tau is a representation of G (type D_{n+1}).
ZetaValue log_ruelle_tau(cplx s, const Irrep& tau, const LengthSpectrum& spectrum,
                         const EvalOptions& options = {});

struct FactorizationCheck {
    cplx lhs;  // log R(s, sigma)
    cplx rhs;  // sum_p (-1)^p log Z(s+p-n, sigma (x) Lambda^p nbar)
    double discrepancy = 0.0;
    double tail_bound = 0.0;
    double cutoff_used = 0.0;
};
FactorizationCheck ruelle_selberg_factorization(cplx s, const VirtualRep& sigma,
                                                const LengthSpectrum& spectrum,
                                                const EvalOptions& options = {});

struct XiConfig {
    double vol = 1.0;
    int p = 1;
    double C_Gamma = 0.0;
    double c_norm = 1.0;
};
int epsilon(const Irrep& sigma);
// Elementary prefactor of Xi(s, sigma) multiplying S(s, sigma).
cplx xi_normalizer(cplx s, const Irrep& sigma, const XiConfig& config);
cplx xi_normalizer_logderiv(cplx s, const Irrep& sigma, const XiConfig& config);

}  // namespace geoflow::zeta
