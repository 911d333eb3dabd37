#pragma once

// Zero/pole bookkeeping for Z(s, sigma) from model spectral data: Laplace and
// Dirac eigenvalues, scattering poles and the cusp-count terms.

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoflow/rootdata.hpp"

namespace geoflow::ledger {

using cplx = std::complex<double>;

struct Point {
    cplx location;
    long mult = 1;
};

struct DiracEig {
    double mu = 0.0;
    long mult = 1;
};

struct SpectralModel {
    rootdata::Irrep sigma;
    std::vector<Point> laplace_eigs;  // lambda_k with m_s(lambda_k); lambda = 0 goes in m_s_zero
    std::vector<DiracEig> dirac_eigs; // only when sigma != w0 sigma
    long m_s_zero = 0;
    long c1 = 0;                      // only when sigma = w0 sigma
    std::vector<Point> beta_poles;    // beta in (0, n]
    std::vector<Point> eta_poles_sigma;
    std::vector<Point> eta_poles_w0sigma;
    int p = 1;
    double vol = 1.0;
    double C_Gamma = 0.0;
};

// Single JSON document; weights as "1,0" or [1, 0]. Throws InputError.
SpectralModel parse_model(std::istream& in);
SpectralModel read_model(const std::filesystem::path& path);
std::string model_to_json(const SpectralModel& model);

// Throws ModelError naming the violated parity or range condition.
void check_model(const SpectralModel& model);

struct Singularity {
    cplx location;
    long order = 0;  // > 0 zero, < 0 pole

    friend bool operator==(const Singularity&, const Singularity&) = default;
};

// Adds orders at identical locations, drops zeros, sorts by (Re, Im).
std::vector<Singularity> ledger_merge(std::vector<Singularity> items);

// Topological terms are listed for -l with l <= max_depth.
std::vector<Singularity> singularity_ledger(const SpectralModel& model, double max_depth = 10.0);

// Order at an exact location, 0 when absent.
long order_at(const std::vector<Singularity>& ledger, cplx location);

}  // namespace geoflow::ledger
