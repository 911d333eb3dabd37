#pragma once

// Length spectra with Spin-torus holonomy: file formats, validation,
// synthetic generation and enumeration of closed-geodesic classes.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace geoflow::spectrum {

using cplx = std::complex<double>;

struct PrimeGeodesic {
    double length = 0.0;
    std::vector<double> angles;  // theta_2, ..., theta_{n+1}
    long mult = 1;

    friend bool operator==(const PrimeGeodesic&, const PrimeGeodesic&) = default;
};

struct LengthSpectrum {
    int n = 1;
    std::vector<PrimeGeodesic> entries;
    // Every prime of length <= cutoff is listed; infinity marks a complete list.
    double cutoff = 0.0;
    std::optional<double> growth_constant;

    bool complete() const { return cutoff == std::numeric_limits<double>::infinity(); }
    friend bool operator==(const LengthSpectrum&, const LengthSpectrum&) = default;
};

// A closed geodesic class gamma_0^power.
struct ClassTerm {
    const PrimeGeodesic* prime = nullptr;
    int power = 1;

    double length() const { return power * prime->length; }
};

enum class Format { jsonl, csv };
Format format_from_path(const std::filesystem::path& path);

// Throws InputError naming the offending line.
LengthSpectrum parse(std::istream& in, Format format);
void serialize(const LengthSpectrum& spectrum, std::ostream& out, Format format);
LengthSpectrum read_file(const std::filesystem::path& path);
void write_file(const LengthSpectrum& spectrum, const std::filesystem::path& path);

// d = 3 import: one complex length per line ("l+ti", "l,t" or "l t"), with an
// optional trailing multiplicity.
LengthSpectrum parse_complex_lengths(std::istream& in, std::optional<double> cutoff = {});

struct ValidationReport {
    bool sorted = true;
    bool positive = true;
    bool dimensions = true;
    std::size_t primes = 0;
    std::size_t classes = 0;
    double growth_constant = 0.0;  // max over R of N(R) e^{-2nR}
    double argmax_length = 0.0;
    bool growth_within_bound = true;
    std::vector<std::string> issues;

    bool ok() const { return sorted && positive && dimensions && growth_within_bound; }
};
ValidationReport validate(const LengthSpectrum& spectrum, std::optional<double> growth_bound = {});

// Deterministic for a given seed on every platform.
LengthSpectrum synthesize(int n, std::size_t count, std::uint64_t seed, double mean_gap = 0.1,
                          double floor = 0.5);

// Eigenvalues e^{-k l0 +- i k theta_j} of Ad(m_gamma a_gamma) on nbar.
std::vector<cplx> holonomy_eigenvalues(const ClassTerm& term);
cplx det_factor(const ClassTerm& term);

// All classes with length <= max_length, ordered by (length, prime index).
std::vector<ClassTerm> enumerate_classes(const LengthSpectrum& spectrum, double max_length);

// Abscissa data for a class series sum mult * chi * e^{-a l} / (k det^{q/2n}).
struct TailModel {
    double a = 0.0;               // decay rate of the weight factor
    int det_power = 0;            // 2n for Selberg-type series, 0 for Ruelle
    double character_bound = 1.0; // bound on |character| of every class
};

struct ClassPlan {
    std::vector<ClassTerm> terms;
    double cutoff_used = 0.0;
    double tail_bound = 0.0;
};

// Certified bound on the classes longer than L.
double tail_bound(const LengthSpectrum& spectrum, const TailModel& model, double L);

// Chooses the smallest L with tail_bound <= tail_target. Throws
// ConvergenceError outside the convergence half-plane and
// InsufficientSpectrumError when the cutoff is too small.
ClassPlan class_iterator(const LengthSpectrum& spectrum, const TailModel& model, double tail_target);

double fitted_growth_constant(const LengthSpectrum& spectrum);

}  // namespace geoflow::spectrum
