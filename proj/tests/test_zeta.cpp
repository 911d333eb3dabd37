#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "geoflow/error.hpp"
#include "geoflow/zeta.hpp"

using namespace geoflow;
using namespace geoflow::zeta;
using rootdata::GroupDesc;
using spectrum::PrimeGeodesic;

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double inf = std::numeric_limits<double>::infinity();

Irrep M(const char* w) {
    const Weight wt = Weight::parse(w);
    return Irrep::make(GroupDesc::M(static_cast<int>(wt.size())), wt);
}

LengthSpectrum single(int n, double length, std::vector<double> angles = {}) {
    LengthSpectrum s;
    s.n = n;
    s.cutoff = inf;
    if (angles.empty()) angles.assign(n, 0.0);
    s.entries.push_back({length, angles, 1});
    return s;
}

bool same_bits(cplx a, cplx b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("one geodesic: leading class term") {
    // Only gamma itself survives when the target is loose enough.
    const auto s = single(1, 1.0);
    const auto classes = spectrum::enumerate_classes(s, 1.0);
    REQUIRE(classes.size() == 1);
    const cplx term = -std::exp(-4.0) / spectrum::det_factor(classes[0]);
    CHECK(term.real() == doctest::Approx(-0.0458378).epsilon(1e-6));
    CHECK(term.real() == doctest::Approx(-std::exp(-4.0) / std::pow(1 - std::exp(-1.0), 2)));
}

TEST_CASE("one geodesic: Selberg zeta against the symmetric-power product") {
    // n = 1, trivial sigma, theta = 0: Z(s) = prod_k (1 - e^{-(s+1+k)})^{k+1}.
    const auto s = single(1, 1.0);
    const VirtualRep triv(Irrep::trivial(GroupDesc::M(1)));
    for (cplx z : {cplx(3.0, 0.0), cplx(0.5, 2.0), cplx(-0.4, -1.0)}) {
        cplx oracle = 0.0;
        for (int k = 0; k < 400; ++k) oracle += (k + 1.0) * std::log(1.0 - std::exp(-(z + 1.0 + double(k))));
        const auto v = log_selberg(z, triv, s);
        CHECK(std::abs(v.value - oracle) <= v.tail_bound + 1e-13);
        CHECK(v.tail_bound <= 1e-12);
        const auto p = log_selberg_product(z, triv, s);
        CHECK(std::abs(p.log_value - oracle) <= p.tail_bound + 1e-13);
    }
    CHECK_THROWS_AS(log_selberg(cplx(-1.0, 0.0), triv, s), ConvergenceError);
}

TEST_CASE("one geodesic: Ruelle zeta is 1 - e^{-s l}") {
    const auto s = single(2, 0.8, {0.4, 1.3});
    const VirtualRep triv(Irrep::trivial(GroupDesc::M(2)));
    for (cplx z : {cplx(2.0, 0.0), cplx(0.3, 5.0), cplx(0.05, -2.0)}) {
        const auto v = log_ruelle_sigma(z, triv, s);
        CHECK(std::abs(v.value - std::log(1.0 - std::exp(-z * 0.8))) <= v.tail_bound + 1e-13);
    }
    // A nontrivial sigma sees e^{i <mu, k theta>} for every weight mu.
    const VirtualRep std2(M("(1,0)"));
    const cplx z(1.5, 0.5);
    cplx oracle = 0.0;
    for (double t : {0.4, -0.4, 1.3, -1.3}) oracle += std::log(1.0 - std::exp(-z * 0.8 + I * t));
    const auto v = log_ruelle_sigma(z, std2, s);
    CHECK(std::abs(v.value - oracle) <= v.tail_bound + 1e-13);
}

TEST_CASE("series and product agree on synthetic spectra") {
    for (int n = 1; n <= 2; ++n) {
        const auto s = spectrum::synthesize(n, 200, 5);
        const auto sigma = n == 1 ? M("(1)") : M("(1,1)");
        const cplx z(2.0 * n + 1.5, 0.7);
        const auto series = log_selberg(z, VirtualRep(sigma), s);
        const auto prod = log_selberg_product(z, VirtualRep(sigma), s);
        CHECK(std::abs(series.value - prod.log_value) <= series.tail_bound + prod.tail_bound + 1e-12);
        CHECK(prod.k_max >= 1);
        // Fewer symmetric powers means a weaker but still valid certificate.
        const auto rough = log_selberg_product(z, VirtualRep(sigma), s, 1);
        CHECK(std::abs(rough.log_value - series.value) <= rough.tail_bound + series.tail_bound + 1e-12);
        CHECK(rough.tail_bound >= prod.tail_bound);
    }
}

TEST_CASE("series respect the convergence half-plane") {
    const auto s = spectrum::synthesize(1, 100, 2);
    const VirtualRep triv(Irrep::trivial(GroupDesc::M(1)));
    CHECK_THROWS_AS(log_selberg(cplx(2.0, 1.0), triv, s), ConvergenceError);
    CHECK_THROWS_AS(log_ruelle_sigma(cplx(1.9, 0.0), triv, s), ConvergenceError);
    CHECK_THROWS_AS(log_selberg_product(cplx(1.0, 0.0), triv, s), ConvergenceError);
    // Just right of the abscissa the finite list cannot certify 1e-12.
    CHECK_THROWS_AS(log_selberg(cplx(2.0001, 0.0), triv, s), InsufficientSpectrumError);
    CHECK_THROWS_AS(log_selberg_product(cplx(4.0, 0.0), triv, s, 3, s.cutoff + 1.0), InsufficientSpectrumError);
    CHECK_THROWS_AS(log_selberg(cplx(5.0, 0.0), VirtualRep(M("(1,0)")), s), InputError);
}

TEST_CASE("virtual representations act linearly") {
    const auto s = spectrum::synthesize(2, 150, 9);
    const cplx z(5.5, -1.0);
    const VirtualRep a(M("(1,0)")), b(M("(1,-1)")), c(M("(2,1)"));
    const auto combo = a + b.scaled(2) - c;
    const auto lhs = log_selberg(z, combo, s);
    const cplx rhs = log_selberg(z, a, s).value + 2.0 * log_selberg(z, b, s).value - log_selberg(z, c, s).value;
    CHECK(std::abs(lhs.value - rhs) < 1e-12);
    CHECK(log_selberg(z, a - a, s).value == cplx(0.0, 0.0));
}

TEST_CASE("symmetrized and antisymmetrized products") {
    const auto s = spectrum::synthesize(2, 150, 4);
    const cplx z(6.0, 0.3);
    const Irrep sig = M("(2,1)"), flip = M("(2,-1)");
    const auto Zs = selberg_Z(z, VirtualRep(sig), s);
    const auto Zf = selberg_Z(z, VirtualRep(flip), s);
    const auto S = symmetrized_S(z, sig, s);
    const auto Sa = antisymmetric_Sa(z, sig, s);
    CHECK(std::abs(S.value - Zs.value * Zf.value) < 1e-12 * std::abs(S.value));
    CHECK(std::abs(Sa.value - Zs.value / Zf.value) < 1e-12 * std::abs(Sa.value));
    const Irrep self = M("(1,0)");
    CHECK(std::abs(symmetrized_S(z, self, s).value - selberg_Z(z, VirtualRep(self), s).value) < 1e-14);
    CHECK(antisymmetric_Sa(z, self, s).value == cplx(1.0, 0.0));
}

TEST_CASE("Ruelle equals the alternating product of Selberg factors") {
    for (int n = 1; n <= 3; ++n) {
        const auto s = spectrum::synthesize(n, 150 * n, 21 + n);
        const cplx z(3.0 * n + 1.0, 0.4);
        std::vector<VirtualRep> sigmas{VirtualRep(Irrep::trivial(GroupDesc::M(n)))};
        if (n == 1) sigmas.emplace_back(M("(2)"));
        if (n == 2) sigmas.emplace_back(M("(1,-1)"));
        if (n == 3) sigmas.emplace_back(M("(1,0,0)"));
        for (const auto& sigma : sigmas) {
            const auto f = ruelle_selberg_factorization(z, sigma, s);
            CHECK(f.discrepancy <= 1e-12 * std::max(1.0, std::abs(f.lhs)));
            CHECK(f.tail_bound <= 1e-11);
        }
    }
    // Complete spectra converge further left.
    const auto one = single(2, 0.9, {0.2, 0.5});
    const auto f = ruelle_selberg_factorization(cplx(2.5, 1.0), VirtualRep(M("(1,0)")), one);
    CHECK(f.discrepancy <= 1e-12);
    CHECK(std::abs(f.lhs - log_ruelle_sigma(cplx(2.5, 1.0), VirtualRep(M("(1,0)")), one).value) <= 2e-12);
}

TEST_CASE("Ruelle zeta of a G-representation") {
    const auto s = single(2, 0.8, {0.4, 1.3});
    const cplx z(3.5, 0.6);
    const auto triv = log_ruelle_tau(z, Irrep::trivial(GroupDesc::G(2)), s);
    CHECK(std::abs(triv.value - log_ruelle_sigma(z, VirtualRep(Irrep::trivial(GroupDesc::M(2))), s).value) < 1e-13);
    // Standard representation of D3 restricted to A M: e^{+-l} plus the standard of M.
    const auto std3 = log_ruelle_tau(z, Irrep::make(GroupDesc::G(2), Weight::parse("(1,0,0)")), s);
    const VirtualRep trivM(Irrep::trivial(GroupDesc::M(2)));
    const cplx oracle = log_ruelle_sigma(z - 1.0, trivM, s).value + log_ruelle_sigma(z + 1.0, trivM, s).value +
                        log_ruelle_sigma(z, VirtualRep(M("(1,0)")), s).value;
    CHECK(std::abs(std3.value - oracle) < 1e-12);
    CHECK_THROWS_AS(log_ruelle_tau(cplx(0.9, 0.0), Irrep::make(GroupDesc::G(2), Weight::parse("(1,0,0)")), s),
                    ConvergenceError);
}

TEST_CASE("results do not depend on the worker count") {
    const auto s = spectrum::synthesize(2, 400, 8);
    const cplx z(5.2, 3.0);
    const VirtualRep sigma(M("(2,1)"));
    const auto ref = log_selberg(z, sigma, s, {1e-12, 1});
    const auto fref = ruelle_selberg_factorization(cplx(7.0, 0.5), sigma, s, {1e-12, 1});
    for (int w : {2, 3, 8}) {
        CHECK(same_bits(log_selberg(z, sigma, s, {1e-12, w}).value, ref.value));
        const auto f = ruelle_selberg_factorization(cplx(7.0, 0.5), sigma, s, {1e-12, w});
        CHECK(same_bits(f.lhs, fref.lhs));
        CHECK(same_bits(f.rhs, fref.rhs));
    }
}

TEST_CASE("Xi normalizer") {
    const XiConfig cfg{2.5, 3, 0.7, 1.0};
    for (const char* w : {"(0)", "(2)", "(1,0)", "(2,1)", "(3/2,1/2)"}) {
        const Irrep sig = M(w);
        CHECK(std::abs(xi_normalizer(0.0, sig, cfg) - 1.0) < 1e-14);
        for (cplx z : {cplx(0.7, 0.2), cplx(2.0, -1.5), cplx(-0.3, 0.8)}) {
            const double h = 1e-5;
            const cplx fd = (std::log(xi_normalizer(z + h, sig, cfg)) - std::log(xi_normalizer(z - h, sig, cfg))) /
                            (2.0 * h);
            const cplx an = xi_normalizer_logderiv(z, sig, cfg);
            CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
        }
    }
    CHECK(epsilon(M("(2,1)")) == 2);
    CHECK(epsilon(M("(1,0)")) == 1);
    CHECK(epsilon(M("(2)")) == 2);
    CHECK_THROWS_AS(xi_normalizer(cplx(-2.0, 0.0), M("(1,0)"), cfg), PoleError);
}
