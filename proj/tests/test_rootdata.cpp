#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include "doctest.h"
#include "geoflow/error.hpp"
#include "geoflow/rootdata.hpp"

using namespace geoflow;
using namespace geoflow::rootdata;

namespace {

Irrep M(std::initializer_list<int> w) { return Irrep::make(GroupDesc::M(static_cast<int>(w.size())), Weight::integral(w)); }
Irrep K(std::initializer_list<int> w) { return Irrep::make(GroupDesc::K(static_cast<int>(w.size())), Weight::integral(w)); }
Irrep of(GroupDesc g, const char* w) { return Irrep::make(g, Weight::parse(w)); }

// Weyl group of type B/D acting by signed permutations, with determinants.
std::vector<std::pair<std::vector<int>, std::vector<int>>> signed_perms(const GroupDesc& g) {
    std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
    const int r = g.rank;
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (int mask = 0; mask < (1 << r); ++mask) {
            std::vector<int> signs(r);
            int flips = 0;
            for (int i = 0; i < r; ++i) {
                signs[i] = (mask >> i & 1) ? -1 : 1;
                flips += mask >> i & 1;
            }
            if (g.family == Family::D && flips % 2) continue;
            if (g.family == Family::D && r == 1 && flips) continue;
            out.emplace_back(perm, signs);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

int perm_sign(const std::vector<int>& p) {
    int inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 ? -1 : 1;
}

std::complex<double> alternant(const GroupDesc& g, const Weight& v, const std::vector<double>& th) {
    std::complex<double> s = 0;
    for (const auto& [perm, signs] : signed_perms(g)) {
        int det = perm_sign(perm);
        if (g.family == Family::B)
            for (int x : signs) det *= x;
        double phase = 0;
        for (int i = 0; i < g.rank; ++i) phase += signs[i] * v.coord(perm[i]) * th[i];
        s += static_cast<double>(det) * std::polar(1.0, phase);
    }
    return s;
}

// Weyl quotient formula at a regular torus point.
std::complex<double> weyl_character(const Irrep& rep, const std::vector<double>& th) {
    const Weight r = rho(rep.group);
    return alternant(rep.group, rep.weight + r, th) / alternant(rep.group, r, th);
}

std::vector<Irrep> corpus(GroupDesc g, int bound) {
    std::vector<Irrep> out;
    std::vector<int> w(g.rank);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == g.rank) {
            for (int half = 0; half < 2; ++half) {
                std::vector<int> t(w.size());
                for (std::size_t k = 0; k < w.size(); ++k) t[k] = 2 * w[k] + half;
                Weight cand(t);
                if (is_dominant(g, cand)) out.push_back(Irrep{g, cand});
            }
            return;
        }
        for (int v = -bound; v <= bound; ++v) {
            w[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

TEST_CASE("rho and dimensions") {
    CHECK(rho(GroupDesc::M(2)) == Weight::integral({1, 0}));
    CHECK(rho(GroupDesc::M(1)) == Weight::integral({0}));
    CHECK(rho(GroupDesc::G(2)) == Weight::integral({2, 1, 0}));
    CHECK(weyl_dim(M({1, 0})) == 4);
    CHECK(weyl_dim(K({1, 0})) == 5);
    CHECK(weyl_dim(Irrep::trivial(GroupDesc::K(3))) == 1);
    CHECK(weyl_dim(spin_reps(3).kappa) == 8);
    CHECK(weyl_dim(spin_reps(2).kappa_plus) == 2);
    CHECK(weyl_dim(spin_reps(2).kappa_minus) == 2);
    // Adjoint representations: dim so(m) = m(m-1)/2.
    CHECK(weyl_dim(K({1, 1, 0})) == 21);
    CHECK(weyl_dim(M({1, 1, 0})) == 15);
    CHECK(weyl_dim(Irrep::make(GroupDesc::G(3), Weight::integral({1, 1, 0, 0}))) == 28);
}

TEST_CASE("weight tables") {
    const auto& d2 = weight_multiplicities(M({1, 0}));
    CHECK(d2.size() == 4);
    for (const auto& [w, m] : d2) CHECK(m == 1);
    CHECK(d2.contains(Weight::integral({0, -1})));
    const auto& triv = weight_multiplicities(Irrep::trivial(GroupDesc::M(2)));
    REQUIRE(triv.size() == 1);
    CHECK(triv.begin()->second == 1);
    const auto& spin = weight_multiplicities(of(GroupDesc::K(2), "1/2,1/2"));
    CHECK(spin.size() == 4);
    // Adjoint of B_2: zero weight has multiplicity equal to the rank.
    CHECK(weight_multiplicities(K({1, 1})).at(Weight::zero(2)) == 2);
}

TEST_CASE("Weyl dimension equals weight-table sum and characters match Weyl's formula") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 6.0);
    for (int n = 1; n <= 3; ++n) {
        for (GroupDesc g : {GroupDesc::K(n), GroupDesc::M(n), GroupDesc::G(n)}) {
            for (const auto& rep : corpus(g, n == 3 ? 2 : 3)) {
                const auto& table = weight_multiplicities(rep);
                long total = 0;
                for (const auto& [w, m] : table) total += m;
                CHECK(total == weyl_dim(rep));
                std::vector<double> th(g.rank);
                for (auto& x : th) x = u(rng);
                const auto a = character(rep, TorusElement{th});
                const auto b = weyl_character(rep, th);
                CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)));
            }
        }
    }
}

TEST_CASE("characters") {
    CHECK(std::abs(character(M({1, 0}), TorusElement{{M_PI, 0.0}})) < 1e-14);
    const auto c = character(Irrep{GroupDesc::M(1), Weight::integral({-3})}, TorusElement{{0.4}});
    CHECK(std::abs(c - std::polar(1.0, -1.2)) < 1e-14);
    CHECK(character(K({2, 1}), TorusElement{{0.0, 0.0}}).real() == doctest::Approx(weyl_dim(K({2, 1}))));
}

TEST_CASE("w0, contragredient and Casimir") {
    CHECK(w0_act(M({1, 1})) == Irrep{GroupDesc::M(2), Weight::integral({1, -1})});
    CHECK(w0_act(M({1, 0})) == M({1, 0}));
    const Irrep s{GroupDesc::M(3), Weight::integral({3, 2, -1})};
    CHECK(w0_act(w0_act(s)) == s);
    CHECK(contragredient(M({1, 1})) == M({1, 1}));
    CHECK(contragredient(M({3})) == Irrep{GroupDesc::M(1), Weight::integral({-3})});
    CHECK(casimir_shift(M({3})) == Rational(8));
    CHECK(casimir_shift(M({0, 0})) == Rational(-4));
    CHECK(casimir_shift(M({1, 1})) == Rational(0));
    CHECK(casimir_shift(s) == casimir_shift(w0_act(s)));
    CHECK(casimir_shift(of(GroupDesc::M(1), "1/2")) == Rational(-3, 4));
}

TEST_CASE("branching") {
    auto b = branch_K_to_M(K({1, 0}));
    CHECK(b.str() == "(1,0):+1 (0,0):+1");
    CHECK(branch_K_to_M(K({1, 1})).str() == "(1,1):+1 (1,0):+1 (1,-1):+1");
    auto b1 = branch_K_to_M(of(GroupDesc::K(1), "3/2"));
    CHECK(b1.terms().size() == 4);
    for (int n = 1; n <= 3; ++n)
        for (const auto& nu : corpus(GroupDesc::K(n), 3)) {
            const auto br = branch_K_to_M(nu);
            CHECK(br.dim() == weyl_dim(nu));
            for (const auto& [w, c] : br.terms()) CHECK(c == 1);
        }
}

TEST_CASE("nu_sigma, nu_of_sigma and spin") {
    CHECK(nu_sigma(Irrep{GroupDesc::M(2), Weight::integral({1, -1})}) == K({1, 1}));
    CHECK(nu_of_sigma(M({1, 1})) == of(GroupDesc::K(2), "1/2,1/2"));
    CHECK(nu_of_sigma(M({2, 1})) == of(GroupDesc::K(2), "3/2,1/2"));
    CHECK_THROWS_AS(nu_of_sigma(M({1, 0})), InputError);
    CHECK(spin_reps(2).kappa_minus.weight == Weight::parse("1/2,-1/2"));
    CHECK(tensor_with_spin(of(GroupDesc::K(2), "1/2,1/2")).str() == "(1,1):+1 (1,0):+1 (0,0):+1");
    CHECK(tensor_with_spin(Irrep::trivial(GroupDesc::K(2))).str() == "(1/2,1/2):+1");
    std::mt19937 rng(3);
    for (int n = 1; n <= 3; ++n) {
        auto reps = corpus(GroupDesc::K(n), 3);
        std::shuffle(reps.begin(), reps.end(), rng);
        for (std::size_t i = 0; i < std::min<std::size_t>(20, reps.size()); ++i) {
            const auto t = tensor_with_spin(reps[i]);
            CHECK(t.dim() == weyl_dim(reps[i]) * (1LL << n));
            // Klimyk must agree with brute-force weight convolution.
            CHECK(t == tensor(VirtualRep(reps[i]), VirtualRep(spin_reps(n).kappa)));
        }
    }
}

TEST_CASE("split and m_coeffs") {
    const auto split = split_nu_pm(M({1, 1}));
    CHECK(split.nu_plus.str() == "(1,1):+1 (0,0):+1");
    CHECK(split.nu_minus.str() == "(1,0):+1");
    CHECK(m_coeffs(M({1, 1})) == split.nu_plus - split.nu_minus);
    CHECK(m_coeffs(M({1, 0})).str() == "(1,0):+1 (0,0):-1");
    CHECK(m_coeffs(Irrep::trivial(GroupDesc::M(3))).str() == "(0,0,0):+1");

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-7.0, 7.0);
    for (int n = 1; n <= 3; ++n) {
        for (const auto& sigma : corpus(GroupDesc::M(n), 3)) {
            const auto m = m_coeffs(sigma);
            for (const auto& [w, c] : m.terms()) CHECK(std::abs(c) == 1);
            VirtualRep target(sigma);
            if (!(w0_act(sigma) == sigma)) target += VirtualRep(w0_act(sigma));
            CHECK(restrict_to_M(m) == target);
            if (sigma.weight.twice().back() > 0) {
                const auto sp = split_nu_pm(sigma);
                CHECK(sp.nu_plus + sp.nu_minus == tensor_with_spin(nu_of_sigma(sigma)));
                std::vector<double> th(n);
                for (auto& x : th) x = u(rng);
                TorusElement t{th};
                const auto lhs = character(restrict_to_M(sp.nu_plus), t) - character(restrict_to_M(sp.nu_minus), t);
                const auto rhs = character(sigma, t) + character(w0_act(sigma), t);
                CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("exterior powers of the standard representation") {
    CHECK(lambda_p_nbar(2, 0).str() == "(0,0):+1");
    CHECK(lambda_p_nbar(1, 1).str() == "(1):+1 (-1):+1");
    CHECK(lambda_p_nbar(2, 2).str() == "(1,1):+1 (1,-1):+1");
    CHECK(lambda_p_nbar(3, 3).str() == "(1,1,1):+1 (1,1,-1):+1");
    for (int n = 1; n <= 3; ++n)
        for (int p = 0; p <= 2 * n; ++p) {
            long long binom = 1;
            for (int i = 0; i < p; ++i) binom = binom * (2 * n - i) / (i + 1);
            CHECK(lambda_p_nbar(n, p).dim() == binom);
        }
    CHECK_THROWS_AS(lambda_p_nbar(2, 5), InputError);
}

TEST_CASE("validation of weights") {
    CHECK_THROWS_AS(Irrep::make(GroupDesc::M(2), Weight::integral({2, 3})), InputError);
    CHECK_THROWS_AS(Irrep::make(GroupDesc::M(2), Weight::parse("1,1/2")), InputError);
    CHECK_THROWS_AS(Irrep::make(GroupDesc::K(2), Weight::integral({1, -1})), InputError);
    CHECK_THROWS_AS(Weight::parse("1,x"), InputError);
    CHECK(Weight::parse("(3/2, 0.5)").str() == "(3/2,1/2)");
}
