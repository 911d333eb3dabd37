#pragma once

// Exact representation theory of K = Spin(2n+1) (type B_n), M = Spin(2n)
// (type D_n) and of G-weights (type D_{n+1}), in the coordinates
// e_2,...,e_{n+1} (resp. e_1,...,e_{n+1} for G).

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "geoflow/weight.hpp"

namespace geoflow::rootdata {

enum class Family { B, D };

struct GroupDesc {
    Family family = Family::D;
    int rank = 1;

    // The three roles used throughout, for d = 2n+1.
    static GroupDesc K(int n) { return {Family::B, n}; }
    static GroupDesc M(int n) { return {Family::D, n}; }
    static GroupDesc G(int n) { return {Family::D, n + 1}; }

    std::string name() const;
    friend auto operator<=>(const GroupDesc&, const GroupDesc&) = default;
    friend bool operator==(const GroupDesc&, const GroupDesc&) = default;
};

struct Irrep {
    GroupDesc group;
    Weight weight;

    // Validates dominance and parity; throws InputError.
    static Irrep make(GroupDesc group, Weight weight);
    static Irrep trivial(GroupDesc group);

    std::string str() const { return weight.str(); }
    friend auto operator<=>(const Irrep&, const Irrep&) = default;
    friend bool operator==(const Irrep&, const Irrep&) = default;
};

bool is_dominant(const GroupDesc& group, const Weight& w);

// Signed weight multiset; multiplicities are positive for genuine representations.
using WeightTable = std::map<Weight, long>;

// Integer combination of irreducibles of one group; zero coefficients are never stored.
class VirtualRep {
public:
    explicit VirtualRep(GroupDesc group) : group_(group) {}
    VirtualRep(const Irrep& irrep, long coeff = 1);

    const GroupDesc& group() const { return group_; }
    const std::map<Weight, long>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    long coefficient(const Weight& w) const;

    void add(const Weight& highest, long coeff);
    VirtualRep& operator+=(const VirtualRep& other);
    VirtualRep& operator-=(const VirtualRep& other);
    friend VirtualRep operator+(VirtualRep a, const VirtualRep& b) { return a += b; }
    friend VirtualRep operator-(VirtualRep a, const VirtualRep& b) { return a -= b; }
    VirtualRep scaled(long factor) const;

    // Signed total dimension.
    long long dim() const;
    // Sum of |coefficient| * dim; bounds |character| on the torus.
    long long character_bound() const;
    WeightTable weight_table() const;
    // Terms in descending lexicographic order, e.g. "(1,0):+1 (0,0):-1".
    std::string str() const;

    friend bool operator==(const VirtualRep&, const VirtualRep&) = default;

private:
    GroupDesc group_;
    std::map<Weight, long> terms_;
};

// Coordinates on a fixed lift of the maximal torus to the Spin group.
struct TorusElement {
    std::vector<double> angles;
};

Weight rho(const GroupDesc& group);
std::vector<Weight> positive_roots(const GroupDesc& group);

long long weyl_dim(const Irrep& rep);

// Full weight table from Freudenthal's recursion; cached, thread-safe.
const WeightTable& weight_multiplicities(const Irrep& rep);

// Sum over the weight table of mult * exp(i <mu, theta>).
std::complex<double> character(const Irrep& rep, const TorusElement& t);
std::complex<double> character(const VirtualRep& rep, const TorusElement& t);
std::complex<double> character(const WeightTable& table, std::span<const double> angles);

// Dominant Weyl conjugate of w.
Weight dominant_conjugate(const GroupDesc& group, const Weight& w);

// Weyl-group element w with w(v) dominant, returned as (w(v), det w); nullopt
// when v lies on a reflecting hyperplane.
std::optional<std::pair<Weight, int>> reflect_to_dominant(const GroupDesc& group, const Weight& v);

// Peels highest weights off a weight multiset.
VirtualRep decompose(const GroupDesc& group, const WeightTable& table);
VirtualRep tensor(const VirtualRep& a, const VirtualRep& b);

Irrep w0_act(const Irrep& sigma);
Irrep contragredient(const Irrep& sigma);
Rational casimir_shift(const Irrep& sigma);

VirtualRep branch_K_to_M(const Irrep& nu);
// Restriction iota^* of a virtual K-representation.
VirtualRep restrict_to_M(const VirtualRep& k_rep);

Irrep nu_sigma(const Irrep& sigma);
// The K-type with weight (k_j(sigma) - 1/2)_j; requires k_{n+1}(sigma) > 0.
Irrep nu_of_sigma(const Irrep& sigma);

struct SpinReps {
    Irrep kappa;
    Irrep kappa_plus;
    Irrep kappa_minus;
};
SpinReps spin_reps(int n);

// Klimyk decomposition of nu (x) kappa.
VirtualRep tensor_with_spin(const Irrep& nu);

struct SplitResult {
    VirtualRep nu_plus;
    VirtualRep nu_minus;
};
SplitResult split_nu_pm(const Irrep& sigma);

// The integers m_nu(sigma) with sum m_nu iota^* nu = sigma (+ w0 sigma).
VirtualRep m_coeffs(const Irrep& sigma);

// p-th exterior power of the standard 2n-dimensional M-module.
VirtualRep lambda_p_nbar(int n, int p);

}  // namespace geoflow::rootdata
