#include "geoflow/specfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "geoflow/error.hpp"

namespace geoflow::specfun {

using rootdata::Irrep;

namespace {

constexpr cplx I{0.0, 1.0};

void require_M(const Irrep& sigma) {
    if (sigma.group.family != rootdata::Family::D)
        throw InputError("expected an irreducible representation of M (type D)");
}

double dim_of(const Irrep& sigma) { return static_cast<double>(rootdata::weyl_dim(sigma)); }

}  // namespace

// ---------------------------------------------------------------------------

int EvenPolynomial::degree() const {
    for (std::size_t k = coeffs.size(); k-- > 0;)
        if (coeffs[k] != 0.0) return static_cast<int>(2 * k);
    return -1;
}

cplx EvenPolynomial::operator()(cplx lambda) const {
    const cplx mu = lambda * lambda;
    cplx acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * mu + coeffs[k];
    return acc;
}

cplx EvenPolynomial::integral(cplx s) const {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * std::pow(s, static_cast<int>(2 * k + 1)) / static_cast<double>(2 * k + 1);
    return acc;
}

cplx EvenPolynomial::integral_imaginary(cplx s) const {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        acc += sign * coeffs[k] * std::pow(s, static_cast<int>(2 * k + 1)) /
               static_cast<double>(2 * k + 1);
    }
    return acc;
}

// ---------------------------------------------------------------------------

std::vector<double> shifted_weight(const Irrep& sigma) {
    require_M(sigma);
    const int n = sigma.group.rank;
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = sigma.weight.coord(i) + (n - 1 - i);
    return a;
}

cplx pi_ratio(std::span<const cplx> xi) {
    const auto n = xi.size();
    cplx num = 1.0;
    double den = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = static_cast<double>(n - 1 - i);
        for (std::size_t k = i + 1; k < n; ++k) {
            const double rk = static_cast<double>(n - 1 - k);
            num *= xi[i] * xi[i] - xi[k] * xi[k];
            den *= ri * ri - rk * rk;
        }
    }
    return num / den;
}

namespace {

void check_index(const Irrep& sigma, int j) {
    if (j < 2 || j > sigma.group.rank + 1)
        throw InputError("index j must lie in 2.." + std::to_string(sigma.group.rank + 1));
}

}  // namespace

cplx p_j(const Irrep& sigma, int j, cplx lambda) {
    check_index(sigma, j);
    const auto a = shifted_weight(sigma);
    std::vector<cplx> xi(a.begin(), a.end());
    xi[j - 2] = -I * lambda;
    return pi_ratio(xi);
}

cplx p_j_closed(const Irrep& sigma, int j, cplx lambda, ClosedForm form) {
    check_index(sigma, j);
    const auto a = shifted_weight(sigma);
    const int n = sigma.group.rank;
    const double aj = a[j - 2];
    cplx value = dim_of(sigma);
    for (int p = 2; p <= n + 1; ++p) {
        if (p == j) continue;
        const double rho_p = n + 1 - p;
        const double b = form == ClosedForm::Lagrange ? a[p - 2] : sigma.weight.coord(p - 2) - rho_p;
        const double den = aj * aj - b * b;
        if (std::abs(den) <= 1e-6)
            throw DegenerateError("closed form for P_" + std::to_string(j) + " of " + sigma.str() +
                                  " has a vanishing denominator at p=" + std::to_string(p));
        value *= (-lambda * lambda - a[p - 2] * a[p - 2]) / den;
    }
    return value;
}

std::vector<CjlEntry> c_jl(const Irrep& sigma) {
    require_M(sigma);
    const int n = sigma.group.rank;
    const int twice_m0 = std::abs(sigma.weight.twice(n - 1));
    std::vector<CjlEntry> out;
    for (int j = 2; j <= n + 1; ++j) {
        const int twice_bound = std::abs(sigma.weight.twice(j - 2)) + 2 * (n + 1 - j);
        for (int tl = twice_m0; tl < twice_bound; tl += 2) {
            const cplx v = p_j(sigma, j, I * (0.5 * tl));
            const double nearest = std::round(v.real());
            if (std::abs(v.imag()) >= 1e-8 || std::abs(v.real() - nearest) >= 1e-8)
                throw IntegralityError("P_" + std::to_string(j) + "(" + sigma.str() + ", i*" +
                                       Rational(tl, 2).str() + ") is not integral");
            out.push_back({j, Rational(tl, 2), static_cast<long>(nearest)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Omega

namespace {

// psi(w + x) + psi(w - x); the simple poles at x = 0 cancel when w is a
// nonpositive integer.
cplx psi_pair(double w, cplx x) {
    if (w <= 0.0 && w == std::round(w)) {
        const int m = static_cast<int>(-w);
        cplx sum = digamma(1.0 + x) + digamma(1.0 - x);
        for (int r = 1; r <= m; ++r) {
            if (x == cplx(r) || x == cplx(-r)) throw PoleError("digamma pole", x);
            sum -= 1.0 / (x - static_cast<double>(r)) + 1.0 / (-x - static_cast<double>(r));
        }
        return sum;
    }
    return digamma(w + x) + digamma(w - x);
}

}  // namespace

cplx omega_direct(const Irrep& sigma, cplx lambda) {
    require_M(sigma);
    const auto a = shifted_weight(sigma);
    const int n = sigma.group.rank;
    const cplx x = I * lambda;
    try {
        cplx sum = 0.0;
        for (int j = 2; j <= n + 1; ++j) {
            const double aj = a[j - 2];
            sum += p_j(sigma, j, lambda) * (psi_pair(1.0 + aj, x) + psi_pair(1.0 - aj, x));
        }
        return -2.0 * dim_of(sigma) * euler_gamma - 0.5 * sum;
    } catch (const PoleError&) {
        throw PoleError("Omega(" + sigma.str() + ", lambda) has a pole", lambda);
    }
}

cplx omega_explicit_terms(const Irrep& sigma, cplx lambda) {
    require_M(sigma);
    const int n = sigma.group.rank;
    const double dim = dim_of(sigma);
    const double base = sigma.weight.all_half_integral() ? 0.5 : 1.0;
    const double m0 = std::abs(sigma.weight.coord(n - 1));
    const cplx lam2 = lambda * lambda;
    const cplx x = I * lambda;

    auto fraction = [&](double num, double l) {
        const cplx den = lam2 + l * l;
        if (den == 0.0) throw PoleError("Omega(" + sigma.str() + ", lambda) has a pole", lambda);
        return num / den;
    };

    cplx inner;
    try {
        inner = 2.0 * euler_gamma + digamma(base + x) + digamma(base - x);
    } catch (const PoleError&) {
        throw PoleError("Omega(" + sigma.str() + ", lambda) has a pole", lambda);
    }
    for (double l = base; l < m0; l += 1.0) inner += fraction(2.0 * l, l);
    cplx value = -dim * inner;

    for (const auto& e : c_jl(sigma)) {
        const double l = e.l.to_double();
        if (l == 0.0) continue;
        value -= static_cast<double>(e.value) * fraction(2.0 * l, l);
    }
    const auto a = shifted_weight(sigma);
    for (int j = 2; j <= n + 1; ++j) {
        const double aj = std::abs(a[j - 2]);
        if (aj != 0.0) value -= dim * fraction(aj, aj);
    }
    return value;
}

cplx omega_decomposed(const Irrep& sigma, cplx lambda) {
    return omega_explicit_terms(sigma, lambda) - extract_Q(sigma)(lambda);
}

QFit fit_Q(const Irrep& sigma, std::span<const double> samples) {
    require_M(sigma);
    const int n = sigma.group.rank;
    const int bound = 2 * n - 4;
    const int degree = std::max(2 * n, 2);

    std::vector<double> pts(samples.begin(), samples.end());
    if (pts.empty())
        for (int k = 0; k < degree + 6; ++k) pts.push_back(0.31 + 0.227 * k);
    if (static_cast<int>(pts.size()) < std::max(degree + 1, n + 3))
        throw InputError("fit_Q needs more sample points");
    const double scale = *std::max_element(pts.begin(), pts.end());

    const Eigen::Index rows = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd A(rows, degree + 1);
    Eigen::VectorXd y(rows);
    double imag_misfit = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double lam = pts[r];
        const cplx v = omega_explicit_terms(sigma, lam) - omega_direct(sigma, lam);
        y(r) = v.real();
        imag_misfit = std::max(imag_misfit, std::abs(v.imag()));
        double t = 1.0;
        for (int k = 0; k <= degree; ++k) {
            A(r, k) = t;
            t *= lam / scale;
        }
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    const double misfit = (A * c - y).cwiseAbs().maxCoeff();

    QFit fit;
    fit.residual = std::max(misfit, imag_misfit);
    fit.raw.resize(degree + 1);
    for (int k = 0; k <= degree; ++k) fit.raw[k] = c(k) / std::pow(scale, k);
    fit.q.degree_bound = bound;
    for (int k = 0; k <= degree; ++k) {
        if (k % 2 == 0 && k <= bound)
            fit.q.coeffs.push_back(fit.raw[k]);
        else
            fit.violation = std::max(fit.violation, std::abs(fit.raw[k]));
    }
    return fit;
}

EvenPolynomial extract_Q(const Irrep& sigma) {
    static std::mutex mutex;
    static std::map<Irrep, EvenPolynomial> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(sigma); it != cache.end()) return it->second;
    }
    const QFit fit = fit_Q(sigma);
    if (fit.residual >= 1e-8 || fit.violation >= 1e-8)
        throw InternalError("polynomial part of Omega(" + sigma.str() +
                            ") does not fit: residual " + std::to_string(fit.residual) +
                            ", parity/degree violation " + std::to_string(fit.violation));
    std::lock_guard lock(mutex);
    cache.emplace(sigma, fit.q);
    return fit.q;
}

// ---------------------------------------------------------------------------

EvenPolynomial plancherel_poly(const Irrep& sigma, double c_norm) {
    const auto a = shifted_weight(sigma);
    const int n = sigma.group.rank;
    // Roots e_1 +- e_j contribute (i lambda)^2 - a_j^2; roots inside b a constant.
    std::vector<double> poly{1.0};
    for (double aj : a) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += -aj * aj * poly[k];
            next[k + 1] += -poly[k];
        }
        poly = std::move(next);
    }
    double constant = c_norm;
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) constant *= a[i] * a[i] - a[k] * a[k];
    double rho_product = 1.0;
    for (int i = 0; i <= n; ++i)
        for (int k = i + 1; k <= n; ++k) {
            const double ri = n - i, rk = n - k;
            rho_product *= (ri - rk) * (ri + rk);
        }
    for (double& c : poly) c *= constant / rho_product;
    return EvenPolynomial{std::move(poly), 2 * n};
}

// ---------------------------------------------------------------------------
// c-function

namespace {

struct GammaFactors {
    std::vector<double> num;
    std::vector<double> den;
};

GammaFactors c_factors(const Irrep& sigma, const Irrep& nu) {
    require_M(sigma);
    const int n = sigma.group.rank;
    if (!(nu.group == rootdata::GroupDesc::K(n)))
        throw InputError("nu must be a K-representation of rank " + std::to_string(n));
    if (rootdata::branch_K_to_M(nu).coefficient(sigma.weight) == 0)
        throw InputError("[nu:sigma] = 0 for nu=" + nu.str() + ", sigma=" + sigma.str());
    GammaFactors f;
    for (int i = 0; i < n; ++i) {
        const double rho = n - 1 - i;
        const double ks = sigma.weight.coord(i), kn = nu.weight.coord(i);
        f.num.push_back(-ks - rho);
        f.num.push_back(ks + rho);
        f.den.push_back(-kn - rho);
        f.den.push_back(kn + rho + 1.0);
    }
    // Offsets are exact half-integers, so equal factors cancel exactly.
    std::vector<double> rest;
    for (double d : f.den) {
        auto it = std::find(f.num.begin(), f.num.end(), d);
        if (it != f.num.end())
            f.num.erase(it);
        else
            rest.push_back(d);
    }
    f.den = std::move(rest);
    return f;
}

}  // namespace

cplx c_function(const Irrep& sigma, const Irrep& nu, cplx lambda, cplx alpha_n) {
    const auto f = c_factors(sigma, nu);
    const cplx x = I * lambda;
    cplx log_value = 0.0;
    try {
        for (double o : f.num) log_value += log_gamma(x + o);
    } catch (const PoleError&) {
        throw PoleError("c-function has a pole", lambda);
    }
    try {
        for (double o : f.den) log_value -= log_gamma(x + o);
    } catch (const PoleError&) {
        throw PoleError("c-function has a zero", lambda);
    }
    return alpha_n * std::exp(log_value);
}

cplx c_function_logderiv(const Irrep& sigma, const Irrep& nu, cplx lambda) {
    const auto f = c_factors(sigma, nu);
    const cplx x = I * lambda;
    cplx sum = 0.0;
    try {
        for (double o : f.num) sum += digamma(x + o);
        for (double o : f.den) sum -= digamma(x + o);
    } catch (const PoleError&) {
        throw PoleError("c-function has a pole or zero", lambda);
    }
    return I * sum;
}

// ---------------------------------------------------------------------------

ResolventPair resolvent_weights(std::span<const cplx> s, cplx z) {
    const auto N = s.size();
    std::vector<cplx> sq(N);
    for (std::size_t i = 0; i < N; ++i) sq[i] = s[i] * s[i];
    for (std::size_t i = 0; i < N; ++i) {
        if (sq[i] + z == 0.0) throw PoleError("resolvent pole at z = -s_i^2", z);
        for (std::size_t k = i + 1; k < N; ++k) {
            const double scale = std::max({std::abs(sq[i]), std::abs(sq[k]), 1.0});
            if (std::abs(sq[i] - sq[k]) <= 1e-12 * scale)
                throw DegenerateError("resolvent parameters have coincident squares");
        }
    }
    ResolventPair out{0.0, 1.0};
    for (std::size_t i = 0; i < N; ++i) {
        cplx term = 1.0 / (sq[i] + z);
        for (std::size_t k = 0; k < N; ++k)
            if (k != i) term /= sq[k] - sq[i];
        out.lhs += term;
        out.rhs /= sq[i] + z;
    }
    return out;
}

}  // namespace geoflow::specfun
