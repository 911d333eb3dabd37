#include "geoflow/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "geoflow/error.hpp"
#include "geoflow/summation.hpp"

namespace geoflow::zeta {

using spectrum::ClassTerm;
using spectrum::TailModel;

namespace {

constexpr cplx I{0.0, 1.0};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string fmt(cplx z) { return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i"; }

// Weight table flattened for fast character evaluation.
struct CharTable {
    std::vector<std::vector<double>> weights;
    std::vector<double> mult;
    double bound = 0.0;

    explicit CharTable(const rootdata::WeightTable& table) {
        for (const auto& [w, m] : table) {
            std::vector<double> c(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) c[i] = w.coord(i);
            weights.push_back(std::move(c));
            mult.push_back(static_cast<double>(m));
        }
    }

    // sum_mu mult e^{i k <mu, theta>}
    cplx operator()(const std::vector<double>& theta, int k) const {
        cplx sum = 0.0;
        for (std::size_t w = 0; w < weights.size(); ++w) {
            double phase = 0.0;
            for (std::size_t j = 0; j < theta.size(); ++j) phase += weights[w][j] * theta[j];
            sum += mult[w] * std::polar(1.0, k * phase);
        }
        return sum;
    }
};

void check_rank(const VirtualRep& sigma, const LengthSpectrum& spec) {
    if (sigma.group().family != rootdata::Family::D || sigma.group().rank != spec.n)
        throw InputError("representation must be an M-representation of rank n=" + std::to_string(spec.n));
}

void check_region(cplx s, double abscissa, const char* what) {
    if (!(s.real() > abscissa))
        throw ConvergenceError(std::string(what) + " class series requires Re(s) > " + fmt(abscissa) +
                               ", got s=" + fmt(s));
}

ZetaValue sum_series(const LengthSpectrum& spec, const TailModel& model, const EvalOptions& opt,
                     const std::function<cplx(const ClassTerm&)>& term) {
    if (model.character_bound == 0.0) return {};
    const auto plan = spectrum::class_iterator(spec, model, opt.tail_target);
    std::vector<cplx> values(plan.terms.size());
    parallel_for(values.size(), opt.workers, [&](std::size_t i) { values[i] = term(plan.terms[i]); });
    return {deterministic_sum(values), plan.tail_bound, plan.cutoff_used};
}

ZetaValue exponentiate(const ZetaValue& log_value) {
    const cplx v = std::exp(log_value.value);
    return {v, std::abs(v) * std::expm1(log_value.tail_bound), log_value.cutoff_used};
}

double binomial(int top, int bottom) {
    double r = 1.0;
    for (int i = 1; i <= bottom; ++i) r = r * (top - bottom + i) / i;
    return r;
}

// Weights of S^k of the standard 2n-dimensional M-module with multiplicities.
const std::vector<std::pair<std::vector<int>, double>>& sym_power_weights(int n, int k) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<std::pair<std::vector<int>, double>>> cache;
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace({n, k});
    if (!inserted) return it->second;
    // V = sum of planes span(e_j, -e_j). A weight c of S^k V needs parts
    // m_j = |c_j| + 2 t_j summing to k, so its multiplicity is the number of
    // ways to spread T = (k - |c|_1)/2 over n slots.
    std::map<std::vector<int>, double> table;
    std::vector<int> c(n, 0);
    auto fill = [&](auto&& self, int j, int used) -> void {
        const int rem = k - used;
        if (j == n - 1) {
            // The last coordinate fixes the parity of k - |c|_1.
            for (int v = -rem; v <= rem; v += 2) {
                c[j] = v;
                table[c] = binomial((rem - std::abs(v)) / 2 + n - 1, n - 1);
            }
            return;
        }
        for (int v = -rem; v <= rem; ++v) {
            c[j] = v;
            self(self, j + 1, used + std::abs(v));
        }
    };
    fill(fill, 0, 0);
    it->second.assign(table.begin(), table.end());
    return it->second;
}

// log(1 - z) without cancellation for tiny z.
cplx log1m(cplx z) {
    if (std::norm(z) < 1e-8) return -z * (1.0 + z * (0.5 + z * (1.0 / 3.0 + z * 0.25)));
    const double re = -z.real(), im = -z.imag();
    return {0.5 * std::log1p(2.0 * re + re * re + im * im), std::atan2(im, 1.0 + re)};
}


// Bound on sum_{k > K} of |log det(1 - sigma (x) S^k ...)| for one prime.
double sym_tail(int n, double a, double l, int K) {
    double total = 0.0;
    double last = 0.0;
    int k = K + 1;
    for (; k <= K + 100000; ++k) {
        const double r = std::exp(-(a + k) * l);
        last = binomial(k + 2 * n - 1, 2 * n - 1) * r / (1.0 - r);
        total += last;
        const double q = (k + 2.0 * n) / (k + 1.0) * std::exp(-l);
        if (q < 1.0 && last * q / (1.0 - q) <= 1e-17 * total) break;
        if (last == 0.0) break;
    }
    const double q = (k + 2.0 * n) / (k + 1.0) * std::exp(-l);
    return total + (q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity());
}

}  // namespace

double selberg_abscissa(const LengthSpectrum& spec) { return spec.complete() ? -spec.n : 2.0 * spec.n; }
double ruelle_abscissa(const LengthSpectrum& spec) { return spec.complete() ? 0.0 : 2.0 * spec.n; }

ZetaValue log_selberg(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec, const EvalOptions& opt) {
    check_rank(sigma, spec);
    check_region(s, selberg_abscissa(spec), "Selberg");
    const CharTable chi(sigma.weight_table());
    const int n = spec.n;
    const TailModel model{s.real() + n, 2 * n, static_cast<double>(sigma.character_bound())};
    return sum_series(spec, model, opt, [&](const ClassTerm& t) {
        const double k = t.power;
        return -static_cast<double>(t.prime->mult) * chi(t.prime->angles, t.power) *
               std::exp(-(s + static_cast<double>(n)) * t.length()) / (k * spectrum::det_factor(t));
    });
}

ZetaValue selberg_Z(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec, const EvalOptions& opt) {
    return exponentiate(log_selberg(s, sigma, spec, opt));
}

ProductValue log_selberg_product(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec, int k_max,
                                 double cutoff, double tail_target) {
    check_rank(sigma, spec);
    check_region(s, selberg_abscissa(spec), "Selberg");
    const int n = spec.n;
    const double a = s.real() + n;
    const double D = static_cast<double>(sigma.character_bound());
    const TailModel model{a, 2 * n, D};
    const bool automatic = std::isnan(cutoff);
    // Half the budget goes to the omitted primes, half to the omitted powers.
    if (automatic) cutoff = D > 0.0 ? spectrum::class_iterator(spec, model, 0.5 * tail_target).cutoff_used : 0.0;
    if (!spec.complete() && cutoff > spec.cutoff)
        throw InsufficientSpectrumError("product cutoff " + fmt(cutoff) + " exceeds the completeness cutoff " +
                                        fmt(spec.cutoff));

    // Every class of an omitted prime is longer than the cutoff.
    std::vector<const spectrum::PrimeGeodesic*> primes;
    double prime_tail = 0.0;
    for (const auto& g : spec.entries) {
        if (g.length <= cutoff)
            primes.push_back(&g);
        else if (spec.complete())
            prime_tail += g.mult * D * std::pow(-std::expm1(-g.length), -2 * n) * std::exp(-a * g.length) /
                          -std::expm1(-a * g.length);
    }
    if (!spec.complete() && D > 0.0) prime_tail = spectrum::tail_bound(spec, model, cutoff);

    // Symmetric powers per prime: a fixed k_max, or the smallest order meeting
    // an equal share of the remaining budget.
    std::vector<int> orders(primes.size(), k_max);
    if (k_max < 0) {
        const double share = 0.5 * tail_target / std::max<std::size_t>(primes.size(), 1);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            int K = 0;
            while (primes[i]->mult * D * sym_tail(n, a, primes[i]->length, K) > share)
                if (++K > 2000) throw ConvergenceError("symmetric-power product converges too slowly");
            orders[i] = K;
        }
    }
    double k_tail = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i)
        k_tail += primes[i]->mult * D * sym_tail(n, a, primes[i]->length, orders[i]);

    const CharTable chi(sigma.weight_table());
    std::vector<cplx> per_prime(primes.size());
    parallel_for(primes.size(), 1, [&](std::size_t i) {
        const auto& g = *primes[i];
        std::vector<cplx> mu_phase(chi.weights.size());
        for (std::size_t w = 0; w < chi.weights.size(); ++w) {
            double ph = 0.0;
            for (int j = 0; j < n; ++j) ph += chi.weights[w][j] * g.angles[j];
            mu_phase[w] = std::polar(1.0, ph);
        }
        cplx sum = 0.0, comp = 0.0;
        for (int k = 0; k <= orders[i]; ++k) {
            const cplx base = std::exp(-(s + static_cast<double>(n + k)) * g.length);
            for (const auto& [beta, bmult] : sym_power_weights(n, k)) {
                double ph = 0.0;
                for (int j = 0; j < n; ++j) ph += beta[j] * g.angles[j];
                const cplx zb = base * std::polar(1.0, ph);
                for (std::size_t w = 0; w < mu_phase.size(); ++w) {
                    const cplx x = chi.mult[w] * bmult * log1m(zb * mu_phase[w]);
                    const cplx y = x - comp;
                    const cplx t = sum + y;
                    comp = (t - sum) - y;
                    sum = t;
                }
            }
        }
        per_prime[i] = static_cast<double>(g.mult) * sum;
    });

    ProductValue out;
    out.log_value = deterministic_sum(per_prime);
    out.value = std::exp(out.log_value);
    out.tail_bound = prime_tail + k_tail;
    out.k_max = orders.empty() ? std::max(k_max, 0) : *std::max_element(orders.begin(), orders.end());
    out.cutoff = cutoff;
    return out;
}

cplx selberg_Z_product(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec, int k_max, double cutoff) {
    return log_selberg_product(s, sigma, spec, k_max, cutoff).value;
}

ZetaValue symmetrized_S(cplx s, const Irrep& sigma, const LengthSpectrum& spec, const EvalOptions& opt) {
    const Irrep flipped = rootdata::w0_act(sigma);
    VirtualRep rep(sigma);
    if (!(flipped == sigma)) rep += VirtualRep(flipped);
    return exponentiate(log_selberg(s, rep, spec, opt));
}

ZetaValue antisymmetric_Sa(cplx s, const Irrep& sigma, const LengthSpectrum& spec, const EvalOptions& opt) {
    const VirtualRep rep = VirtualRep(sigma) - VirtualRep(rootdata::w0_act(sigma));
    check_region(s, selberg_abscissa(spec), "Selberg");
    return exponentiate(log_selberg(s, rep, spec, opt));
}

ZetaValue log_ruelle_sigma(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec, const EvalOptions& opt) {
    check_rank(sigma, spec);
    check_region(s, ruelle_abscissa(spec), "Ruelle");
    const CharTable chi(sigma.weight_table());
    const TailModel model{s.real(), 0, static_cast<double>(sigma.character_bound())};
    return sum_series(spec, model, opt, [&](const ClassTerm& t) {
        return -static_cast<double>(t.prime->mult) * chi(t.prime->angles, t.power) * std::exp(-s * t.length()) /
               static_cast<double>(t.power);
    });
}

ZetaValue log_ruelle_tau(cplx s, const Irrep& tau, const LengthSpectrum& spec, const EvalOptions& opt) {
    if (!(tau.group == rootdata::GroupDesc::G(spec.n)))
        throw InputError("tau must be a representation of type D" + std::to_string(spec.n + 1));
    const auto& table = rootdata::weight_multiplicities(tau);
    double top = 0.0;
    for (const auto& [w, m] : table) top = std::max(top, w.coord(0));
    check_region(s, ruelle_abscissa(spec) + top, "Ruelle (tau)");
    struct Entry {
        double e1;
        std::vector<double> b;
        double mult;
    };
    std::vector<Entry> entries;
    for (const auto& [w, m] : table) {
        Entry e{w.coord(0), {}, static_cast<double>(m)};
        for (std::size_t i = 1; i < w.size(); ++i) e.b.push_back(w.coord(i));
        entries.push_back(std::move(e));
    }
    const TailModel model{s.real() - top, 0, static_cast<double>(rootdata::weyl_dim(tau))};
    return sum_series(spec, model, opt, [&](const ClassTerm& t) {
        cplx trace = 0.0;
        for (const auto& e : entries) {
            double ph = 0.0;
            for (std::size_t j = 0; j < e.b.size(); ++j) ph += e.b[j] * t.prime->angles[j];
            trace += e.mult * std::exp(t.length() * e.e1) * std::polar(1.0, t.power * ph);
        }
        return -static_cast<double>(t.prime->mult) * trace * std::exp(-s * t.length()) /
               static_cast<double>(t.power);
    });
}

FactorizationCheck ruelle_selberg_factorization(cplx s, const VirtualRep& sigma, const LengthSpectrum& spec,
                                                const EvalOptions& opt) {
    check_rank(sigma, spec);
    const int n = spec.n;
    check_region(s, ruelle_abscissa(spec), "Ruelle");
    check_region(s - static_cast<double>(n), selberg_abscissa(spec), "Selberg factor");

    std::vector<CharTable> factors;
    std::vector<TailModel> models{TailModel{s.real(), 0, static_cast<double>(sigma.character_bound())}};
    for (int p = 0; p <= 2 * n; ++p) {
        const VirtualRep twisted = rootdata::tensor(sigma, rootdata::lambda_p_nbar(n, p));
        factors.emplace_back(twisted.weight_table());
        models.push_back(TailModel{s.real() + p, 2 * n, static_cast<double>(twisted.character_bound())});
    }
    // One class list for both sides, long enough for every series.
    double L = 0.0;
    for (const auto& m : models)
        if (m.character_bound > 0.0) L = std::max(L, spectrum::class_iterator(spec, m, opt.tail_target).cutoff_used);
    double tail = 0.0;
    for (const auto& m : models)
        if (m.character_bound > 0.0 && L > 0.0) tail += spectrum::tail_bound(spec, m, L);

    const CharTable chi(sigma.weight_table());
    const auto classes = spectrum::enumerate_classes(spec, L);
    std::vector<cplx> lhs(classes.size()), rhs(classes.size());
    parallel_for(classes.size(), opt.workers, [&](std::size_t i) {
        const auto& t = classes[i];
        const double k = t.power, mult = static_cast<double>(t.prime->mult);
        lhs[i] = -mult * chi(t.prime->angles, t.power) * std::exp(-s * t.length()) / k;
        const cplx det = spectrum::det_factor(t);
        cplx acc = 0.0;
        for (int p = 0; p <= 2 * n; ++p) {
            const double sign = p % 2 == 0 ? 1.0 : -1.0;
            acc += sign * factors[p](t.prime->angles, t.power) * std::exp(-(s + static_cast<double>(p)) * t.length());
        }
        rhs[i] = -mult * acc / (k * det);
    });
    FactorizationCheck out;
    out.lhs = deterministic_sum(lhs);
    out.rhs = deterministic_sum(rhs);
    out.discrepancy = std::abs(out.lhs - out.rhs);
    out.tail_bound = tail;
    out.cutoff_used = L;
    return out;
}

// ---------------------------------------------------------------------------

int epsilon(const Irrep& sigma) { return rootdata::w0_act(sigma) == sigma ? 1 : 2; }

cplx xi_normalizer(cplx s, const Irrep& sigma, const XiConfig& c) {
    const double eps = epsilon(sigma);
    const double dim = static_cast<double>(rootdata::weyl_dim(sigma));
    const auto P = specfun::plancherel_poly(sigma, c.c_norm);
    const auto Q = specfun::extract_Q(sigma);
    const double c_gamma = eps * dim * (c.C_Gamma - specfun::euler_gamma * c.p);
    cplx log_gamma;
    try {
        log_gamma = specfun::log_gamma(1.0 + s);
    } catch (const PoleError&) {
        throw PoleError("Gamma(1+s) has a pole", s);
    }
    const cplx exponent = 2.0 * std::numbers::pi * c.vol * eps * P.integral(s) -
                          eps * 0.5 * c.p * Q.integral_imaginary(s) + s * c_gamma -
                          c.p * eps * dim * log_gamma;
    return std::exp(exponent);
}

cplx xi_normalizer_logderiv(cplx s, const Irrep& sigma, const XiConfig& c) {
    const double eps = epsilon(sigma);
    const double dim = static_cast<double>(rootdata::weyl_dim(sigma));
    const auto P = specfun::plancherel_poly(sigma, c.c_norm);
    const auto Q = specfun::extract_Q(sigma);
    const double c_gamma = eps * dim * (c.C_Gamma - specfun::euler_gamma * c.p);
    cplx psi;
    try {
        psi = specfun::digamma(1.0 + s);
    } catch (const PoleError&) {
        throw PoleError("Gamma(1+s) has a pole", s);
    }
    return 2.0 * std::numbers::pi * c.vol * eps * P(s) - eps * 0.5 * c.p * Q(I * s) + c_gamma -
           c.p * eps * dim * psi;
}

}  // namespace geoflow::zeta
