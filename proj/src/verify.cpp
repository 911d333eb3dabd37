#include "geoflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/ledger.hpp"
#include "geoflow/specfun.hpp"
#include "geoflow/spectrum.hpp"
#include "geoflow/zeta.hpp"

namespace geoflow::verify {

using namespace rootdata;
using cplx = std::complex<double>;

namespace {

constexpr cplx I{0.0, 1.0};

// Tracks the worst error of one property.
class Property {
public:
    Property(std::string suite, std::string name, double threshold)
        : result_{std::move(suite), std::move(name), true, 0.0, threshold, {}} {}

    void observe(double error, const std::string& where) {
        if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
        if (error > result_.error || (error == result_.error && result_.detail.empty())) {
            result_.error = error;
            result_.detail = where;
        }
    }
    void fail(const std::string& why) {
        result_.error = std::numeric_limits<double>::infinity();
        result_.detail = why;
    }
    PropertyResult finish() {
        result_.pass = result_.error <= result_.threshold;
        return result_;
    }

private:
    PropertyResult result_;
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<int> ranks(const Options& o) {
    if (o.n == 0) return {1, 2, 3};
    if (o.n < 1 || o.n > 6) throw InputError("verify supports 1 <= n <= 6");
    return {o.n};
}

// Runs body and turns library errors into a failed property.
void guarded(Property& p, const std::function<void()>& body) {
    try {
        body();
    } catch (const Error& e) {
        p.fail(std::string("error: ") + e.what());
    }
}

std::string tag(const Irrep& s) { return s.group.name() + s.str(); }

// ---------------------------------------------------------------------------

void rep_suite(const Options& o, std::vector<PropertyResult>& out) {
    const double sign = fault_injected() ? -1.0 : 1.0;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int n : ranks(o)) {
        const std::string suffix = " n=" + std::to_string(n);
        const int bound = n <= 2 ? 3 : 2;
        const auto ms = irrep_corpus(GroupDesc::M(n), bound);
        const auto ks = irrep_corpus(GroupDesc::K(n), bound);
        const auto gs = irrep_corpus(GroupDesc::G(n), 2);

        Property dims("rep", "weyl_dim equals Freudenthal total" + suffix, 0.0);
        guarded(dims, [&] {
            for (const auto* list : {&ms, &ks, &gs})
                for (const auto& r : *list) {
                    long long total = 0;
                    for (const auto& [w, m] : weight_multiplicities(r)) total += m;
                    dims.observe(total == weyl_dim(r) ? 0.0 : 1.0, tag(r));
                }
        });
        out.push_back(dims.finish());

        Property chars("rep", "restriction character identity" + suffix, 1e-9);
        guarded(chars, [&] {
            for (const auto& s : ms) {
                const auto m = m_coeffs(s);
                const auto res = restrict_to_M(m);
                const Irrep f = w0_act(s);
                for (int t = 0; t < 10; ++t) {
                    TorusElement x{std::vector<double>(n)};
                    for (auto& a : x.angles) a = angle(rng);
                    cplx rhs = character(s, x);
                    if (!(f == s)) rhs += character(f, x);
                    chars.observe(rel(character(res, x), sign * rhs), tag(s));
                }
            }
        });
        out.push_back(chars.finish());

        Property branch("rep", "branching preserves dimension" + suffix, 0.0);
        guarded(branch, [&] {
            for (const auto& k : ks) branch.observe(branch_K_to_M(k).dim() == weyl_dim(k) ? 0.0 : 1.0, tag(k));
        });
        out.push_back(branch.finish());

        Property spin("rep", "Klimyk tensor with spin has dimension dim(nu) 2^n" + suffix, 0.0);
        guarded(spin, [&] {
            const long long kappa = weyl_dim(spin_reps(n).kappa);
            for (const auto& k : ks)
                if (k.weight.all_integral())
                    spin.observe(tensor_with_spin(k).dim() == weyl_dim(k) * kappa ? 0.0 : 1.0, tag(k));
        });
        out.push_back(spin.finish());

        Property invol("rep", "w0 and contragredient are dimension-preserving involutions" + suffix, 0.0);
        guarded(invol, [&] {
            for (const auto& s : ms) {
                const bool ok = w0_act(w0_act(s)) == s && contragredient(contragredient(s)) == s &&
                                weyl_dim(w0_act(s)) == weyl_dim(s) && weyl_dim(contragredient(s)) == weyl_dim(s);
                invol.observe(ok ? 0.0 : 1.0, tag(s));
            }
        });
        out.push_back(invol.finish());
    }
}

// ---------------------------------------------------------------------------

void specfun_suite(const Options& o, std::vector<PropertyResult>& out) {
    using namespace specfun;
    const double sign = fault_injected() ? -1.0 : 1.0;
    std::mt19937_64 rng(o.seed + 1);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int n : ranks(o)) {
        const std::string suffix = " n=" + std::to_string(n);
        const auto sigmas = irrep_corpus(GroupDesc::M(n), n <= 2 ? 3 : 2);

        Property integral("specfun", "c_jl integrality" + suffix, 1e-8);
        guarded(integral, [&] {
            for (const auto& s : sigmas)
                for (const auto& c : c_jl(s)) {
                    const cplx v = p_j(s, c.j, I * c.l.to_double());
                    integral.observe(std::abs(v - static_cast<double>(c.value)), tag(s));
                }
        });
        out.push_back(integral.finish());

        Property omega("specfun", "Omega direct vs decomposed" + suffix, 1e-8);
        Property qshape("specfun", "Q even of bounded degree" + suffix, 1e-8);
        Property sym("specfun", "Omega(sigma) = Omega(w0 sigma)" + suffix, 1e-10);
        guarded(omega, [&] {
            for (const auto& s : sigmas) {
                qshape.observe(fit_Q(s).violation, tag(s));
                for (int t = 0; t < 5; ++t) {
                    const double lam = u(rng);
                    const cplx d = omega_direct(s, lam);
                    omega.observe(rel(sign * omega_decomposed(s, lam), d), tag(s));
                    sym.observe(rel(omega_direct(w0_act(s), lam), d), tag(s));
                }
            }
        });
        out.push_back(omega.finish());
        out.push_back(qshape.finish());
        out.push_back(sym.finish());

        Property closed("specfun", "P_j closed form" + suffix, 1e-10);
        Property total("specfun", "sum of P_j equals dim" + suffix, 1e-10);
        guarded(closed, [&] {
            for (const auto& s : sigmas) {
                const double lam = u(rng);
                cplx sum = 0.0;
                for (int j = 2; j <= n + 1; ++j) {
                    const cplx a = p_j(s, j, lam);
                    sum += a;
                    try {
                        closed.observe(rel(p_j_closed(s, j, lam), a), tag(s));
                    } catch (const DegenerateError&) {
                    }
                }
                total.observe(rel(sum, static_cast<double>(weyl_dim(s))), tag(s));
            }
        });
        out.push_back(closed.finish());
        out.push_back(total.finish());

        Property cfun("specfun", "c-function log-derivative vs finite differences" + suffix, 1e-6);
        guarded(cfun, [&] {
            int done = 0;
            for (const auto& nu : irrep_corpus(GroupDesc::K(n), 2)) {
                const auto b = branch_K_to_M(nu);
                const auto& [s_weight, coeff] = *b.terms().begin();
                const Irrep s{GroupDesc::M(n), s_weight};
                const cplx lam(u(rng), 0.3);
                const double h = 1e-5;
                const cplx fd =
                    (std::log(c_function(s, nu, lam + h)) - std::log(c_function(s, nu, lam - h))) / (2.0 * h);
                cfun.observe(rel(c_function_logderiv(s, nu, lam), fd), tag(nu) + " on " + tag(s));
                if (++done == 20) break;
            }
        });
        out.push_back(cfun.finish());
    }

    Property resolvent("specfun", "resolvent identity", 1e-10);
    guarded(resolvent, [&] {
        std::uniform_real_distribution<double> v(-2.0, 2.0);
        for (int t = 0; t < 100; ++t) {
            std::vector<cplx> s(1 + t % 6);
            for (auto& x : s) x = {v(rng) + 2.5, v(rng)};
            const auto r = resolvent_weights(s, cplx(v(rng), v(rng)));
            resolvent.observe(rel(r.lhs, r.rhs), "trial " + std::to_string(t));
        }
    });
    out.push_back(resolvent.finish());
}

// ---------------------------------------------------------------------------

spectrum::LengthSpectrum one_prime(int n) {
    spectrum::LengthSpectrum s;
    s.n = n;
    s.cutoff = std::numeric_limits<double>::infinity();
    s.entries.push_back({1.0, std::vector<double>(n, 0.0), 1});
    return s;
}

bool same_bits(cplx a, cplx b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void zeta_suite(const Options& o, std::vector<PropertyResult>& out) {
    using namespace zeta;
    const double sign = fault_injected() ? -1.0 : 1.0;

    Property law("zeta", "one-geodesic Ruelle law R(s) = 1 - e^{-s}", 1e-12);
    guarded(law, [&] {
        const auto s1 = one_prime(1);
        const VirtualRep triv(Irrep::trivial(GroupDesc::M(1)));
        for (cplx s : {cplx(2.0), cplx(3.0), cplx(5.0, 2.0)}) {
            const cplx r = std::exp(log_ruelle_sigma(s, triv, s1).value);
            law.observe(std::abs(r - (1.0 - sign * std::exp(-s))), "s=" + std::to_string(s.real()));
        }
    });
    out.push_back(law.finish());

    for (int n : ranks(o)) {
        if (n > 3) continue;
        const std::string suffix = " n=" + std::to_string(n);
        const auto spec = spectrum::synthesize(n, n == 1 ? 300 : 150 * n, o.seed);
        std::vector<Irrep> sigmas{Irrep::trivial(GroupDesc::M(n))};
        sigmas.push_back(Irrep::make(GroupDesc::M(n), n == 1 ? Weight::integral({1})
                                                     : n == 2 ? Weight::integral({1, 1})
                                                              : Weight::integral({1, 0, 0})));

        Property dual("zeta", "class series vs symmetric-power product" + suffix, 0.0);
        guarded(dual, [&] {
            const cplx s(2.0 * n + 2.0, 0.5);
            for (const auto& sig : sigmas) {
                const auto a = log_selberg(s, VirtualRep(sig), spec, {1e-12, o.workers});
                const auto b = log_selberg_product(s, VirtualRep(sig), spec);
                // Excess over the combined certified bound (plus rounding slack).
                dual.observe(std::max(0.0, std::abs(a.value - b.log_value) - a.tail_bound - b.tail_bound - 1e-12),
                             tag(sig));
            }
        });
        out.push_back(dual.finish());

        Property factor("zeta", "Ruelle-Selberg factorization" + suffix, 1e-9);
        guarded(factor, [&] {
            const cplx s(3.0 * n + 2.0, 0.25);
            for (const auto& sig : sigmas) {
                const auto f = ruelle_selberg_factorization(s, VirtualRep(sig), spec, {1e-12, o.workers});
                factor.observe(f.discrepancy, tag(sig));
            }
        });
        out.push_back(factor.finish());

        Property det("zeta", "results independent of worker count" + suffix, 0.0);
        guarded(det, [&] {
            const cplx s(2.0 * n + 1.5, 1.0);
            const VirtualRep sig(sigmas.back());
            const cplx ref = log_selberg(s, sig, spec, {1e-12, 1}).value;
            for (int w : {2, 8, std::max(1, o.workers)})
                det.observe(same_bits(log_selberg(s, sig, spec, {1e-12, w}).value, ref) ? 0.0 : 1.0,
                            "workers=" + std::to_string(w));
        });
        out.push_back(det.finish());

        Property xi("zeta", "Xi normalizer at 0 and its log-derivative" + suffix, 1e-6);
        guarded(xi, [&] {
            const XiConfig cfg{1.7, 2, 0.3, 1.0};
            for (const auto& sig : irrep_corpus(GroupDesc::M(n), 2)) {
                xi.observe(std::abs(xi_normalizer(0.0, sig, cfg) - 1.0), tag(sig) + " at 0");
                const cplx s(0.6, 0.4);
                const double h = 1e-5;
                const cplx fd = (std::log(xi_normalizer(s + h, sig, cfg)) - std::log(xi_normalizer(s - h, sig, cfg))) /
                                (2.0 * h);
                xi.observe(rel(fd, xi_normalizer_logderiv(s, sig, cfg)), tag(sig));
            }
        });
        out.push_back(xi.finish());

        Property pairs("zeta", "ledger pair orders sum to m_s" + suffix, 0.0);
        guarded(pairs, [&] {
            std::mt19937_64 rng(o.seed + 7 * n);
            auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
            for (const auto& sig : irrep_corpus(GroupDesc::M(n), 2)) {
                if (w0_act(sig) == sig) continue;
                ledger::SpectralModel m;
                m.sigma = sig;
                m.p = static_cast<int>(pick(1, 3));
                std::vector<std::pair<double, long>> expected;
                for (int k = 0; k < 3; ++k) {
                    const double mu = 0.5 + k + 0.25 * pick(0, 3);
                    const long dp = pick(0, 2), dm = pick(0, 2);
                    long ms = pick(0, 3);
                    if ((ms + dp - dm) % 2 != 0) ++ms;
                    if (ms > 0) m.laplace_eigs.push_back({mu * mu, ms});
                    if (dp > 0) m.dirac_eigs.push_back({mu, dp});
                    if (dm > 0) m.dirac_eigs.push_back({-mu, dm});
                    expected.emplace_back(mu, ms);
                }
                const auto l = ledger::singularity_ledger(m, 5.0);
                for (const auto& [mu, ms] : expected) {
                    const long sum = ledger::order_at(l, mu * I) + ledger::order_at(l, -mu * I);
                    pairs.observe(static_cast<double>(std::abs(sum - ms)), tag(sig));
                }
            }
        });
        out.push_back(pairs.finish());
    }

    Property worked("zeta", "ledger worked examples", 0.0);
    guarded(worked, [&] {
        ledger::SpectralModel a;
        a.sigma = Irrep::trivial(GroupDesc::M(2));
        a.laplace_eigs = {{4.0, 2}};
        const auto la = ledger::singularity_ledger(a, 0.0);
        worked.observe(la == std::vector<ledger::Singularity>{{cplx(0, -2), 2}, {cplx(0, 2), 2}} ? 0.0 : 1.0,
                       "Laplace pair");
        ledger::SpectralModel b;
        b.sigma = Irrep::trivial(GroupDesc::M(1));
        b.p = 3;
        b.m_s_zero = 1;
        b.c1 = 3;
        worked.observe(ledger::order_at(ledger::singularity_ledger(b, 0.0), 0.0) == -1 ? 0.0 : 1.0, "order at 0");
        ledger::SpectralModel c;
        c.sigma = Irrep::make(GroupDesc::M(1), Weight::integral({2}));
        const auto lc = ledger::singularity_ledger(c, 6.0);
        bool ok = lc.size() == 5;
        for (int l = 2; l <= 6; ++l) ok = ok && ledger::order_at(lc, -double(l)) == -1;
        worked.observe(ok ? 0.0 : 1.0, "cusp terms");
    });
    out.push_back(worked.finish());
}

}  // namespace

bool fault_injected() {
    const char* v = std::getenv("GEOFLOW_VERIFY_FAULT");
    return v && std::strcmp(v, "1") == 0;
}

std::vector<Irrep> irrep_corpus(const GroupDesc& group, int bound) {
    std::vector<Irrep> out;
    std::vector<int> w(group.rank);
    auto rec = [&](auto&& self, int i) -> void {
        if (i == group.rank) {
            for (int half = 0; half < 2; ++half) {
                std::vector<int> t(w.size());
                for (std::size_t k = 0; k < w.size(); ++k) t[k] = 2 * w[k] + half;
                Weight cand(t);
                if (std::abs(cand.coord(0)) <= bound && is_dominant(group, cand)) out.push_back(Irrep{group, cand});
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

std::vector<PropertyResult> run(std::string_view suite, const Options& options) {
    std::vector<PropertyResult> out;
    const bool all = suite == "all";
    if (!all && suite != "rep" && suite != "specfun" && suite != "zeta")
        throw InputError("unknown verify suite '" + std::string(suite) + "' (all, rep, specfun, zeta)");
    if (all || suite == "rep") rep_suite(options, out);
    if (all || suite == "specfun") specfun_suite(options, out);
    if (all || suite == "zeta") zeta_suite(options, out);
    return out;
}

}  // namespace geoflow::verify
