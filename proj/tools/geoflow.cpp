// geoflow: command-line front end for the representation data, special
// functions, length spectra, zeta evaluation and singularity ledgers.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geoflow/error.hpp"
#include "geoflow/ledger.hpp"
#include "geoflow/rootdata.hpp"
#include "geoflow/specfun.hpp"
#include "geoflow/spectrum.hpp"
#include "geoflow/summation.hpp"
#include "geoflow/verify.hpp"
#include "geoflow/zeta.hpp"

using namespace geoflow;
using rootdata::GroupDesc;
using rootdata::Irrep;
using rootdata::VirtualRep;
using cplx = std::complex<double>;

namespace {

enum Exit { ok = 0, verify_failed = 1, input = 2, convergence = 3, model = 4, internal = 5 };

int digits = 12;

std::string num(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

std::string num(cplx z) {
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    return num(z.real()) + (std::signbit(im) ? "-" : "+") + num(std::abs(im)) + "i";
}

double parse_real(const std::string& text, const char* what) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || text.empty()) throw InputError(std::string("malformed ") + what + " '" + text + "'");
    return v;
}

// "a", "a+bi", "a-bi", "bi", "i", "-i"
cplx parse_complex(std::string text) {
    std::erase(text, ' ');
    if (text.empty()) throw InputError("empty complex number");
    if (text.back() != 'i' && text.back() != 'j') return parse_real(text, "complex number");
    const std::string body = text.substr(0, text.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t p = body.size(); p-- > 1;)
        if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
            split = p;
            break;
        }
    auto imag_part = [&](std::string s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        if (s.front() == '+') s.erase(0, 1);
        return parse_real(s, "complex number");
    };
    if (split == std::string::npos) return {0.0, imag_part(body)};
    return {parse_real(body.substr(0, split), "complex number"), imag_part(body.substr(split))};
}

struct Range {
    double lo, hi;
    int count;
    double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

Range parse_range(const std::string& text) {
    const auto a = text.find(':');
    const auto b = text.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos) return {parse_real(text, "range"), parse_real(text, "range"), 1};
    if (b == std::string::npos) throw InputError("range must be lo:hi:count, got '" + text + "'");
    const double lo = parse_real(text.substr(0, a), "range");
    const double hi = parse_real(text.substr(a + 1, b - a - 1), "range");
    const double c = parse_real(text.substr(b + 1), "range");
    if (c < 1 || c != std::floor(c)) throw InputError("range count must be a positive integer");
    return {lo, hi, static_cast<int>(c)};
}

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    std::string line;
    int no = 0;
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    const std::vector<std::string> known{"n",      "vol",         "p",       "C_Gamma", "alpha_n",
                                         "c_norm", "tail_target", "workers", "digits"};
    while (std::getline(in, line)) {
        ++no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(no) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InputError(path + ":" + std::to_string(no) + ": unknown key '" + key + "'");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

// Shared numeric settings; flags win over the config file.
struct Settings {
    std::string config;
    int n = 0;
    double vol = 1.0;
    int p = 1;
    double C_Gamma = 0.0;
    std::string alpha_n = "1";
    double c_norm = 1.0;
    double tail_target = 1e-12;
    int workers = 1;

    void apply(const CLI::App& app, const std::map<std::string, std::string>& cfg) {
        auto from = [&](const char* key, const char* flag, auto& field) {
            const auto it = cfg.find(key);
            if (it == cfg.end() || app.count(flag) > 0) return;
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_same_v<T, std::string>)
                field = it->second;
            else if constexpr (std::is_same_v<T, int>)
                field = static_cast<int>(parse_real(it->second, key));
            else
                field = parse_real(it->second, key);
        };
        from("n", "--n", n);
        from("vol", "--vol", vol);
        from("p", "--p", p);
        from("C_Gamma", "--C-Gamma", C_Gamma);
        from("alpha_n", "--alpha", alpha_n);
        from("c_norm", "--c-norm", c_norm);
        from("tail_target", "--tail-target", tail_target);
        from("workers", "--workers", workers);
        if (const auto it = cfg.find("digits"); it != cfg.end() && app.count("--digits") == 0)
            digits = static_cast<int>(parse_real(it->second, "digits"));
        if (!(tail_target > 0.0)) throw InputError("tail_target must be positive");
        if (workers < 1) throw InputError("workers must be positive");
        if (digits < 1 || digits > 17) throw InputError("digits must lie in 1..17");
    }
};

Settings settings;

GroupDesc group_for(const std::string& name, int n) {
    if (name == "M") return GroupDesc::M(n);
    if (name == "K") return GroupDesc::K(n);
    if (name == "G") return GroupDesc::G(n);
    throw InputError("group must be M, K or G");
}

// Rank is the number of entries for M and K, one less for G.
Irrep irrep_arg(const std::string& text, const std::string& group = "M") {
    const Weight w = Weight::parse(text);
    int n = static_cast<int>(w.size()) - (group == "G" ? 1 : 0);
    if (settings.n != 0 && settings.n != n)
        throw InputError("weight '" + text + "' does not have the " + std::to_string(settings.n) + " entries required by --n");
    if (n < 1) throw InputError("weight '" + text + "' is too short");
    return Irrep::make(group_for(group, n), w);
}

// Rank 1 accepts "0" for the trivial representation; otherwise the weight fixes n.
Irrep sigma_arg(const std::string& text) {
    if (settings.n > 1 && text == "0") return Irrep::trivial(GroupDesc::M(settings.n));
    return irrep_arg(text);
}

spectrum::LengthSpectrum load_spectrum(const std::string& path, int n) {
    if (path.empty()) {
        spectrum::LengthSpectrum s;  // no data: nothing certified beyond length 0
        s.n = n;
        return s;
    }
    auto s = spectrum::read_file(path);
    if (s.n != n) throw InputError("spectrum has n=" + std::to_string(s.n) + " but sigma needs n=" + std::to_string(n));
    return s;
}

// ---------------------------------------------------------------------------

void cmd_rep(const std::string& weight, const std::string& group) {
    const Irrep r = irrep_arg(weight, group);
    std::cout << "group=" << r.group.name() << "\nweight=" << r.str() << "\ndim=" << rootdata::weyl_dim(r) << '\n';
    if (r.group.family == rootdata::Family::B) {
        std::cout << "branch: " << rootdata::branch_K_to_M(r).str() << '\n';
        return;
    }
    if (!(r.group == GroupDesc::M(r.group.rank))) {
        std::cout << "weights=" << rootdata::weight_multiplicities(r).size() << '\n';
        return;
    }
    std::cout << "c=" << rootdata::casimir_shift(r).str() << '\n';
    std::cout << "w0=" << rootdata::w0_act(r).str() << '\n';
    std::cout << "contragredient=" << rootdata::contragredient(r).str() << '\n';
    std::cout << "nu_sigma=" << rootdata::nu_sigma(r).str() << '\n';
    if (r.weight.twice().back() > 0) std::cout << "nu(sigma)=" << rootdata::nu_of_sigma(r).str() << '\n';
    std::cout << "m: " << rootdata::m_coeffs(r).str() << '\n';
    const auto shifted = specfun::shifted_weight(r);
    std::cout << "shifted=";
    for (std::size_t i = 0; i < shifted.size(); ++i) std::cout << (i ? "," : "") << num(shifted[i]);
    std::cout << '\n';
}

struct SpecfunArgs {
    std::string sigma, nu, lambda = "0", form = "lagrange";
    int j = 2;
    bool check = false;
};

void cmd_specfun(const std::string& kind, const SpecfunArgs& a) {
    const Irrep s = sigma_arg(a.sigma);
    const cplx lam = parse_complex(a.lambda);
    if (kind == "omega") {
        const cplx direct = specfun::omega_direct(s, lam);
        std::cout << "omega=" << num(direct) << '\n';
        if (a.check) {
            const cplx dec = specfun::omega_decomposed(s, lam);
            std::cout << "decomposed=" << num(dec) << "\nresidual=" << num(std::abs(direct - dec)) << '\n';
        }
    } else if (kind == "pj") {
        const int n = s.group.rank;
        if (a.j < 2 || a.j > n + 1) throw InputError("j must lie in 2.." + std::to_string(n + 1));
        std::cout << "P_j=" << num(specfun::p_j(s, a.j, lam)) << '\n';
        if (a.check || a.form != "lagrange") {
            const auto form = a.form == "printed" ? specfun::ClosedForm::AsPrinted : specfun::ClosedForm::Lagrange;
            if (a.form != "printed" && a.form != "lagrange") throw InputError("form must be lagrange or printed");
            std::cout << "closed=" << num(specfun::p_j_closed(s, a.j, lam, form)) << '\n';
        }
    } else if (kind == "cjl") {
        std::cout << "j,l,c\n";
        for (const auto& c : specfun::c_jl(s)) std::cout << c.j << ',' << c.l.str() << ',' << c.value << '\n';
    } else if (kind == "cnu") {
        const Irrep nu = irrep_arg(a.nu, "K");
        if (nu.group.rank != s.group.rank) throw InputError("nu and sigma have different rank");
        const cplx alpha = parse_complex(settings.alpha_n);
        std::cout << "c=" << num(specfun::c_function(s, nu, lam, alpha)) << '\n';
        if (a.check) std::cout << "logderiv=" << num(specfun::c_function_logderiv(s, nu, lam)) << '\n';
    } else if (kind == "plancherel") {
        const auto P = specfun::plancherel_poly(s, settings.c_norm);
        std::cout << "k,coefficient_of_lambda^2k\n";
        for (std::size_t k = 0; k < P.coeffs.size(); ++k) std::cout << k << ',' << num(P.coeffs[k]) << '\n';
        if (a.check) std::cout << "value=" << num(P(lam)) << '\n';
    } else {
        throw InputError("unknown specfun kind '" + kind + "'");
    }
}

// ---------------------------------------------------------------------------

struct ZetaArgs {
    std::string kind = "selberg", sigma = "0", tau, s, spectrum, re, im, out;
    int k_max = -1;
    double cutoff = std::nan("");
};

// A bare "0" takes its rank from --n or from the spectrum file.
int rank_of(const ZetaArgs& a) {
    if (settings.n == 0 && a.sigma == "0" && a.tau.empty() && !a.spectrum.empty())
        settings.n = spectrum::read_file(a.spectrum).n;
    if (settings.n != 0) return settings.n;
    if (!a.tau.empty()) return static_cast<int>(Weight::parse(a.tau).size()) - 1;
    return static_cast<int>(Weight::parse(a.sigma).size());
}

// One evaluation; returns (value, bound on |value error|).
zeta::ZetaValue evaluate(const ZetaArgs& a, cplx s, const spectrum::LengthSpectrum& spec, int workers) {
    const zeta::EvalOptions opt{settings.tail_target, workers};
    if (a.kind == "ruelle-tau") {
        if (a.tau.empty()) throw InputError("--tau is required for ruelle-tau");
        const Irrep tau = irrep_arg(a.tau, "G");
        const auto l = zeta::log_ruelle_tau(s, tau, spec, opt);
        const cplx v = std::exp(l.value);
        return {v, std::abs(v) * std::expm1(l.tail_bound), l.cutoff_used};
    }
    const Irrep sigma = sigma_arg(a.sigma);
    if (a.kind == "selberg") return zeta::selberg_Z(s, VirtualRep(sigma), spec, opt);
    if (a.kind == "S") return zeta::symmetrized_S(s, sigma, spec, opt);
    if (a.kind == "Sa") return zeta::antisymmetric_Sa(s, sigma, spec, opt);
    if (a.kind == "ruelle-sigma") {
        const auto l = zeta::log_ruelle_sigma(s, VirtualRep(sigma), spec, opt);
        const cplx v = std::exp(l.value);
        return {v, std::abs(v) * std::expm1(l.tail_bound), l.cutoff_used};
    }
    if (a.kind == "product") {
        const auto p = zeta::log_selberg_product(s, VirtualRep(sigma), spec, a.k_max, a.cutoff, settings.tail_target);
        return {p.value, std::abs(p.value) * std::expm1(p.tail_bound), p.cutoff};
    }
    throw InputError("unknown zeta kind '" + a.kind + "' (selberg, product, S, Sa, ruelle-sigma, ruelle-tau)");
}

void cmd_zeta_eval(const ZetaArgs& a) {
    const auto spec = load_spectrum(a.spectrum, rank_of(a));
    const cplx s = parse_complex(a.s);
    const auto v = evaluate(a, s, spec, settings.workers);
    std::cout << "kind=" << a.kind << "\ns=" << num(s) << "\nvalue=" << num(v.value) << "\nlog=" << num(std::log(v.value))
              << "\ntail_bound=" << num(v.tail_bound) << "\ncutoff_used=" << num(v.cutoff_used) << '\n';
}

void cmd_zeta_scan(const ZetaArgs& a) {
    const auto spec = load_spectrum(a.spectrum, rank_of(a));
    const Range re = parse_range(a.re), im = parse_range(a.im);
    std::vector<cplx> points;
    for (int i = 0; i < re.count; ++i)
        for (int k = 0; k < im.count; ++k) points.emplace_back(re.at(i), im.at(k));
    std::vector<zeta::ZetaValue> values(points.size());
    // Points are independent; each is summed serially so rows never depend on the split.
    parallel_for(points.size(), settings.workers,
                 [&](std::size_t i) { values[i] = evaluate(a, points[i], spec, 1); });
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw InputError("cannot write '" + a.out + "'");
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    out << "re_s,im_s,re_val,im_val,tail_bound\n";
    for (std::size_t i = 0; i < points.size(); ++i)
        out << num(points[i].real()) << ',' << num(points[i].imag()) << ',' << num(values[i].value.real()) << ','
            << num(values[i].value.imag()) << ',' << num(values[i].tail_bound) << '\n';
}

void cmd_zeta_factor(const ZetaArgs& a) {
    const Irrep sigma = sigma_arg(a.sigma);
    const int n = sigma.group.rank;
    const auto spec = a.spectrum.empty() ? spectrum::synthesize(n, 200, 1) : load_spectrum(a.spectrum, n);
    const cplx s = parse_complex(a.s);
    const auto f = zeta::ruelle_selberg_factorization(s, VirtualRep(sigma), spec,
                                                      {settings.tail_target, settings.workers});
    std::cout << "lhs=" << num(f.lhs) << "\nrhs=" << num(f.rhs) << "\ndiscrepancy=" << num(f.discrepancy)
              << "\ntail_bound=" << num(f.tail_bound) << "\ncutoff_used=" << num(f.cutoff_used) << '\n';
}

void cmd_zeta_xi(const ZetaArgs& a) {
    const Irrep sigma = sigma_arg(a.sigma);
    const cplx s = parse_complex(a.s);
    const zeta::XiConfig cfg{settings.vol, settings.p, settings.C_Gamma, settings.c_norm};
    std::cout << "epsilon=" << zeta::epsilon(sigma) << "\nnormalizer=" << num(zeta::xi_normalizer(s, sigma, cfg))
              << "\nlogderiv=" << num(zeta::xi_normalizer_logderiv(s, sigma, cfg)) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_verify(const std::string& suite, int n, std::uint64_t seed, bool json) {
    verify::Options o;
    o.n = n;
    o.seed = seed;
    o.workers = settings.workers;
    const auto results = verify::run(suite, o);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        if (json) {
            std::cout << "{\"suite\":\"" << r.suite << "\",\"property\":\"" << r.name << "\",\"pass\":"
                      << (r.pass ? "true" : "false") << ",\"error\":" << (std::isfinite(r.error) ? num(r.error) : "null")
                      << ",\"threshold\":" << num(r.threshold) << "}\n";
        } else {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.name << "  error=" << num(r.error)
                      << " threshold=" << num(r.threshold);
            if (!r.pass && !r.detail.empty()) std::cout << "  at " << r.detail;
            std::cout << '\n';
        }
    }
    std::cout << (all ? "verify: all " : "verify: FAILED, ") << results.size() << " properties"
              << (verify::fault_injected() ? " (fault injected)" : "") << '\n';
    return all ? ok : verify_failed;
}

// ---------------------------------------------------------------------------

void cmd_spectrum_gen(int n, std::size_t count, std::uint64_t seed, double gap, const std::string& out) {
    auto s = spectrum::synthesize(n, count, seed, gap);
    if (out.empty()) {
        spectrum::serialize(s, std::cout, spectrum::Format::jsonl);
    } else {
        spectrum::write_file(s, out);
        std::cerr << "wrote " << s.entries.size() << " primes to " << out << '\n';
    }
}

void cmd_spectrum_validate(const std::string& path, std::optional<double> bound) {
    const auto s = spectrum::read_file(path);
    const auto r = spectrum::validate(s, bound);
    std::cout << "status=" << (r.ok() && r.issues.empty() ? "OK" : "WARN") << "\nn=" << s.n
              << "\nprimes=" << r.primes << "\nclasses=" << r.classes << "\ncutoff="
              << (s.complete() ? std::string("inf") : num(s.cutoff)) << "\nsorted=" << (r.sorted ? "yes" : "no")
              << "\npositive=" << (r.positive ? "yes" : "no") << "\ndimensions=" << (r.dimensions ? "yes" : "no")
              << "\ngrowth_constant=" << num(r.growth_constant) << "\nargmax_length=" << num(r.argmax_length) << '\n';
    for (const auto& issue : r.issues) std::cout << "warning: " << issue << '\n';
}

void cmd_spectrum_convert(const std::string& in, const std::string& out, bool complex_lengths,
                          std::optional<double> cutoff) {
    spectrum::LengthSpectrum s;
    if (complex_lengths) {
        std::ifstream f(in);
        if (!f) throw InputError("cannot open '" + in + "'");
        s = spectrum::parse_complex_lengths(f, cutoff);
    } else {
        s = spectrum::read_file(in);
        if (cutoff) s.cutoff = *cutoff;
    }
    spectrum::write_file(s, out);
}

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const InputError& x) {
        std::cerr << "input error: " << x.what() << '\n';
        return input;
    } catch (const ConvergenceError& x) {
        std::cerr << "convergence error: " << x.what() << '\n';
        return convergence;
    } catch (const InsufficientSpectrumError& x) {
        std::cerr << "insufficient spectrum: " << x.what() << '\n';
        return convergence;
    } catch (const ModelError& x) {
        std::cerr << "model error: " << x.what() << '\n';
        return model;
    } catch (const PoleError& x) {
        std::cerr << "pole: " << x.what() << " at s=" << num(x.location()) << '\n';
        return input;
    } catch (const DegenerateError& x) {
        std::cerr << "degenerate input: " << x.what() << '\n';
        return input;
    } catch (const IntegralityError& x) {
        std::cerr << "integrality check failed: " << x.what() << '\n';
        return internal;
    } catch (const Error& x) {
        std::cerr << "error: " << x.what() << '\n';
        return internal;
    } catch (const std::exception& x) {
        std::cerr << "error: " << x.what() << '\n';
        return internal;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geoflow: representation data, special functions and zeta functions for odd-dimensional "
                 "hyperbolic manifolds"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto common = [](CLI::App* c) {
        c->add_option("--config", settings.config, "key=value file (n, vol, p, C_Gamma, alpha_n, c_norm, tail_target, workers, digits)");
        c->add_option("--n", settings.n, "rank n (manifold dimension 2n+1)");
        c->add_option("--digits", digits, "significant digits of numeric output")->check(CLI::Range(1, 17));
        c->add_option("--workers", settings.workers, "worker threads")->check(CLI::PositiveNumber);
    };
    int result = ok;
    std::function<void()> action;

    // rep
    std::string rep_weight, rep_group = "M";
    auto* rep = app.add_subcommand("rep", "Representation data for a highest weight");
    common(rep);
    rep->add_option("--sigma,--weight", rep_weight, "highest weight, e.g. 1,0 or 3/2,1/2")->required();
    rep->add_option("--group", rep_group, "M (default), K or G");
    rep->callback([&] {
        action = [&] {
            settings.apply(*rep, settings.config.empty() ? std::map<std::string, std::string>{} : read_config(settings.config));
            cmd_rep(rep_weight, rep_group);
        };
    });

    // specfun
    SpecfunArgs sf;
    auto* specfun_cmd = app.add_subcommand("specfun", "Special functions attached to sigma");
    specfun_cmd->require_subcommand(1);
    for (const char* kind : {"omega", "pj", "cjl", "cnu", "plancherel"}) {
        auto* c = specfun_cmd->add_subcommand(kind, std::string("Evaluate ") + kind);
        common(c);
        c->add_option("--sigma", sf.sigma, "M-weight")->required();
        c->add_option("--lambda", sf.lambda, "spectral parameter a+bi");
        c->add_flag("--check", sf.check, "also print the cross-check value");
        c->add_option("--alpha", settings.alpha_n, "normalization alpha_n of the c-function");
        c->add_option("--c-norm", settings.c_norm, "Plancherel normalization");
        if (std::string(kind) == "pj") {
            c->add_option("--j", sf.j, "index j in 2..n+1");
            c->add_option("--form", sf.form, "closed form: lagrange or printed");
        }
        if (std::string(kind) == "cnu") c->add_option("--nu", sf.nu, "K-weight")->required();
        c->callback([&, c, kind] {
            action = [&, c, kind] {
                settings.apply(*c, settings.config.empty() ? std::map<std::string, std::string>{} : read_config(settings.config));
                cmd_specfun(kind, sf);
            };
        });
    }

    // spectrum
    auto* spec_cmd = app.add_subcommand("spectrum", "Generate, validate and convert length spectra");
    spec_cmd->require_subcommand(1);
    int gen_n = 1;
    std::size_t gen_count = 200;
    std::uint64_t gen_seed = 1;
    double gen_gap = 0.1;
    std::string gen_out;
    auto* gen = spec_cmd->add_subcommand("gen", "Synthesize a random spectrum");
    gen->add_option("--n", gen_n, "rank n")->check(CLI::Range(1, 16));
    gen->add_option("--count", gen_count, "number of primes");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--mean-gap", gen_gap, "mean spacing of lengths");
    gen->add_option("-o,--output", gen_out, "output file (.jsonl or .csv); stdout if omitted");
    gen->callback([&] { action = [&] { cmd_spectrum_gen(gen_n, gen_count, gen_seed, gen_gap, gen_out); }; });

    std::string val_in;
    std::optional<double> val_bound;
    auto* val = spec_cmd->add_subcommand("validate", "Check a spectrum file and fit its growth constant");
    val->add_option("file", val_in, "spectrum file")->required();
    val->add_option("--growth-bound", val_bound, "flag growth constants above this bound");
    val->callback([&] { action = [&] { cmd_spectrum_validate(val_in, val_bound); }; });

    std::string conv_in, conv_out;
    bool conv_complex = false;
    std::optional<double> conv_cutoff;
    auto* conv = spec_cmd->add_subcommand("convert", "Convert between JSONL and CSV");
    conv->add_option("file", conv_in, "input file")->required();
    conv->add_option("-o,--output", conv_out, "output file")->required();
    conv->add_flag("--complex-lengths", conv_complex, "input is a list of complex lengths l+ti (n=1)");
    conv->add_option("--cutoff", conv_cutoff, "completeness cutoff to record");
    conv->callback([&] { action = [&] { cmd_spectrum_convert(conv_in, conv_out, conv_complex, conv_cutoff); }; });

    // zeta
    ZetaArgs za;
    auto* zeta_cmd = app.add_subcommand("zeta", "Zeta functions from a length spectrum");
    zeta_cmd->require_subcommand(1);
    auto zeta_common = [&](CLI::App* c, bool needs_s) {
        common(c);
        c->add_option("--sigma", za.sigma, "M-weight (0 = trivial)");
        c->add_option("--spectrum", za.spectrum, "spectrum file; empty spectrum if omitted");
        c->add_option("--tail-target", settings.tail_target, "certified tail target")->check(CLI::PositiveNumber);
        if (needs_s) c->add_option("--s", za.s, "evaluation point a+bi")->required();
    };
    auto* ev = zeta_cmd->add_subcommand("eval", "Evaluate at one point");
    zeta_common(ev, true);
    ev->add_option("--kind", za.kind, "selberg, product, S, Sa, ruelle-sigma, ruelle-tau");
    ev->add_option("--tau", za.tau, "G-weight for ruelle-tau");
    ev->add_option("--k-max", za.k_max, "symmetric powers for kind=product (-1: automatic)");
    ev->add_option("--cutoff", za.cutoff, "length cutoff for kind=product");
    auto* scan = zeta_cmd->add_subcommand("scan", "Evaluate over a rectangular grid, CSV output");
    zeta_common(scan, false);
    scan->add_option("--kind", za.kind, "selberg, product, S, Sa, ruelle-sigma, ruelle-tau");
    scan->add_option("--tau", za.tau, "G-weight for ruelle-tau");
    scan->add_option("--re", za.re, "lo:hi:count")->required();
    scan->add_option("--im", za.im, "lo:hi:count")->required();
    scan->add_option("-o,--output", za.out, "CSV file; stdout if omitted");
    auto* fc = zeta_cmd->add_subcommand("factor-check", "Compare log R with the alternating Selberg product");
    zeta_common(fc, true);
    auto* xi = zeta_cmd->add_subcommand("xi", "Elementary normalizer of Xi(s, sigma)");
    zeta_common(xi, true);
    xi->add_option("--vol", settings.vol, "volume");
    xi->add_option("--p", settings.p, "number of cusps");
    xi->add_option("--C-Gamma", settings.C_Gamma, "constant C(Gamma)");
    xi->add_option("--c-norm", settings.c_norm, "Plancherel normalization");
    for (auto [c, fn] : std::vector<std::pair<CLI::App*, void (*)(const ZetaArgs&)>>{
             {ev, cmd_zeta_eval}, {scan, cmd_zeta_scan}, {fc, cmd_zeta_factor}, {xi, cmd_zeta_xi}}) {
        c->callback([&, c, fn] {
            action = [&, c, fn] {
                settings.apply(*c, settings.config.empty() ? std::map<std::string, std::string>{} : read_config(settings.config));
                fn(za);
            };
        });
    }

    // ledger
    auto* ledger_cmd = app.add_subcommand("ledger", "Singularity ledger from a spectral model");
    ledger_cmd->require_subcommand(1);
    std::string model_path, ledger_sigma;
    double max_depth = 10.0;
    bool ledger_csv = false;
    auto* predict = ledger_cmd->add_subcommand("predict", "Zeros and poles of Z(s, sigma) with orders");
    common(predict);
    predict->add_option("model", model_path, "SpectralModel JSON file")->required();
    predict->add_option("--sigma", ledger_sigma, "override the model's sigma");
    predict->add_option("--p", settings.p, "override the number of cusps");
    predict->add_option("--max-depth", max_depth, "list cusp terms at -l for l <= max-depth");
    predict->add_flag("--csv", ledger_csv, "CSV output re,im,order");
    predict->callback([&] {
        action = [&] {
            auto cfg = settings.config.empty() ? std::map<std::string, std::string>{} : read_config(settings.config);
            settings.apply(*predict, cfg);
            // Only an explicit --p or config p replaces the model's own value.
            auto m = ledger::read_model(model_path);
            if (!ledger_sigma.empty()) m.sigma = irrep_arg(ledger_sigma);
            if (predict->count("--p") > 0 || cfg.count("p") > 0) m.p = settings.p;
            const auto l = ledger::singularity_ledger(m, max_depth);
            if (ledger_csv) {
                std::cout << "re,im,order\n";
                for (const auto& s : l)
                    std::cout << num(s.location.real()) << ',' << num(s.location.imag()) << ',' << s.order << '\n';
            } else {
                std::cout << "sigma=" << m.sigma.str() << " p=" << m.p << " max_depth=" << num(max_depth) << '\n';
                for (const auto& s : l) std::cout << "  s=" << num(s.location) << "  order=" << s.order << '\n';
            }
            if (!(rootdata::w0_act(m.sigma) == m.sigma))
                std::cerr << "note: sigma != w0 sigma; cusp orders are those of Z(s,sigma) alone, without the "
                             "factor epsilon(sigma)=2 carried by the symmetrized product\n";
        };
    });

    // verify
    auto* ver = app.add_subcommand("verify", "Run the built-in property suites");
    std::string suite = "all";
    int verify_n = 0;
    std::uint64_t verify_seed = 1;
    bool verify_json = false;
    ver->add_option("suite", suite, "all, rep, specfun or zeta");
    ver->add_option("--n", verify_n, "restrict to one rank");
    ver->add_option("--seed", verify_seed, "random seed");
    ver->add_option("--workers", settings.workers, "worker threads")->check(CLI::PositiveNumber);
    ver->add_flag("--json", verify_json, "one JSON object per property");
    ver->callback([&] { action = [&] { result = cmd_verify(suite, verify_n, verify_seed, verify_json); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : input;
    }
    try {
        if (action) action();
    } catch (...) {
        return exit_code_for(std::current_exception());
    }
    return result;
}
