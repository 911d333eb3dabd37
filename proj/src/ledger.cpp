#include "geoflow/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/specfun.hpp"
#include "json.hpp"

namespace geoflow::ledger {

using json = nlohmann::json;
using rootdata::GroupDesc;
using rootdata::Irrep;

namespace {

// Eigenvalues are model inputs; this only absorbs the rounding in mu^2.
constexpr double match_tolerance = 1e-12;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

Weight weight_from_json(const json& v) {
    if (v.is_string()) return Weight::parse(v.get<std::string>());
    if (!v.is_array()) throw InputError("sigma must be a string like \"1,0\" or an array");
    std::string text;
    for (const auto& e : v) {
        if (!text.empty()) text += ',';
        if (e.is_string())
            text += e.get<std::string>();
        else if (e.is_number_integer())
            text += std::to_string(e.get<long>());
        else if (e.is_number())
            text += fmt(e.get<double>());
        else
            throw InputError("sigma entries must be numbers or strings");
    }
    return Weight::parse(text);
}

std::vector<Point> points_from_json(const json& doc, const char* key) {
    std::vector<Point> out;
    if (!doc.contains(key)) return out;
    for (const auto& e : doc.at(key)) {
        Point pt;
        pt.location = {e.at("re").get<double>(), e.value("im", 0.0)};
        pt.mult = e.value("mult", 1L);
        out.push_back(pt);
    }
    return out;
}

json points_to_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({{"re", p.location.real()}, {"im", p.location.imag()}, {"mult", p.mult}});
    return arr;
}

bool self_dual(const Irrep& sigma) { return rootdata::w0_act(sigma) == sigma; }

void require(bool ok, const std::string& what) {
    if (!ok) throw ModelError(what);
}

}  // namespace

SpectralModel parse_model(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(std::string("model is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InputError("model must be a JSON object");
    try {
        SpectralModel m;
        const Weight w = weight_from_json(doc.at("sigma"));
        const int n = doc.value("n", static_cast<int>(w.size()));
        if (n != static_cast<int>(w.size()))
            throw InputError("sigma has " + std::to_string(w.size()) + " entries but n=" + std::to_string(n));
        m.sigma = Irrep::make(GroupDesc::M(n), w);
        m.laplace_eigs = points_from_json(doc, "laplace_eigs");
        if (doc.contains("dirac_eigs"))
            for (const auto& e : doc.at("dirac_eigs")) m.dirac_eigs.push_back({e.at("mu").get<double>(), e.value("mult", 1L)});
        m.m_s_zero = doc.value("m_s_zero", 0L);
        m.c1 = doc.value("c1", 0L);
        m.beta_poles = points_from_json(doc, "beta_poles");
        m.eta_poles_sigma = points_from_json(doc, "eta_poles_sigma");
        m.eta_poles_w0sigma = points_from_json(doc, "eta_poles_w0sigma");
        m.p = doc.value("p", 1);
        m.vol = doc.value("vol", 1.0);
        m.C_Gamma = doc.value("C_Gamma", 0.0);
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("bad model field: ") + e.what());
    }
}

SpectralModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return parse_model(in);
}

std::string model_to_json(const SpectralModel& m) {
    json doc{{"n", m.sigma.group.rank}, {"sigma", m.sigma.weight.csv()}};
    doc["laplace_eigs"] = points_to_json(m.laplace_eigs);
    json dirac = json::array();
    for (const auto& d : m.dirac_eigs) dirac.push_back({{"mu", d.mu}, {"mult", d.mult}});
    doc["dirac_eigs"] = dirac;
    doc["m_s_zero"] = m.m_s_zero;
    doc["c1"] = m.c1;
    doc["beta_poles"] = points_to_json(m.beta_poles);
    doc["eta_poles_sigma"] = points_to_json(m.eta_poles_sigma);
    doc["eta_poles_w0sigma"] = points_to_json(m.eta_poles_w0sigma);
    doc["p"] = m.p;
    doc["vol"] = m.vol;
    doc["C_Gamma"] = m.C_Gamma;
    return doc.dump(2);
}

void check_model(const SpectralModel& m) {
    const int n = m.sigma.group.rank;
    const long dim = static_cast<long>(rootdata::weyl_dim(m.sigma));
    require(m.sigma.group == GroupDesc::M(n), "sigma must be a representation of M");
    require(m.p >= 1, "p (number of cusps) must be at least 1");
    require(m.vol > 0.0, "vol must be positive");
    require(m.m_s_zero >= 0, "m_s_zero must be nonnegative");
    for (const auto& l : m.laplace_eigs) {
        require(l.location != cplx(0.0, 0.0), "eigenvalue 0 must be given through m_s_zero");
        require(l.mult > 0, "Laplace multiplicities must be positive");
    }
    for (const auto& b : m.beta_poles) {
        require(b.location.imag() == 0.0 && b.location.real() > 0.0 && b.location.real() <= n,
                "beta pole " + fmt(b.location.real()) + " outside (0, n]");
        require(b.mult > 0, "beta multiplicities must be positive");
    }
    for (const auto* list : {&m.eta_poles_sigma, &m.eta_poles_w0sigma})
        for (const auto& e : *list) {
            require(e.location.real() < 0.0, "eta pole must satisfy Re(eta) < 0");
            require(e.mult > 0, "eta multiplicities must be positive");
        }
    if (self_dual(m.sigma)) {
        require(m.dirac_eigs.empty(), "Dirac eigenvalues are only used when sigma != w0 sigma");
        require(m.c1 >= 0 && m.c1 <= m.p * dim,
                "c1 = " + std::to_string(m.c1) + " outside [0, p*dim sigma] = [0, " + std::to_string(m.p * dim) + "]");
    } else {
        require(m.c1 == 0, "c1 is only used when sigma = w0 sigma");
        for (const auto& d : m.dirac_eigs) {
            require(d.mu != 0.0 && std::isfinite(d.mu), "Dirac eigenvalues must be nonzero reals");
            require(d.mult > 0, "Dirac multiplicities must be positive");
        }
    }
}

std::vector<Singularity> ledger_merge(std::vector<Singularity> items) {
    // -0.0 and 0.0 compare equal; keep only the latter so output is stable.
    for (auto& s : items) s.location = {s.location.real() + 0.0, s.location.imag() + 0.0};
    auto less = [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(items.begin(), items.end(), [&](const Singularity& a, const Singularity& b) {
        return less(a.location, b.location);
    });
    std::vector<Singularity> out;
    for (const auto& s : items) {
        if (!out.empty() && out.back().location == s.location)
            out.back().order += s.order;
        else
            out.push_back(s);
    }
    std::erase_if(out, [](const Singularity& s) { return s.order == 0; });
    return out;
}

std::vector<Singularity> singularity_ledger(const SpectralModel& m, double max_depth) {
    check_model(m);
    const int n = m.sigma.group.rank;
    const long dim = static_cast<long>(rootdata::weyl_dim(m.sigma));
    const cplx i{0.0, 1.0};
    std::vector<Singularity> out;

    if (self_dual(m.sigma)) {
        for (const auto& l : m.laplace_eigs) {
            const cplx root = std::sqrt(l.location);  // principal branch, Im >= 0
            out.push_back({i * root, l.mult});
            out.push_back({-i * root, l.mult});
        }
        out.push_back({0.0, 2 * m.m_s_zero - m.c1});
    } else {
        struct Pair {
            cplx mu;
            long ms = 0, d_plus = 0, d_minus = 0;
        };
        std::vector<Pair> pairs;
        for (const auto& l : m.laplace_eigs) pairs.push_back({std::sqrt(l.location), l.mult, 0, 0});
        for (const auto& d : m.dirac_eigs) {
            const double sq = d.mu * d.mu;
            auto it = std::find_if(pairs.begin(), pairs.end(), [&](const Pair& p) {
                return std::abs(p.mu * p.mu - sq) <= match_tolerance * std::max(1.0, sq);
            });
            if (it == pairs.end()) {
                pairs.push_back({std::abs(d.mu), 0, 0, 0});
                it = pairs.end() - 1;
            }
            (d.mu > 0 ? it->d_plus : it->d_minus) += d.mult;
        }
        for (const auto& p : pairs) {
            const long plus = p.ms + p.d_plus - p.d_minus;
            const long minus = p.ms - p.d_plus + p.d_minus;
            require(plus % 2 == 0, "parity violated at mu = " + fmt(p.mu.real()) + ": m_s(mu^2) + d(mu) - d(-mu) = " +
                                       std::to_string(plus) + " is odd");
            out.push_back({i * p.mu, plus / 2});
            out.push_back({-i * p.mu, minus / 2});
        }
        out.push_back({0.0, m.m_s_zero});
    }

    for (const auto& b : m.beta_poles) out.push_back({-b.location.real(), -b.mult});
    for (const auto& e : n % 2 == 0 ? m.eta_poles_sigma : m.eta_poles_w0sigma) out.push_back({e.location, e.mult});

    // Cusp terms sit at -l with l in N (integral sigma) or 1/2 + N.
    const Weight& k = m.sigma.weight;
    const double m0 = std::abs(k.coord(n - 1));
    const bool half = !k.all_integral();
    double start = half ? std::max(m0, 0.5) : std::max(m0, 1.0);
    for (double l = start; l <= max_depth; l += 1.0) out.push_back({-l, -m.p * dim});
    for (const auto& c : specfun::c_jl(m.sigma)) {
        const double l = c.l.to_double();
        if (l < start || l > max_depth) continue;
        out.push_back({-l, m.p * c.value});
    }
    return ledger_merge(std::move(out));
}

long order_at(const std::vector<Singularity>& ledger, cplx location) {
    for (const auto& s : ledger)
        if (s.location == location) return s.order;
    return 0;
}

}  // namespace geoflow::ledger
