#include "geoflow/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "geoflow/error.hpp"
#include "json.hpp"

namespace geoflow::spectrum {

using json = nlohmann::json;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw InputError("line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view s, std::size_t line) {
    s = trim(s);
    if (s == "inf" || s == "+inf" || s == "infinity") return inf;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(line, "malformed number '" + std::string(s) + "'");
    return v;
}

long parse_long(std::string_view s, std::size_t line) {
    s = trim(s);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(line, "malformed integer '" + std::string(s) + "'");
    return v;
}

void check_entry(const PrimeGeodesic& g, int n, std::size_t line) {
    if (!(g.length > 0.0) || !std::isfinite(g.length)) fail(line, "length must be positive and finite");
    if (static_cast<int>(g.angles.size()) != n)
        fail(line, "expected " + std::to_string(n) + " angles, got " + std::to_string(g.angles.size()));
    for (double t : g.angles)
        if (!std::isfinite(t)) fail(line, "angles must be finite");
    if (g.mult < 1) fail(line, "multiplicity must be positive");
}

void check_header(int n, double cutoff, std::size_t line) {
    if (n < 1) fail(line, "n must be positive");
    if (!(cutoff >= 0.0)) fail(line, "cutoff must be nonnegative");
}

double cutoff_from_json(const json& v, std::size_t line) {
    if (v.is_string()) return parse_double(v.get<std::string>(), line);
    if (v.is_number()) return v.get<double>();
    fail(line, "cutoff must be a number or \"inf\"");
}

LengthSpectrum parse_jsonl(std::istream& in) {
    LengthSpectrum s;
    std::string text;
    std::size_t line = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        json rec;
        try {
            rec = json::parse(text);
        } catch (const json::exception& e) {
            fail(line, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) fail(line, "record must be a JSON object");
        try {
            if (!have_header) {
                if (rec.value("format", std::string()) != "geoflow-spectrum")
                    fail(line, "missing geoflow-spectrum header");
                if (rec.value("version", 0) != 1) fail(line, "unsupported version");
                s.n = rec.at("n").get<int>();
                s.cutoff = cutoff_from_json(rec.at("cutoff"), line);
                if (rec.contains("growth_constant")) s.growth_constant = rec.at("growth_constant").get<double>();
                check_header(s.n, s.cutoff, line);
                have_header = true;
                continue;
            }
            PrimeGeodesic g;
            g.length = rec.at("length").get<double>();
            g.angles = rec.at("angles").get<std::vector<double>>();
            g.mult = rec.value("mult", 1L);
            check_entry(g, s.n, line);
            s.entries.push_back(std::move(g));
        } catch (const json::exception& e) {
            fail(line, std::string("bad field: ") + e.what());
        }
    }
    if (!have_header) throw InputError("spectrum file has no header record");
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

LengthSpectrum parse_csv(std::istream& in) {
    LengthSpectrum s;
    std::string text;
    std::size_t line = 0;
    bool have_n = false, have_cutoff = false, have_columns = false;
    while (std::getline(in, text)) {
        ++line;
        const std::string_view body = trim(text);
        if (body.empty()) continue;
        if (body.front() == '#') {
            const auto meta = trim(body.substr(1));
            const auto eq = meta.find('=');
            if (eq == std::string_view::npos) continue;
            const auto key = trim(meta.substr(0, eq));
            const auto value = trim(meta.substr(eq + 1));
            if (key == "n") {
                s.n = static_cast<int>(parse_long(value, line));
                have_n = true;
            } else if (key == "cutoff") {
                s.cutoff = parse_double(value, line);
                have_cutoff = true;
            } else if (key == "growth_constant") {
                s.growth_constant = parse_double(value, line);
            } else if (key == "format" && value != "geoflow-spectrum") {
                fail(line, "unknown format '" + std::string(value) + "'");
            } else if (key == "version" && value != "1") {
                fail(line, "unsupported version");
            }
            continue;
        }
        const auto cells = split(body, ',');
        if (!have_columns) {
            if (trim(cells.front()) != "length") fail(line, "expected column header 'length,...'");
            if (!have_n) s.n = static_cast<int>(cells.size()) - 2;
            if (static_cast<int>(cells.size()) != s.n + 2)
                fail(line, "column header does not match n=" + std::to_string(s.n));
            check_header(s.n, s.cutoff, line);
            have_columns = true;
            continue;
        }
        if (static_cast<int>(cells.size()) != s.n + 2)
            fail(line, "expected " + std::to_string(s.n + 2) + " fields");
        PrimeGeodesic g;
        g.length = parse_double(cells[0], line);
        for (int j = 0; j < s.n; ++j) g.angles.push_back(parse_double(cells[1 + j], line));
        g.mult = parse_long(cells.back(), line);
        check_entry(g, s.n, line);
        s.entries.push_back(std::move(g));
    }
    if (!have_columns && !have_n) throw InputError("CSV spectrum has neither a column header nor '# n='");
    if (!have_cutoff) throw InputError("CSV spectrum lacks '# cutoff=' metadata");
    return s;
}

}  // namespace

Format format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return Format::csv;
    if (ext == ".jsonl" || ext == ".json") return Format::jsonl;
    throw InputError("cannot infer spectrum format from '" + path.string() + "' (use .jsonl or .csv)");
}

LengthSpectrum parse(std::istream& in, Format format) {
    return format == Format::jsonl ? parse_jsonl(in) : parse_csv(in);
}

void serialize(const LengthSpectrum& s, std::ostream& out, Format format) {
    if (format == Format::jsonl) {
        json header{{"format", "geoflow-spectrum"}, {"version", 1}, {"n", s.n}};
        if (s.complete())
            header["cutoff"] = "inf";
        else
            header["cutoff"] = s.cutoff;
        if (s.growth_constant) header["growth_constant"] = *s.growth_constant;
        out << header.dump() << '\n';
        for (const auto& g : s.entries)
            out << json{{"length", g.length}, {"angles", g.angles}, {"mult", g.mult}}.dump() << '\n';
        return;
    }
    out << "# format=geoflow-spectrum\n# version=1\n# n=" << s.n << "\n# cutoff=" << format_double(s.cutoff)
        << '\n';
    if (s.growth_constant) out << "# growth_constant=" << format_double(*s.growth_constant) << '\n';
    out << "length";
    for (int j = 2; j <= s.n + 1; ++j) out << ",angle_" << j;
    out << ",mult\n";
    for (const auto& g : s.entries) {
        out << format_double(g.length);
        for (double t : g.angles) out << ',' << format_double(t);
        out << ',' << g.mult << '\n';
    }
}

LengthSpectrum read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return parse(in, format_from_path(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_file(const LengthSpectrum& spectrum, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    serialize(spectrum, out, format_from_path(path));
}

LengthSpectrum parse_complex_lengths(std::istream& in, std::optional<double> cutoff) {
    LengthSpectrum s;
    s.n = 1;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        std::string_view body = trim(text);
        if (body.empty() || body.front() == '#') continue;
        PrimeGeodesic g;
        std::string_view number = body;
        std::string_view mult;
        if (const auto sp = body.find_first_of(" \t"); sp != std::string_view::npos && body.find(',') == std::string_view::npos) {
            number = body.substr(0, sp);
            mult = trim(body.substr(sp));
        }
        if (const auto comma = number.find(','); comma != std::string_view::npos) {
            const auto cells = split(body, ',');
            if (cells.size() < 2 || cells.size() > 3) fail(line, "expected 'length,angle[,mult]'");
            g.length = parse_double(cells[0], line);
            g.angles = {parse_double(cells[1], line)};
            if (cells.size() == 3) g.mult = parse_long(cells[2], line);
        } else if (!number.empty() && (number.back() == 'i' || number.back() == 'j')) {
            // Split "l+ti" at the sign of the imaginary part.
            std::size_t pos = number.size() - 1;
            auto is_split = [&](std::size_t p) {
                return (number[p] == '+' || number[p] == '-') && number[p - 1] != 'e' && number[p - 1] != 'E';
            };
            while (pos > 0 && !is_split(pos)) --pos;
            if (pos == 0) fail(line, "malformed complex length '" + std::string(number) + "'");
            g.length = parse_double(number.substr(0, pos), line);
            auto imag = number.substr(pos, number.size() - 1 - pos);
            if (imag == "+" || imag == "-") imag = imag == "+" ? "1" : "-1";
            g.angles = {parse_double(imag, line)};
            if (!mult.empty()) g.mult = parse_long(mult, line);
        } else {
            if (mult.empty()) fail(line, "expected a complex length");
            g.length = parse_double(number, line);
            const auto rest = split(mult, ' ');
            g.angles = {parse_double(rest[0], line)};
            if (rest.size() > 1) g.mult = parse_long(rest[1], line);
        }
        check_entry(g, 1, line);
        s.entries.push_back(std::move(g));
    }
    std::stable_sort(s.entries.begin(), s.entries.end(),
                     [](const PrimeGeodesic& a, const PrimeGeodesic& b) { return a.length < b.length; });
    s.cutoff = cutoff ? *cutoff : (s.entries.empty() ? 0.0 : s.entries.back().length);
    return s;
}

// ---------------------------------------------------------------------------

namespace {

bool entry_less(const PrimeGeodesic& a, const PrimeGeodesic& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.angles < b.angles;
}

struct GrowthFit {
    double constant = 0.0;
    double argmax = 0.0;
    std::size_t classes = 0;
};

GrowthFit fit_growth(const LengthSpectrum& s) {
    GrowthFit fit;
    if (s.entries.empty()) return fit;
    double top = 0.0;
    for (const auto& g : s.entries) top = std::max(top, g.length);
    std::vector<std::pair<double, long>> jumps;
    for (const auto& g : s.entries)
        for (int k = 1; k * g.length <= top; ++k) jumps.emplace_back(k * g.length, g.mult);
    std::sort(jumps.begin(), jumps.end());
    long count = 0;
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        count += jumps[i].second;
        if (i + 1 < jumps.size() && jumps[i + 1].first == jumps[i].first) continue;
        const double ratio = count * std::exp(-2.0 * s.n * jumps[i].first);
        if (ratio > fit.constant) {
            fit.constant = ratio;
            fit.argmax = jumps[i].first;
        }
    }
    fit.classes = static_cast<std::size_t>(count);
    return fit;
}

}  // namespace

double fitted_growth_constant(const LengthSpectrum& spectrum) { return fit_growth(spectrum).constant; }

ValidationReport validate(const LengthSpectrum& s, std::optional<double> growth_bound) {
    ValidationReport r;
    r.primes = s.entries.size();
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
        const auto& g = s.entries[i];
        if (!(g.length > 0.0) || !std::isfinite(g.length)) {
            r.positive = false;
            r.issues.push_back("entry " + std::to_string(i + 1) + " has nonpositive length");
        }
        if (static_cast<int>(g.angles.size()) != s.n) {
            r.dimensions = false;
            r.issues.push_back("entry " + std::to_string(i + 1) + " has the wrong number of angles");
        }
        if (i > 0 && entry_less(g, s.entries[i - 1])) {
            if (r.sorted) r.issues.push_back("entries are not sorted by (length, angles); first violation at entry " +
                                             std::to_string(i + 1));
            r.sorted = false;
        }
    }
    if (!s.complete() && !s.entries.empty() && s.entries.back().length > s.cutoff && r.sorted)
        r.issues.push_back("entries extend beyond the completeness cutoff");
    if (r.positive && r.dimensions) {
        const auto fit = fit_growth(s);
        r.growth_constant = fit.constant;
        r.argmax_length = fit.argmax;
        r.classes = fit.classes;
        if (growth_bound && fit.constant > *growth_bound) {
            r.growth_within_bound = false;
            r.issues.push_back("growth constant " + format_double(fit.constant) + " exceeds the bound " +
                               format_double(*growth_bound));
        }
    }
    return r;
}

LengthSpectrum synthesize(int n, std::size_t count, std::uint64_t seed, double mean_gap, double floor) {
    if (n < 1) throw InputError("n must be positive");
    if (!(mean_gap > 0.0) || !(floor > 0.0)) throw InputError("mean gap and floor must be positive");
    std::mt19937_64 rng(seed);
    // 53-bit uniforms in [0,1); the standard distributions are not portable.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    LengthSpectrum s;
    s.n = n;
    double length = floor;
    for (std::size_t i = 0; i < count; ++i) {
        length += -mean_gap * std::log1p(-uniform());
        PrimeGeodesic g;
        g.length = length;
        for (int j = 0; j < n; ++j) g.angles.push_back(2.0 * std::numbers::pi * uniform());
        s.entries.push_back(std::move(g));
    }
    s.cutoff = s.entries.empty() ? 0.0 : s.entries.back().length;
    return s;
}

// ---------------------------------------------------------------------------

std::vector<cplx> holonomy_eigenvalues(const ClassTerm& term) {
    const double k = term.power;
    const double decay = std::exp(-k * term.prime->length);
    std::vector<cplx> out;
    for (double theta : term.prime->angles) {
        out.push_back(std::polar(decay, k * theta));
        out.push_back(std::polar(decay, -k * theta));
    }
    return out;
}

cplx det_factor(const ClassTerm& term) {
    cplx d = 1.0;
    for (const cplx& e : holonomy_eigenvalues(term)) d *= 1.0 - e;
    return d;
}

std::vector<ClassTerm> enumerate_classes(const LengthSpectrum& spectrum, double max_length) {
    struct Key {
        double length;
        std::size_t index;
        int power;
    };
    std::vector<Key> keys;
    for (std::size_t i = 0; i < spectrum.entries.size(); ++i) {
        const double l = spectrum.entries[i].length;
        for (int k = 1; k * l <= max_length; ++k) keys.push_back({k * l, i, k});
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.index != b.index) return a.index < b.index;
        return a.power < b.power;
    });
    std::vector<ClassTerm> out;
    out.reserve(keys.size());
    for (const auto& key : keys) out.push_back({&spectrum.entries[key.index], key.power});
    return out;
}

namespace {

double growth_constant_of(const LengthSpectrum& s) {
    return s.growth_constant ? *s.growth_constant : fitted_growth_constant(s);
}

}  // namespace

double tail_bound(const LengthSpectrum& s, const TailModel& m, double L) {
    const double D = m.character_bound;
    if (s.complete()) {
        if (!(m.a > 0.0)) return inf;
        double total = 0.0;
        for (const auto& g : s.entries) {
            const double l = g.length;
            const double k = std::floor(L / l) + 1.0;
            const double det = m.det_power == 0 ? 1.0 : std::pow(-std::expm1(-k * l), -m.det_power);
            total += g.mult * D * det * std::exp(-m.a * k * l) / (k * -std::expm1(-m.a * l));
        }
        return total;
    }
    const double excess = m.a - 2.0 * s.n;
    if (!(excess > 0.0)) return inf;
    const double C = growth_constant_of(s);
    if (C == 0.0) return 0.0;
    if (L <= 0.0) return inf;
    const double det = m.det_power == 0 ? 1.0 : std::pow(-std::expm1(-L), -m.det_power);
    return D * det * m.a * C * std::exp(-excess * L) / excess;
}

ClassPlan class_iterator(const LengthSpectrum& s, const TailModel& m, double tail_target) {
    if (!(tail_target > 0.0)) throw InputError("tail target must be positive");
    const double threshold = s.complete() ? 0.0 : 2.0 * s.n;
    if (!(m.a > threshold))
        throw ConvergenceError("class series diverges: decay rate " + format_double(m.a) +
                               " must exceed " + format_double(threshold) +
                               (s.complete() ? "" : " for a spectrum with finite cutoff"));
    ClassPlan plan;
    if (tail_bound(s, m, 0.0) <= tail_target) {
        plan.tail_bound = tail_bound(s, m, 0.0);
        return plan;
    }
    double hi;
    if (s.complete()) {
        hi = 1.0;
        while (tail_bound(s, m, hi) > tail_target) {
            hi *= 2.0;
            if (hi > 1e6) throw ConvergenceError("class series converges too slowly for the tail target");
        }
    } else {
        hi = s.cutoff;
        if (!(tail_bound(s, m, hi) <= tail_target))
            throw InsufficientSpectrumError("spectrum cutoff " + format_double(s.cutoff) +
                                            " cannot certify tail target " + format_double(tail_target) +
                                            " (bound at cutoff: " + format_double(tail_bound(s, m, hi)) + ")");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail_bound(s, m, mid) <= tail_target)
            hi = mid;
        else
            lo = mid;
    }
    plan.cutoff_used = hi;
    plan.tail_bound = tail_bound(s, m, hi);
    plan.terms = enumerate_classes(s, hi);
    return plan;
}

}  // namespace geoflow::spectrum
