#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "geoflow/error.hpp"
#include "geoflow/spectrum.hpp"

using namespace geoflow;
using namespace geoflow::spectrum;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

LengthSpectrum single(int n, double length, double cutoff = inf) {
    LengthSpectrum s;
    s.n = n;
    s.cutoff = cutoff;
    s.entries.push_back({length, std::vector<double>(n, 0.0), 1});
    return s;
}

std::string dump(const LengthSpectrum& s, Format f) {
    std::ostringstream os;
    serialize(s, os, f);
    return os.str();
}

LengthSpectrum load(const std::string& text, Format f) {
    std::istringstream is(text);
    return parse(is, f);
}

}  // namespace

TEST_CASE("round trips are bit exact in both formats") {
    for (int n = 1; n <= 3; ++n) {
        auto s = synthesize(n, 50, 7 + n);
        s.growth_constant = 0.123456789012345678;
        for (Format f : {Format::jsonl, Format::csv}) {
            const auto back = load(dump(s, f), f);
            CHECK(back == s);
            CHECK(dump(back, f) == dump(s, f));
        }
    }
    auto complete = single(2, 1.25);
    CHECK(load(dump(complete, Format::jsonl), Format::jsonl).complete());
    CHECK(load(dump(complete, Format::csv), Format::csv).complete());
}

TEST_CASE("file round trip picks format from the extension") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto s = synthesize(2, 20, 3);
    for (const char* name : {"gf_rt.jsonl", "gf_rt.csv"}) {
        const auto path = dir / name;
        write_file(s, path);
        CHECK(read_file(path) == s);
        std::filesystem::remove(path);
    }
    CHECK_THROWS_AS(format_from_path("x.txt"), InputError);
    CHECK_THROWS_AS(read_file(dir / "gf_missing_file.jsonl"), InputError);
}

TEST_CASE("malformed input reports the line") {
    const std::string header = R"({"format":"geoflow-spectrum","version":1,"n":2,"cutoff":5})";
    auto message = [](const std::string& text, Format f) {
        try {
            load(text, f);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(header + "\n{\"length\":1,\"angles\":[0]}\n", Format::jsonl).find("line 2") != std::string::npos);
    CHECK(message(header + "\n{\"length\":-1,\"angles\":[0,0]}\n", Format::jsonl).find("line 2") != std::string::npos);
    CHECK(message(header + "\nnot json\n", Format::jsonl).find("line 2") != std::string::npos);
    CHECK(message("{\"length\":1}\n", Format::jsonl).find("line 1") != std::string::npos);
    CHECK(message("", Format::jsonl) != "no error");
    CHECK(message("# n=1\n# cutoff=3\nlength,angle_2,mult\n1.0,abc,1\n", Format::csv).find("line 4") !=
          std::string::npos);
    CHECK(message("# n=1\nlength,angle_2,mult\n1.0,0,1\n", Format::csv) != "no error");
    CHECK(message("# n=2\n# cutoff=3\nlength,angle_2,mult\n", Format::csv) != "no error");
}

TEST_CASE("complex lengths import") {
    std::istringstream in("1.5+0.25i\n2.0-0.5i 3\n2.5,1e-1\n3 0.7 2\n# comment\n");
    const auto s = parse_complex_lengths(in, 4.0);
    REQUIRE(s.entries.size() == 4);
    CHECK(s.n == 1);
    CHECK(s.cutoff == 4.0);
    CHECK(s.entries[0].angles[0] == 0.25);
    CHECK(s.entries[1].angles[0] == -0.5);
    CHECK(s.entries[1].mult == 3);
    CHECK(s.entries[2].angles[0] == doctest::Approx(0.1));
    CHECK(s.entries[3].mult == 2);
    std::istringstream bad("1.5+xi\n");
    CHECK_THROWS_AS(parse_complex_lengths(bad), InputError);
}

TEST_CASE("validation counts classes and the growth constant") {
    const auto one = single(1, 1.0);
    const auto r = validate(one);
    CHECK(r.ok());
    CHECK(r.growth_constant == doctest::Approx(std::exp(-2.0)));
    CHECK(validate(one, 0.1).growth_within_bound == false);

    LengthSpectrum two = single(1, 1.0, 2.5);
    two.entries.push_back({2.5, {0.0}, 1});
    const auto r2 = validate(two);
    // classes of length <= 2.5: gamma, gamma^2, delta
    CHECK(r2.classes == 3);
    CHECK(r2.growth_constant == doctest::Approx(std::max({std::exp(-2.0), 2 * std::exp(-4.0), 3 * std::exp(-5.0)})));

    LengthSpectrum unsorted = two;
    std::swap(unsorted.entries[0], unsorted.entries[1]);
    CHECK_FALSE(validate(unsorted).sorted);
    LengthSpectrum wrong = two;
    wrong.entries[0].angles.push_back(0.0);
    CHECK_FALSE(validate(wrong).dimensions);
}

TEST_CASE("synthesis is deterministic and well formed") {
    const auto a = synthesize(2, 200, 1);
    const auto b = synthesize(2, 200, 1);
    CHECK(a == b);
    CHECK_FALSE(a == synthesize(2, 200, 2));
    CHECK(validate(a).ok());
    CHECK(a.entries.front().length > 0.5);
    CHECK(a.cutoff == a.entries.back().length);
    for (const auto& g : a.entries)
        for (double t : g.angles) CHECK((t >= 0.0 && t < 2.0 * std::numbers::pi));
}

TEST_CASE("holonomy of a power is the power of the holonomy") {
    LengthSpectrum s;
    s.n = 3;
    s.cutoff = inf;
    s.entries.push_back({0.7, {0.3, -1.1, 2.0}, 1});
    const ClassTerm base{&s.entries[0], 1};
    const auto e1 = holonomy_eigenvalues(base);
    for (int k = 1; k <= 5; ++k) {
        const auto ek = holonomy_eigenvalues({&s.entries[0], k});
        REQUIRE(ek.size() == e1.size());
        for (std::size_t i = 0; i < ek.size(); ++i) CHECK(std::abs(ek[i] - std::pow(e1[i], k)) < 1e-14);
        // det(1 - A) from elementary symmetric polynomials of the eigenvalues
        std::vector<cplx> esym(ek.size() + 1, 0.0);
        esym[0] = 1.0;
        for (const cplx& x : ek)
            for (std::size_t j = esym.size() - 1; j >= 1; --j) esym[j] += x * esym[j - 1];
        cplx det = 0.0;
        for (std::size_t j = 0; j < esym.size(); ++j) det += (j % 2 ? -1.0 : 1.0) * esym[j];
        CHECK(std::abs(det_factor({&s.entries[0], k}) - det) < 1e-13);
    }
}

TEST_CASE("class enumeration lists powers by length") {
    const auto s = single(1, 1.0, 3.5);
    const auto classes = enumerate_classes(s, 3.5);
    REQUIRE(classes.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(classes[k].power == k + 1);
        CHECK(classes[k].length() == k + 1.0);
    }
    LengthSpectrum two = single(1, 1.0, 3.0);
    two.entries.push_back({1.5, {0.0}, 2});
    const auto c2 = enumerate_classes(two, 3.0);
    REQUIRE(c2.size() == 5);
    CHECK(c2[1].prime == &two.entries[1]);
    CHECK(c2[3].length() == 3.0);
    CHECK(c2[3].prime == &two.entries[0]);
    CHECK(c2[4].prime == &two.entries[1]);
}

TEST_CASE("tail bounds decrease and bound the omitted classes") {
    const auto s = synthesize(1, 300, 11);
    const TailModel m{3.0, 2, 1.0};
    double prev = inf;
    for (double L = 0.5; L <= s.cutoff; L += 0.5) {
        const double t = tail_bound(s, m, L);
        CHECK(t <= prev);
        prev = t;
    }
    // The omitted part of the series within the listed range is dominated.
    const double L = 4.0;
    double omitted = 0.0;
    for (const auto& c : enumerate_classes(s, s.cutoff))
        if (c.length() > L) omitted += std::exp(-m.a * c.length()) / (c.power * std::abs(det_factor(c)));
    CHECK(omitted <= tail_bound(s, m, L));

    const auto complete = single(1, 1.0);
    const TailModel r{0.5, 0, 1.0};
    double exact = 0.0;
    for (int k = 6; k < 2000; ++k) exact += std::exp(-0.5 * k) / k;
    CHECK(exact <= tail_bound(complete, r, 5.5));
    CHECK(tail_bound(complete, r, 5.5) < 2 * exact);
}

TEST_CASE("class iterator certifies or refuses") {
    const auto s = synthesize(1, 300, 11);
    const auto plan = class_iterator(s, {5.0, 2, 1.0}, 1e-10);
    CHECK(plan.tail_bound <= 1e-10);
    CHECK(plan.cutoff_used <= s.cutoff);
    CHECK(plan.terms.size() == enumerate_classes(s, plan.cutoff_used).size());
    CHECK_THROWS_AS(class_iterator(s, {2.0, 2, 1.0}, 1e-10), ConvergenceError);
    CHECK_THROWS_AS(class_iterator(s, {2.0001, 2, 1.0}, 1e-12), InsufficientSpectrumError);
    CHECK_THROWS_AS(class_iterator(single(1, 1.0), {0.0, 0, 1.0}, 1e-10), ConvergenceError);
    const auto cplan = class_iterator(single(1, 1.0), {1.0, 0, 1.0}, 1e-12);
    CHECK(cplan.tail_bound <= 1e-12);
}
