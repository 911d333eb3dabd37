#include "geoflow/weight.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geoflow/error.hpp"

namespace geoflow {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw InputError("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator*(const Rational& a, const Rational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

Weight Weight::integral(std::initializer_list<int> coords) {
    std::vector<int> twice;
    twice.reserve(coords.size());
    for (int c : coords) twice.push_back(2 * c);
    return Weight(std::move(twice));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

long parse_long(std::string_view s, std::string_view whole) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw InputError("malformed weight '" + std::string(whole) + "'");
    return v;
}

int parse_twice(std::string_view entry, std::string_view whole) {
    entry = trim(entry);
    if (const auto slash = entry.find('/'); slash != std::string_view::npos) {
        const long num = parse_long(entry.substr(0, slash), whole);
        const long den = parse_long(entry.substr(slash + 1), whole);
        if (den == 1) return static_cast<int>(2 * num);
        if (den == 2) return static_cast<int>(num);
        throw InputError("weight entries must be integers or half-integers: '" +
                         std::string(whole) + "'");
    }
    if (entry.find('.') != std::string_view::npos) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(entry.data(), entry.data() + entry.size(), v);
        if (ec != std::errc{} || ptr != entry.data() + entry.size())
            throw InputError("malformed weight '" + std::string(whole) + "'");
        const double t = 2.0 * v;
        if (std::abs(t - std::round(t)) > 0.0)
            throw InputError("weight entries must be integers or half-integers: '" +
                             std::string(whole) + "'");
        return static_cast<int>(std::lround(t));
    }
    return static_cast<int>(2 * parse_long(entry, whole));
}

}  // namespace

Weight Weight::parse(std::string_view text) {
    std::string_view body = trim(text);
    if (!body.empty() && body.front() == '(' && body.back() == ')')
        body = body.substr(1, body.size() - 2);
    if (trim(body).empty()) throw InputError("empty weight");
    std::vector<int> twice;
    std::size_t start = 0;
    while (true) {
        const auto comma = body.find(',', start);
        twice.push_back(parse_twice(body.substr(start, comma - start), text));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return Weight(std::move(twice));
}

bool Weight::all_integral() const {
    for (int t : twice_)
        if (t % 2 != 0) return false;
    return true;
}

bool Weight::all_half_integral() const {
    if (twice_.empty()) return false;
    for (int t : twice_)
        if (t % 2 == 0) return false;
    return true;
}

Weight Weight::operator-() const {
    Weight r = *this;
    for (int& t : r.twice_) t = -t;
    return r;
}

Weight& Weight::operator+=(const Weight& other) {
    for (std::size_t i = 0; i < twice_.size(); ++i) twice_[i] += other.twice_[i];
    return *this;
}

Weight& Weight::operator-=(const Weight& other) {
    for (std::size_t i = 0; i < twice_.size(); ++i) twice_[i] -= other.twice_[i];
    return *this;
}

long dot4(const Weight& a, const Weight& b) {
    long s = 0;
    for (std::size_t i = 0; i < a.twice_.size(); ++i)
        s += static_cast<long>(a.twice_[i]) * b.twice_[i];
    return s;
}

std::string Weight::csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < twice_.size(); ++i) {
        if (i) os << ',';
        if (twice_[i] % 2 == 0)
            os << twice_[i] / 2;
        else
            os << twice_[i] << "/2";
    }
    return os.str();
}

std::string Weight::str() const { return "(" + csv() + ")"; }

}  // namespace geoflow
