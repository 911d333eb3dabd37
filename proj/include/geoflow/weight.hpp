#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace geoflow {

// Exact rational number with a positive, reduced denominator.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// A weight in the e_2,...,e_{n+1} (or e_1,...,e_{n+1}) basis. Coordinates are
// stored doubled so that half-integral weights stay exact integers.
class Weight {
public:
    Weight() = default;
    explicit Weight(std::vector<int> twice) : twice_(std::move(twice)) {}

    static Weight integral(std::initializer_list<int> coords);
    static Weight zero(std::size_t size) { return Weight(std::vector<int>(size, 0)); }
    // Accepts "1,0", "3/2,1/2", "-1/2" or "0.5,0.5"; throws InputError.
    static Weight parse(std::string_view text);

    std::size_t size() const { return twice_.size(); }
    bool empty() const { return twice_.empty(); }
    int twice(std::size_t i) const { return twice_[i]; }
    const std::vector<int>& twice() const { return twice_; }
    double coord(std::size_t i) const { return 0.5 * twice_[i]; }
    Rational rational(std::size_t i) const { return {twice_[i], 2}; }

    bool all_integral() const;
    bool all_half_integral() const;
    bool uniform_parity() const { return all_integral() || all_half_integral(); }

    Weight operator-() const;
    Weight& operator+=(const Weight& other);
    Weight& operator-=(const Weight& other);
    friend Weight operator+(Weight a, const Weight& b) { return a += b; }
    friend Weight operator-(Weight a, const Weight& b) { return a -= b; }

    // Four times the standard inner product, exact.
    friend long dot4(const Weight& a, const Weight& b);

    // Formats as "(1,0)" or "(3/2,-1/2)".
    std::string str() const;
    // Formats as "1,0" (CLI weight syntax).
    std::string csv() const;

    friend auto operator<=>(const Weight&, const Weight&) = default;
    friend bool operator==(const Weight&, const Weight&) = default;

private:
    std::vector<int> twice_;
};

}  // namespace geoflow
