#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ontopred {

/// Exact fraction, always stored in lowest terms with a
/// positive denominator. A zero denominator yields 0 with `undefined` set
/// rather than an error, so empty snapshots still produce a report.
class rational {
public:
    constexpr rational() = default;
    rational(std::int64_t num, std::int64_t den = 1) {
        if (den == 0) {
            undefined_ = true;
            return;
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        auto g = std::gcd(num < 0 ? -num : num, den);
        if (g == 0) g = 1;
        num_ = num / g;
        den_ = den / g;
    }

    static rational undefined_value() {
        rational r;
        r.undefined_ = true;
        return r;
    }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    bool undefined() const noexcept { return undefined_; }

    double to_double() const noexcept { return double(num_) / double(den_); }
    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    friend rational operator+(const rational& a, const rational& b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend rational operator-(const rational& a, const rational& b) {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend rational operator*(const rational& a, const rational& b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend rational operator/(const rational& a, const rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return {a.num_ * b.den_, a.den_ * b.num_};
    }

    /// Compares values only; the undefined flag is metadata.
    friend bool operator==(const rational& a, const rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const rational& a, const rational& b) noexcept {
        return (a.num_ * b.den_) <=> (b.num_ * a.den_);
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    bool undefined_ = false;
};

} // namespace ontopred
