#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ccdc {

// Exact rational on 64-bit words. Always stored normalized: den > 0,
// gcd(|num|, den) == 1. Intermediate products go through __int128 and
// overflow of the normalized result throws instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num) : num_(num), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        normalize_small();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from_wide((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return double(num_) / double(den_); }

    // "n/d", or just "n" for integers.
    std::string to_string() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    // Exact decimal rendering, rounded half-up at `sig` significant digits.
    // Terminating expansions render short (39/80 -> "0.4875"); trailing
    // zeros are never produced by rounding a repeating expansion.
    std::string to_decimal_string(int sig = 12) const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    void normalize_small() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 an = n < 0 ? -n : n;
        __int128 g = wide_gcd(an, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n == 0) d = 1;
        constexpr __int128 lo = -(__int128)INT64_MAX - 1;
        constexpr __int128 hi = (__int128)INT64_MAX;
        if (n < lo || n > hi || d > hi)
            throw std::overflow_error("Rational: value exceeds 64-bit range");
        Rational r;
        r.num_ = (std::int64_t)n;
        r.den_ = (std::int64_t)d;
        return r;
    }

    static __int128 wide_gcd(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
};

inline std::string Rational::to_decimal_string(int sig) const {
    if (sig < 1) sig = 1;
    if (num_ == 0) return "0";
    bool neg = num_ < 0;
    unsigned long long a = neg ? (unsigned long long)(-(num_ + 1)) + 1ULL
                               : (unsigned long long)num_;
    unsigned long long b = (unsigned long long)den_;

    std::string int_digits = std::to_string(a / b);
    unsigned long long rem = a % b;

    int sig_used = int_digits == "0" ? 0 : (int)int_digits.size();
    std::string frac;
    bool exact = rem == 0;
    bool counting = sig_used > 0;
    while (!exact && (int)frac.size() < 64) {
        rem *= 10;
        unsigned long long digit = rem / b;
        rem %= b;
        frac += char('0' + digit);
        if (!counting && digit != 0) counting = true;
        if (counting) ++sig_used;
        if (rem == 0) {
            exact = true;
            break;
        }
        if (sig_used >= sig + 1) break;  // one guard digit for rounding
    }

    if (!exact && sig_used > sig) {
        // Round half-up on the guard digit, with carry.
        std::string all = int_digits + frac;
        size_t point = int_digits.size();
        bool carry = all.back() >= '5';
        all.pop_back();
        for (size_t i = all.size(); carry && i-- > 0;) {
            if (all[i] == '9') {
                all[i] = '0';
            } else {
                ++all[i];
                carry = false;
            }
        }
        if (carry) {
            all.insert(all.begin(), '1');
            ++point;
        }
        int_digits = all.substr(0, point);
        frac = all.substr(point);
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();

    std::string out = neg ? "-" : "";
    out += int_digits;
    if (!frac.empty()) out += "." + frac;
    return out;
}

}  // namespace ccdc
