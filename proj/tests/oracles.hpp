#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's encoding, Fourier or OLS code paths.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

/// x mod p by repeated subtraction of shifted multiples (long division).
inline std::uint64_t residue(std::uint64_t x, std::uint64_t p) {
    std::uint64_t r = x;
    std::uint64_t d = p;
    while (d <= r / 2) d <<= 1;
    while (d >= p) {
        if (r >= d) r -= d;
        d >>= 1;
    }
    return r;
}

/// Decimal digits of x from its text form, left-padded to `width`.
inline std::vector<int> decimal_digits(std::uint64_t x, std::size_t width) {
    const std::string s = std::to_string(x);
    std::vector<int> out(width - s.size(), 0);
    for (char c : s) out.push_back(c - '0');
    return out;
}

/// Digits in `base` by building the number back from powers (textbook).
inline std::vector<int> base_digits(std::uint64_t x, unsigned base, std::size_t width) {
    std::vector<int> out(width, 0);
    std::uint64_t power = 1;
    for (std::size_t i = 1; i < width; ++i) power *= base;
    for (std::size_t i = 0; i < width; ++i) {
        out[i] = static_cast<int>(x / power);
        x -= static_cast<std::uint64_t>(out[i]) * power;
        power /= base;
    }
    return out;
}

/// Analytic trigonometric interpolant of 0, 1, ..., p-1: gamma = (p-1)/2,
/// beta_j = -1 and alpha_j = -cot(pi j / p) for 2j < p; for the Nyquist
/// harmonic of even p, alpha = 0 and beta = -1/2. Derived from
/// sum_r r w^r = p / (w - 1) for a p-th root of unity w != 1.
struct Coefficients {
    double gamma;
    std::vector<double> alpha;
    std::vector<double> beta;
};

inline Coefficients analytic_coefficients(std::uint64_t p) {
    Coefficients c{(static_cast<double>(p) - 1.0) / 2.0, {}, {}};
    const std::uint64_t pairs = (p - 1) / 2 + (p % 2 == 0 ? 1 : 0);
    for (std::uint64_t j = 1; j <= pairs; ++j) {
        if (2 * j == p) {
            c.alpha.push_back(0.0);
            c.beta.push_back(-0.5);
        } else {
            c.alpha.push_back(-1.0 / std::tan(std::numbers::pi * static_cast<double>(j) / static_cast<double>(p)));
            c.beta.push_back(-1.0);
        }
    }
    return c;
}

/// Long-double evaluation of the same interpolant at integer x, with the
/// phase reduced through fmodl rather than integer arithmetic.
inline long double interpolant(const Coefficients& c, std::uint64_t p, std::uint64_t x) {
    long double v = c.gamma;
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (std::size_t i = 0; i < c.alpha.size(); ++i) {
        const long double j = static_cast<long double>(i + 1);
        const long double t = std::fmod(j * static_cast<long double>(x), static_cast<long double>(p));
        const long double arg = two_pi * t / static_cast<long double>(p);
        v += c.alpha[i] * std::sin(arg) + c.beta[i] * std::cos(arg);
    }
    return v;
}

/// Linear interpolation between the integer points (k, k mod p) for x >= 0.
inline double lerp_mod(double x, std::uint64_t p) {
    const double k = std::floor(x);
    const double frac = x - k;
    const auto at = [p](double v) { return static_cast<double>(static_cast<std::uint64_t>(v) % p); };
    return (1.0 - frac) * at(k) + frac * at(k + 1.0);
}

}  // namespace oracle
