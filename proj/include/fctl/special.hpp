#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace fctl {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double sqrt_pi = 1.77245385090551602730;
inline constexpr double sqrt_two = 1.41421356237309504880;
inline constexpr double sqrt_two_pi = 2.50662827463100050242;
inline constexpr double two_sqrt_pi = 3.54490770181103205460;

// Riemann zeta for real s > 0, s != 1, by Borwein's alternating-series
// algorithm. With n = 44 the error is below (3 + sqrt(8))^-44 ~ 1e-33,
// far under double precision.
inline double zeta_positive(double s) {
    if (!(s > 0.0) || s == 1.0)
        throw std::domain_error("zeta_positive: requires s > 0, s != 1");
    constexpr int n = 44;
    std::array<double, n + 1> d{};
    double t = 1.0 / n;  // (n+j-1)! 4^j / ((n-j)! (2j)!) at j = 0
    double acc = t;
    d[0] = n * acc;
    for (int j = 1; j <= n; ++j) {
        t *= 4.0 * (n + j - 1) * (n - j + 1) / ((2.0 * j - 1) * (2.0 * j));
        acc += t;
        d[j] = n * acc;
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        double term = (d[k] - d[n]) / std::pow(k + 1.0, s);
        sum += (k % 2 == 0) ? term : -term;
    }
    double eta = -sum / d[n];
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

// zeta(1/2 - k) for k >= 0. Covers both half-integer lines appearing in
// the Gaussian-random-walk series: zeta(-1/2 - r) = zeta_half(r + 1).
// Values for k >= 1 come from the functional equation
//   zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
// with the sine and Gamma factors evaluated exactly (the sine is
// +-sqrt(2)/2 with a period-4 sign pattern, Gamma(k + 1/2) by recurrence).
inline double zeta_half(int k) {
    static const std::array<double, 102> table = [] {
        std::array<double, 102> z{};
        z[0] = zeta_positive(0.5);
        constexpr double half_sqrt2 = 0.70710678118654752440;
        double gamma_k_half = sqrt_pi;  // Gamma(1/2)
        for (int k = 1; k < static_cast<int>(z.size()); ++k) {
            gamma_k_half *= k - 0.5;  // now Gamma(k + 1/2)
            const double s = 0.5 - k;
            const int m = k % 4;
            const double sine = (m == 1 || m == 2) ? -half_sqrt2 : half_sqrt2;
            z[k] = std::ldexp(sqrt_two, -k)  // 2^s
                   * std::pow(pi, s - 1.0) * sine * gamma_k_half *
                   zeta_positive(k + 0.5);
        }
        return z;
    }();
    if (k < 0 || k >= static_cast<int>(table.size()))
        throw std::domain_error("zeta_half: index out of range 0..101");
    return table[k];
}

// Generic real-argument zeta, s != 1.
inline double riemann_zeta(double s) {
    if (s == 1.0) throw std::domain_error("riemann_zeta: pole at s = 1");
    if (s == 0.0) return -0.5;
    if (s > 0.0) return zeta_positive(s);
    return std::pow(2.0, s) * std::pow(pi, s - 1.0) * std::sin(pi * s / 2.0) *
           std::tgamma(1.0 - s) * zeta_positive(1.0 - s);
}

}  // namespace fctl
