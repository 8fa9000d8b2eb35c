#pragma once

#include <cmath>
#include <complex>

#include "fctl/errors.hpp"
#include "fctl/quadrature.hpp"
#include "fctl/special.hpp"

namespace fctl {

// One-dimensional integrals over the Gaussian-like kernel
//   E(b, t) = exp(-b^2 - t^2) / (1 - exp(-b^2 - t^2))
// that parameterize heavy-traffic moments of the overflow queue:
//   G0(b) = int_0^inf t^2/(b^2+t^2)   E dt
//   G1(b) = int_0^inf                 E dt
//   G2(b) = int_0^inf b^2/(b^2+t^2)   E dt
//   G3(b) = int_0^inf t^2/(b^2+t^2)^2 E dt
//   G4(b) = int_0^inf t^2/(b^2+t^2)   E/(1-exp(-b^2-t^2)) dt
// plus the derivatives G0', G0'', G1' needed by the dimensioning rules.
enum class GOrder { g0, g1, g2, g3, g4, g0_prime, g0_second, g1_prime };

enum class GMethod { automatic, quadrature, series };

namespace detail {

template <class Term>
double g_series_sum(Term term, long max_terms = 6000000) {
    double sum = 0.0;
    for (long k = 1; k <= max_terms; ++k) {
        const double t = term(k);
        sum += t;
        if (k >= 8 && std::abs(t) < 1e-16 * std::max(1e-300, std::abs(sum)))
            return sum;
    }
    throw numeric_error("g_kernel: series did not converge");
}

// Termwise integration of the geometric expansion of E(b, t); the erfc terms
// arise from int_0^inf exp(-k t^2)/(b^2+t^2) dt = pi/(2b) e^{k b^2} erfc(b sqrt(k)).
inline double g_series(GOrder order, double b) {
    const double b2 = b * b;
    switch (order) {
        case GOrder::g1:
            return g_series_sum([&](long k) {
                return 0.5 * sqrt_pi * std::exp(-k * b2) / std::sqrt((double)k);
            });
        case GOrder::g2:
            return g_series_sum([&](long k) {
                return 0.5 * pi * b * std::erfc(b * std::sqrt((double)k));
            });
        case GOrder::g0:
            return g_series(GOrder::g1, b) - g_series(GOrder::g2, b);
        case GOrder::g0_prime:
            return g_series_sum([&](long k) {
                return -0.5 * pi * std::erfc(b * std::sqrt((double)k));
            });
        case GOrder::g0_second:
            return g_series_sum([&](long k) {
                return sqrt_pi * std::sqrt((double)k) * std::exp(-k * b2);
            });
        case GOrder::g1_prime:
            return -b * g_series(GOrder::g0_second, b);
        case GOrder::g3:
            return g_series_sum([&](long k) {
                const double sk = std::sqrt((double)k);
                return (0.25 * pi / b + 0.5 * pi * k * b) * std::erfc(b * sk) -
                       0.5 * sqrt_pi * sk * std::exp(-k * b2);
            });
        case GOrder::g4:
            return g_series_sum([&](long k) {
                const double sk = std::sqrt((double)k);
                return 0.5 * sqrt_pi * sk * std::exp(-k * b2) -
                       0.5 * pi * b * k * std::erfc(b * sk);
            });
    }
    return 0.0;
}

inline double g_quadrature(GOrder order, double b) {
    const double b2 = b * b;
    const double t_max = std::sqrt(745.0 + b2);  // integrand tail underflows past here
    // relative-only tolerance: the integrals shrink like exp(-b^2)
    constexpr double abs_tol = 1e-305, rel_tol = 1e-13;
    auto quad = [&](auto f) {
        return integrate_adaptive(f, 0.0, t_max, abs_tol, rel_tol);
    };
    auto kernel = [&](double t) { return std::exp(-b2 - t * t); };
    switch (order) {
        case GOrder::g0:
            return quad([&](double t) {
                const double e = kernel(t);
                return t * t / (b2 + t * t) * e / (1.0 - e);
            });
        case GOrder::g1:
            return quad([&](double t) {
                const double e = kernel(t);
                return e / (1.0 - e);
            });
        case GOrder::g2:
            return quad([&](double t) {
                const double e = kernel(t);
                return b2 / (b2 + t * t) * e / (1.0 - e);
            });
        case GOrder::g3:
            return quad([&](double t) {
                const double e = kernel(t);
                const double d = b2 + t * t;
                return t * t / (d * d) * e / (1.0 - e);
            });
        case GOrder::g4:
            return quad([&](double t) {
                const double e = kernel(t);
                const double u = 1.0 - e;
                return t * t / (b2 + t * t) * e / (u * u);
            });
        // Exact reductions to defining integrals:
        //   G0'(b)  = -G2(b)/b
        //   G0''(b) = 2 int_0^inf E/(1-E)^2 dt
        //   G1'(b)  = -b G0''(b)
        case GOrder::g0_prime:
            return -g_quadrature(GOrder::g2, b) / b;
        case GOrder::g0_second:
            return 2.0 * quad([&](double t) {
                const double e = kernel(t);
                const double u = 1.0 - e;
                return e / (u * u);
            });
        case GOrder::g1_prime:
            return -b * g_quadrature(GOrder::g0_second, b);
    }
    return 0.0;
}

}  // namespace detail

// b is capped below at 1e-3: smaller arguments signal a mis-scaled
// allocation upstream.
inline double g_kernel(GOrder order, double b, GMethod method = GMethod::automatic) {
    if (!(b > 0.0)) throw std::domain_error("g_kernel: b must be > 0");
    if (b < 1e-3) throw std::domain_error("g_kernel: b below 1e-3 domain cap");
    switch (method) {
        case GMethod::quadrature:
            return detail::g_quadrature(order, b);
        case GMethod::series:
            return detail::g_series(order, b);
        case GMethod::automatic:
            // The series needs ~35/b^2 terms; below b = 0.02 quadrature wins.
            return b >= 0.02 ? detail::g_series(order, b)
                             : detail::g_quadrature(order, b);
    }
    return 0.0;
}

// E[M_beta] zeta series, valid for 0 < beta < 2 sqrt(pi):
//   1/(2 beta) + zeta(1/2)/sqrt(2 pi) + beta/4
//   + beta^2/sqrt(2 pi) sum_r zeta(-1/2-r)/(r! (2r+1)(2r+2)) (-beta^2/2)^r.
inline double mean_max_series(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("mean_max: beta must be > 0");
    if (beta >= two_sqrt_pi)
        throw std::domain_error(
            "mean_max_series: series valid for 0 < beta < 2*sqrt(pi)");
    const double x = -0.5 * beta * beta;
    double sum = 0.0, pw = 1.0, rfact = 1.0;
    bool converged = false;
    for (int r = 0; r <= 100; ++r) {
        if (r > 0) rfact *= r;
        const double term =
            zeta_half(r + 1) / (rfact * (2.0 * r + 1.0) * (2.0 * r + 2.0)) * pw;
        sum += term;
        if (r >= 8 && std::abs(term) < 1e-17 * (1.0 + std::abs(sum))) {
            converged = true;
            break;
        }
        pw *= x;
    }
    if (!converged)
        throw numeric_error("mean_max_series: zeta series did not converge");
    return 1.0 / (2.0 * beta) + zeta_half(0) / sqrt_two_pi + 0.25 * beta +
           beta * beta / sqrt_two_pi * sum;
}

// E[M_beta]; the zeta series where it converges comfortably, otherwise the
// exact G0 representation E[M_beta] = (sqrt(2)/pi) G0(beta/sqrt(2)).
inline double mean_max(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("mean_max: beta must be > 0");
    if (beta < 2.9) return mean_max_series(beta);
    return sqrt_two / pi * g_kernel(GOrder::g0, beta / sqrt_two);
}

// P(M_beta = 0) zeta series, same validity range.
inline double prob_zero_max_series(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("prob_zero_max: beta must be > 0");
    if (beta >= two_sqrt_pi)
        throw std::domain_error(
            "prob_zero_max_series: series valid for 0 < beta < 2*sqrt(pi); "
            "use the integral form");
    const double x = -0.5 * beta * beta;
    double sum = 0.0, pw = 1.0, rfact = 1.0;
    bool converged = false;
    for (int r = 0; r <= 100; ++r) {
        if (r > 0) rfact *= r;
        const double term = zeta_half(r) / (rfact * (2.0 * r + 1.0)) * pw;
        sum += term;
        if (r >= 8 && std::abs(term) < 1e-17 * (1.0 + std::abs(sum))) {
            converged = true;
            break;
        }
        pw *= x;
    }
    if (!converged)
        throw numeric_error("prob_zero_max_series: zeta series did not converge");
    return sqrt_two * beta * std::exp(beta / sqrt_two_pi * sum);
}

// P(M_beta = 0) from the real-line integral obtained by letting t -> -inf in
// the MGF contour representation; only the even part of 1/(beta + iv)
// survives.
inline double prob_zero_max_integral(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("prob_zero_max: beta must be > 0");
    const double v_max = std::sqrt(std::max(0.0, 1490.0 - beta * beta));
    const double integral = integrate_adaptive(
        [&](double v) {
            return beta / (beta * beta + v * v) *
                   std::log(1.0 - std::exp(-0.5 * beta * beta - 0.5 * v * v));
        },
        0.0, v_max);
    return std::exp(integral / pi);
}

inline double prob_zero_max(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("prob_zero_max: beta must be > 0");
    if (beta < 2.9) return prob_zero_max_series(beta);
    return prob_zero_max_integral(beta);
}

// MGF of M_beta along the vertical curve u = beta + iv, valid for Re(t) < beta.
inline cplx mgf_max(double beta, cplx t) {
    if (!(beta > 0.0)) throw std::domain_error("mgf_max: beta must be > 0");
    if (t.real() >= beta)
        throw std::domain_error("mgf_max: requires Re(t) < beta");
    if (t == cplx(0.0)) return 1.0;
    const double v_max = std::sqrt(std::max(0.0, 1490.0 - beta * beta));
    const cplx integral = integrate_adaptive(
        [&](double v) {
            const cplx u(beta, v);
            return t / (u * (t - u)) *
                   std::log(1.0 - std::exp(-0.5 * beta * beta - 0.5 * v * v));
        },
        -v_max, v_max);
    return std::exp(integral / (2.0 * pi));
}

}  // namespace fctl
