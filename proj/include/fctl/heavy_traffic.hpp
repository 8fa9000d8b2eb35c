#pragma once

#include <cmath>

#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/gauss_rw.hpp"
#include "fctl/special.hpp"

namespace fctl {

// A lane placed on the square-root scaling curve g = mu c + beta sigma sqrt(c).
struct HeavyTrafficPoint {
    double beta;
    double cycle;
    double green;  // mu c + beta sigma sqrt(c), real-valued
};

inline HeavyTrafficPoint scaling(double beta, double cycle,
                                 const ArrivalModel& m) {
    if (!(beta > 0.0)) throw std::domain_error("scaling: beta must be > 0");
    if (!(cycle > 0.0)) throw std::domain_error("scaling: cycle must be > 0");
    const double g = m.mean() * cycle + beta * m.sigma() * std::sqrt(cycle);
    if (g >= cycle)
        throw infeasible_error("scaling: green period would exceed the cycle");
    return {beta, cycle, g};
}

inline double inverse_scaling(double green, double cycle, const ArrivalModel& m) {
    if (!(cycle > 0.0))
        throw std::domain_error("inverse_scaling: cycle must be > 0");
    const double slack = green - m.mean() * cycle;
    if (!(slack > 0.0))
        throw infeasible_error("inverse_scaling: no positive beta (g <= mu c)");
    return slack / (m.sigma() * std::sqrt(cycle));
}

// Cycle length that puts (beta, g) on the scaling curve: quadratic in sqrt(c).
inline double cycle_for_green(double beta, double green, const ArrivalModel& m) {
    if (!(beta > 0.0) || !(green > 0.0))
        throw std::domain_error("cycle_for_green: beta and green must be > 0");
    const double s = beta * m.sigma();
    const double root =
        (-s + std::sqrt(s * s + 4.0 * m.mean() * green)) / (2.0 * m.mean());
    return root * root;
}

inline HeavyTrafficPoint point_from_green(double green, double cycle,
                                          const ArrivalModel& m) {
    return {inverse_scaling(green, cycle, m), cycle, green};
}

// Constants of the refined mean approximation: a from the third moment, the
// theta weight of the G1 correction, and the shifted argument b(beta).
struct RefinedParams {
    double a;
    double theta;
    double b_beta;
};

inline RefinedParams refined_params(const ArrivalModel& m, double beta,
                                    double cycle) {
    const double mu = m.mean();
    const double s2 = m.variance();
    const double a = (m.third_moment() - mu * mu * mu - 3.0 * (1.0 + mu) * s2) / mu;
    const double r = mu / s2;
    const double theta = s2 / (mu * sqrt_two) * (r + r * r * a / 3.0 - 1.0);
    const double b =
        beta / sqrt_two / std::sqrt(1.0 + beta * m.sigma() / (mu * std::sqrt(cycle)));
    return {a, theta, b};
}

// First-order approximation (error O(1)):
//   E[X_g] ~ (sqrt(2)/pi) sigma sqrt(c) G0(beta/sqrt(2)).
inline double mean_first_order(const HeavyTrafficPoint& p, const ArrivalModel& m) {
    if (!(p.beta > 0.0)) throw std::domain_error("mean_first_order: beta must be > 0");
    return sqrt_two / pi * m.sigma() * std::sqrt(p.cycle) *
           g_kernel(GOrder::g0, p.beta / sqrt_two);
}

// Refined approximation (error O(1/sqrt(c))):
//   E[X_g] ~ (sqrt(2)/pi) (sigma sqrt(c) + beta sigma^2/(2 mu)) G0(b(beta))
//            + (theta beta / pi) G1(beta/sqrt(2)).
inline double mean_refined(const HeavyTrafficPoint& p, const ArrivalModel& m) {
    if (!(p.beta > 0.0)) throw std::domain_error("mean_refined: beta must be > 0");
    const RefinedParams rp = refined_params(m, p.beta, p.cycle);
    return sqrt_two / pi *
               (m.sigma() * std::sqrt(p.cycle) +
                p.beta * m.variance() / (2.0 * m.mean())) *
               g_kernel(GOrder::g0, rp.b_beta) +
           rp.theta * p.beta / pi * g_kernel(GOrder::g1, p.beta / sqrt_two);
}

// P(X_g = 0) ~ P(M_beta = 0); the zeta series switches to the integral
// representation automatically outside its validity range.
inline double p_empty_approx(double beta) { return prob_zero_max(beta); }

}  // namespace fctl
