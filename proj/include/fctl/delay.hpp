#pragma once

#include <cmath>
#include <vector>

#include "fctl/allocation.hpp"
#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/instance.hpp"

namespace fctl {

// Mean delay of an arbitrary vehicle in one lane, in slots, from the mean
// overflow queue:
//   E[D] = (c - g) / (2 c mu (1 - mu)) (sigma^2/(1 - mu) + (c - g) mu + 2 E[X_g]).
// A non-integer g (mean of a randomized green) plugs in directly.
inline double mean_delay(double mu, double sigma2, double cycle, double green,
                         double mean_overflow_value) {
    if (!(mu > 0.0) || mu >= 1.0)
        throw std::domain_error("mean_delay: requires 0 < mu < 1");
    if (!(mu * cycle / green < 1.0))
        throw std::domain_error("mean_delay: requires rho = mu c / g < 1");
    const double red = cycle - green;
    return red / (2.0 * cycle * mu * (1.0 - mu)) *
           (sigma2 / (1.0 - mu) + red * mu + 2.0 * mean_overflow_value);
}

inline double mean_delay(const FctlInstance& inst, double mean_overflow_value) {
    return mean_delay(inst.arrival().mean(), inst.arrival().variance(),
                      inst.cycle(), inst.green().mean(), mean_overflow_value);
}

enum class WebsterForm { classical, printed };

// Webster's mean-delay approximation, in slots, with saturation flow 1 per
// slot. Two algebraic forms are offered:
//
//   classical: (c-g)^2/(2c(1-mu)) + rho^2/(2 mu (1-rho))
//              - 0.65 (c/mu^2)^(1/3) rho^(2+5g/c)
//   printed:   (c-g)^2/(2c(1-rho)) + rho c^2/(2g(g - mu c)) - same third term
//
// The printed variant does not reproduce Webster's own delay numbers (it
// yields 148.7 where 33.571 is expected for mu = 0.3, c = 100, g = 35.625);
// the classical form does, and is the default.
inline double webster_delay(double mu, double cycle, double green,
                            WebsterForm form = WebsterForm::classical) {
    if (!(mu > 0.0) || mu >= 1.0)
        throw std::domain_error("webster_delay: requires 0 < mu < 1");
    const double rho = mu * cycle / green;
    if (!(rho < 1.0))
        throw std::domain_error("webster_delay: requires rho = mu c / g < 1");
    const double red = cycle - green;
    const double third = 0.65 * std::cbrt(cycle / (mu * mu)) *
                         std::pow(rho, 2.0 + 5.0 * green / cycle);
    if (form == WebsterForm::classical)
        return red * red / (2.0 * cycle * (1.0 - mu)) +
               rho * rho / (2.0 * mu * (1.0 - rho)) - third;
    return red * red / (2.0 * cycle * (1.0 - rho)) +
           rho * cycle * cycle / (2.0 * green * (green - mu * cycle)) - third;
}

// Webster's proportional split: g_i = mu_i / sum(mu_j) * (c - r_T).
// Every lane ends up with the same vehicle-to-capacity ratio.
inline AllocationResult webster_allocation(const IntersectionSpec& spec) {
    spec.validate();
    const double mu_t = spec.total_rate();
    AllocationResult out;
    out.method = AllocationMethod::webster;
    out.greens.resize(spec.lanes.size());
    out.betas.resize(spec.lanes.size());
    for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
        const double mu = spec.lanes[i].arrival.mean();
        out.greens[i] = mu / mu_t * (spec.cycle - spec.lost_time);
        out.betas[i] = inverse_scaling(out.greens[i], spec.cycle,
                                       spec.lanes[i].arrival);
    }
    out.objective_estimate = 0.0;
    return out;
}

struct DelayReport {
    std::vector<double> per_lane;  // slots
    double aggregate = 0.0;        // mu-weighted average over lanes
};

inline DelayReport intersection_delay(const IntersectionSpec& spec,
                                      const std::vector<double>& green_means,
                                      const std::vector<double>& mean_overflows) {
    if (green_means.size() != spec.lanes.size() ||
        mean_overflows.size() != spec.lanes.size())
        throw std::domain_error("intersection_delay: per-lane vectors mismatch");
    DelayReport out;
    out.per_lane.resize(spec.lanes.size());
    const double mu_t = spec.total_rate();
    for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
        const ArrivalModel& m = spec.lanes[i].arrival;
        out.per_lane[i] = mean_delay(m.mean(), m.variance(), spec.cycle,
                                     green_means[i], mean_overflows[i]);
        out.aggregate += m.mean() / mu_t * out.per_lane[i];
    }
    return out;
}

}  // namespace fctl
