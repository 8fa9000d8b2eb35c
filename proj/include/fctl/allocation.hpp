#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/gauss_rw.hpp"
#include "fctl/heavy_traffic.hpp"
#include "fctl/instance.hpp"
#include "fctl/transform.hpp"

namespace fctl {

struct LaneSpec {
    ArrivalModel arrival;
    double weight = 1.0;  // d_i > 0

    LaneSpec(ArrivalModel a, double d = 1.0) : arrival(std::move(a)), weight(d) {
        if (!(weight > 0.0))
            throw std::domain_error("lane weight must be > 0");
    }
};

// An intersection with one FCTL queue per lane sharing a cycle of length c;
// r_T slots of the cycle cannot be used as green time.
struct IntersectionSpec {
    std::vector<LaneSpec> lanes;
    double cycle = 0.0;
    double lost_time = 0.0;

    double total_rate() const {
        double mu_t = 0.0;
        for (const auto& l : lanes) mu_t += l.arrival.mean();
        return mu_t;
    }

    // c (1 - mu_T) - r_T, the green-time budget in the beta constraint.
    double slack() const { return cycle * (1.0 - total_rate()) - lost_time; }

    void validate() const {
        if (lanes.empty()) throw std::domain_error("intersection: no lanes");
        if (!(cycle > 0.0)) throw std::domain_error("intersection: cycle must be > 0");
        if (lost_time < 0.0)
            throw std::domain_error("intersection: lost time must be >= 0");
        if (!(slack() > 0.0)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "intersection infeasible: c(1 - mu_T) - r_T = %.6g <= 0 "
                          "(mu_T = %.6g, r_T = %.6g)",
                          slack(), total_rate(), lost_time);
            throw infeasible_error(buf);
        }
    }
};

enum class AllocationMethod {
    first_order,         // equal beta_i = beta_* (sum-of-overflows, first order)
    refined,             // beta_* + Omega_i correction (refined approximation)
    weighted_closed,     // sqrt(d_i)-proportional closed form
    weighted_numerical,  // Lagrange solve of the weighted G0 objective
    brute_force,
    webster,
};

struct AllocationResult {
    AllocationMethod method{};
    std::vector<double> betas;
    std::vector<double> greens;  // pre-rounding, real-valued
    double objective_estimate = 0.0;
    std::optional<double> lagrange;
    std::vector<int> pinned;  // lanes pinned at the G0' inversion domain bounds
};

// beta_* of the equal-beta rule: (c(1 - mu_T) - r_T) / (sqrt(c) sum sigma_j).
inline double beta_star(const IntersectionSpec& spec) {
    spec.validate();
    double sigma_sum = 0.0;
    for (const auto& l : spec.lanes) sigma_sum += l.arrival.sigma();
    return spec.slack() / (std::sqrt(spec.cycle) * sigma_sum);
}

namespace detail {

inline std::vector<double> greens_from_betas(const IntersectionSpec& spec,
                                             const std::vector<double>& betas) {
    std::vector<double> g(spec.lanes.size());
    const double sq = std::sqrt(spec.cycle);
    for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
        g[i] = spec.lanes[i].arrival.mean() * spec.cycle +
               betas[i] * spec.lanes[i].arrival.sigma() * sq;
        if (g[i] >= spec.cycle - 1e-12) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "allocation: lane %zu green %.6g reaches the cycle length",
                          i, g[i]);
            throw infeasible_error(buf);
        }
    }
    return g;
}

inline double first_order_objective(const IntersectionSpec& spec,
                                    const std::vector<double>& betas,
                                    bool weighted) {
    double obj = 0.0;
    for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
        const double w = weighted ? spec.lanes[i].weight : 1.0;
        obj += w * spec.lanes[i].arrival.sigma() / pi *
               std::sqrt(2.0 * spec.cycle) *
               g_kernel(GOrder::g0, betas[i] / sqrt_two);
    }
    return obj;
}

}  // namespace detail

inline AllocationResult first_order_allocation(const IntersectionSpec& spec) {
    const double bs = beta_star(spec);
    AllocationResult out;
    out.method = AllocationMethod::first_order;
    out.betas.assign(spec.lanes.size(), bs);
    out.greens = detail::greens_from_betas(spec, out.betas);
    out.objective_estimate = detail::first_order_objective(spec, out.betas, false);
    return out;
}

// Refined rule: beta_i = beta_* + Omega_i(beta_*) with
//   Omega_i = sqrt(2/c) / G0''(beta_*/sqrt(2)) (sum K_j / sum sigma_j - K_i/sigma_i)
// and K_i built from G0, G0', G0'', G1, G1' at beta_*/sqrt(2).
inline AllocationResult refined_allocation(const IntersectionSpec& spec) {
    const double bs = beta_star(spec);
    const double b = bs / sqrt_two;
    const double g0 = g_kernel(GOrder::g0, b);
    const double g0p = g_kernel(GOrder::g0_prime, b);
    const double g0pp = g_kernel(GOrder::g0_second, b);
    const double g1 = g_kernel(GOrder::g1, b);
    const double g1p = g_kernel(GOrder::g1_prime, b);

    const std::size_t n = spec.lanes.size();
    std::vector<double> k(n);
    double k_sum = 0.0, sigma_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const ArrivalModel& m = spec.lanes[i].arrival;
        const double s2_over_mu = m.variance() / m.mean();
        const double theta = refined_params(m, bs, spec.cycle).theta;
        k[i] = s2_over_mu / sqrt_two * g0 - bs * s2_over_mu / 2.0 * g0p -
               bs * bs * s2_over_mu / (2.0 * sqrt_two) * g0pp + theta * g1 +
               theta * bs / sqrt_two * g1p;
        k_sum += k[i];
        sigma_sum += m.sigma();
    }

    AllocationResult out;
    out.method = AllocationMethod::refined;
    out.betas.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double omega = std::sqrt(2.0 / spec.cycle) / g0pp *
                             (k_sum / sigma_sum - k[i] / spec.lanes[i].arrival.sigma());
        out.betas[i] = bs + omega;
    }
    out.greens = detail::greens_from_betas(spec, out.betas);

    // the corrections cancel in the budget by construction; re-verify
    double budget = 0.0;
    const double sq = std::sqrt(spec.cycle);
    for (std::size_t i = 0; i < n; ++i)
        budget += out.betas[i] * spec.lanes[i].arrival.sigma() * sq;
    if (std::abs(budget - spec.slack()) > 1e-9 * std::max(1.0, spec.slack()))
        throw numeric_error("refined_allocation: budget constraint violated");

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        obj += mean_refined({out.betas[i], spec.cycle, out.greens[i]},
                            spec.lanes[i].arrival);
    out.objective_estimate = obj;
    return out;
}

// Weighted closed form: beta_i = sqrt(d_i) (c(1-mu_T) - r_T) / (sqrt(c) sum sqrt(d_j) sigma_j).
inline AllocationResult weighted_closed_form(const IntersectionSpec& spec) {
    spec.validate();
    double denom = 0.0;
    for (const auto& l : spec.lanes)
        denom += std::sqrt(l.weight) * l.arrival.sigma();
    AllocationResult out;
    out.method = AllocationMethod::weighted_closed;
    out.betas.resize(spec.lanes.size());
    for (std::size_t i = 0; i < spec.lanes.size(); ++i)
        out.betas[i] =
            std::sqrt(spec.lanes[i].weight) * spec.slack() /
            (std::sqrt(spec.cycle) * denom);
    out.greens = detail::greens_from_betas(spec, out.betas);
    out.objective_estimate = detail::first_order_objective(spec, out.betas, true);
    return out;
}

namespace detail {

// Inverse of the strictly increasing G0' on the clipped domain [1e-3, 20].
// Returns the argument b with G0'(b) = target (target < 0); pinned is set
// when the target falls outside the reachable range.
inline double invert_g0_prime(double target, bool& pinned) {
    constexpr double b_lo = 1e-3, b_hi = 20.0;
    static const double v_lo = g_kernel(GOrder::g0_prime, b_lo);
    static const double v_hi = g_kernel(GOrder::g0_prime, b_hi);
    pinned = false;
    if (target <= v_lo) {
        pinned = true;
        return b_lo;
    }
    if (target >= v_hi) {
        pinned = true;
        return b_hi;
    }
    double lo = b_lo, hi = b_hi;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g_kernel(GOrder::g0_prime, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Weighted numerical rule: stationarity G0'(beta_i/sqrt(2)) = pi lambda/(d_i sqrt(c))
// for a single lambda < 0, solved by inverting G0' per lane and bisecting
// lambda on the green-time budget.
inline AllocationResult weighted_numerical(const IntersectionSpec& spec) {
    spec.validate();
    const std::size_t n = spec.lanes.size();
    const double sqc = std::sqrt(spec.cycle);
    const double slack = spec.slack();

    auto betas_for = [&](double lambda, std::vector<int>* pinned_out) {
        std::vector<double> betas(n);
        for (std::size_t i = 0; i < n; ++i) {
            bool pinned = false;
            const double target = pi * lambda / (spec.lanes[i].weight * sqc);
            betas[i] = sqrt_two * detail::invert_g0_prime(target, pinned);
            if (pinned && pinned_out) pinned_out->push_back(static_cast<int>(i));
        }
        return betas;
    };
    auto residual = [&](double lambda) {
        const std::vector<double> betas = betas_for(lambda, nullptr);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += betas[i] * spec.lanes[i].arrival.sigma() * sqc;
        return acc - slack;
    };

    double lo = -1e6, hi = -1e-12;
    if (residual(lo) > 0.0 || residual(hi) < 0.0)
        throw numeric_error(
            "weighted_numerical: no lambda bracket in [-1e6, -1e-12]");
    double lambda = hi;
    bool matched = false;
    for (int it = 0; it < 300; ++it) {
        lambda = -std::sqrt(lo * hi);  // geometric mid: lambda spans decades
        const double r = residual(lambda);
        if (std::abs(r) < 1e-10) {
            matched = true;
            break;
        }
        (r < 0.0 ? lo : hi) = lambda;
    }
    if (!matched)
        throw numeric_error("weighted_numerical: budget residual did not settle");

    AllocationResult out;
    out.method = AllocationMethod::weighted_numerical;
    out.betas = betas_for(lambda, &out.pinned);
    out.lagrange = lambda;
    out.greens = detail::greens_from_betas(spec, out.betas);
    out.objective_estimate = detail::first_order_objective(spec, out.betas, true);
    return out;
}

enum class RoundingPolicy { floor, nearest, randomized };

// Integer or randomized green times from a real-valued allocation. Floor and
// nearest re-check per-lane stability and the total budget.
inline std::vector<GreenTime> round_greens(const IntersectionSpec& spec,
                                           const std::vector<double>& greens,
                                           RoundingPolicy policy) {
    if (greens.size() != spec.lanes.size())
        throw std::domain_error("round_greens: lane/green count mismatch");
    std::vector<GreenTime> out;
    out.reserve(greens.size());
    std::string offenders;
    double total = 0.0;
    for (std::size_t i = 0; i < greens.size(); ++i) {
        GreenTime gt = GreenTime::deterministic(1);
        switch (policy) {
            case RoundingPolicy::randomized:
                gt = GreenTime::randomized(greens[i]);
                break;
            case RoundingPolicy::floor:
                gt = GreenTime::deterministic(
                    std::max(1, static_cast<int>(std::floor(greens[i]))));
                break;
            case RoundingPolicy::nearest:
                gt = GreenTime::deterministic(
                    std::max(1, static_cast<int>(std::llround(greens[i]))));
                break;
        }
        total += gt.mean();
        const double rho = spec.lanes[i].arrival.mean() * spec.cycle / gt.mean();
        if (policy != RoundingPolicy::randomized && rho >= 1.0)
            offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
        out.push_back(gt);
    }
    if (!offenders.empty())
        throw infeasible_error("round_greens: rounding breaks stability of lane(s) " +
                               offenders);
    if (total > spec.cycle - spec.lost_time + 1e-9)
        throw infeasible_error("round_greens: rounded greens exceed c - r_T");
    return out;
}

enum class AllocationObjective { sum_mean_overflow, weighted_sum_mean_overflow };

// Exhaustive integer search, exact objective via the transform. Guarded to
// n <= 5 lanes and c - r_T <= 600; ties break to the lexicographically
// smallest green vector.
inline AllocationResult brute_force_integer(const IntersectionSpec& spec,
                                            AllocationObjective objective) {
    spec.validate();
    const std::size_t n = spec.lanes.size();
    if (n > 5)
        throw numeric_error(
            "brute_force_integer: more than 5 lanes; use the analytic rules");
    const double budget_real = spec.cycle - spec.lost_time;
    if (budget_real > 600.0 + 1e-9)
        throw numeric_error(
            "brute_force_integer: c - r_T above 600; use the analytic rules");
    if (std::abs(budget_real - std::llround(budget_real)) > 1e-9)
        throw std::domain_error(
            "brute_force_integer: c - r_T must be an integer slot count");
    const int budget = static_cast<int>(std::llround(budget_real));

    // integer green domains: g_i >= ceil(mu_i c) + 1
    std::vector<int> g_min(n);
    int g_min_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        g_min[i] = static_cast<int>(std::ceil(spec.lanes[i].arrival.mean() *
                                              spec.cycle)) + 1;
        g_min_total += g_min[i];
    }
    if (g_min_total > budget)
        throw infeasible_error("brute_force_integer: no stable integer allocation");

    // per-lane objective tables over the feasible green range
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cost(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int hi = budget - (g_min_total - g_min[i]);
        cost[i].assign(hi + 1, inf);
        const double w =
            objective == AllocationObjective::weighted_sum_mean_overflow
                ? spec.lanes[i].weight
                : 1.0;
        for (int g = g_min[i]; g <= hi; ++g)
            cost[i][g] = w * mean_overflow(FctlInstance(
                                 spec.lanes[i].arrival,
                                 GreenTime::deterministic(g), spec.cycle));
    }

    // suffix DP over the remaining budget, then lexicographic reconstruction
    std::vector<std::vector<double>> best(n + 1,
                                          std::vector<double>(budget + 1, inf));
    best[n][0] = 0.0;
    std::vector<int> suffix_min(n + 1, 0);
    for (std::size_t i = n; i-- > 0;)
        suffix_min[i] = suffix_min[i + 1] + g_min[i];
    for (std::size_t i = n; i-- > 0;) {
        for (int b = suffix_min[i]; b <= budget; ++b) {
            const int hi = std::min<int>(static_cast<int>(cost[i].size()) - 1,
                                         b - suffix_min[i + 1]);
            double acc = inf;
            for (int g = g_min[i]; g <= hi; ++g) {
                const double v = cost[i][g] + best[i + 1][b - g];
                if (v < acc) acc = v;
            }
            best[i][b] = acc;
        }
    }
    if (!std::isfinite(best[0][budget]))
        throw infeasible_error("brute_force_integer: no stable integer allocation");

    AllocationResult out;
    out.method = AllocationMethod::brute_force;
    out.greens.resize(n);
    out.betas.resize(n);
    int remaining = budget;
    for (std::size_t i = 0; i < n; ++i) {
        const int hi = std::min<int>(static_cast<int>(cost[i].size()) - 1,
                                     remaining - suffix_min[i + 1]);
        for (int g = g_min[i]; g <= hi; ++g) {
            if (cost[i][g] + best[i + 1][remaining - g] == best[i][remaining]) {
                out.greens[i] = g;
                remaining -= g;
                break;
            }
        }
        out.betas[i] = inverse_scaling(out.greens[i], spec.cycle,
                                       spec.lanes[i].arrival);
    }
    out.objective_estimate = best[0][budget];
    return out;
}

}  // namespace fctl
