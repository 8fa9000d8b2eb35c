#pragma once

#include <string>
#include <vector>

#include "fctl/allocation.hpp"
#include "fctl/delay.hpp"
#include "fctl/exact.hpp"
#include "fctl/gauss_rw.hpp"
#include "fctl/heavy_traffic.hpp"
#include "fctl/table.hpp"
#include "fctl/transform.hpp"

namespace fctl {

// Built-in example intersections used by the reproduction tables: a two-lane
// crossing (Poisson 0.4 + geometric 0.4) and a four-lane intersection
// (geometric 0.3, Poisson 0.3, two negative binomial 0.1/0.4 lanes), both
// with 5 slots of lost time per cycle.
inline IntersectionSpec two_lane_example(double cycle) {
    IntersectionSpec s;
    s.lanes.emplace_back(ArrivalModel::poisson(0.4));
    s.lanes.emplace_back(ArrivalModel::geometric(0.4));
    s.cycle = cycle;
    s.lost_time = 5.0;
    return s;
}

inline IntersectionSpec four_lane_example(double cycle, bool increasing_weights) {
    IntersectionSpec s;
    s.lanes.emplace_back(ArrivalModel::geometric(0.3), increasing_weights ? 1.0 : 1.0);
    s.lanes.emplace_back(ArrivalModel::poisson(0.3), increasing_weights ? 2.0 : 1.0);
    s.lanes.emplace_back(ArrivalModel::negative_binomial(0.1, 0.4),
                         increasing_weights ? 3.0 : 1.0);
    s.lanes.emplace_back(ArrivalModel::negative_binomial(0.1, 0.4),
                         increasing_weights ? 4.0 : 1.0);
    s.cycle = cycle;
    s.lost_time = 5.0;
    return s;
}

inline const std::vector<double>& example_cycles() {
    static const std::vector<double> c{30.0, 50.0, 100.0, 200.0, 500.0};
    return c;
}

namespace detail {

// Exact mean overflow at a (possibly fractional) green time, randomized per
// the mean-matching mixture. Lanes with identical arrivals and greens show up
// repeatedly in the four-lane tables; a tiny cache avoids recomputation.
class ExactMeanCache {
  public:
    double operator()(const ArrivalModel& m, double green, double cycle) {
        char key[120];
        std::snprintf(key, sizeof key, "%d|%.12g|%.12g|%.12g|%.12g",
                      static_cast<int>(m.kind()), m.mean(), m.variance(), green,
                      cycle);
        for (const auto& [k, v] : entries_)
            if (k == key) return v;
        const double v = exact_mean_overflow(
            FctlInstance(m, GreenTime::randomized(green), cycle));
        entries_.emplace_back(key, v);
        return v;
    }

  private:
    std::vector<std::pair<std::string, double>> entries_;
};

}  // namespace detail

// Single-queue sweep along the scaling curve: exact transform values against
// the heavy-traffic approximations for g in {10, 20, 30, 50, 100}.
inline Table single_queue_sweep(double beta) {
    const auto model = ArrivalModel::poisson(0.3);
    Table t;
    t.columns = {"g", "c", "p0_exact", "p0_approx", "ex_exact", "ex_first_order",
                 "ex_refined"};
    for (int g : {10, 20, 30, 50, 100}) {
        const double c = cycle_for_green(beta, g, model);
        FctlInstance inst(model, GreenTime::deterministic(g), c);
        const HeavyTrafficPoint pt{beta, c, static_cast<double>(g)};
        t.push_row({format_value(g), format_value(c),
                    format_value(overflow_pgf(inst, 0.0).real()),
                    format_value(p_empty_approx(beta)),
                    format_value(mean_overflow(inst)),
                    format_value(mean_first_order(pt, model)),
                    format_value(mean_refined(pt, model))});
    }
    return t;
}

// Two-lane dimensioning rules (equal-beta and refined) across cycle lengths.
inline Table two_lane_rules_table() {
    Table t;
    t.columns = {"c",  "g1", "beta1", "g2", "beta2",
                 "g1_refined", "beta1_refined", "g2_refined", "beta2_refined"};
    for (double c : example_cycles()) {
        const auto spec = two_lane_example(c);
        const auto fo = first_order_allocation(spec);
        const auto rf = refined_allocation(spec);
        t.push_row({format_value(c), format_value(fo.greens[0]),
                    format_value(fo.betas[0]), format_value(fo.greens[1]),
                    format_value(fo.betas[1]), format_value(rf.greens[0]),
                    format_value(rf.betas[0]), format_value(rf.greens[1]),
                    format_value(rf.betas[1])});
    }
    return t;
}

// Two-lane mean overflow: exact (randomized greens) under both rules, next to
// the approximation that produced each rule.
inline Table two_lane_overflow_table() {
    Table t;
    t.columns = {"c", "lane", "ex_equal_rule", "approx_first_order",
                 "ex_refined_rule", "approx_refined"};
    detail::ExactMeanCache exact;
    for (double c : example_cycles()) {
        const auto spec = two_lane_example(c);
        const auto fo = first_order_allocation(spec);
        const auto rf = refined_allocation(spec);
        for (std::size_t lane = 0; lane < spec.lanes.size(); ++lane) {
            const ArrivalModel& m = spec.lanes[lane].arrival;
            t.push_row(
                {format_value(c), format_value(static_cast<double>(lane + 1)),
                 format_value(exact(m, fo.greens[lane], c)),
                 format_value(mean_first_order({fo.betas[lane], c, fo.greens[lane]}, m)),
                 format_value(exact(m, rf.greens[lane], c)),
                 format_value(mean_refined({rf.betas[lane], c, rf.greens[lane]}, m))});
        }
    }
    return t;
}

// Four-lane weighted-numerical allocation (equal or increasing weights).
inline Table four_lane_allocation_table(bool increasing_weights) {
    Table t;
    t.columns = {"c",     "g1",    "g2",    "g3",    "g4",
                 "beta1", "beta2", "beta3", "beta4"};
    for (double c : example_cycles()) {
        const auto r = weighted_numerical(four_lane_example(c, increasing_weights));
        t.push_row({format_value(c), format_value(r.greens[0]),
                    format_value(r.greens[1]), format_value(r.greens[2]),
                    format_value(r.greens[3]), format_value(r.betas[0]),
                    format_value(r.betas[1]), format_value(r.betas[2]),
                    format_value(r.betas[3])});
    }
    return t;
}

// Four-lane mean overflow, exact and refined approximation, both weight
// choices.
inline Table four_lane_overflow_table() {
    Table t;
    t.columns = {"weights", "c", "lane", "ex_exact", "ex_refined_approx"};
    detail::ExactMeanCache exact;
    for (bool increasing : {false, true}) {
        for (double c : example_cycles()) {
            const auto spec = four_lane_example(c, increasing);
            const auto r = weighted_numerical(spec);
            for (std::size_t lane = 0; lane < spec.lanes.size(); ++lane) {
                const ArrivalModel& m = spec.lanes[lane].arrival;
                t.push_row({increasing ? "increasing" : "equal", format_value(c),
                            format_value(static_cast<double>(lane + 1)),
                            format_value(exact(m, r.greens[lane], c)),
                            format_value(mean_refined(
                                {r.betas[lane], c, r.greens[lane]}, m))});
            }
        }
    }
    return t;
}

// Webster's proportional green split for the four-lane example.
inline Table webster_allocation_table() {
    Table t;
    t.columns = {"c", "g1", "g2", "g3", "g4", "rho"};
    for (double c : example_cycles()) {
        const auto spec = four_lane_example(c, false);
        const auto w = webster_allocation(spec);
        const double rho = spec.lanes[0].arrival.mean() * c / w.greens[0];
        t.push_row({format_value(c), format_value(w.greens[0]),
                    format_value(w.greens[1]), format_value(w.greens[2]),
                    format_value(w.greens[3]), format_value(rho)});
    }
    return t;
}

// Mean delays for the four-lane example under the weighted-numerical rule
// and under Webster's split. Exact delays come from exact mean overflow at
// randomized greens; the approximation column uses the refined mean for the
// rule block and Webster's delay formula for the Webster block.
inline Table delay_comparison_table(WebsterForm form = WebsterForm::classical) {
    Table t;
    t.columns = {"rule", "c",        "d1_exact", "d1_approx", "d2_exact",
                 "d2_approx", "d34_exact", "d34_approx", "aggregate"};
    detail::ExactMeanCache exact;
    for (double c : example_cycles()) {
        const auto spec = four_lane_example(c, false);
        const auto r = weighted_numerical(spec);
        std::vector<double> means(4), approx_means(4);
        for (int i = 0; i < 4; ++i) {
            means[i] = exact(spec.lanes[i].arrival, r.greens[i], c);
            approx_means[i] = mean_refined({r.betas[i], c, r.greens[i]},
                                           spec.lanes[i].arrival);
        }
        const auto rep = intersection_delay(spec, r.greens, means);
        const auto rep_approx = intersection_delay(spec, r.greens, approx_means);
        t.push_row({"allocation", format_value(c), format_value(rep.per_lane[0]),
                    format_value(rep_approx.per_lane[0]),
                    format_value(rep.per_lane[1]),
                    format_value(rep_approx.per_lane[1]),
                    format_value(rep.per_lane[2]),
                    format_value(rep_approx.per_lane[2]),
                    format_value(rep.aggregate)});
    }
    for (double c : example_cycles()) {
        const auto spec = four_lane_example(c, false);
        const auto w = webster_allocation(spec);
        std::vector<double> means(4);
        for (int i = 0; i < 4; ++i)
            means[i] = exact(spec.lanes[i].arrival, w.greens[i], c);
        const auto rep = intersection_delay(spec, w.greens, means);
        t.push_row(
            {"webster", format_value(c), format_value(rep.per_lane[0]),
             format_value(webster_delay(spec.lanes[0].arrival.mean(), c, w.greens[0], form)),
             format_value(rep.per_lane[1]),
             format_value(webster_delay(spec.lanes[1].arrival.mean(), c, w.greens[1], form)),
             format_value(rep.per_lane[2]),
             format_value(webster_delay(spec.lanes[2].arrival.mean(), c, w.greens[2], form)),
             format_value(rep.aggregate)});
    }
    return t;
}

// Numbered reproduction entry point used by the CLI.
inline Table reproduce_table(int id, WebsterForm form = WebsterForm::classical) {
    switch (id) {
        case 1: return single_queue_sweep(0.1);
        case 2: return single_queue_sweep(1.0);
        case 3: return two_lane_rules_table();
        case 4: return two_lane_overflow_table();
        case 5: return four_lane_allocation_table(false);
        case 6: return four_lane_allocation_table(true);
        case 7: return four_lane_overflow_table();
        case 8: return webster_allocation_table();
        case 9: return delay_comparison_table(form);
    }
    throw config_error("reproduce: table id must be in 1..9");
}

}  // namespace fctl
