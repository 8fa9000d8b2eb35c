#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"

namespace fctl {

// Green period of a lane, either a deterministic integer number of slots or
// the floor/ceil mixture of a non-integer target: G = floor w.p. p_floor,
// G = floor + 1 otherwise, with p_floor chosen so E[G] matches the target.
struct GreenTime {
    int floor_slots = 0;
    int ceil_slots = 0;
    double p_floor = 1.0;  // P(G = floor_slots)

    static GreenTime deterministic(int g) {
        if (g <= 0) throw std::domain_error("green time must be a positive integer");
        return {g, g, 1.0};
    }

    // Mean-matching mixture for a (possibly non-integer) target green time.
    static GreenTime randomized(double g) {
        if (!(g > 0.0)) throw std::domain_error("green time must be > 0");
        const double fl = std::floor(g);
        if (g == fl) return deterministic(static_cast<int>(fl));
        const int lo = static_cast<int>(fl);
        return {lo, lo + 1, (lo + 1) - g};  // p*lo + (1-p)*(lo+1) = g
    }

    static GreenTime mixture(int floor_slots, int ceil_slots, double p_floor) {
        if (floor_slots <= 0)
            throw std::domain_error("green time must be a positive integer");
        if (p_floor < 0.0 || p_floor > 1.0)
            throw std::domain_error("green mixture probability must be in [0, 1]");
        if (p_floor >= 1.0 || floor_slots == ceil_slots)
            return deterministic(floor_slots);
        if (p_floor <= 0.0) return deterministic(ceil_slots);
        if (ceil_slots != floor_slots + 1)
            throw std::domain_error("green mixture requires ceil = floor + 1");
        return {floor_slots, ceil_slots, p_floor};
    }

    bool is_deterministic() const { return floor_slots == ceil_slots; }
    double mean() const {
        return p_floor * floor_slots + (1.0 - p_floor) * ceil_slots;
    }
};

// One lane of the fixed-cycle traffic-light queue: arrivals, green period and
// cycle length. The cycle may be non-integer; stability requires
// rho = mu c / E[G] < 1. Immutable and validated at construction.
class FctlInstance {
  public:
    FctlInstance(ArrivalModel arrival, GreenTime green, double cycle)
        : arrival_(std::move(arrival)), green_(green), cycle_(cycle) {
        if (!(cycle_ > 0.0))
            throw std::domain_error("fctl instance: cycle must be > 0");
        if (green_.mean() > cycle_ + 1e-12)
            throw std::domain_error("fctl instance: green period exceeds cycle");
        if (!(load() < 1.0)) {
            char buf[112];
            std::snprintf(buf, sizeof buf,
                          "fctl instance: unstable, rho = mu*c/E[G] = %.6g >= 1",
                          load());
            throw infeasible_error(buf);
        }
    }

    const ArrivalModel& arrival() const { return arrival_; }
    const GreenTime& green() const { return green_; }
    double cycle() const { return cycle_; }

    double load() const { return arrival_.mean() * cycle_ / green_.mean(); }

    // Heavy-traffic drift implied by g = mu c + beta sigma sqrt(c).
    double beta() const {
        return (green_.mean() - arrival_.mean() * cycle_) /
               (arrival_.sigma() * std::sqrt(cycle_));
    }

    bool integer_cycle() const {
        return std::abs(cycle_ - std::llround(cycle_)) < 1e-9;
    }

  private:
    ArrivalModel arrival_;
    GreenTime green_;
    double cycle_;
};

}  // namespace fctl
