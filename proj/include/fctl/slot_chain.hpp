#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/instance.hpp"

namespace fctl {

// Exact slot-level solution of the FCTL queue, independent of the transform
// machinery. The queue observed at the end of the green period evolves as a
// Markov chain; one cycle from that epoch is c - g red slots followed by g
// green slots.
//
// Slot dynamics: red moves q -> q + A; green moves q -> q - 1 + A for q > 0
// and keeps q = 0 at 0 regardless of arrivals (they pass at full speed).
// Mass that would leave the truncation window accumulates in the top state.
//
// The red phase commutes with itself, so all red slots collapse into one
// convolution with the precomputed r-fold arrival distribution. Power
// iteration on the cycle operator is accelerated by vector Aitken
// extrapolation; every answer is accepted only against a verified
// fixed-point residual.

struct StationaryOverflow {
    std::vector<double> pmf;  // queue length at end of green
    double mean = 0.0;
    double variance = 0.0;
    int q_max = 0;
    long iterations = 0;
};

namespace detail {

// y = x (+) kernel, truncated with top-state lumping.
inline void convolve_lumped(const std::vector<double>& x,
                            const std::vector<double>& kernel,
                            std::vector<double>& y) {
    const int q_max = static_cast<int>(x.size()) - 1;
    const int k_len = static_cast<int>(kernel.size());
    std::fill(y.begin(), y.end(), 0.0);
    for (int q = 0; q <= q_max; ++q) {
        const double mass = x[q];
        if (mass == 0.0) continue;
        const int top = std::min(k_len - 1, q_max - q);
        for (int i = 0; i < top; ++i) y[q + i] += mass * kernel[i];
        double tail = 0.0;
        for (int i = top; i < k_len; ++i) tail += kernel[i];
        y[std::min(q + top, q_max)] += mass * tail;
    }
}

inline void green_slot(const std::vector<double>& x, std::vector<double>& y,
                       const std::vector<double>& a) {
    const int q_max = static_cast<int>(x.size()) - 1;
    const int a_len = static_cast<int>(a.size());
    std::fill(y.begin(), y.end(), 0.0);
    y[0] = x[0];  // empty queue: arrivals pass without queueing
    for (int q = 1; q <= q_max; ++q) {
        const double mass = x[q];
        if (mass == 0.0) continue;
        const int base = q - 1;
        const int top = std::min(a_len - 1, q_max - base);
        for (int i = 0; i < top; ++i) y[base + i] += mass * a[i];
        double tail = 0.0;
        for (int i = top; i < a_len; ++i) tail += a[i];
        y[std::min(base + top, q_max)] += mass * tail;
    }
}

// n-fold convolution of a pmf with itself, tail-trimmed at 1e-16 per step.
inline std::vector<double> self_convolve(const std::vector<double>& a, int n) {
    std::vector<double> out{1.0};
    std::vector<double> next;
    for (int step = 0; step < n; ++step) {
        next.assign(out.size() + a.size() - 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] == 0.0) continue;
            for (std::size_t j = 0; j < a.size(); ++j)
                next[i + j] += out[i] * a[j];
        }
        double cum = 0.0;
        std::size_t cut = next.size();
        for (std::size_t i = 0; i < next.size(); ++i) {
            cum += next[i];
            if (1.0 - cum < 1e-16) {
                cut = i + 1;
                break;
            }
        }
        next.resize(cut);
        next.back() += std::max(0.0, 1.0 - cum);
        out.swap(next);
    }
    return out;
}

}  // namespace detail

inline StationaryOverflow stationary_overflow(const FctlInstance& inst,
                                              int q_max_start = 128) {
    if (!inst.integer_cycle())
        throw std::domain_error(
            "stationary_overflow: integer cycle required (use the transform "
            "for non-integer cycles)");
    const int c = static_cast<int>(std::llround(inst.cycle()));
    const GreenTime& green = inst.green();
    if (green.ceil_slots > c)
        throw std::domain_error("stationary_overflow: green period exceeds cycle");

    std::vector<double> a = inst.arrival().pmf_vector(1e-15);
    {  // lump the truncated arrival tail so every operator row sums to 1
        const double sum = std::accumulate(a.begin(), a.end(), 0.0);
        a.back() += 1.0 - sum;
    }

    const int fl = green.floor_slots;
    const double p = green.p_floor;
    const bool mixed = !green.is_deterministic();

    // red-phase kernels: Y^{*(c-fl)} for the floor branch, one slot less for
    // the ceil branch
    const std::vector<double> red_ceil = detail::self_convolve(a, c - fl - (mixed ? 1 : 0));
    std::vector<double> red_floor;
    if (mixed) {
        red_floor.assign(red_ceil.size() + a.size() - 1, 0.0);
        for (std::size_t i = 0; i < red_ceil.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                red_floor[i + j] += red_ceil[i] * a[j];
    } else {
        red_floor = red_ceil;
    }

    constexpr int kHardCap = 1000000;
    long iterations = 0;
    std::vector<double> x;

    // start above the red-phase reach so the first pass rarely under-shoots
    int q_start = std::max(q_max_start, 128);
    while (q_start < static_cast<int>(red_floor.size()) + 64) q_start *= 2;

    for (int q_max = q_start; q_max <= kHardCap; q_max *= 2) {
        std::vector<double> state(q_max + 1, 0.0);
        if (x.empty())
            state[0] = 1.0;
        else
            std::copy(x.begin(), x.end(), state.begin());

        std::vector<double> buf(q_max + 1), cur(q_max + 1), branch(q_max + 1),
            next(q_max + 1);
        // The within-cycle profile peaks right after the red phase; any mass
        // lumped at the truncation cap mid-cycle silently biases the answer,
        // so the cap must also clear the post-red peak.
        double cycle_spill = 0.0;
        auto note_spill = [&](const std::vector<double>& v) {
            cycle_spill =
                std::max(cycle_spill, v[q_max] + v[q_max - 1] + v[q_max - 2]);
        };
        auto green_phase = [&](std::vector<double>& v, int slots) {
            for (int s = 0; s < slots; ++s) {
                detail::green_slot(v, buf, a);
                v.swap(buf);
            }
        };
        auto cycle_op = [&](const std::vector<double>& from,
                            std::vector<double>& to) {
            cycle_spill = 0.0;
            if (!mixed) {
                detail::convolve_lumped(from, red_floor, cur);
                note_spill(cur);
                green_phase(cur, fl);
                to = cur;
            } else {
                detail::convolve_lumped(from, red_floor, branch);
                note_spill(branch);
                green_phase(branch, fl);
                detail::convolve_lumped(from, red_ceil, cur);
                note_spill(cur);
                green_phase(cur, fl + 1);
                for (int q = 0; q <= q_max; ++q)
                    to[q] = p * branch[q] + (1.0 - p) * cur[q];
            }
        };

        // Power iteration with vector-Aitken jumps. Accept when the
        // lambda-aware distance bound delta * r / (1 - r) clears 5e-12, or at
        // the roundoff floor; a long plateau with a tiny residual also counts.
        bool settled = false;
        double prev_delta = -1.0;
        double best_delta = 1e300;
        long best_at = 0;
        for (long it = 0; it < 300000; ++it) {
            cycle_op(state, next);
            ++iterations;
            double delta = 0.0;
            for (int q = 0; q <= q_max; ++q) delta += std::abs(next[q] - state[q]);
            const double ratio = std::clamp(
                prev_delta > 0.0 ? delta / prev_delta : 0.5, 0.0, 0.99999);
            const double dist_bound = delta * ratio / (1.0 - ratio);
            if (delta < 2e-14 || (delta < 1e-8 && dist_bound < 2e-12)) {
                state.swap(next);
                settled = true;
                break;
            }
            if (delta < 0.999 * best_delta) {
                best_delta = delta;
                best_at = it;
            } else if (it - best_at > 500) {
                if (best_delta < 1e-11) {  // residual noise floor
                    state.swap(next);
                    settled = true;
                    break;
                }
                throw numeric_error(
                    "stationary_overflow: power iteration stalled above "
                    "tolerance");
            }
            // Aitken jump once the contraction ratio has stabilized
            if (prev_delta > 0.0 && delta < 1e-5 && ratio > 0.2 &&
                it % 16 == 15) {
                const double gain = ratio / (1.0 - ratio);
                double mass = 0.0;
                for (int q = 0; q <= q_max; ++q) {
                    next[q] = std::max(0.0, next[q] + gain * (next[q] - state[q]));
                    mass += next[q];
                }
                for (int q = 0; q <= q_max; ++q) next[q] /= mass;
                prev_delta = -1.0;
            } else {
                prev_delta = delta;
            }
            state.swap(next);
        }
        if (!settled)
            throw numeric_error("stationary_overflow: power iteration stalled");

        const double tail = state[q_max] + state[q_max - 1] + state[q_max - 2];
        x = std::move(state);
        if (tail < 1e-12 && cycle_spill < 1e-12) {
            int last = q_max;
            while (last > 0 && x[last] < 1e-300) --last;
            x.resize(last + 1);
            StationaryOverflow out;
            out.pmf = std::move(x);
            out.q_max = q_max;
            out.iterations = iterations;
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t q = 0; q < out.pmf.size(); ++q) {
                m1 += q * out.pmf[q];
                m2 += static_cast<double>(q) * q * out.pmf[q];
            }
            out.mean = m1;
            out.variance = m2 - m1 * m1;
            return out;
        }
    }
    throw numeric_error("stationary_overflow: truncation cap 10^6 exceeded");
}

struct SimulationStats {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;  // batch-means standard error of the mean
    long cycles = 0;
};

// Monte Carlo fallback: slot-level simulation of the same dynamics.
// Deterministic under a fixed seed.
inline SimulationStats simulate(const FctlInstance& inst, long cycles,
                                std::uint64_t seed) {
    if (!inst.integer_cycle())
        throw std::domain_error("simulate: integer cycle required");
    if (cycles < 100) throw std::domain_error("simulate: need at least 100 cycles");
    const int c = static_cast<int>(std::llround(inst.cycle()));
    const GreenTime& green = inst.green();

    const std::vector<double> a = inst.arrival().pmf_vector(1e-13);
    std::vector<double> cdf(a.size());
    std::partial_sum(a.begin(), a.end(), cdf.begin());
    cdf.back() = 1.0;

    std::uint64_t s = seed ? seed : 0x9e3779b97f4a7c15ULL;
    auto next_u64 = [&s]() {  // splitmix64: stable across platforms
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    auto uniform = [&]() { return (next_u64() >> 11) * 0x1.0p-53; };
    auto draw_arrivals = [&]() {
        const double u = uniform();
        return static_cast<int>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };

    const long warmup = std::max<long>(cycles / 10, 100);
    long long queue = 0;
    double sum = 0.0, sum_sq = 0.0;
    const int n_batches = 100;
    const long batch_len = std::max<long>(1, cycles / n_batches);
    std::vector<double> batch_sums;
    double batch_acc = 0.0;
    long in_batch = 0;

    for (long cyc = 0; cyc < warmup + cycles; ++cyc) {
        const int g = green.is_deterministic()
                          ? green.floor_slots
                          : (uniform() < green.p_floor ? green.floor_slots
                                                       : green.ceil_slots);
        for (int slot = 0; slot < c - g; ++slot) queue += draw_arrivals();
        for (int slot = 0; slot < g; ++slot) {
            if (queue == 0) continue;  // FCTL pass-through
            queue += draw_arrivals() - 1;
        }
        if (cyc < warmup) continue;
        const double v = static_cast<double>(queue);
        sum += v;
        sum_sq += v * v;
        batch_acc += v;
        if (++in_batch == batch_len) {
            batch_sums.push_back(batch_acc / batch_len);
            batch_acc = 0.0;
            in_batch = 0;
        }
    }

    SimulationStats out;
    out.cycles = cycles;
    out.mean = sum / cycles;
    out.variance = sum_sq / cycles - out.mean * out.mean;
    double bm = 0.0, bv = 0.0;
    for (double b : batch_sums) bm += b;
    bm /= batch_sums.size();
    for (double b : batch_sums) bv += (b - bm) * (b - bm);
    bv /= (batch_sums.size() - 1.0);
    out.std_error = std::sqrt(bv / batch_sums.size());
    return out;
}

}  // namespace fctl
