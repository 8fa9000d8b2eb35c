#pragma once

#include "fctl/instance.hpp"
#include "fctl/slot_chain.hpp"
#include "fctl/transform.hpp"

namespace fctl {

// Exact-evaluation dispatch. The contour transform is the exact method for
// deterministic greens (any real cycle length). For randomized greens no
// exact finite-c transform is available -- the mixture kernel in the
// transform module is the heavy-traffic object only -- so integer-cycle
// instances go through the slot chain.
inline double exact_mean_overflow(const FctlInstance& inst) {
    if (inst.green().is_deterministic()) return mean_overflow(inst);
    if (!inst.integer_cycle())
        throw numeric_error(
            "exact_mean_overflow: randomized greens require an integer cycle");
    return stationary_overflow(inst).mean;
}

inline double exact_p_empty(const FctlInstance& inst) {
    if (inst.green().is_deterministic())
        return overflow_pgf(inst, 0.0).real();
    if (!inst.integer_cycle())
        throw numeric_error(
            "exact_p_empty: randomized greens require an integer cycle");
    return stationary_overflow(inst).pmf.at(0);
}

}  // namespace fctl
