#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include "fctl/errors.hpp"

namespace fctl {
namespace detail {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr double gk_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class R, class F>
R gk15(F& f, double a, double b, double& err) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    R fk{};
    R fg{};
    for (int i = 0; i < 7; ++i) {
        const R lo = f(mid - h * gk_x[i]);
        const R hi = f(mid + h * gk_x[i]);
        fk += gk_wk[i] * (lo + hi);
        if (i % 2 == 1) fg += gk_wg[i / 2] * (lo + hi);
    }
    const R center = f(mid);
    fk += gk_wk[7] * center;
    fg += gk_wg[3] * center;
    err = std::abs(h) * std::abs(fk - fg);
    return h * fk;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over [a, b]; the integrand may
// return double or std::complex<double>. Worst segment is refined first.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-14,
                        double rel_tol = 1e-13, int max_segments = 100000) {
    using R = std::invoke_result_t<F&, double>;
    struct Segment {
        double a, b, err;
        R value;
        bool operator<(const Segment& o) const { return err < o.err; }
    };
    std::priority_queue<Segment> queue;
    double err0;
    R v0 = detail::gk15<R>(f, a, b, err0);
    queue.push({a, b, err0, v0});
    R total = v0;
    double total_err = err0;
    int segments = 1;
    // Roundoff stagnation guard: once refinement stops shrinking the error
    // estimate the noise floor is reached and the value is as good as it gets.
    double checkpoint_err = err0;
    int checkpoint_at = 1;
    constexpr int kWindow = 512;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (segments >= max_segments)
            throw numeric_error("integrate_adaptive: refinement limit reached");
        if (segments - checkpoint_at >= kWindow) {
            if (total_err > 0.99 * checkpoint_err) break;
            checkpoint_err = total_err;
            checkpoint_at = segments;
        }
        Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        double el, er;
        R vl = detail::gk15<R>(f, worst.a, mid, el);
        R vr = detail::gk15<R>(f, mid, worst.b, er);
        total += vl + vr - worst.value;
        total_err += el + er - worst.err;
        queue.push({worst.a, mid, el, vl});
        queue.push({mid, worst.b, er, vr});
        ++segments;
    }
    return total;
}

}  // namespace fctl
