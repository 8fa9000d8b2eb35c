#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <vector>

#include "fctl/arrivals.hpp"
#include "fctl/errors.hpp"
#include "fctl/instance.hpp"
#include "fctl/special.hpp"

namespace fctl {

// Saddle point of h(z) = -ln z + (c / E[G]) ln Y(z) on (1, R): the anchor of
// every integration contour below.
struct SaddleInfo {
    double z_sp;      // unique zero of h' in (1, R)
    double h_value;   // h(z_sp) < 0
    double h_second;  // h''(z_sp) > 0
};

namespace detail {

inline int quadrature_max_points() {
    static const int cap = [] {
        if (const char* env = std::getenv("FCTL_QUADRATURE_MAX")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 256 && v <= (1L << 22)) return static_cast<int>(v);
        }
        return 1 << 16;
    }();
    return cap;
}

}  // namespace detail

inline SaddleInfo saddle_point(const FctlInstance& inst) {
    const ArrivalModel& y = inst.arrival();
    const double c = inst.cycle();
    const double g = inst.green().mean();
    const double ratio = c / g;
    const double radius = y.radius();

    auto h = [&](double z) {
        return -std::log(z) + ratio * std::log(y.pgf(z).real());
    };
    auto h1 = [&](double z) {
        return -1.0 / z + ratio * (y.pgf_derivative(z, 1) / y.pgf(z)).real();
    };
    auto h2 = [&](double z) {
        const double yv = y.pgf(z).real();
        const double y1 = y.pgf_derivative(z, 1).real();
        const double y2 = y.pgf_derivative(z, 2).real();
        return 1.0 / (z * z) + ratio * (y2 * yv - y1 * y1) / (yv * yv);
    };

    // Bracket the zero of h'. h'(1) = mu c / g - 1 < 0 under stability; expand
    // to the right until h' turns positive, staying inside the analyticity
    // disk for finite R.
    double lo = 1.0;
    double step = inst.beta() / (y.sigma() * std::sqrt(c));  // asymptote of z_sp - 1
    const double z_cap = std::isfinite(radius) ? radius * (1.0 - 1e-9) : 1e9;
    double hi = std::min(1.0 + step, 0.5 * (1.0 + z_cap));
    int expansions = 0;
    while (h1(hi) < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = 1.0 + step;
        if (hi >= z_cap) {
            hi = 0.5 * (lo + z_cap);
            if (++expansions > 200 || z_cap - lo < 1e-13 * z_cap)
                throw numeric_error(
                    "saddle_point: no saddle inside the analyticity disk");
        }
        if (++expansions > 400)
            throw numeric_error("saddle_point: bracketing failed");
    }

    // Safeguarded Newton within [lo, hi].
    double z = std::clamp(1.0 + inst.beta() / (y.sigma() * std::sqrt(c)), lo, hi);
    double d = h1(z);
    for (int it = 0; it < 100 && std::abs(d) > 1e-12; ++it) {
        const double zn = z - d / h2(z);
        z = (zn > lo && zn < hi) ? zn : 0.5 * (lo + hi);
        d = h1(z);
        (d < 0.0 ? lo : hi) = z;
    }
    if (std::abs(d) > 1e-12)
        throw numeric_error("saddle_point: Newton iteration did not converge");

    SaddleInfo info{z, h(z), h2(z)};
    if (!(info.h_value < 0.0) || !(info.z_sp > 1.0) || info.z_sp >= radius)
        throw numeric_error("saddle_point: degenerate saddle configuration");
    return info;
}

namespace detail {

// Contour machinery shared by the transform operations. Node data that does
// not depend on the PGF argument w is cached per ring so that evaluating the
// PGF at many w (pmf extraction, moments) costs one pass over the ring.
class OverflowTransform {
  public:
    explicit OverflowTransform(const FctlInstance& inst)
        : inst_(inst), saddle_(saddle_point(inst)) {}

    const SaddleInfo& saddle() const { return saddle_; }
    const FctlInstance& instance() const { return inst_; }

    // X(w) = exp((2 pi i)^-1 contour integral of F(z, w) ln(1 - Y^c/E[z^G])),
    // trapezoid in angle on |z| = z_sp with point doubling.
    cplx pgf(cplx w) const {
        if (std::abs(w) >= saddle_.z_sp)
            throw std::domain_error(
                "overflow_pgf: |w| must be below the contour radius z_sp");
        const cplx yw = inst_.arrival().pgf(w);
        cplx prev = 0.0;
        for (int n = kStart; n <= quadrature_max_points(); n *= 2) {
            const Ring& r = ring(n);
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += r.pgf_front[j] * (w - yw) / (r.z[j] * yw - w * r.y[j]);
            const cplx val = acc / static_cast<double>(n);
            if (n > kStart &&
                std::abs(val - prev) <= 1e-12 * std::max(1.0, std::abs(val)))
                return std::exp(val);
            prev = val;
        }
        throw numeric_error("overflow_pgf: contour quadrature did not converge");
    }

    double mean() const {
        double prev = 0.0;
        for (int n = kStart; n <= quadrature_max_points(); n *= 2) {
            const Ring& r = ring(n);
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) acc += r.mean_term[j];
            const double val = (acc / static_cast<double>(n)).real();
            if (n > kStart &&
                std::abs(val - prev) <= 1e-12 * std::max(1.0, std::abs(val)))
                return val;
            prev = val;
        }
        throw numeric_error("mean_overflow: contour quadrature did not converge");
    }

  private:
    struct Ring {
        std::vector<cplx> z;          // contour nodes
        std::vector<cplx> y;          // Y(z_j)
        std::vector<cplx> pgf_front;  // (Y'z - Y)/(z - Y) ln(1 - q) z
        std::vector<cplx> mean_term;  // (Y - mu z)/(Y - z) (K'/K - c q Y'/Y)/(1 - q) z
    };

    static constexpr int kStart = 256;

    const Ring& ring(int n) const {
        int slot = 0;
        while ((kStart << slot) != n) ++slot;
        if (slot >= static_cast<int>(rings_.size()))
            rings_.resize(slot + 1);
        if (!rings_[slot]) rings_[slot] = build_ring(n);
        return *rings_[slot];
    }

    Ring build_ring(int n) const {
        Ring r;
        r.z.resize(n);
        r.y.resize(n);
        r.pgf_front.resize(n);
        r.mean_term.resize(n);
        const ArrivalModel& model = inst_.arrival();
        const GreenTime& green = inst_.green();
        const double rho = saddle_.z_sp;
        const double c = inst_.cycle();
        const double mu = model.mean();
        const double p = green.p_floor;
        const double fl = green.floor_slots;
        for (int j = 0; j < n; ++j) {
            const double theta = 2.0 * pi_ * j / n;
            const cplx z = std::polar(rho, theta);
            const cplx y = model.pgf(z);
            const cplx y1 = model.pgf_derivative(z, 1);
            const cplx logz = std::log(z);
            cplx log_kernel, k_log_deriv;
            if (green.is_deterministic()) {
                log_kernel = static_cast<double>(green.floor_slots) * logz;
                k_log_deriv = static_cast<double>(green.floor_slots) / z;
            } else {
                const cplx mix = p + (1.0 - p) * z;
                log_kernel = fl * logz + std::log(mix);
                k_log_deriv = fl / z + (1.0 - p) / mix;
            }
            // q = Y^c / E[z^G]; Y^c for non-integer c via the principal log.
            const cplx q = std::exp(c * std::log(y) - log_kernel);
            if (!(std::abs(q) < 1.0))
                throw numeric_error(
                    "contour placement: |Y^c / E[z^G]| >= 1 on |z| = z_sp");
            const cplx log1mq = std::log(1.0 - q);
            r.z[j] = z;
            r.y[j] = y;
            r.pgf_front[j] = (y1 * z - y) / (z - y) * log1mq * z;
            r.mean_term[j] = (y - mu * z) / (y - z) *
                             (k_log_deriv - q * (c * y1 / y)) / (1.0 - q) * z;
        }
        return r;
    }

    static constexpr double pi_ = 3.14159265358979323846;

    const FctlInstance& inst_;
    SaddleInfo saddle_;
    mutable std::vector<std::optional<Ring>> rings_;
};

// Taylor coefficient extraction around a circle |w - center| = radius by
// trapezoid + doubling: returns m! * [coefficient of (w - center)^m].
inline std::vector<double> cauchy_derivatives(const OverflowTransform& t,
                                              cplx center, double radius,
                                              int max_order) {
    std::vector<double> prev;
    for (int n = 64; n <= quadrature_max_points(); n *= 2) {
        std::vector<cplx> values(n);
        for (int j = 0; j < n; ++j)
            values[j] = t.pgf(center + std::polar(radius, 2.0 * pi * j / n));
        std::vector<double> out(max_order + 1);
        double fact = 1.0;
        for (int m = 0; m <= max_order; ++m) {
            if (m > 0) fact *= m;
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double ang = -2.0 * pi * j * m / n;
                acc += values[j] * std::polar(1.0, ang);
            }
            out[m] = fact * (acc / static_cast<double>(n)).real() /
                     std::pow(radius, m);
        }
        if (!prev.empty()) {
            double diff = 0.0;
            for (int m = 0; m <= max_order; ++m)
                diff = std::max(diff, std::abs(out[m] - prev[m]) /
                                          std::max(1.0, std::abs(out[m])));
            if (diff <= 1e-12) return out;
        }
        prev = std::move(out);
    }
    throw numeric_error("cauchy_derivatives: extraction did not converge");
}

}  // namespace detail

// PGF of the stationary overflow queue, |w| < z_sp.
inline cplx overflow_pgf(const FctlInstance& inst, cplx w) {
    return detail::OverflowTransform(inst).pgf(w);
}

// E[X_g] by the contour formula with (E[z^G] - Y^c)'/(E[z^G] - Y^c).
inline double mean_overflow(const FctlInstance& inst) {
    return detail::OverflowTransform(inst).mean();
}

// P(X_g = k). Cauchy extraction around |w| = 0.5 for small k; for larger k
// the 2^k roundoff amplification of the small radius is unusable, so the
// contour moves to |w| = 1 where the extraction error stays at machine level.
inline double overflow_pmf(const FctlInstance& inst, int k) {
    if (k < 0) throw std::domain_error("overflow_pmf: k must be >= 0");
    const double radius = k <= 12 ? 0.5 : 1.0;
    detail::OverflowTransform t(inst);
    double prev = 0.0;
    for (int n = std::max(64, 4 * (k + 1)); n <= detail::quadrature_max_points();
         n *= 2) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ang = 2.0 * pi * j / n;
            acc += t.pgf(std::polar(radius, ang)) * std::polar(1.0, -ang * k);
        }
        const double val = (acc / static_cast<double>(n)).real() /
                           std::pow(radius, k);
        if (n > std::max(64, 4 * (k + 1)) && std::abs(val - prev) <= 1e-12)
            return val < 0.0 && val > -1e-12 ? 0.0 : val;
        prev = val;
    }
    throw numeric_error("overflow_pmf: extraction did not converge");
}

// Pmf up to the point where the remaining tail mass is below tail_tol.
inline std::vector<double> overflow_pmf_vector(const FctlInstance& inst,
                                               double tail_tol = 1e-9) {
    detail::OverflowTransform t(inst);
    std::vector<double> prev;
    for (int n = 256; n <= detail::quadrature_max_points(); n *= 2) {
        std::vector<cplx> values(n);
        std::vector<cplx> twiddle(n);
        for (int j = 0; j < n; ++j) {
            values[j] = t.pgf(std::polar(1.0, 2.0 * pi * j / n));
            twiddle[j] = std::polar(1.0, -2.0 * pi * j / n);
        }
        std::vector<double> pmf(n);
        for (int k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (long j = 0; j < n; ++j)
                acc += values[j] * twiddle[(j * k) % n];
            pmf[k] = (acc / static_cast<double>(n)).real();
        }
        if (!prev.empty()) {
            double diff = 0.0;
            for (std::size_t k = 0; k < prev.size(); ++k)
                diff = std::max(diff, std::abs(pmf[k] - prev[k]));
            if (diff <= 1e-11) {
                double cum = 0.0;
                for (std::size_t k = 0; k < pmf.size(); ++k) {
                    if (pmf[k] < -1e-12)
                        throw numeric_error(
                            "overflow_pmf_vector: negative probability mass");
                    if (pmf[k] < 0.0) pmf[k] = 0.0;
                    cum += pmf[k];
                    if (1.0 - cum < tail_tol) {
                        pmf.resize(k + 1);
                        return pmf;
                    }
                }
                break;  // tail not reached at this n; double again
            }
        }
        prev = std::move(pmf);
    }
    throw numeric_error("overflow_pmf_vector: extraction did not converge");
}

// Raw moment E[X_g^k], k >= 1, via factorial moments extracted around w = 1
// and Stirling-number conversion.
inline double overflow_moment(const FctlInstance& inst, int k) {
    if (k < 1 || k > 8)
        throw std::domain_error("overflow_moment: k must be in 1..8");
    detail::OverflowTransform t(inst);
    const double radius = std::min(0.5 * (t.saddle().z_sp - 1.0), 0.1);
    const std::vector<double> fact =
        detail::cauchy_derivatives(t, 1.0, radius, k);
    // Stirling numbers of the second kind: E[X^k] = sum_m S(k, m) f_m.
    std::array<std::array<double, 9>, 9> s{};
    s[0][0] = 1.0;
    for (int i = 1; i <= k; ++i)
        for (int m = 1; m <= i; ++m)
            s[i][m] = m * s[i - 1][m] + s[i - 1][m - 1];
    double out = 0.0;
    for (int m = 1; m <= k; ++m) out += s[k][m] * fact[m];
    return out;
}

// X(exp(t / (sigma sqrt(c)))): the scaled-MGF view used to compare against
// the Gaussian random walk limit.
inline cplx scaled_mgf(const FctlInstance& inst, cplx t) {
    const double scale = inst.arrival().sigma() * std::sqrt(inst.cycle());
    detail::OverflowTransform tr(inst);
    const cplx w = std::exp(t / scale);
    if (std::abs(w) >= tr.saddle().z_sp)
        throw std::domain_error("scaled_mgf: exp(t/(sigma sqrt(c))) outside domain");
    return tr.pgf(w);
}

}  // namespace fctl
