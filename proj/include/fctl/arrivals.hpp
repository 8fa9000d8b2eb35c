#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fctl/errors.hpp"
#include "fctl/special.hpp"

namespace fctl {

enum class ArrivalKind { poisson, geometric, negative_binomial, custom };

// Per-slot arrival distribution on {0, 1, 2, ...}. Exposes the PGF Y(z),
// exact derivatives up to third order, the moments used by the heavy-traffic
// formulas, and the analyticity radius. Immutable after construction; all
// member functions are pure.
//
// Geometric is parameterized by its mean, negative binomial by (mean,
// variance); the conversion to (p, r) is internal. Geometric lives on
// {0, 1, 2, ...} with Y(z) = p / (1 - (1-p) z).
class ArrivalModel {
  public:
    static ArrivalModel poisson(double mean) {
        if (!(mean > 0.0))
            throw std::domain_error("poisson arrivals: mean must be > 0");
        ArrivalModel m;
        m.kind_ = ArrivalKind::poisson;
        m.mu_ = mean;
        m.var_ = mean;
        m.mu3_ = mean * mean * mean + 3.0 * mean * mean + mean;
        m.radius_ = std::numeric_limits<double>::infinity();
        return m;
    }

    static ArrivalModel geometric(double mean) {
        if (!(mean > 0.0))
            throw std::domain_error("geometric arrivals: mean must be > 0");
        ArrivalModel m;
        m.kind_ = ArrivalKind::geometric;
        m.p_ = 1.0 / (1.0 + mean);
        m.r_ = 1.0;
        m.finish_neg_binomial();
        return m;
    }

    static ArrivalModel negative_binomial(double mean, double variance) {
        if (!(mean > 0.0))
            throw std::domain_error("negative binomial arrivals: mean must be > 0");
        if (!(variance > mean))
            throw std::domain_error(
                "negative binomial arrivals: variance must exceed the mean");
        ArrivalModel m;
        m.kind_ = ArrivalKind::negative_binomial;
        m.p_ = mean / variance;
        m.r_ = mean * mean / (variance - mean);
        m.finish_neg_binomial();
        return m;
    }

    static ArrivalModel custom(std::vector<double> pmf) {
        if (pmf.empty())
            throw std::domain_error("custom arrivals: pmf must be non-empty");
        double sum = 0.0;
        for (double p : pmf) {
            if (!(p >= 0.0))
                throw std::domain_error("custom arrivals: pmf entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::domain_error("custom arrivals: pmf must sum to 1");
        ArrivalModel m;
        m.kind_ = ArrivalKind::custom;
        m.pmf_ = std::move(pmf);
        for (double& p : m.pmf_) p /= sum;
        double mu = 0, m2 = 0, m3 = 0;
        for (std::size_t k = 0; k < m.pmf_.size(); ++k) {
            const double kk = static_cast<double>(k);
            mu += kk * m.pmf_[k];
            m2 += kk * kk * m.pmf_[k];
            m3 += kk * kk * kk * m.pmf_[k];
        }
        m.mu_ = mu;
        m.var_ = m2 - mu * mu;
        m.mu3_ = m3;
        if (!(m.mu_ > 0.0))
            throw std::domain_error("custom arrivals: mean must be > 0");
        if (!(m.var_ > 0.0))
            throw std::domain_error("custom arrivals: variance must be > 0");
        m.radius_ = std::numeric_limits<double>::infinity();
        return m;
    }

    ArrivalKind kind() const { return kind_; }
    double mean() const { return mu_; }
    double variance() const { return var_; }
    double sigma() const { return std::sqrt(var_); }
    double third_moment() const { return mu3_; }  // E[Y^3]
    double radius() const { return radius_; }     // Y analytic in |z| < radius

    // Y(z). Real or complex z with |z| < radius(); non-integer powers of Y
    // elsewhere in the library use the principal complex logarithm.
    cplx pgf(cplx z) const {
        check_domain(z);
        switch (kind_) {
            case ArrivalKind::poisson:
                return std::exp(mu_ * (z - 1.0));
            case ArrivalKind::geometric:
                return p_ / (1.0 - (1.0 - p_) * z);
            case ArrivalKind::negative_binomial:
                return std::pow(p_ / (1.0 - (1.0 - p_) * z), r_);
            case ArrivalKind::custom: {
                cplx acc = 0.0;
                for (std::size_t k = pmf_.size(); k-- > 0;)
                    acc = acc * z + pmf_[k];
                return acc;
            }
        }
        return {};
    }

    // Exact analytic derivative Y^(order)(z), order in {1, 2, 3}.
    cplx pgf_derivative(cplx z, int order) const {
        if (order < 1 || order > 3)
            throw std::domain_error("pgf_derivative: order must be 1, 2 or 3");
        check_domain(z);
        switch (kind_) {
            case ArrivalKind::poisson:
                return std::pow(mu_, order) * std::exp(mu_ * (z - 1.0));
            case ArrivalKind::geometric:
            case ArrivalKind::negative_binomial: {
                const double q = 1.0 - p_;
                double coeff = r_;
                for (int j = 1; j < order; ++j) coeff *= r_ + j;
                return coeff * std::pow(q, order) *
                       std::pow(p_ / (1.0 - q * z), r_) /
                       std::pow(1.0 - q * z, order);
            }
            case ArrivalKind::custom: {
                cplx acc = 0.0;
                for (std::size_t k = pmf_.size(); k-- > static_cast<std::size_t>(order);) {
                    double fall = 1.0;
                    for (int j = 0; j < order; ++j) fall *= static_cast<double>(k - j);
                    acc = acc * z + fall * pmf_[k];
                }
                return acc;
            }
        }
        return {};
    }

    double pmf(int k) const {
        if (k < 0) return 0.0;
        switch (kind_) {
            case ArrivalKind::poisson:
                return std::exp(k * std::log(mu_) - mu_ - std::lgamma(k + 1.0));
            case ArrivalKind::geometric:
                return p_ * std::pow(1.0 - p_, k);
            case ArrivalKind::negative_binomial: {
                double v = std::pow(p_, r_);
                for (int j = 0; j < k; ++j) v *= (1.0 - p_) * (r_ + j) / (j + 1.0);
                return v;
            }
            case ArrivalKind::custom:
                return k < static_cast<int>(pmf_.size()) ? pmf_[k] : 0.0;
        }
        return 0.0;
    }

    // Pmf truncated once the remaining tail mass drops below tail_tol.
    std::vector<double> pmf_vector(double tail_tol = 1e-14) const {
        if (kind_ == ArrivalKind::custom) return pmf_;
        std::vector<double> out;
        double cum = 0.0;
        double term = pmf(0);
        for (int k = 0; k < 200000; ++k) {
            out.push_back(term);
            cum += term;
            if (1.0 - cum < tail_tol && k >= 1) return out;
            // one-step recurrences keep this exact and cheap
            switch (kind_) {
                case ArrivalKind::poisson:
                    term *= mu_ / (k + 1.0);
                    break;
                case ArrivalKind::geometric:
                case ArrivalKind::negative_binomial:
                    term *= (1.0 - p_) * (r_ + k) / (k + 1.0);
                    break;
                default:
                    break;
            }
        }
        throw numeric_error("pmf_vector: truncation did not reach tail tolerance");
    }

    std::string describe() const {
        char buf[96];
        switch (kind_) {
            case ArrivalKind::poisson:
                std::snprintf(buf, sizeof buf, "poisson(mean=%g)", mu_);
                break;
            case ArrivalKind::geometric:
                std::snprintf(buf, sizeof buf, "geometric(mean=%g)", mu_);
                break;
            case ArrivalKind::negative_binomial:
                std::snprintf(buf, sizeof buf, "negative_binomial(mean=%g, var=%g)",
                              mu_, var_);
                break;
            case ArrivalKind::custom:
                std::snprintf(buf, sizeof buf, "custom(pmf on 0..%zu)",
                              pmf_.size() - 1);
                break;
        }
        return buf;
    }

  private:
    ArrivalModel() = default;

    void finish_neg_binomial() {
        const double q = 1.0 - p_;
        const double f1 = r_ * q / p_;
        const double f2 = r_ * (r_ + 1.0) * q * q / (p_ * p_);
        const double f3 = r_ * (r_ + 1.0) * (r_ + 2.0) * q * q * q / (p_ * p_ * p_);
        mu_ = f1;
        var_ = f2 + f1 - f1 * f1;
        mu3_ = f3 + 3.0 * f2 + f1;
        radius_ = 1.0 / q;
    }

    void check_domain(cplx z) const {
        if (std::abs(z) >= radius_) {
            char buf[112];
            std::snprintf(buf, sizeof buf,
                          "pgf: |z| = %.6g outside analyticity radius R = %.6g",
                          std::abs(z), radius_);
            throw std::domain_error(buf);
        }
    }

    ArrivalKind kind_ = ArrivalKind::poisson;
    double p_ = 0.0, r_ = 0.0;  // geometric / negative-binomial parameters
    double mu_ = 0.0, var_ = 0.0, mu3_ = 0.0;
    double radius_ = 0.0;
    std::vector<double> pmf_;  // custom only
};

}  // namespace fctl
