#include <doctest.h>

#include <cmath>
#include <complex>

#include "fctl/arrivals.hpp"
#include "oracles.hpp"

using namespace fctl;

namespace {

void check_derivatives_by_central_difference(const ArrivalModel& m) {
    const double h = 1e-6;
    for (int order = 1; order <= 3; ++order) {
        auto f = [&](double z) {
            return order == 1 ? m.pgf(z).real()
                              : m.pgf_derivative(z, order - 1).real();
        };
        const double want = oracles::central_difference(f, 1.0, h);
        const double got = m.pgf_derivative(1.0, order).real();
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
}

void check_moments_by_summation(const ArrivalModel& m) {
    auto pmf = [&](int k) { return m.pmf(k); };
    const double m1 = oracles::moment_by_summation(pmf, 1);
    const double m2 = oracles::moment_by_summation(pmf, 2);
    const double m3 = oracles::moment_by_summation(pmf, 3);
    CHECK(m.mean() == doctest::Approx(m1).epsilon(1e-10));
    CHECK(m.variance() == doctest::Approx(m2 - m1 * m1).epsilon(1e-10));
    CHECK(m.third_moment() == doctest::Approx(m3).epsilon(1e-10));
}

}  // namespace

TEST_CASE("poisson arrivals") {
    const auto m = ArrivalModel::poisson(0.3);
    CHECK(m.pgf(1.0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.pgf_derivative(1.0, 1).real() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.pgf_derivative(1.0, 2).real() == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(m.variance() == doctest::Approx(0.3));
    // third raw moment mu^3 + 3 mu^2 + mu = 0.597, via independent pmf summation
    const double mu3 =
        oracles::moment_by_summation([&](int k) { return m.pmf(k); }, 3);
    CHECK(mu3 == doctest::Approx(0.597).epsilon(1e-12));
    CHECK(m.third_moment() == doctest::Approx(0.597).epsilon(1e-12));
    check_derivatives_by_central_difference(m);
    check_moments_by_summation(m);
}

TEST_CASE("geometric arrivals on {0,1,2,...}") {
    const auto m = ArrivalModel::geometric(0.4);
    CHECK(m.pgf(1.0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mean() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(m.variance() == doctest::Approx(0.56).epsilon(1e-14));
    CHECK(m.radius() == doctest::Approx(3.5).epsilon(1e-14));
    CHECK_THROWS_AS(m.pgf(3.6), std::domain_error);
    check_derivatives_by_central_difference(m);
    check_moments_by_summation(m);
}

TEST_CASE("negative binomial arrivals from (mean, variance)") {
    const auto m = ArrivalModel::negative_binomial(0.1, 0.4);
    CHECK(m.mean() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(m.variance() == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(m.sigma() == doctest::Approx(0.6324555320336759).epsilon(1e-14));
    // internal parameters p = mean/var, r = mean^2/(var - mean)
    CHECK(m.radius() == doctest::Approx(1.0 / 0.75).epsilon(1e-14));
    check_derivatives_by_central_difference(m);
    check_moments_by_summation(m);
    CHECK_THROWS_AS(ArrivalModel::negative_binomial(0.4, 0.4), std::domain_error);
}

TEST_CASE("custom pmf arrivals") {
    const auto m = ArrivalModel::custom({0.5, 0.3, 0.2});
    CHECK(m.mean() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.pgf(1.0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.pgf_derivative(0.5, 1).real() == doctest::Approx(0.3 + 0.4 * 0.5));
    CHECK(m.pgf_derivative(2.0, 3).real() == doctest::Approx(0.0));
    CHECK(std::isinf(m.radius()));
    check_derivatives_by_central_difference(m);
    check_moments_by_summation(m);
    CHECK_THROWS_AS(ArrivalModel::custom({0.5, 0.4}), std::domain_error);
    CHECK_THROWS_AS(ArrivalModel::custom({1.0}), std::domain_error);
}

TEST_CASE("pmf vectors carry essentially all mass") {
    for (const auto& m :
         {ArrivalModel::poisson(0.3), ArrivalModel::geometric(0.4),
          ArrivalModel::negative_binomial(0.1, 0.4)}) {
        const auto pmf = m.pmf_vector(1e-14);
        double total = 0.0;
        for (double p : pmf) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("pgf derivative order is validated") {
    const auto m = ArrivalModel::poisson(0.3);
    CHECK_THROWS_AS(m.pgf_derivative(1.0, 0), std::domain_error);
    CHECK_THROWS_AS(m.pgf_derivative(1.0, 4), std::domain_error);
}
