#include <cmath>

#include "doctest.h"
#include "stfilm/errors.hpp"
#include "stfilm/mobility.hpp"
#include "test_util.hpp"

using namespace stfilm;

TEST_CASE("model construction enforces parameter ranges") {
    CHECK_NOTHROW(MobilityModel::make(0.0));
    CHECK_NOTHROW(MobilityModel::make(1e-3, 0.39));
    CHECK_THROWS_AS(MobilityModel::make(-1e-12), SimError);
    CHECK_THROWS_AS(MobilityModel::make(1e-2, 0.0), SimError);
    CHECK_THROWS_AS(MobilityModel::make(1e-2, 0.4), SimError);
    CHECK_THROWS_AS(MobilityModel::make(1e-2, -0.1), SimError);
    CHECK_THROWS_AS(MobilityModel::make(1e-2, 1.0), SimError);
}

TEST_CASE("regularized mobility: values, limits, monotone bound") {
    const MobilityModel m = MobilityModel::make(1e-2);
    CHECK(f_eps(m, 0.0) == 0.0);
    CHECK(f_eps(m, 1.25) == doctest::Approx(std::pow(1.25, 4) / (1e-2 + 1.5625)).epsilon(1e-15));
    // s^4/(eps+s^2) < s^2 for every s > 0
    for (double s : {1e-3, 0.1, 1.0, 10.0}) CHECK(f_eps(m, s) < s * s);
    CHECK_THROWS_AS(f_eps(m, -1.0), NegativeHeight);

    const MobilityModel lim = MobilityModel::make(0.0);
    CHECK(f_eps(lim, 3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(f_eps_prime(lim, 3.0) == doctest::Approx(6.0).epsilon(1e-15));

    // epsilon -> 0 recovers the quadratic mobility pointwise
    CHECK(f_eps(MobilityModel::make(1e-14), 2.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("mobility derivative matches a central finite difference") {
    const MobilityModel m = MobilityModel::make(3e-2);
    for (double s : {0.05, 0.3, 1.0, 2.7, 11.0}) {
        const double d = 1e-6 * s;
        const double fd = (f_eps(m, s + d) - f_eps(m, s - d)) / (2.0 * d);
        CHECK(f_eps_prime(m, s) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("entropy curvature is the reciprocal of the mobility") {
    std::uint64_t ctr = 0;
    for (double eps : {1e-1, 1e-2, 1e-4}) {
        const MobilityModel m = MobilityModel::make(eps);
        for (int i = 0; i < 20; ++i) {
            const double s = testutil::uniform_in(99, ctr, 0.02, 8.0);
            CHECK(entropy_G_second(m, s) * f_eps(m, s) == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("entropy derivatives are consistent with each other") {
    const MobilityModel m = MobilityModel::make(5e-3);
    for (double s : {0.1, 0.7, 1.9, 6.0}) {
        const double d = 1e-6 * s;
        const double fd1 = (entropy_G(m, s + d) - entropy_G(m, s - d)) / (2.0 * d);
        CHECK(entropy_G_prime(m, s) == doctest::Approx(fd1).epsilon(1e-7));
        const double fd2 = (entropy_G_prime(m, s + d) - entropy_G_prime(m, s - d)) / (2.0 * d);
        CHECK(entropy_G_second(m, s) == doctest::Approx(fd2).epsilon(1e-7));
    }
}

TEST_CASE("entropy rejects the boundary and the limit model") {
    const MobilityModel m = MobilityModel::make(1e-2);
    CHECK_THROWS_AS(entropy_G(m, 0.0), NonPositiveHeight);
    CHECK_THROWS_AS(entropy_G(m, -0.5), NonPositiveHeight);
    CHECK_THROWS_AS(entropy_G_prime(m, 0.0), NonPositiveHeight);
    CHECK_THROWS_AS(entropy_G_second(m, 0.0), NonPositiveHeight);

    const MobilityModel lim = MobilityModel::make(0.0);
    CHECK_THROWS_AS(entropy_G(lim, 1.0), LimitMobilityHasNoEpsilonEntropy);
    CHECK_THROWS_AS(entropy_G_prime(lim, 1.0), LimitMobilityHasNoEpsilonEntropy);
    CHECK_THROWS_AS(entropy_G_second(lim, 1.0), LimitMobilityHasNoEpsilonEntropy);
}

TEST_CASE("initial lift adds exactly epsilon^theta") {
    const GridPtr g = TorusGrid::make(1.0, 16);
    const MobilityModel m = MobilityModel::make(1e-2, 0.3);
    Field u0(g, 0.0);
    u0[4] = 2.0; // nonnegative data with a zero is allowed before the lift
    const Field lifted = lift_initial(m, u0);
    const double lift = std::pow(1e-2, 0.3);
    CHECK(lifted[0] == doctest::Approx(lift).epsilon(1e-15));
    CHECK(lifted[4] == doctest::Approx(2.0 + lift).epsilon(1e-15));

    u0[7] = -1e-9;
    CHECK_THROWS_AS(lift_initial(m, u0), NegativeInitialData);

    const MobilityModel lim = MobilityModel::make(0.0);
    Field ok(g, 1.0);
    CHECK_THROWS_AS(lift_initial(lim, ok), SimError);
}

TEST_CASE("entropy functional of a constant state is in closed form") {
    const double L = 2.0, c = 1.5, eps = 1e-2;
    const GridPtr g = TorusGrid::make(L, 32);
    const MobilityModel m = MobilityModel::make(eps);
    const Field u(g, c);
    const double expect = L * (eps / (6.0 * c * c) - std::log(c));
    CHECK(entropy_functional(m, u) == doctest::Approx(expect).epsilon(1e-14));
}
