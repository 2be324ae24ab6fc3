#include <cmath>
#include <vector>

#include "doctest.h"
#include "dense_reference.hpp"
#include "stfilm/banded.hpp"
#include "stfilm/errors.hpp"
#include "stfilm/grid.hpp"
#include "stfilm/rng.hpp"
#include "test_util.hpp"

using namespace stfilm;

namespace {

// Scatter the cyclic band into a dense row-major matrix.
std::vector<double> to_dense(const CyclicBanded& A) {
    const int n = A.size(), b = A.half_bandwidth();
    std::vector<double> D(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int d = -b; d <= b; ++d)
            D[static_cast<size_t>(i) * n + wrap_index(i + d, n)] = A.at(i, d);
    return D;
}

std::vector<double> matvec(const std::vector<double>& D, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[static_cast<size_t>(i)] += D[static_cast<size_t>(i) * n + j] * x[static_cast<size_t>(j)];
    return y;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

std::vector<double> random_rhs(int n, std::uint64_t seed) {
    std::vector<double> r(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = rng::gaussian(rng::derive_key(seed, 3, i));
    return r;
}

// Solve with the cyclic solver and with the dense LU oracle; report both the
// cross-difference and the true backward error of the cyclic solution.
void check_against_dense(CyclicBanded& A, std::uint64_t rhs_seed, double tol) {
    const std::vector<double> D = to_dense(A);
    const std::vector<double> rhs = random_rhs(A.size(), rhs_seed);
    A.factor(1e-14);
    const std::vector<double> x = A.solve(rhs);
    const std::vector<double> x_ref = dense_ref::lu_solve(D, rhs);
    CHECK(max_abs_diff(x, x_ref) < tol);
    CHECK(max_abs_diff(matvec(D, x), rhs) < tol);
}

} // namespace

TEST_CASE("construction validates the size against the bandwidth") {
    CHECK_NOTHROW(CyclicBanded(8, 2));
    CHECK_NOTHROW(CyclicBanded(6, 2));  // n = 2b + 2 is the smallest legal size
    CHECK_THROWS_AS(CyclicBanded(5, 2), SimError);
    CHECK_THROWS_AS(CyclicBanded(3, 1), SimError);
    CHECK_THROWS_AS(CyclicBanded(8, 0), SimError);
}

TEST_CASE("entry access wraps cyclically and writing drops the factorization") {
    CyclicBanded A(8, 2);
    A.at(0, -2) = 7.5; // logical entry (0, 6)
    A.at(7, 1) = -2.0; // logical entry (7, 0)
    const CyclicBanded& cA = A;
    CHECK(cA.at(0, -2) == 7.5);
    CHECK(cA.at(7, 1) == -2.0);
    CHECK(cA.at(3, 0) == 0.0);

    for (int i = 0; i < 8; ++i) A.at(i, 0) += 1.0;
    A.factor(1e-14);
    CHECK(A.factored());
    A.at(2, 1) = 0.25; // non-const access invalidates
    CHECK(!A.factored());
}

TEST_CASE("solve before factor is an error") {
    CyclicBanded A(8, 1);
    for (int i = 0; i < 8; ++i) A.at(i, 0) = 1.0;
    CHECK_THROWS_AS(A.solve(std::vector<double>(8, 1.0)), SimError);
}

TEST_CASE("random diagonally dominant systems match a dense LU") {
    std::uint64_t ctr = 0;
    for (int n : {8, 16, 33, 64}) { // odd size included on purpose
        for (int b : {1, 2}) {
            CyclicBanded A(n, b);
            double scale = 0.0;
            for (int i = 0; i < n; ++i) {
                double off = 0.0;
                for (int d = -b; d <= b; ++d) {
                    if (d == 0) continue;
                    A.at(i, d) = testutil::uniform_in(17, ctr, -1.0, 1.0);
                    off += std::abs(A.at(i, d));
                }
                A.at(i, 0) = off + 1.0 + testutil::uniform_in(17, ctr, 0.0, 1.0);
                scale = std::max(scale, std::abs(A.at(i, 0)));
            }
            check_against_dense(A, 1000 + static_cast<std::uint64_t>(n), 1e-12 * scale);
        }
    }
}

TEST_CASE("random systems with no dominance still match a dense LU") {
    std::uint64_t ctr = 0;
    for (int n : {12, 40}) {
        CyclicBanded A(n, 2);
        for (int i = 0; i < n; ++i)
            for (int d = -2; d <= 2; ++d) A.at(i, d) = testutil::uniform_in(23, ctr, -5.0, 5.0);
        check_against_dense(A, 2000 + static_cast<std::uint64_t>(n), 1e-9);
    }
}

// Regression: identity plus a stiff nonsymmetric fourth-difference band with
// variable positive edge weights — the matrix one implicit step assembles.
// Entries reach ~1e2 with no diagonal dominance. An earlier corner-split
// (low-rank update) implementation of the cyclic solve returned directions
// with O(1) backward error on exactly this class while all its partial pivots
// looked healthy; the fold-and-factor implementation must stay at the
// rounding floor.
TEST_CASE("stiff implicit-step matrices are solved to the rounding floor") {
    std::uint64_t ctr = 0;
    for (int n : {16, 32, 64}) {
        const double h = 1.0 / n;
        const double tau = h * h * h * h * 2.0; // tau/h * 1/h^3 = 2: entries up to ~1e2
        const double c = tau / h;
        const double inv_h3 = 1.0 / (h * h * h);
        CyclicBanded A(n, 2);
        for (int i = 0; i < n; ++i) A.at(i, 0) = 1.0;
        for (int e = 0; e < n; ++e) {
            const double M = testutil::uniform_in(31, ctr, 0.5, 2.0);
            const double grad = testutil::uniform_in(31, ctr, -0.7, 0.7); // mobility gradient term
            const double cm1 = -M * inv_h3;
            const double c0 = grad + 3.0 * M * inv_h3;
            const double cp1 = -grad - 3.0 * M * inv_h3 + 2.0 * grad; // asymmetric on purpose
            const double cp2 = M * inv_h3;
            A.at(e, -1) += c * cm1;
            A.at(e, 0) += c * c0;
            A.at(e, 1) += c * cp1;
            A.at(e, 2) += c * cp2;
            const int f = wrap_index(e + 1, n);
            A.at(f, -2) -= c * cm1;
            A.at(f, -1) -= c * c0;
            A.at(f, 0) -= c * cp1;
            A.at(f, 1) -= c * cp2;
        }
        const std::vector<double> D = to_dense(A);
        const std::vector<double> rhs = random_rhs(n, 77);
        A.factor(1e-14);
        const std::vector<double> x = A.solve(rhs);
        double rhs_norm = 0.0;
        for (double r : rhs) rhs_norm = std::max(rhs_norm, std::abs(r));
        // backward error of the returned solution, not just cross-agreement
        CHECK(max_abs_diff(matvec(D, x), rhs) < 1e-10 * rhs_norm * n);
        CHECK(max_abs_diff(x, dense_ref::lu_solve(D, rhs)) < 1e-9);
    }
}

TEST_CASE("tridiagonal cyclic case (interpolation-sized band)") {
    const int n = 24;
    CyclicBanded A(n, 1);
    for (int i = 0; i < n; ++i) {
        A.at(i, -1) = 1.0 / 6.0;
        A.at(i, 0) = 2.0 / 3.0;
        A.at(i, 1) = 1.0 / 6.0;
    }
    check_against_dense(A, 55, 1e-13);
}

TEST_CASE("singular and zero matrices raise a typed failure") {
    CyclicBanded Z(12, 2);
    CHECK_THROWS_AS(Z.factor(1e-14), LinearSolveFailure);

    // rank-deficient: rows 3 and 4 are both (.. 2 1 ..) over columns 3 and 4
    CyclicBanded S(12, 2);
    for (int i = 0; i < 12; ++i) S.at(i, 0) = 1.0;
    S.at(3, 0) = 2.0;  // A(3,3) = 2
    S.at(3, 1) = 1.0;  // A(3,4) = 1
    S.at(4, -1) = 2.0; // A(4,3) = 2
    S.at(4, 0) = 1.0;  // A(4,4) = 1
    CHECK_THROWS_AS(S.factor(1e-14), LinearSolveFailure);
}

TEST_CASE("clear zeroes the matrix and drops the factorization") {
    CyclicBanded A(10, 1);
    for (int i = 0; i < 10; ++i) A.at(i, 0) = 2.0;
    A.factor(1e-14);
    A.clear();
    CHECK(!A.factored());
    const CyclicBanded& cA = A;
    CHECK(cA.at(4, 0) == 0.0);
    CHECK_THROWS_AS(A.factor(1e-14), LinearSolveFailure); // all zero now
}
