#include "stfilm/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stfilm/errors.hpp"

namespace stfilm {

CyclicBanded::CyclicBanded(int n, int b) : n_(n), b_(b), kb_(2 * b) {
    if (b < 1 || n < 2 * b + 2)
        throw SimError("CyclicBanded: need n >= 2b+2, got n=" + std::to_string(n) +
                       " b=" + std::to_string(b));
    diag_.assign(static_cast<size_t>((2 * b + 1)) * n, 0.0);
    // fold permutation: 0, n-1, 1, n-2, ... even slots walk up from 0,
    // odd slots walk down from n-1; cyclic neighbours stay adjacent.
    fold_.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        fold_[static_cast<size_t>(j)] = (2 * j < n) ? 2 * j : 2 * (n - 1 - j) + 1;
}

double& CyclicBanded::at(int row, int offset) {
    factored_ = false;
    return diag_[static_cast<size_t>(offset + b_) * n_ + row];
}

double CyclicBanded::at(int row, int offset) const {
    return diag_[static_cast<size_t>(offset + b_) * n_ + row];
}

void CyclicBanded::clear() {
    std::fill(diag_.begin(), diag_.end(), 0.0);
    factored_ = false;
}

void CyclicBanded::factor(double pivot_tol) {
    const int n = n_, b = b_, kl = kb_, ku = kb_;
    const int ldab = 2 * kl + ku + 1;
    ab_.assign(static_cast<size_t>(ldab) * n, 0.0);
    ipiv_.assign(static_cast<size_t>(n), 0);
    scratch_.resize(static_cast<size_t>(n));

    double amax = 0.0;
    for (double a : diag_) amax = std::max(amax, std::abs(a));
    if (amax == 0.0) throw LinearSolveFailure("CyclicBanded: zero matrix");
    const double floor = pivot_tol * amax;

    auto ab = [&](int i, int j) -> double& {
        return ab_[static_cast<size_t>(j) * ldab + (kl + ku + i - j)];
    };

    // scatter the cyclic band into the folded ordinary band
    for (int i = 0; i < n; ++i) {
        const int fi = fold_[static_cast<size_t>(i)];
        for (int d = -b; d <= b; ++d) {
            const int j = i + d < 0 ? i + d + n : (i + d >= n ? i + d - n : i + d);
            ab(fi, fold_[static_cast<size_t>(j)]) = at(i, d);
        }
    }

    // banded LU with partial pivoting (LAPACK dgbtrf layout: multipliers
    // stay in place, row swaps recorded in ipiv_ and replayed during solve)
    for (int j = 0; j < n; ++j) {
        const int ilast = std::min(n - 1, j + kl);
        int jp = j;
        double pmax = std::abs(ab(j, j));
        for (int i = j + 1; i <= ilast; ++i) {
            const double v = std::abs(ab(i, j));
            if (v > pmax) {
                pmax = v;
                jp = i;
            }
        }
        if (!(pmax > floor))
            throw LinearSolveFailure("CyclicBanded: pivot " + std::to_string(pmax) +
                                     " below tolerance at column " + std::to_string(j));
        ipiv_[j] = jp;
        const int clast = std::min(n - 1, j + ku + kl);
        if (jp != j)
            for (int c = j; c <= clast; ++c) std::swap(ab(j, c), ab(jp, c));
        const double inv_piv = 1.0 / ab(j, j);
        for (int i = j + 1; i <= ilast; ++i) {
            const double mult = ab(i, j) * inv_piv;
            ab(i, j) = mult;
            if (mult != 0.0)
                for (int c = j + 1; c <= clast; ++c) ab(i, c) -= mult * ab(j, c);
        }
    }

    factored_ = true;
}

void CyclicBanded::band_solve(double* x) const {
    const int n = n_, kl = kb_, ku = kb_;
    const int ldab = 2 * kl + ku + 1;
    auto ab = [&](int i, int j) -> double {
        return ab_[static_cast<size_t>(j) * ldab + (kl + ku + i - j)];
    };
    for (int j = 0; j < n; ++j) {
        if (ipiv_[j] != j) std::swap(x[j], x[ipiv_[j]]);
        const int ilast = std::min(n - 1, j + kl);
        const double xj = x[j];
        if (xj != 0.0)
            for (int i = j + 1; i <= ilast; ++i) x[i] -= ab(i, j) * xj;
    }
    for (int j = n - 1; j >= 0; --j) {
        const int clast = std::min(n - 1, j + ku + kl);
        double s = x[j];
        for (int c = j + 1; c <= clast; ++c) s -= ab(j, c) * x[c];
        x[j] = s / ab(j, j);
    }
}

void CyclicBanded::solve(const double* rhs, double* x) const {
    if (!factored_) throw SimError("CyclicBanded::solve before factor()");
    const int n = n_;
    double* xf = scratch_.data();
    for (int i = 0; i < n; ++i) xf[fold_[static_cast<size_t>(i)]] = rhs[i];
    band_solve(xf);
    for (int i = 0; i < n; ++i) x[i] = xf[fold_[static_cast<size_t>(i)]];
}

std::vector<double> CyclicBanded::solve(const std::vector<double>& rhs) const {
    std::vector<double> x(rhs.size());
    solve(rhs.data(), x.data());
    return x;
}

} // namespace stfilm
