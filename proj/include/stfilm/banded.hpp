#pragma once

/// @file banded.hpp
/// @brief Direct solver for cyclic (periodically wrapped) banded systems.
///
/// The n x n matrix has entries A(i, (i+d) mod n) for |d| <= b. The fold
/// permutation p = [0, n-1, 1, n-2, ...] turns the cyclic band into an
/// ordinary band: indices at cyclic distance d land within 2d of each other,
/// so P A P^T is banded with half-bandwidth 2b and no wrap. That matrix gets
/// a LAPACK-style banded LU with partial pivoting, which is backward stable
/// regardless of conditioning or dominance. (A Sherman-Morrison-Woodbury
/// corner split was tried first and is numerically treacherous here: the
/// implicit-step Jacobian is well conditioned, but chopping its wrap corners
/// can leave a near-singular core, and the correction then cancels
/// catastrophically without any pivot falling below tolerance.)
///
/// Factor is O(n b^2), solve O(n b); nothing allocates after factor().
///
/// The implicit thin-film step assembles its Jacobian here with b = 2
/// (the flux stencil couples v_{j-2}..v_{j+2}); the periodic cubic spline
/// uses b = 1.

#include <vector>

namespace stfilm {

class CyclicBanded {
public:
    /// n >= 2b + 2 keeps the fold permutation's band width below n.
    CyclicBanded(int n, int b);

    int size() const { return n_; }
    int half_bandwidth() const { return b_; }

    /// Entry A(row, (row + offset) mod n), |offset| <= b.
    double& at(int row, int offset);
    double at(int row, int offset) const;

    void clear(); // zero all entries, drop any factorization

    /// Factors the matrix. pivot_tol is relative to the largest assembled
    /// entry; a pivot below it throws LinearSolveFailure.
    void factor(double pivot_tol);

    bool factored() const { return factored_; }

    /// Solves A x = rhs using the factorization.
    void solve(const double* rhs, double* x) const;
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    int n_;
    int b_;
    int kb_; // folded half-bandwidth = 2b
    std::vector<double> diag_;  // diag_[(d+b)*n + i] = A(i, (i+d) mod n)
    std::vector<int> fold_;     // fold_[i] = folded position of logical index i
    bool factored_ = false;

    // banded LU of the folded matrix: column-major band, ldab = 3*kb + 1,
    // row index kl+ku+i-j for entry (i,j); kl = ku = kb
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    mutable std::vector<double> scratch_; // folded rhs/solution buffer

    void band_solve(double* x) const; // folded system, in place
};

} // namespace stfilm
