#pragma once

/// @file grid.hpp
/// @brief Uniform periodic grid on the torus [0,L] with second-order central
///        difference operators and trapezoid quadrature.
///
/// All derivative stencils wrap indices modulo n. Quadrature is h*sum, which
/// is spectrally accurate for smooth periodic integrands. These operators are
/// used for diagnostics; the implicit solver carries its own flux-form stencil.

#include <memory>
#include <vector>

namespace stfilm {

struct TorusGrid {
    double L;              // domain length
    int n;                 // nodes, >= 8 (a power of two enables the spectral shift)
    double h;              // spacing L/n
    std::vector<double> x; // node coordinates x_j = j*h

    /// Throws SimError unless L > 0 and n >= 8.
    static std::shared_ptr<const TorusGrid> make(double L, int n);
};

/// Periodic index wrap for j in [-n, 2n).
inline int wrap_index(int j, int n) { return j >= n ? j - n : (j < 0 ? j + n : j); }

using GridPtr = std::shared_ptr<const TorusGrid>;

/// Real-valued grid function (droplet height u or an intermediate state).
struct Field {
    GridPtr grid;
    std::vector<double> v;

    Field() = default;
    Field(GridPtr g, std::vector<double> values);
    explicit Field(GridPtr g, double fill = 0.0);

    template <typename F>
    static Field from_fn(GridPtr g, F&& fn) {
        Field f(g);
        for (int j = 0; j < g->n; ++j) f.v[j] = fn(g->x[j]);
        return f;
    }

    int size() const { return static_cast<int>(v.size()); }
    double operator[](int j) const { return v[static_cast<size_t>(j)]; }
    double& operator[](int j) { return v[static_cast<size_t>(j)]; }
};

/// Throws SimError if any value is NaN/Inf. Returns its argument.
const Field& ensure_finite(const Field& f, const char* where);

// Central stencils, periodic indexing, O(h^2):
//   dx:   (f_{j+1} - f_{j-1}) / 2h
//   dxx:  (f_{j+1} - 2 f_j + f_{j-1}) / h^2
//   dxxx: (f_{j+2} - 2 f_{j+1} + 2 f_{j-1} - f_{j-2}) / 2h^3
Field dx(const Field& f);
Field dxx(const Field& f);
Field dxxx(const Field& f);

double integrate(const Field& f); // h * sum_j f_j
double inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
double mean(const Field& f); // integrate(f) / L

double min_value(const Field& f);
double max_value(const Field& f);

} // namespace stfilm
