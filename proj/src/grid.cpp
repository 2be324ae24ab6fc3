#include "stfilm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stfilm/errors.hpp"

namespace stfilm {

std::shared_ptr<const TorusGrid> TorusGrid::make(double L, int n) {
    if (!(L > 0.0)) throw SimError("TorusGrid: L must be positive, got " + std::to_string(L));
    if (n < 8)
        throw SimError("TorusGrid: n must be >= 8, got " + std::to_string(n));
    auto g = std::make_shared<TorusGrid>();
    g->L = L;
    g->n = n;
    g->h = L / n;
    g->x.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) g->x[static_cast<size_t>(j)] = j * g->h;
    return g;
}

Field::Field(GridPtr g, std::vector<double> values) : grid(std::move(g)), v(std::move(values)) {
    if (static_cast<int>(v.size()) != grid->n)
        throw SimError("Field: value count " + std::to_string(v.size()) +
                       " does not match grid n=" + std::to_string(grid->n));
}

Field::Field(GridPtr g, double fill) : grid(std::move(g)), v(static_cast<size_t>(grid->n), fill) {}

const Field& ensure_finite(const Field& f, const char* where) {
    for (double a : f.v)
        if (!std::isfinite(a)) throw SimError(std::string(where) + ": non-finite field value");
    return f;
}

Field dx(const Field& f) {
    const int n = f.grid->n;
    const double inv2h = 1.0 / (2.0 * f.grid->h);
    Field out(f.grid);
    for (int j = 0; j < n; ++j) {
        const int jp = wrap_index(j + 1, n);
        const int jm = wrap_index(j - 1, n);
        out[j] = (f[jp] - f[jm]) * inv2h;
    }
    return out;
}

Field dxx(const Field& f) {
    const int n = f.grid->n;
    const double invh2 = 1.0 / (f.grid->h * f.grid->h);
    Field out(f.grid);
    for (int j = 0; j < n; ++j) {
        const int jp = wrap_index(j + 1, n);
        const int jm = wrap_index(j - 1, n);
        out[j] = (f[jp] - 2.0 * f[j] + f[jm]) * invh2;
    }
    return out;
}

Field dxxx(const Field& f) {
    const int n = f.grid->n;
    const double h = f.grid->h;
    const double inv2h3 = 1.0 / (2.0 * h * h * h);
    Field out(f.grid);
    for (int j = 0; j < n; ++j) {
        const int jp2 = wrap_index(j + 2, n);
        const int jp1 = wrap_index(j + 1, n);
        const int jm1 = wrap_index(j - 1, n);
        const int jm2 = wrap_index(j - 2, n);
        out[j] = (f[jp2] - 2.0 * f[jp1] + 2.0 * f[jm1] - f[jm2]) * inv2h3;
    }
    return out;
}

double integrate(const Field& f) {
    double s = 0.0;
    for (double a : f.v) s += a;
    return f.grid->h * s;
}

double inner(const Field& f, const Field& g) {
    if (f.grid->n != g.grid->n) throw SimError("inner: fields on different grids");
    double s = 0.0;
    for (size_t j = 0; j < f.v.size(); ++j) s += f.v[j] * g.v[j];
    return f.grid->h * s;
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

double mean(const Field& f) { return integrate(f) / f.grid->L; }

double min_value(const Field& f) { return *std::min_element(f.v.begin(), f.v.end()); }

double max_value(const Field& f) { return *std::max_element(f.v.begin(), f.v.end()); }

} // namespace stfilm
