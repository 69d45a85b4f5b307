#include "chemo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace chemo {

GridSpec::GridSpec(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 4 || ny < 4) {
        throw std::invalid_argument("GridSpec: nx and ny must be >= 4");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw std::invalid_argument("GridSpec: lx and ly must be finite and > 0");
    }
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("Field: value count does not match nx*ny");
    }
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

bool Field::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_finite(const char* what) const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            const int i = static_cast<int>(k % static_cast<std::size_t>(grid_.nx()));
            const int j = static_cast<int>(k / static_cast<std::size_t>(grid_.nx()));
            std::ostringstream msg;
            msg << what << ": non-finite value " << values_[k] << " at cell (" << i << ", " << j
                << ")";
            throw NumericalError(msg.str());
        }
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other, "Field::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += other.values_[k];
    }
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other, "Field::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] -= other.values_[k];
    }
    return *this;
}

Field& Field::operator*=(double s) noexcept {
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!(a.grid() == b.grid())) {
        throw NumericalError(std::string(what) + ": fields live on different grids");
    }
}

namespace detail {

void apply_laplacian(const GridSpec& grid, std::span<const double> in, std::span<double> out) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double inv_hx2 = 1.0 / (grid.hx() * grid.hx());
    const double inv_hy2 = 1.0 / (grid.hy() * grid.hy());
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        const std::size_t row_s = j > 0 ? row - nx : row;
        const std::size_t row_n = j < ny - 1 ? row + nx : row;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            const double c = in[k];
            // Missing neighbours mirror the cell itself, so their difference is zero.
            const double e = i < nx - 1 ? in[k + 1] : c;
            const double w = i > 0 ? in[k - 1] : c;
            const double n = in[row_n + i];
            const double s = in[row_s + i];
            out[k] = ((e - c) + (w - c)) * inv_hx2 + ((n - c) + (s - c)) * inv_hy2;
        }
    }
}

}  // namespace detail

Field laplacian(const Field& f) {
    f.require_finite("laplacian");
    Field out(f.grid());
    detail::apply_laplacian(f.grid(), f.values(), out.values());
    return out;
}

namespace {

double face_density(double d_lo, double d_hi, double dp, FluxAveraging averaging) {
    if (averaging == FluxAveraging::upwind) {
        // Flux runs up the potential gradient, so the upstream cell is the low side when dp > 0.
        return dp >= 0.0 ? d_lo : d_hi;
    }
    return 0.5 * (d_lo + d_hi);
}

}  // namespace

Field chemotactic_divergence(const Field& density, const Field& potential,
                             FluxAveraging averaging) {
    require_same_grid(density, potential, "chemotactic_divergence");
    density.require_finite("chemotactic_divergence(density)");
    potential.require_finite("chemotactic_divergence(potential)");

    const GridSpec& g = density.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double hx = g.hx();
    const double hy = g.hy();

    // Interior face fluxes; x-face (i+1/2, j) stored at [j*(nx-1)+i], y-face (i, j+1/2) at [j*nx+i].
    std::vector<double> fx(static_cast<std::size_t>(nx - 1) * ny);
    std::vector<double> fy(static_cast<std::size_t>(nx) * (ny - 1));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx - 1; ++i) {
            const double dp = potential(i + 1, j) - potential(i, j);
            fx[static_cast<std::size_t>(j) * (nx - 1) + i] =
                face_density(density(i, j), density(i + 1, j), dp, averaging) * dp / hx;
        }
    }
    for (int j = 0; j < ny - 1; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double dp = potential(i, j + 1) - potential(i, j);
            fy[static_cast<std::size_t>(j) * nx + i] =
                face_density(density(i, j), density(i, j + 1), dp, averaging) * dp / hy;
        }
    }

    Field out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double east = i < nx - 1 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i] : 0.0;
            const double west = i > 0 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i - 1] : 0.0;
            const double north = j < ny - 1 ? fy[static_cast<std::size_t>(j) * nx + i] : 0.0;
            const double south = j > 0 ? fy[static_cast<std::size_t>(j - 1) * nx + i] : 0.0;
            out(i, j) = (east - west) / hx + (north - south) / hy;
        }
    }
    return out;
}

double integrate(const Field& f) {
    f.require_finite("integrate");
    double sum = 0.0;
    for (double v : f.values()) {
        sum += v;
    }
    return f.grid().cell_area() * sum;
}

namespace {

template <typename Weight>
double face_energy(const Field& f, Weight&& weight) {
    const GridSpec& g = f.grid();
    const double hx = g.hx();
    const double hy = g.hy();
    const double da = g.cell_area();
    double sum = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx() - 1; ++i) {
            const double d = (f(i + 1, j) - f(i, j)) / hx;
            sum += d * d * da * weight(f(i, j), f(i + 1, j));
        }
    }
    for (int j = 0; j < g.ny() - 1; ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double d = (f(i, j + 1) - f(i, j)) / hy;
            sum += d * d * da * weight(f(i, j), f(i, j + 1));
        }
    }
    return sum;
}

}  // namespace

double gradient_sq_integral(const Field& f) {
    f.require_finite("gradient_sq_integral");
    return face_energy(f, [](double, double) { return 1.0; });
}

double weighted_gradient_sq_integral(const Field& f) {
    f.require_finite("weighted_gradient_sq_integral");
    return face_energy(f, [](double a, double b) {
        const double denom = 0.5 * (a + b) + std::numbers::e;
        if (!(denom > 0.0)) {
            throw NumericalError("weighted_gradient_sq_integral: face weight f + e is not positive");
        }
        return 1.0 / denom;
    });
}

double max_face_gradient(const Field& f) {
    const GridSpec& g = f.grid();
    double m = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx() - 1; ++i) {
            m = std::max(m, std::abs(f(i + 1, j) - f(i, j)) / g.hx());
        }
    }
    for (int j = 0; j < g.ny() - 1; ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            m = std::max(m, std::abs(f(i, j + 1) - f(i, j)) / g.hy());
        }
    }
    return m;
}

}  // namespace chemo
