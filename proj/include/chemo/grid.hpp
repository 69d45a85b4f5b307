#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

/// Thrown when an operator receives data it cannot act on (non-finite
/// values, mismatched grids, weights that are not positive).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Uniform cell-centered grid on the rectangle [0, lx] x [0, ly].
 *
 * Cells are stored row-major: index = j * nx + i, with i running along x.
 * Cell (i, j) has its center at ((i + 1/2) hx, (j + 1/2) hy).
 */
class GridSpec {
public:
    GridSpec(int nx, int ny, double lx, double ly);

    [[nodiscard]] int nx() const noexcept { return nx_; }
    [[nodiscard]] int ny() const noexcept { return ny_; }
    [[nodiscard]] double lx() const noexcept { return lx_; }
    [[nodiscard]] double ly() const noexcept { return ly_; }
    [[nodiscard]] double hx() const noexcept { return lx_ / nx_; }
    [[nodiscard]] double hy() const noexcept { return ly_ / ny_; }
    [[nodiscard]] double cell_area() const noexcept { return hx() * hy(); }
    [[nodiscard]] double area() const noexcept { return lx_ * ly_; }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
    }
    [[nodiscard]] std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(i);
    }
    [[nodiscard]] double x_center(int i) const noexcept { return (i + 0.5) * hx(); }
    [[nodiscard]] double y_center(int j) const noexcept { return (j + 0.5) * hy(); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

/// One scalar unknown sampled at the cell centers of a grid.
class Field {
public:
    explicit Field(const GridSpec& grid, double fill = 0.0);
    Field(const GridSpec& grid, std::vector<double> values);

    /// Samples f(x, y) at every cell center.
    template <typename Fn>
    static Field sample(const GridSpec& grid, Fn&& f) {
        Field out(grid);
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                out(i, j) = f(grid.x_center(i), grid.y_center(j));
            }
        }
        return out;
    }

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    [[nodiscard]] double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
    [[nodiscard]] double& operator[](std::size_t k) noexcept { return values_[k]; }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }

    [[nodiscard]] std::span<double> values() & noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const& noexcept { return values_; }
    // A span into a temporary would dangle.
    std::span<const double> values() && = delete;

    [[nodiscard]] double max() const;
    [[nodiscard]] double min() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const noexcept;

    /// Throws NumericalError naming the first non-finite cell.
    void require_finite(const char* what) const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s) noexcept;

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
    friend Field operator*(Field a, double s) { return a *= s; }

    friend bool operator==(const Field&, const Field&) = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b, const char* what);

/// How the chemotactic flux picks the density on a cell face.
enum class FluxAveraging {
    arithmetic,  // mean of the two adjacent cells
    upwind,      // upstream cell, chosen by the sign of the potential difference
};

/// 5-point Laplacian with mirrored ghost cells (zero normal flux on every wall).
[[nodiscard]] Field laplacian(const Field& f);

/**
 * Discrete divergence of density * grad(potential) in conservative flux form.
 *
 * Face flux = face density * (potential difference across the face) / h;
 * boundary faces carry no flux. Returns div(flux) per cell, so the model's
 * chemotaxis term is the negative of this.
 */
[[nodiscard]] Field chemotactic_divergence(const Field& density, const Field& potential,
                                           FluxAveraging averaging = FluxAveraging::arithmetic);

/// Midpoint quadrature over the whole rectangle.
[[nodiscard]] double integrate(const Field& f);

/// Face-based discrete Dirichlet energy, sum over interior faces of (df/h)^2 hx hy.
[[nodiscard]] double gradient_sq_integral(const Field& f);

/// Same as gradient_sq_integral with each face weighted by 1/(face mean of f + e).
[[nodiscard]] double weighted_gradient_sq_integral(const Field& f);

/// Largest one-sided face gradient |df|/h over all interior faces.
[[nodiscard]] double max_face_gradient(const Field& f);

namespace detail {
// Unchecked kernels shared with the solvers; out must already be sized.
void apply_laplacian(const GridSpec& grid, std::span<const double> in, std::span<double> out);
}  // namespace detail

}  // namespace chemo
