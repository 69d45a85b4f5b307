#pragma once

#include <memory>
#include <string_view>

#include "chemo/grid.hpp"

namespace chemo {

/**
 * Discrete Neumann problem (shift * I - diffusion_scale * Lap) phi = rhs.
 *
 * shift > 0 makes the operator symmetric positive definite. The signal
 * equations with tau = 0 use shift = diffusion_scale = 1; implicit diffusion
 * steps use shift = 1 (or 1 + dt), diffusion_scale = dt.
 */
struct HelmholtzProblem {
    GridSpec grid;
    double shift = 1.0;
    double diffusion_scale = 1.0;
    double tol = 1e-10;
    int max_iter = 0;  // 0 selects 10 * (nx + ny)

    [[nodiscard]] int iteration_limit() const noexcept {
        return max_iter > 0 ? max_iter : 10 * (grid.nx() + grid.ny());
    }
    void validate() const;
};

/// CG did not reach the requested residual.
class SolverFailure : public NumericalError {
public:
    SolverFailure(const std::string& what, int iterations, double residual)
        : NumericalError(what), iterations_(iterations), residual_(residual) {}
    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double relative_residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Applies shift * f - diffusion_scale * laplacian(f).
[[nodiscard]] Field apply_helmholtz(const HelmholtzProblem& problem, const Field& f);

/**
 * Matrix-free conjugate gradient, zero initial guess, fixed reduction order.
 * Stops once ||rhs - A phi||_2 <= tol * ||rhs||_2; throws SolverFailure after
 * iteration_limit() iterations otherwise.
 */
[[nodiscard]] Field solve(const HelmholtzProblem& problem, const Field& rhs,
                          SolveStats* stats = nullptr);

/**
 * Direct solver diagonalising the Neumann Laplacian with a 2D DCT-II.
 * Plans are built once per instance (FFTW_ESTIMATE, so results are
 * reproducible run to run). Instances are not shareable across threads.
 */
class DctHelmholtzSolver {
public:
    explicit DctHelmholtzSolver(const GridSpec& grid);
    ~DctHelmholtzSolver();
    DctHelmholtzSolver(const DctHelmholtzSolver&) = delete;
    DctHelmholtzSolver& operator=(const DctHelmholtzSolver&) = delete;
    DctHelmholtzSolver(DctHelmholtzSolver&&) noexcept;
    DctHelmholtzSolver& operator=(DctHelmholtzSolver&&) noexcept;

    [[nodiscard]] Field solve(const HelmholtzProblem& problem, const Field& rhs);

    [[nodiscard]] const GridSpec& grid() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class EllipticBackend { cg, dct };

[[nodiscard]] EllipticBackend parse_backend(std::string_view name);
[[nodiscard]] std::string_view to_string(EllipticBackend backend) noexcept;

/// Dispatches to CG or the cosine-transform solver; owns the transform plans.
class HelmholtzSolver {
public:
    HelmholtzSolver(const GridSpec& grid, EllipticBackend backend, double tol = 1e-10);

    [[nodiscard]] Field solve(double shift, double diffusion_scale, const Field& rhs);
    [[nodiscard]] EllipticBackend backend() const noexcept { return backend_; }
    [[nodiscard]] double tol() const noexcept { return tol_; }

private:
    GridSpec grid_;
    EllipticBackend backend_;
    double tol_;
    std::unique_ptr<DctHelmholtzSolver> dct_;
};

/// Magnitude of the discrete Neumann Laplacian eigenvalue for cos(k pi x / lx) on n cells.
[[nodiscard]] double neumann_eigenvalue(int k, int n, double length);

}  // namespace chemo
