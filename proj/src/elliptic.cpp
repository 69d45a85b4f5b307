#include "chemo/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chemo {

void HelmholtzProblem::validate() const {
    if (!(shift > 0.0)) {
        throw std::invalid_argument("HelmholtzProblem: shift must be > 0");
    }
    if (!(diffusion_scale > 0.0)) {
        throw std::invalid_argument("HelmholtzProblem: diffusion_scale must be > 0");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("HelmholtzProblem: tol must be > 0");
    }
}

double neumann_eigenvalue(int k, int n, double length) {
    const double h = length / n;
    return 2.0 / (h * h) * (1.0 - std::cos(k * std::numbers::pi / n));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}

void apply(const HelmholtzProblem& problem, std::span<const double> in, std::span<double> out) {
    detail::apply_laplacian(problem.grid, in, out);
    for (std::size_t k = 0; k < in.size(); ++k) {
        out[k] = problem.shift * in[k] - problem.diffusion_scale * out[k];
    }
}

}  // namespace

Field apply_helmholtz(const HelmholtzProblem& problem, const Field& f) {
    f.require_finite("apply_helmholtz");
    Field out(problem.grid);
    apply(problem, f.values(), out.values());
    return out;
}

Field solve(const HelmholtzProblem& problem, const Field& rhs, SolveStats* stats) {
    problem.validate();
    if (!(rhs.grid() == problem.grid)) {
        throw NumericalError("solve: rhs grid differs from problem grid");
    }
    rhs.require_finite("solve(rhs)");

    const std::size_t n = rhs.size();
    Field x(problem.grid);
    std::vector<double> r(rhs.values().begin(), rhs.values().end());
    std::vector<double> p = r;
    std::vector<double> ap(n);

    const double rhs_norm = std::sqrt(dot(r, r));
    if (rhs_norm == 0.0) {
        if (stats) {
            *stats = {0, 0.0};
        }
        return x;
    }
    const double target = problem.tol * rhs_norm;
    double rr = dot(r, r);
    const int limit = problem.iteration_limit();
    int it = 0;
    while (std::sqrt(rr) > target) {
        if (it == limit) {
            std::ostringstream msg;
            msg << "CG did not converge in " << limit << " iterations (relative residual "
                << std::sqrt(rr) / rhs_norm << ", target " << problem.tol << ")";
            throw SolverFailure(msg.str(), it, std::sqrt(rr) / rhs_norm);
        }
        apply(problem, p, ap);
        const double alpha = rr / dot(p, ap);
        auto xv = x.values();
        for (std::size_t k = 0; k < n; ++k) {
            xv[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
        ++it;
    }
    if (stats) {
        *stats = {it, std::sqrt(rr) / rhs_norm};
    }
    return x;
}

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct DctHelmholtzSolver::Impl {
    GridSpec grid;
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> lambda_x;
    std::vector<double> lambda_y;

    explicit Impl(const GridSpec& g) : grid(g) {
        buffer = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
        if (buffer == nullptr) {
            throw std::bad_alloc();
        }
        {
            std::lock_guard lock(fftw_planner_mutex());
            forward = fftw_plan_r2r_2d(g.ny(), g.nx(), buffer, buffer, FFTW_REDFT10, FFTW_REDFT10,
                                       FFTW_ESTIMATE);
            backward = fftw_plan_r2r_2d(g.ny(), g.nx(), buffer, buffer, FFTW_REDFT01, FFTW_REDFT01,
                                        FFTW_ESTIMATE);
        }
        lambda_x.resize(static_cast<std::size_t>(g.nx()));
        lambda_y.resize(static_cast<std::size_t>(g.ny()));
        for (int k = 0; k < g.nx(); ++k) {
            lambda_x[k] = neumann_eigenvalue(k, g.nx(), g.lx());
        }
        for (int l = 0; l < g.ny(); ++l) {
            lambda_y[l] = neumann_eigenvalue(l, g.ny(), g.ly());
        }
    }

    ~Impl() {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) {
            fftw_destroy_plan(forward);
        }
        if (backward) {
            fftw_destroy_plan(backward);
        }
        fftw_free(buffer);
    }
};

DctHelmholtzSolver::DctHelmholtzSolver(const GridSpec& grid) : impl_(std::make_unique<Impl>(grid)) {}
DctHelmholtzSolver::~DctHelmholtzSolver() = default;
DctHelmholtzSolver::DctHelmholtzSolver(DctHelmholtzSolver&&) noexcept = default;
DctHelmholtzSolver& DctHelmholtzSolver::operator=(DctHelmholtzSolver&&) noexcept = default;

const GridSpec& DctHelmholtzSolver::grid() const noexcept { return impl_->grid; }

Field DctHelmholtzSolver::solve(const HelmholtzProblem& problem, const Field& rhs) {
    problem.validate();
    if (!(rhs.grid() == impl_->grid) || !(problem.grid == impl_->grid)) {
        throw NumericalError("DctHelmholtzSolver: grid mismatch");
    }
    rhs.require_finite("DctHelmholtzSolver::solve(rhs)");

    const int nx = impl_->grid.nx();
    const int ny = impl_->grid.ny();
    const std::size_t n = rhs.size();
    std::copy(rhs.values().begin(), rhs.values().end(), impl_->buffer);
    fftw_execute(impl_->forward);
    // REDFT10 followed by REDFT01 scales by 2n per dimension.
    const double norm = 1.0 / (4.0 * nx * ny);
    for (int l = 0; l < ny; ++l) {
        for (int k = 0; k < nx; ++k) {
            const double denom =
                problem.shift + problem.diffusion_scale * (impl_->lambda_x[k] + impl_->lambda_y[l]);
            impl_->buffer[static_cast<std::size_t>(l) * nx + k] *= norm / denom;
        }
    }
    fftw_execute(impl_->backward);
    Field out(impl_->grid);
    std::copy(impl_->buffer, impl_->buffer + n, out.values().begin());
    return out;
}

EllipticBackend parse_backend(std::string_view name) {
    if (name == "cg") {
        return EllipticBackend::cg;
    }
    if (name == "dct") {
        return EllipticBackend::dct;
    }
    throw std::invalid_argument("unknown elliptic backend '" + std::string(name) +
                                "' (expected cg or dct)");
}

std::string_view to_string(EllipticBackend backend) noexcept {
    return backend == EllipticBackend::cg ? "cg" : "dct";
}

HelmholtzSolver::HelmholtzSolver(const GridSpec& grid, EllipticBackend backend, double tol)
    : grid_(grid), backend_(backend), tol_(tol) {
    if (backend_ == EllipticBackend::dct) {
        dct_ = std::make_unique<DctHelmholtzSolver>(grid_);
    }
}

Field HelmholtzSolver::solve(double shift, double diffusion_scale, const Field& rhs) {
    HelmholtzProblem problem{grid_, shift, diffusion_scale, tol_, 0};
    if (backend_ == EllipticBackend::dct) {
        return dct_->solve(problem, rhs);
    }
    return chemo::solve(problem, rhs);
}

}  // namespace chemo
