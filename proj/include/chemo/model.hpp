#pragma once

#include <string>
#include <vector>

#include "chemo/grid.hpp"

namespace chemo {

/**
 * Parameters of the two-species, two-signal chemotaxis system
 *
 *   u_t     = Lap u - div(u grad v) + f(u)
 *   tau v_t = Lap v - v + w
 *   w_t     = Lap w - div(w grad z)
 *   tau z_t = Lap z - z + u
 *
 * with the sub-logistic source f(u) = r u - mu u^2 / ln^p(u + e).
 */
struct ModelParams {
    int tau = 0;
    double r = 1.0;
    double mu = 1.0;
    double p = 0.0;

    /// Throws std::invalid_argument unless tau is 0 or 1 and mu, p >= 0.
    void validate() const;

    /// True iff r > 0, mu > 0 and 0 <= p < 1, the hypotheses of the global-boundedness result.
    [[nodiscard]] bool theorem_regime() const noexcept;

    /// Human-readable notes for parameter sets outside the boundedness hypotheses.
    [[nodiscard]] std::vector<std::string> warnings() const;
};

/// The quadruple (u, v, w, z) at time t. All four fields share one grid.
struct State {
    Field u;
    Field v;
    Field w;
    Field z;
    double t = 0.0;

    explicit State(const GridSpec& grid) : u(grid), v(grid), w(grid), z(grid) {}
    State(Field u_, Field v_, Field w_, Field z_, double t_ = 0.0);

    [[nodiscard]] const GridSpec& grid() const noexcept { return u.grid(); }

    friend bool operator==(const State&, const State&) = default;
};

/// f(u) = r u - mu u^2 / ln(u + e)^p. Rejects u < 0.
[[nodiscard]] double source(double u, const ModelParams& params);

/// phi(u) = int_0^u s/(s+e) + e s/(s+e)^2 ds = u^2 / (u + e). Rejects u < 0.
[[nodiscard]] double phi(double u);

/// phi'(u) = u/(u+e) + e u/(u+e)^2.
[[nodiscard]] double phi_derivative(double u);

/**
 * Pointwise source over a field. Values in [-pos_tol, 0) are treated as 0;
 * anything lower throws NumericalError naming the cell.
 */
[[nodiscard]] Field source_field(const Field& u, const ModelParams& params, double pos_tol = 0.0);

}  // namespace chemo
