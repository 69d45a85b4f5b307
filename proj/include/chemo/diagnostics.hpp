#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemo/grid.hpp"
#include "chemo/model.hpp"

namespace chemo {

/**
 * Coefficients of the entropy-gradient functional
 *
 *   y = int u ln(u+e) + int w ln(w+e) + tau (A/2) int |grad v|^2 + tau (B/2) int |grad z|^2
 *
 * with eps = min{ mu/4, 1 / (3 c_gn (int w0 + e |Omega|)) }, A = 2 eps and
 * B = eps + 1/(4 eps). That choice of A zeroes A^2/(4 eps) + eps - A, and B
 * zeroes eps + 1/(4 eps) - B.
 */
struct EnergyParams {
    double c_gn = 1.0;
    double epsilon = 0.0;
    double a_coef = 0.0;
    double b_coef = 0.0;
    double w0_mass = 0.0;
    double area = 0.0;
};

/// Requires mu > 0, c_gn > 0, area > 0, w0_mass >= 0.
[[nodiscard]] EnergyParams make_energy_params(const ModelParams& params, double w0_mass,
                                              double area, double c_gn = 1.0);

/// One row of the diagnostics table. Column order is fixed by column_names().
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_u = 0.0;
    double mass_w = 0.0;
    double linf_u = 0.0;
    double linf_v = 0.0;
    double linf_w = 0.0;
    double linf_z = 0.0;
    double l_log_l_u = 0.0;
    double l_log_l_w = 0.0;
    double grad_v_sq = 0.0;
    double grad_z_sq = 0.0;
    double energy_y = 0.0;
    double min_u = 0.0;
    double min_w = 0.0;
    double dt_used = 0.0;

    static constexpr std::size_t column_count = 15;
    [[nodiscard]] static const std::array<std::string_view, column_count>& column_names();
    [[nodiscard]] std::array<double, column_count> values() const;

    friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

/// int f ln(f + e). Entries in [-pos_tol, 0) count as 0; lower ones throw NumericalError.
[[nodiscard]] double l_log_l(const Field& f, double pos_tol = 1e-10);

[[nodiscard]] double energy(const State& state, const EnergyParams& ep, const ModelParams& params);

/**
 * Populates every column from the state. Without EnergyParams (mu = 0 runs)
 * the signal-gradient terms of energy_y carry zero weight.
 */
[[nodiscard]] DiagnosticsRecord record(const State& state, const std::optional<EnergyParams>& ep,
                                       const ModelParams& params, double dt_used,
                                       double pos_tol = 1e-10);

struct BlowupReport {
    double t = 0.0;
    std::string field;  // "u", "v", "w" or "z"
    double max_value = 0.0;
    int i = 0;
    int j = 0;
    bool non_finite = false;
};

/// Fires when ||u||_inf + ||w||_inf > threshold or any field holds a non-finite value.
[[nodiscard]] std::optional<BlowupReport> detect_blowup(const State& state, double threshold);

/**
 * Brute-force constant for u^2 <= delta u^2 ln^{1-p}(u+e) + C(delta) on [0, u_max].
 *
 * C(delta) is the maximum of u^2 (1 - delta ln^{1-p}(u+e)) over a log-spaced
 * scan (u = 0 included), polished by zooming on the arg-max until successive
 * levels agree, and floored at zero.
 */
struct InequalityReport {
    double p = 0.0;
    double delta = 0.0;
    double u_max = 0.0;
    int samples = 0;
    double c_delta = 0.0;
    double argmax_u = 0.0;
    bool argmax_at_boundary = false;
    int refinement_levels = 0;
    bool holds = false;            // inequality verified at every scan sample
    bool phi_bound_holds = false;  // phi(u) <= u at every scan sample
};

[[nodiscard]] InequalityReport verify_interpolation_inequality(double p, double delta,
                                                               double u_max = 1e8,
                                                               int samples = 20000);

/// Checks the inequality with a fixed C on a log-spaced scan of the given size.
[[nodiscard]] bool certify_interpolation_inequality(double p, double delta, double u_max,
                                                    int samples, double c_delta);

/// 0 followed by samples-1 log-spaced points from 1e-6 to u_max.
[[nodiscard]] std::vector<double> log_spaced_samples(double u_max, int samples);

/// int f^2 / ( int |grad f|^2/(f+e) * int (f+e) + (int (f+e))^2 ).
[[nodiscard]] double empirical_gn_ratio(const Field& f);

}  // namespace chemo
