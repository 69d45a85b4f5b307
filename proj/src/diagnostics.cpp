#include "chemo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chemo {

EnergyParams make_energy_params(const ModelParams& params, double w0_mass, double area,
                                double c_gn) {
    if (!(params.mu > 0.0)) {
        throw std::invalid_argument("make_energy_params: mu must be > 0 (epsilon is undefined)");
    }
    if (!(c_gn > 0.0)) {
        throw std::invalid_argument("make_energy_params: c_gn must be > 0");
    }
    if (!(area > 0.0)) {
        throw std::invalid_argument("make_energy_params: area must be > 0");
    }
    if (!(w0_mass >= 0.0)) {
        throw std::invalid_argument("make_energy_params: w0_mass must be >= 0");
    }
    EnergyParams ep;
    ep.c_gn = c_gn;
    ep.w0_mass = w0_mass;
    ep.area = area;
    ep.epsilon = std::min(params.mu / 4.0,
                          1.0 / (3.0 * c_gn) / (w0_mass + std::numbers::e * area));
    ep.a_coef = 2.0 * ep.epsilon;
    ep.b_coef = ep.epsilon + 1.0 / (4.0 * ep.epsilon);
    return ep;
}

const std::array<std::string_view, DiagnosticsRecord::column_count>&
DiagnosticsRecord::column_names() {
    static constexpr std::array<std::string_view, column_count> names{
        "t",         "mass_u",    "mass_w",    "linf_u",    "linf_v",
        "linf_w",    "linf_z",    "l_log_l_u", "l_log_l_w", "grad_v_sq",
        "grad_z_sq", "energy_y",  "min_u",     "min_w",     "dt_used"};
    return names;
}

std::array<double, DiagnosticsRecord::column_count> DiagnosticsRecord::values() const {
    return {t,         mass_u,    mass_w,   linf_u, linf_v, linf_w, linf_z, l_log_l_u,
            l_log_l_w, grad_v_sq, grad_z_sq, energy_y, min_u,  min_w,  dt_used};
}

double l_log_l(const Field& f, double pos_tol) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double v = f[k];
        if (!std::isfinite(v) || v < -pos_tol) {
            std::ostringstream msg;
            msg << "l_log_l: invalid entry " << v << " at cell index " << k;
            throw NumericalError(msg.str());
        }
        if (v > 0.0) {
            sum += v * std::log(v + std::numbers::e);
        }
    }
    return f.grid().cell_area() * sum;
}

namespace {

double combine_energy(double llu, double llw, double grad_v, double grad_z, int tau, double a,
                      double b) {
    double y = llu + llw;
    if (tau == 1) {
        y += 0.5 * a * grad_v + 0.5 * b * grad_z;
    }
    return y;
}

}  // namespace

double energy(const State& state, const EnergyParams& ep, const ModelParams& params) {
    const double llu = l_log_l(state.u);
    const double llw = l_log_l(state.w);
    if (params.tau == 0) {
        return combine_energy(llu, llw, 0.0, 0.0, 0, ep.a_coef, ep.b_coef);
    }
    return combine_energy(llu, llw, gradient_sq_integral(state.v), gradient_sq_integral(state.z),
                          params.tau, ep.a_coef, ep.b_coef);
}

DiagnosticsRecord record(const State& state, const std::optional<EnergyParams>& ep,
                         const ModelParams& params, double dt_used, double pos_tol) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.mass_u = integrate(state.u);
    rec.mass_w = integrate(state.w);
    rec.linf_u = state.u.max_abs();
    rec.linf_v = state.v.max_abs();
    rec.linf_w = state.w.max_abs();
    rec.linf_z = state.z.max_abs();
    rec.l_log_l_u = l_log_l(state.u, pos_tol);
    rec.l_log_l_w = l_log_l(state.w, pos_tol);
    rec.grad_v_sq = gradient_sq_integral(state.v);
    rec.grad_z_sq = gradient_sq_integral(state.z);
    const double a = ep ? ep->a_coef : 0.0;
    const double b = ep ? ep->b_coef : 0.0;
    rec.energy_y = combine_energy(rec.l_log_l_u, rec.l_log_l_w, rec.grad_v_sq, rec.grad_z_sq,
                                  params.tau, a, b);
    rec.min_u = state.u.min();
    rec.min_w = state.w.min();
    rec.dt_used = dt_used;
    return rec;
}

std::optional<BlowupReport> detect_blowup(const State& state, double threshold) {
    const std::array<std::pair<const char*, const Field*>, 4> fields{
        {{"u", &state.u}, {"v", &state.v}, {"w", &state.w}, {"z", &state.z}}};
    const int nx = state.grid().nx();
    for (const auto& [name, field] : fields) {
        for (std::size_t k = 0; k < field->size(); ++k) {
            const double v = (*field)[k];
            if (!std::isfinite(v)) {
                return BlowupReport{state.t, name, v, static_cast<int>(k % nx),
                                    static_cast<int>(k / nx), true};
            }
        }
    }
    const double linf_u = state.u.max_abs();
    const double linf_w = state.w.max_abs();
    if (!(linf_u + linf_w > threshold)) {
        return std::nullopt;
    }
    const Field& worst = linf_u >= linf_w ? state.u : state.w;
    const auto values = worst.values();
    const auto it = std::max_element(values.begin(), values.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    const auto k = static_cast<std::size_t>(it - values.begin());
    return BlowupReport{state.t, linf_u >= linf_w ? "u" : "w", *it, static_cast<int>(k % nx),
                        static_cast<int>(k / nx), false};
}

std::vector<double> log_spaced_samples(double u_max, int samples) {
    if (samples < 3) {
        throw std::invalid_argument("log_spaced_samples: need at least 3 samples");
    }
    constexpr double u_min = 1e-6;
    if (!(u_max > u_min)) {
        throw std::invalid_argument("log_spaced_samples: u_max must exceed 1e-6");
    }
    std::vector<double> u(static_cast<std::size_t>(samples));
    u[0] = 0.0;
    const double lo = std::log(u_min);
    const double hi = std::log(u_max);
    const int n = samples - 1;
    for (int k = 0; k < n; ++k) {
        u[k + 1] = std::exp(lo + (hi - lo) * k / (n - 1));
    }
    u.back() = u_max;
    return u;
}

namespace {

void require_subcritical(double p, double delta) {
    if (!(p >= 0.0) || !(p < 1.0)) {
        throw std::invalid_argument(
            "interpolation inequality: p must lie in [0, 1) (the bound reverses for p >= 1)");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("interpolation inequality: delta must be > 0");
    }
}

// u^2 (1 - delta ln^{1-p}(u+e)); its supremum is the smallest admissible C(delta).
double gap(double u, double p, double delta) {
    return u * u * (1.0 - delta * std::pow(std::log(u + std::numbers::e), 1.0 - p));
}

// Rounding slack for comparing u^2 against delta u^2 L^{1-p} + C.
double slack(double u) { return 16.0 * std::numeric_limits<double>::epsilon() * u * u; }

}  // namespace

InequalityReport verify_interpolation_inequality(double p, double delta, double u_max,
                                                 int samples) {
    require_subcritical(p, delta);
    const std::vector<double> u = log_spaced_samples(u_max, samples);

    InequalityReport rep;
    rep.p = p;
    rep.delta = delta;
    rep.u_max = u_max;
    rep.samples = samples;

    std::size_t best = 0;
    double best_gap = gap(u[0], p, delta);
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double g = gap(u[k], p, delta);
        if (g > best_gap) {
            best_gap = g;
            best = k;
        }
    }

    double arg = u[best];
    if (best_gap > 0.0 && best + 1 < u.size() && best > 0) {
        // Zoom on the bracket around the arg-max until the maximum stops moving.
        double lo = u[best - 1];
        double hi = u[best + 1];
        constexpr int points = 64;
        for (int level = 0; level < 200; ++level) {
            const double prev = best_gap;
            double new_lo = lo;
            double new_hi = hi;
            for (int k = 0; k <= points; ++k) {
                const double x = lo + (hi - lo) * k / points;
                const double g = gap(x, p, delta);
                if (g > best_gap) {
                    best_gap = g;
                    arg = x;
                }
            }
            const double step = (hi - lo) / points;
            new_lo = std::max(lo, arg - step);
            new_hi = std::min(hi, arg + step);
            lo = new_lo;
            hi = new_hi;
            rep.refinement_levels = level + 1;
            if (best_gap - prev <= 1e-15 * best_gap || hi - lo <= 4e-16 * arg) {
                break;
            }
        }
    }
    rep.argmax_u = arg;
    rep.argmax_at_boundary = (best + 1 == u.size());
    rep.c_delta = std::max(0.0, best_gap);

    rep.holds = true;
    rep.phi_bound_holds = true;
    for (double x : u) {
        if (gap(x, p, delta) > rep.c_delta + slack(x)) {
            rep.holds = false;
        }
        if (phi(x) > x) {
            rep.phi_bound_holds = false;
        }
    }
    return rep;
}

bool certify_interpolation_inequality(double p, double delta, double u_max, int samples,
                                      double c_delta) {
    require_subcritical(p, delta);
    for (double x : log_spaced_samples(u_max, samples)) {
        const double lhs = x * x;
        const double rhs = delta * x * x * std::pow(std::log(x + std::numbers::e), 1.0 - p) + c_delta;
        if (lhs > rhs + slack(x)) {
            return false;
        }
    }
    return true;
}

double empirical_gn_ratio(const Field& f) {
    f.require_finite("empirical_gn_ratio");
    if (f.min() < 0.0) {
        throw NumericalError("empirical_gn_ratio: field must be nonnegative");
    }
    Field sq(f.grid());
    Field shifted(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) {
        sq[k] = f[k] * f[k];
        shifted[k] = f[k] + std::numbers::e;
    }
    const double mass = integrate(shifted);
    return integrate(sq) / (weighted_gradient_sq_integral(f) * mass + mass * mass);
}

}  // namespace chemo
