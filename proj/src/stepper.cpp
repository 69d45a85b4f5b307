#include "chemo/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chemo {

DtMode parse_dt_mode(std::string_view name) {
    if (name == "fixed") {
        return DtMode::fixed;
    }
    if (name == "adaptive") {
        return DtMode::adaptive;
    }
    throw std::invalid_argument("unknown dt_mode '" + std::string(name) +
                                "' (expected fixed or adaptive)");
}

std::string_view to_string(DtMode mode) noexcept {
    return mode == DtMode::fixed ? "fixed" : "adaptive";
}

FluxAveraging parse_flux_averaging(std::string_view name) {
    if (name == "arithmetic") {
        return FluxAveraging::arithmetic;
    }
    if (name == "upwind") {
        return FluxAveraging::upwind;
    }
    throw std::invalid_argument("unknown flux averaging '" + std::string(name) +
                                "' (expected arithmetic or upwind)");
}

std::string_view to_string(FluxAveraging averaging) noexcept {
    return averaging == FluxAveraging::arithmetic ? "arithmetic" : "upwind";
}

std::string_view to_string(TerminationReason reason) noexcept {
    switch (reason) {
        case TerminationReason::completed:
            return "completed";
        case TerminationReason::blow_up_detected:
            return "blow_up_detected";
        case TerminationReason::positivity_failure:
            return "positivity_failure";
        case TerminationReason::solver_failure:
            return "solver_failure";
    }
    return "unknown";
}

void StepControls::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("StepControls: dt must be finite and > 0");
    }
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0) {
        throw std::invalid_argument("StepControls: cfl_safety must lie in (0, 1]");
    }
    if (!(pos_tol >= 0.0)) {
        throw std::invalid_argument("StepControls: pos_tol must be >= 0");
    }
    if (!(solver_tol > 0.0)) {
        throw std::invalid_argument("StepControls: solver_tol must be > 0");
    }
    if (!(blowup_threshold > 0.0)) {
        throw std::invalid_argument("StepControls: blowup_threshold must be > 0");
    }
}

Stepper::Stepper(const GridSpec& grid, const ModelParams& params, const StepControls& controls)
    : grid_(grid), params_(params), controls_(controls),
      solver_(grid, controls.backend, controls.solver_tol) {
    params_.validate();
    controls_.validate();
}

void Stepper::enforce_positivity(Field& f, const char* name, double t) const {
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] >= -controls_.pos_tol) {
            continue;
        }
        if (controls_.clamp_negatives) {
            f[k] = 0.0;
            continue;
        }
        const int i = static_cast<int>(k % static_cast<std::size_t>(grid_.nx()));
        const int j = static_cast<int>(k / static_cast<std::size_t>(grid_.nx()));
        std::ostringstream msg;
        msg << "positivity failure: " << name << " = " << f[k] << " at cell (" << i << ", " << j
            << "), t = " << t;
        throw PositivityFailure(msg.str(), name, i, j, f[k], t);
    }
    if (controls_.clamp_negatives) {
        for (double& v : f.values()) {
            v = std::max(v, 0.0);
        }
    }
}

State Stepper::step(const State& state, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("Stepper::step: dt must be > 0");
    }
    if (!(state.grid() == grid_)) {
        throw NumericalError("Stepper::step: state grid differs from stepper grid");
    }
    const double t_new = state.t + dt;

    Field u_star = chemotactic_divergence(state.u, state.v, controls_.flux);
    u_star *= -1.0;
    u_star += source_field(state.u, params_, controls_.pos_tol);
    u_star *= dt;
    u_star += state.u;

    Field w_star = chemotactic_divergence(state.w, state.z, controls_.flux);
    w_star *= -dt;
    w_star += state.w;

    if (!u_star.all_finite() || !w_star.all_finite()) {
        return State(std::move(u_star), state.v, std::move(w_star), state.z, t_new);
    }

    Field u_new = solver_.solve(1.0, dt, u_star);
    Field w_new = solver_.solve(1.0, dt, w_star);
    enforce_positivity(u_new, "u", t_new);
    enforce_positivity(w_new, "w", t_new);

    if (params_.tau == 0) {
        Field v_new = solver_.solve(1.0, 1.0, w_new);
        Field z_new = solver_.solve(1.0, 1.0, u_new);
        return State(std::move(u_new), std::move(v_new), std::move(w_new), std::move(z_new), t_new);
    }
    Field v_rhs = w_new;
    v_rhs *= dt;
    v_rhs += state.v;
    Field z_rhs = u_new;
    z_rhs *= dt;
    z_rhs += state.z;
    Field v_new = solver_.solve(1.0 + dt, dt, v_rhs);
    Field z_new = solver_.solve(1.0 + dt, dt, z_rhs);
    return State(std::move(u_new), std::move(v_new), std::move(w_new), std::move(z_new), t_new);
}

double Stepper::next_dt(const State& state) const {
    if (controls_.dt_mode == DtMode::fixed) {
        return controls_.dt;
    }
    // Explicit transport: a cell can lose mass through all four faces.
    const double h = std::min(grid_.hx(), grid_.hy());
    const double advect = 4.0 * std::max(max_face_gradient(state.v), max_face_gradient(state.z)) / h;
    double react = 0.0;
    if (params_.mu > 0.0) {
        for (double u : state.u.values()) {
            const double up = std::max(u, 0.0);
            const double rate = params_.p == 0.0
                                    ? params_.mu * up
                                    : params_.mu * up / std::pow(std::log(up + std::numbers::e),
                                                                 params_.p);
            react = std::max(react, rate);
        }
    }
    react += std::abs(params_.r);
    const double rate = advect + react;
    if (!(rate > 0.0)) {
        return controls_.dt;
    }
    return std::min(controls_.dt, controls_.cfl_safety / rate);
}

State Stepper::equilibrate_signals(State state) {
    state.v = solver_.solve(1.0, 1.0, state.w);
    state.z = solver_.solve(1.0, 1.0, state.u);
    return state;
}

State step(const State& state, const ModelParams& params, const StepControls& controls) {
    Stepper stepper(state.grid(), params, controls);
    return stepper.step(state, controls.dt);
}

State make_initial_state(Field u0, Field w0, std::optional<Field> v0, std::optional<Field> z0,
                         const ModelParams& params, EllipticBackend backend) {
    params.validate();
    require_same_grid(u0, w0, "make_initial_state");
    const GridSpec grid = u0.grid();
    HelmholtzSolver solver(grid, backend);
    Field v = (params.tau == 1 && v0) ? std::move(*v0) : solver.solve(1.0, 1.0, w0);
    Field z = (params.tau == 1 && z0) ? std::move(*z0) : solver.solve(1.0, 1.0, u0);
    return State(std::move(u0), std::move(v), std::move(w0), std::move(z), 0.0);
}

namespace {

bool state_finite(const State& s) {
    return s.u.all_finite() && s.v.all_finite() && s.w.all_finite() && s.z.all_finite();
}

}  // namespace

RunResult run(const State& initial, const ModelParams& params, const StepControls& controls,
              const RunOptions& options) {
    if (options.t_end < initial.t) {
        throw std::invalid_argument("run: t_end precedes the initial time");
    }
    Stepper stepper(initial.grid(), params, controls);

    RunResult result(initial);
    State& state = result.final_state;

    std::vector<double> stops;
    for (double s : options.stop_times) {
        if (s > initial.t && s <= options.t_end) {
            stops.push_back(s);
        }
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    std::size_t next_stop = 0;
    if (options.on_stop_time) {
        for (double s : options.stop_times) {
            if (s == initial.t) {
                options.on_stop_time(state);
                break;
            }
        }
    }

    auto emit = [&](const DiagnosticsRecord& rec) {
        result.table.push_back(rec);
        for (const auto& obs : options.observers) {
            obs(state, rec);
        }
    };
    auto track = [&](const DiagnosticsRecord& rec) {
        result.peak_linf_u = std::max(result.peak_linf_u, rec.linf_u);
        result.peak_energy = std::max(result.peak_energy, rec.energy_y);
    };

    if (auto report = detect_blowup(state, controls.blowup_threshold)) {
        result.reason = TerminationReason::blow_up_detected;
        result.blowup = report;
        result.message = "initial data already exceed the blow-up threshold";
        if (state_finite(state)) {
            const auto rec = record(state, options.energy, params, 0.0, controls.pos_tol);
            track(rec);
            emit(rec);
        }
        return result;
    }

    DiagnosticsRecord rec = record(state, options.energy, params, 0.0, controls.pos_tol);
    track(rec);
    emit(rec);
    const bool every_step = !(options.record_interval > 0.0);
    double next_record = initial.t + options.record_interval;
    bool last_emitted = true;

    const double t_eps = 1e-12 * std::max(1.0, std::abs(options.t_end));
    while (options.t_end - state.t > t_eps) {
        if (result.steps >= options.max_steps) {
            result.reason = TerminationReason::solver_failure;
            result.message = "step budget exhausted before t_end";
            break;
        }
        double dt = stepper.next_dt(state);
        double target = options.t_end;
        while (next_stop < stops.size() && stops[next_stop] <= state.t + t_eps) {
            ++next_stop;
        }
        if (next_stop < stops.size()) {
            target = std::min(target, stops[next_stop]);
        }
        bool lands = false;
        if (state.t + dt >= target - 1e-9 * dt) {
            dt = target - state.t;
            lands = true;
        }

        State next(state.grid());
        try {
            next = stepper.step(state, dt);
        } catch (const PositivityFailure& e) {
            result.reason = TerminationReason::positivity_failure;
            result.message = e.what();
            break;
        } catch (const SolverFailure& e) {
            result.reason = TerminationReason::solver_failure;
            result.message = e.what();
            break;
        } catch (const NumericalError& e) {
            result.reason = TerminationReason::solver_failure;
            result.message = e.what();
            break;
        }
        if (lands) {
            next.t = target;
        }
        state = std::move(next);
        ++result.steps;
        last_emitted = false;

        if (auto report = detect_blowup(state, controls.blowup_threshold)) {
            result.reason = TerminationReason::blow_up_detected;
            result.blowup = report;
            std::ostringstream msg;
            msg << "blow-up detected at t = " << report->t << ": " << report->field << " = "
                << report->max_value << " at cell (" << report->i << ", " << report->j << ")";
            result.message = msg.str();
            if (state_finite(state)) {
                rec = record(state, options.energy, params, dt, controls.pos_tol);
                track(rec);
                emit(rec);
            }
            return result;
        }

        rec = record(state, options.energy, params, dt, controls.pos_tol);
        track(rec);
        if (every_step || state.t >= next_record - t_eps) {
            emit(rec);
            last_emitted = true;
            while (!every_step && next_record <= state.t + t_eps) {
                next_record += options.record_interval;
            }
        }
        if (lands && next_stop < stops.size() && target == stops[next_stop]) {
            if (options.on_stop_time) {
                options.on_stop_time(state);
            }
            ++next_stop;
        }
    }
    if (!last_emitted) {
        emit(rec);
    }
    return result;
}

}  // namespace chemo
