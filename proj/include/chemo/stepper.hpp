#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemo/diagnostics.hpp"
#include "chemo/elliptic.hpp"
#include "chemo/grid.hpp"
#include "chemo/model.hpp"

namespace chemo {

enum class DtMode { fixed, adaptive };

[[nodiscard]] DtMode parse_dt_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(DtMode mode) noexcept;
[[nodiscard]] FluxAveraging parse_flux_averaging(std::string_view name);
[[nodiscard]] std::string_view to_string(FluxAveraging averaging) noexcept;

struct StepControls {
    double dt = 1e-3;  // fixed step, or the ceiling in adaptive mode
    DtMode dt_mode = DtMode::fixed;
    double cfl_safety = 0.4;
    double pos_tol = 1e-10;
    bool clamp_negatives = false;
    FluxAveraging flux = FluxAveraging::arithmetic;
    EllipticBackend backend = EllipticBackend::dct;
    double solver_tol = 1e-10;
    double blowup_threshold = 1e5;

    void validate() const;
};

/// u or w dropped below -pos_tol with clamping disabled.
class PositivityFailure : public NumericalError {
public:
    PositivityFailure(const std::string& what, std::string field, int i, int j, double value,
                      double t)
        : NumericalError(what), field_(std::move(field)), i_(i), j_(j), value_(value), t_(t) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] int i() const noexcept { return i_; }
    [[nodiscard]] int j() const noexcept { return j_; }
    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] double t() const noexcept { return t_; }

private:
    std::string field_;
    int i_;
    int j_;
    double value_;
    double t_;
};

/**
 * First-order IMEX stepper.
 *
 *  1. explicit: u* = u + dt (-div(u grad v) + f(u)),  w* = w + dt (-div(w grad z))
 *  2. implicit diffusion: (I - dt Lap) u+ = u*, same for w
 *  3. signals: tau = 0 solves (I - Lap) v+ = w+, (I - Lap) z+ = u+;
 *              tau = 1 solves ((1+dt) I - dt Lap) v+ = v + dt w+, likewise z+ from u+
 *
 * v and z entering step 1 are the old values. If step 1 overflows, the
 * returned state carries the non-finite u*, w* so the caller can report a blow-up.
 */
class Stepper {
public:
    Stepper(const GridSpec& grid, const ModelParams& params, const StepControls& controls);

    [[nodiscard]] State step(const State& state, double dt);

    /// Step size for the next step: controls.dt when fixed, the stability bound otherwise.
    [[nodiscard]] double next_dt(const State& state) const;

    /// Signals consistent with (u, w): elliptic solves when tau = 0.
    [[nodiscard]] State equilibrate_signals(State state);

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const StepControls& controls() const noexcept { return controls_; }

private:
    void enforce_positivity(Field& f, const char* name, double t) const;

    GridSpec grid_;
    ModelParams params_;
    StepControls controls_;
    HelmholtzSolver solver_;
};

/// Convenience single step with a freshly built stepper and controls.dt.
[[nodiscard]] State step(const State& state, const ModelParams& params,
                         const StepControls& controls);

/**
 * Builds the initial state. With tau = 0 the signals always come from the
 * elliptic solves. With tau = 1 missing v0/z0 default to those solves.
 */
[[nodiscard]] State make_initial_state(Field u0, Field w0, std::optional<Field> v0,
                                       std::optional<Field> z0, const ModelParams& params,
                                       EllipticBackend backend = EllipticBackend::dct);

enum class TerminationReason { completed, blow_up_detected, positivity_failure, solver_failure };

[[nodiscard]] std::string_view to_string(TerminationReason reason) noexcept;

using Observer = std::function<void(const State&, const DiagnosticsRecord&)>;

struct RunOptions {
    double t_end = 0.0;
    /// Time between table rows; 0 records every step. First and last states are always recorded.
    double record_interval = 0.0;
    /// Times the stepper lands on exactly; on_stop_time fires at each.
    std::vector<double> stop_times;
    std::function<void(const State&)> on_stop_time;
    std::optional<EnergyParams> energy;
    std::vector<Observer> observers;  // called on every recorded row
    std::int64_t max_steps = 50'000'000;
};

struct RunResult {
    explicit RunResult(State initial) : final_state(std::move(initial)) {}

    State final_state;
    TerminationReason reason = TerminationReason::completed;
    std::vector<DiagnosticsRecord> table;
    std::optional<BlowupReport> blowup;
    std::string message;
    std::int64_t steps = 0;
    double peak_linf_u = 0.0;  // over every step, not only recorded rows
    double peak_energy = 0.0;
};

[[nodiscard]] RunResult run(const State& initial, const ModelParams& params,
                            const StepControls& controls, const RunOptions& options);

}  // namespace chemo
