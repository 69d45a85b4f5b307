#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chemo/diagnostics.hpp"
#include "chemo/grid.hpp"
#include "chemo/model.hpp"
#include "chemo/stepper.hpp"

namespace chemo {

/// Invalid scenario configuration; what() names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& reason)
        : std::runtime_error(key + ": " + reason), key_(std::move(key)), reason_(reason) {}
    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

namespace exit_code {
inline constexpr int completed = 0;
inline constexpr int config_error = 2;
inline constexpr int blow_up = 10;
inline constexpr int positivity = 11;
inline constexpr int solver = 12;
}  // namespace exit_code

[[nodiscard]] int exit_code_for(TerminationReason reason) noexcept;

// Initial-data generators.
struct ConstantGen {
    double value = 0.0;
};
struct GaussianBumpGen {
    double cx = 0.5;
    double cy = 0.5;
    double width = 0.1;
    std::optional<double> amplitude;
    std::optional<double> mass;  // rescales the sampled bump to this discrete integral
};
struct CosineMode {
    int kx = 0;
    int ky = 0;
    double amplitude = 0.0;
};
struct CosineModesGen {
    double offset = 0.0;
    std::vector<CosineMode> modes;
};
struct RectifiedRandomGen {
    std::optional<std::uint64_t> seed;  // defaults to the scenario seed mixed with the field slot
    int cutoff = 4;
    double amplitude = 1.0;
    double offset = 0.0;
};
using Generator = std::variant<ConstantGen, GaussianBumpGen, CosineModesGen, RectifiedRandomGen>;

/// Samples a generator on the grid. slot distinguishes fields drawing from one scenario seed.
[[nodiscard]] Field generate_field(const GridSpec& grid, const Generator& gen,
                                   std::uint64_t scenario_seed, int slot);

/// Sum of low cosine modes (kx, ky <= cutoff) with uniform amplitudes, clipped at zero.
[[nodiscard]] Field rectified_random_field(const GridSpec& grid, std::uint64_t seed, int cutoff,
                                           double amplitude = 1.0, double offset = 0.0);

struct OutputSpec {
    std::filesystem::path directory;
    double cadence = 0.0;  // time between diagnostics rows; 0 = every step
    std::vector<double> snapshot_times;
};

struct ScenarioConfig {
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    ModelParams model;
    StepControls controls;
    double t_end = 1.0;
    double c_gn = 1.0;
    Generator u0;
    Generator w0;
    std::optional<Generator> v0;
    std::optional<Generator> z0;
    OutputSpec output;
    std::uint64_t seed = 0;

    [[nodiscard]] GridSpec grid() const { return GridSpec(nx, ny, lx, ly); }
};

/// Strict parse: every documented key required, unknown keys rejected.
[[nodiscard]] ScenarioConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json load_config_json(const std::filesystem::path& path);
[[nodiscard]] ScenarioConfig load_config(const std::filesystem::path& path);

/// Output directory after applying the CHEMO_OUTPUT_ROOT override, if set.
[[nodiscard]] std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

/// Locale-independent, 17 significant digits, scientific notation.
[[nodiscard]] std::string format_number(double value);

struct ScenarioOutcome {
    RunResult result;
    std::optional<EnergyParams> energy;
    double gn_ratio_max = 0.0;
    std::vector<std::string> warnings;
    int exit_code = 0;
    std::filesystem::path output_dir;
};

/**
 * Builds the initial state, runs to t_end and writes, under the output directory,
 *   diagnostics.csv   header + one row per cadence tick (streamed as the run goes)
 *   <field>_t<time>.txt  snapshots at the requested times
 *   summary.json      termination reason, final t, peaks, energy coefficients
 */
ScenarioOutcome run_scenario(const ScenarioConfig& config);

struct SweepAxis {
    std::string key;  // dotted path to a numeric leaf, e.g. "model.p"
    std::vector<double> values;
};

/// Parses "key=v1,v2,...".
[[nodiscard]] SweepAxis parse_axis(const std::string& spec);

struct SweepCell {
    std::size_t i = 0;
    std::size_t j = 0;
    double value1 = 0.0;
    std::optional<double> value2;
    TerminationReason reason = TerminationReason::completed;
    int exit_code = 0;
    double peak_linf_u = 0.0;
    double peak_energy = 0.0;
    double runtime_s = 0.0;
};

/**
 * Runs every (axis1 x axis2) cell into <output>/cell_<i>_<j>/ and writes
 * sweep.csv sorted by cell index. All cell configs are validated before any
 * run starts; a bad cell raises ConfigError naming it.
 */
std::vector<SweepCell> run_sweep(const nlohmann::json& base, const SweepAxis& axis1,
                                 const std::optional<SweepAxis>& axis2, unsigned threads = 0);

struct VerifyReport {
    double p = 0.0;
    double u_max = 0.0;
    int samples = 0;
    int recertify_samples = 0;
    std::vector<InequalityReport> rows;
    std::vector<bool> recertified;
    bool all_pass = false;
};

/// Scans every delta, re-certifies each C(delta) at 10x the samples and writes inequalities.json.
VerifyReport verify_command(double p, const std::vector<double>& deltas, double u_max,
                            int samples, const std::filesystem::path& out_dir);

}  // namespace chemo
