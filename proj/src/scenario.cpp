#include "chemo/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace chemo {

using nlohmann::json;

int exit_code_for(TerminationReason reason) noexcept {
    switch (reason) {
        case TerminationReason::completed:
            return exit_code::completed;
        case TerminationReason::blow_up_detected:
            return exit_code::blow_up;
        case TerminationReason::positivity_failure:
            return exit_code::positivity;
        case TerminationReason::solver_failure:
            return exit_code::solver;
    }
    return exit_code::solver;
}

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

namespace {

// Strict view over one JSON object: reads are tracked, leftovers are errors.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    [[nodiscard]] std::string key(const std::string& name) const {
        return path_.empty() ? name : path_ + "." + name;
    }

    [[nodiscard]] const json& at(const std::string& name) {
        seen_.insert(name);
        const auto it = obj_.find(name);
        if (it == obj_.end()) {
            throw ConfigError(key(name), "missing required key");
        }
        return *it;
    }

    [[nodiscard]] bool has(const std::string& name) const { return obj_.contains(name); }

    double number(const std::string& name) {
        const json& v = at(name);
        if (!v.is_number()) {
            throw ConfigError(key(name), "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError(key(name), "must be finite");
        }
        return d;
    }

    std::optional<double> opt_number(const std::string& name) {
        if (!has(name)) {
            seen_.insert(name);
            return std::nullopt;
        }
        return number(name);
    }

    std::int64_t integer(const std::string& name) {
        const double d = number(name);
        if (std::floor(d) != d || std::abs(d) > 9.0e15) {
            throw ConfigError(key(name), "expected an integer");
        }
        return static_cast<std::int64_t>(d);
    }

    bool boolean(const std::string& name) {
        const json& v = at(name);
        if (!v.is_boolean()) {
            throw ConfigError(key(name), "expected true or false");
        }
        return v.get<bool>();
    }

    std::string string(const std::string& name) {
        const json& v = at(name);
        if (!v.is_string()) {
            throw ConfigError(key(name), "expected a string");
        }
        return v.get<std::string>();
    }

    std::optional<std::string> opt_string(const std::string& name) {
        if (!has(name)) {
            seen_.insert(name);
            return std::nullopt;
        }
        return string(name);
    }

    Section section(const std::string& name) { return Section(at(name), key(name)); }

    void finish() const {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) {
                throw ConfigError(key(k), "unknown key");
            }
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename Fn>
auto checked(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
}

Generator parse_generator(Section s) {
    const std::string name = s.string("generator");
    Generator gen;
    if (name == "constant") {
        gen = ConstantGen{s.number("value")};
    } else if (name == "gaussian_bump") {
        GaussianBumpGen g;
        const json& center = s.at("center");
        if (!center.is_array() || center.size() != 2 || !center[0].is_number() ||
            !center[1].is_number()) {
            throw ConfigError(s.key("center"), "expected [x, y]");
        }
        g.cx = center[0].get<double>();
        g.cy = center[1].get<double>();
        g.width = s.number("width");
        if (!(g.width > 0.0)) {
            throw ConfigError(s.key("width"), "must be > 0");
        }
        g.amplitude = s.opt_number("amplitude");
        g.mass = s.opt_number("mass");
        if (g.amplitude.has_value() == g.mass.has_value()) {
            throw ConfigError(s.key("amplitude"), "give exactly one of amplitude or mass");
        }
        gen = g;
    } else if (name == "cosine_modes") {
        CosineModesGen g;
        g.offset = s.opt_number("offset").value_or(0.0);
        const json& modes = s.at("modes");
        if (!modes.is_array()) {
            throw ConfigError(s.key("modes"), "expected a list of [kx, ky, amplitude]");
        }
        for (const json& m : modes) {
            if (!m.is_array() || m.size() != 3 || !m[0].is_number_integer() ||
                !m[1].is_number_integer() || !m[2].is_number()) {
                throw ConfigError(s.key("modes"), "each mode must be [kx, ky, amplitude]");
            }
            const CosineMode mode{m[0].get<int>(), m[1].get<int>(), m[2].get<double>()};
            if (mode.kx < 0 || mode.ky < 0) {
                throw ConfigError(s.key("modes"), "wave numbers must be >= 0");
            }
            g.modes.push_back(mode);
        }
        gen = g;
    } else if (name == "rectified_random") {
        RectifiedRandomGen g;
        if (s.has("seed")) {
            const auto seed = s.integer("seed");
            if (seed < 0) {
                throw ConfigError(s.key("seed"), "must be >= 0");
            }
            g.seed = static_cast<std::uint64_t>(seed);
        }
        g.cutoff = static_cast<int>(s.integer("cutoff"));
        if (g.cutoff < 0) {
            throw ConfigError(s.key("cutoff"), "must be >= 0");
        }
        g.amplitude = s.opt_number("amplitude").value_or(1.0);
        g.offset = s.opt_number("offset").value_or(0.0);
        gen = g;
    } else {
        throw ConfigError(s.key("generator"),
                          "unknown generator '" + name +
                              "' (expected constant, gaussian_bump, cosine_modes, rectified_random)");
    }
    s.finish();
    return gen;
}

std::vector<double> parse_number_list(const json& v, const std::string& key) {
    if (!v.is_array()) {
        throw ConfigError(key, "expected a list of numbers");
    }
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) {
            throw ConfigError(key, "expected a list of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    ScenarioConfig cfg;
    Section root(doc, "");

    {
        Section g = root.section("grid");
        cfg.nx = static_cast<int>(g.integer("nx"));
        cfg.ny = static_cast<int>(g.integer("ny"));
        cfg.lx = g.number("lx");
        cfg.ly = g.number("ly");
        g.finish();
        (void)checked("grid", [&] { return cfg.grid(); });
    }
    {
        Section m = root.section("model");
        cfg.model.tau = static_cast<int>(m.integer("tau"));
        cfg.model.r = m.number("r");
        cfg.model.mu = m.number("mu");
        cfg.model.p = m.number("p");
        m.finish();
        checked("model", [&] {
            cfg.model.validate();
            return 0;
        });
    }
    {
        Section c = root.section("controls");
        cfg.controls.dt = c.number("dt");
        cfg.controls.dt_mode = checked(c.key("dt_mode"), [&] { return parse_dt_mode(c.string("dt_mode")); });
        cfg.controls.cfl_safety = c.number("cfl_safety");
        cfg.t_end = c.number("t_end");
        cfg.controls.pos_tol = c.number("pos_tol");
        cfg.controls.clamp_negatives = c.boolean("clamp_negatives");
        if (auto flux = c.opt_string("flux")) {
            cfg.controls.flux = checked(c.key("flux"), [&] { return parse_flux_averaging(*flux); });
        }
        if (auto solver = c.opt_string("solver")) {
            cfg.controls.backend = checked(c.key("solver"), [&] { return parse_backend(*solver); });
        }
        cfg.controls.solver_tol = c.opt_number("solver_tol").value_or(cfg.controls.solver_tol);
        cfg.controls.blowup_threshold =
            c.opt_number("blowup_threshold").value_or(cfg.controls.blowup_threshold);
        c.finish();
        checked("controls", [&] {
            cfg.controls.validate();
            return 0;
        });
        if (!(cfg.t_end > 0.0)) {
            throw ConfigError("controls.t_end", "must be > 0");
        }
    }
    {
        Section e = root.section("energy");
        cfg.c_gn = e.number("c_gn");
        e.finish();
        if (!(cfg.c_gn > 0.0)) {
            throw ConfigError("energy.c_gn", "must be > 0");
        }
    }
    {
        Section init = root.section("initial_data");
        cfg.u0 = parse_generator(init.section("u"));
        cfg.w0 = parse_generator(init.section("w"));
        for (const char* name : {"v", "z"}) {
            if (!init.has(name)) {
                continue;
            }
            if (cfg.model.tau != 1) {
                throw ConfigError(init.key(name), "initial signals are only accepted when tau = 1");
            }
            auto gen = parse_generator(init.section(name));
            (name[0] == 'v' ? cfg.v0 : cfg.z0) = gen;
        }
        init.finish();
    }
    {
        Section o = root.section("output");
        cfg.output.directory = o.string("directory");
        cfg.output.cadence = o.number("cadence");
        if (cfg.output.cadence < 0.0) {
            throw ConfigError("output.cadence", "must be >= 0");
        }
        cfg.output.snapshot_times = parse_number_list(o.at("snapshot_times"), o.key("snapshot_times"));
        for (double t : cfg.output.snapshot_times) {
            if (t < 0.0 || t > cfg.t_end) {
                throw ConfigError("output.snapshot_times", "times must lie in [0, t_end]");
            }
        }
        o.finish();
    }
    {
        const auto seed = root.integer("seed");
        if (seed < 0) {
            throw ConfigError("seed", "must be >= 0");
        }
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    root.finish();
    return cfg;
}

json load_config_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return parse_config(load_config_json(path));
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& dir) {
    if (const char* root = std::getenv("CHEMO_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
        return std::filesystem::path(root) / dir.relative_path();
    }
    return dir;
}

Field rectified_random_field(const GridSpec& grid, std::uint64_t seed, int cutoff,
                             double amplitude, double offset) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<CosineMode> modes;
    for (int ky = 0; ky <= cutoff; ++ky) {
        for (int kx = 0; kx <= cutoff; ++kx) {
            modes.push_back({kx, ky, amplitude * coef(rng)});
        }
    }
    const double lx = grid.lx();
    const double ly = grid.ly();
    Field f = Field::sample(grid, [&](double x, double y) {
        double s = offset;
        for (const auto& m : modes) {
            s += m.amplitude * std::cos(m.kx * std::numbers::pi * x / lx) *
                 std::cos(m.ky * std::numbers::pi * y / ly);
        }
        return s;
    });
    for (double& v : f.values()) {
        v = std::max(v, 0.0);
    }
    return f;
}

Field generate_field(const GridSpec& grid, const Generator& gen, std::uint64_t scenario_seed,
                     int slot) {
    struct Visitor {
        const GridSpec& grid;
        std::uint64_t seed;
        int slot;

        Field operator()(const ConstantGen& g) const { return Field(grid, g.value); }

        Field operator()(const GaussianBumpGen& g) const {
            const double two_w2 = 2.0 * g.width * g.width;
            Field f = Field::sample(grid, [&](double x, double y) {
                const double dx = x - g.cx;
                const double dy = y - g.cy;
                return std::exp(-(dx * dx + dy * dy) / two_w2);
            });
            if (g.mass) {
                f *= *g.mass / integrate(f);
            } else {
                f *= *g.amplitude;
            }
            return f;
        }

        Field operator()(const CosineModesGen& g) const {
            const double lx = grid.lx();
            const double ly = grid.ly();
            return Field::sample(grid, [&](double x, double y) {
                double s = g.offset;
                for (const auto& m : g.modes) {
                    s += m.amplitude * std::cos(m.kx * std::numbers::pi * x / lx) *
                         std::cos(m.ky * std::numbers::pi * y / ly);
                }
                return s;
            });
        }

        Field operator()(const RectifiedRandomGen& g) const {
            const std::uint64_t s =
                g.seed.value_or(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(slot));
            return rectified_random_field(grid, s, g.cutoff, g.amplitude, g.offset);
        }
    };
    return std::visit(Visitor{grid, scenario_seed, slot}, gen);
}

namespace {

void write_snapshot(const std::filesystem::path& dir, const State& s) {
    const GridSpec& g = s.grid();
    const std::array<std::pair<const char*, const Field*>, 4> fields{
        {{"u", &s.u}, {"v", &s.v}, {"w", &s.w}, {"z", &s.z}}};
    for (const auto& [name, field] : fields) {
        std::ostringstream fname;
        fname << name << "_t" << format_number(s.t) << ".txt";
        std::ofstream out(dir / fname.str());
        if (!out) {
            throw std::runtime_error("cannot write snapshot " + (dir / fname.str()).string());
        }
        out << "# nx ny lx ly t field\n";
        out << "# " << g.nx() << ' ' << g.ny() << ' ' << format_number(g.lx()) << ' '
            << format_number(g.ly()) << ' ' << format_number(s.t) << ' ' << name << '\n';
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                if (i > 0) {
                    out << ' ';
                }
                out << format_number((*field)(i, j));
            }
            out << '\n';
        }
    }
}

json energy_json(const std::optional<EnergyParams>& ep) {
    if (!ep) {
        return nullptr;
    }
    return json{{"c_gn", ep->c_gn},     {"epsilon", ep->epsilon}, {"a_coef", ep->a_coef},
                {"b_coef", ep->b_coef}, {"w0_mass", ep->w0_mass}, {"area", ep->area}};
}

void check_nonnegative(const Field& f, const char* key) {
    if (!f.all_finite()) {
        throw ConfigError(key, "initial data must be finite");
    }
    if (f.min() < 0.0) {
        throw ConfigError(key, "initial data must be nonnegative");
    }
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    const GridSpec grid = cfg.grid();
    Field u0 = generate_field(grid, cfg.u0, cfg.seed, 0);
    Field w0 = generate_field(grid, cfg.w0, cfg.seed, 1);
    check_nonnegative(u0, "initial_data.u");
    check_nonnegative(w0, "initial_data.w");
    std::optional<Field> v0;
    std::optional<Field> z0;
    if (cfg.v0) {
        v0 = generate_field(grid, *cfg.v0, cfg.seed, 2);
    }
    if (cfg.z0) {
        z0 = generate_field(grid, *cfg.z0, cfg.seed, 3);
    }

    std::vector<std::string> warnings = cfg.model.warnings();
    std::optional<EnergyParams> energy;
    if (cfg.model.mu > 0.0) {
        energy = make_energy_params(cfg.model, integrate(w0), grid.area(), cfg.c_gn);
    } else {
        warnings.emplace_back(
            "mu = 0: energy coefficients undefined, energy_y omits the signal-gradient terms");
    }

    const State initial = make_initial_state(std::move(u0), std::move(w0), std::move(v0),
                                             std::move(z0), cfg.model, cfg.controls.backend);

    const std::filesystem::path out_dir = resolve_output_dir(cfg.output.directory);
    std::filesystem::create_directories(out_dir);

    std::ofstream csv(out_dir / "diagnostics.csv", std::ios::trunc);
    if (!csv) {
        throw std::runtime_error("cannot write " + (out_dir / "diagnostics.csv").string());
    }
    {
        const auto& names = DiagnosticsRecord::column_names();
        for (std::size_t k = 0; k < names.size(); ++k) {
            csv << (k ? "," : "") << names[k];
        }
        csv << '\n';
    }

    double gn_ratio_max = 0.0;
    RunOptions opts;
    opts.t_end = cfg.t_end;
    opts.record_interval = cfg.output.cadence;
    opts.stop_times = cfg.output.snapshot_times;
    opts.energy = energy;
    opts.on_stop_time = [&](const State& s) { write_snapshot(out_dir, s); };
    opts.observers.emplace_back([&](const State& s, const DiagnosticsRecord& rec) {
        const auto vals = rec.values();
        for (std::size_t k = 0; k < vals.size(); ++k) {
            csv << (k ? "," : "") << format_number(vals[k]);
        }
        csv << '\n';
        csv.flush();
        if (s.w.min() >= 0.0) {
            gn_ratio_max = std::max(gn_ratio_max, empirical_gn_ratio(s.w));
        }
    });

    ScenarioOutcome outcome{run(initial, cfg.model, cfg.controls, opts), energy, gn_ratio_max,
                            std::move(warnings), 0, out_dir};
    outcome.exit_code = exit_code_for(outcome.result.reason);
    if (outcome.gn_ratio_max > cfg.c_gn) {
        std::ostringstream msg;
        msg << "c_gn = " << cfg.c_gn << " is below the empirical Gagliardo-Nirenberg ratio "
            << outcome.gn_ratio_max << " observed on w";
        outcome.warnings.push_back(msg.str());
    }

    json summary;
    summary["termination_reason"] = std::string(to_string(outcome.result.reason));
    summary["exit_code"] = outcome.exit_code;
    summary["final_t"] = outcome.result.final_state.t;
    summary["steps"] = outcome.result.steps;
    summary["peak_linf_u"] = outcome.result.peak_linf_u;
    summary["peak_energy_y"] = outcome.result.peak_energy;
    summary["energy_params"] = energy_json(outcome.energy);
    summary["theorem_regime"] = cfg.model.theorem_regime();
    summary["gn_ratio_max"] = outcome.gn_ratio_max;
    summary["warnings"] = outcome.warnings;
    summary["message"] = outcome.result.message;
    if (const auto& b = outcome.result.blowup) {
        summary["blowup"] = json{{"t", b->t},
                                 {"field", b->field},
                                 {"max_value", std::isfinite(b->max_value) ? json(b->max_value)
                                                                           : json(format_number(b->max_value))},
                                 {"i", b->i},
                                 {"j", b->j},
                                 {"non_finite", b->non_finite}};
    } else {
        summary["blowup"] = nullptr;
    }
    std::ofstream(outcome.output_dir / "summary.json") << summary.dump(2) << '\n';
    return outcome;
}

SweepAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError(spec, "axis must look like key=v1,v2,...");
    }
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    std::stringstream rest(spec.substr(eq + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw ConfigError(axis.key, "cannot parse sweep value '" + item + "'");
        }
        axis.values.push_back(v);
    }
    if (axis.values.empty()) {
        throw ConfigError(axis.key, "sweep axis has no values");
    }
    return axis;
}

namespace {

void set_leaf(json& doc, const std::string& dotted, double value) {
    json* node = &doc;
    std::stringstream ss(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        parts.push_back(part);
    }
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!node->is_object() || !node->contains(parts[k])) {
            throw ConfigError(dotted, "sweep key does not address an existing config entry");
        }
        node = &(*node)[parts[k]];
    }
    if (!node->is_number()) {
        throw ConfigError(dotted, "sweep key must address a numeric entry");
    }
    if (std::floor(value) == value && std::abs(value) < 9.0e15 && node->is_number_integer()) {
        *node = static_cast<std::int64_t>(value);
    } else {
        *node = value;
    }
}

}  // namespace

std::vector<SweepCell> run_sweep(const json& base, const SweepAxis& axis1,
                                 const std::optional<SweepAxis>& axis2, unsigned threads) {
    const ScenarioConfig base_cfg = parse_config(base);
    const std::filesystem::path root = resolve_output_dir(base_cfg.output.directory);

    const std::size_t n2 = axis2 ? axis2->values.size() : 1;
    std::vector<SweepCell> cells;
    std::vector<ScenarioConfig> configs;
    for (std::size_t i = 0; i < axis1.values.size(); ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            json doc = base;
            SweepCell cell;
            cell.i = i;
            cell.j = j;
            cell.value1 = axis1.values[i];
            std::ostringstream id;
            id << "cell_" << i << '_' << j;
            try {
                set_leaf(doc, axis1.key, axis1.values[i]);
                if (axis2) {
                    cell.value2 = axis2->values[j];
                    set_leaf(doc, axis2->key, axis2->values[j]);
                }
                doc["output"]["directory"] = (base_cfg.output.directory / id.str()).string();
                configs.push_back(parse_config(doc));
            } catch (const ConfigError& e) {
                throw ConfigError(id.str() + "." + e.key(), e.reason());
            }
            cells.push_back(cell);
        }
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            try {
                const auto start = std::chrono::steady_clock::now();
                const ScenarioOutcome out = run_scenario(configs[k]);
                const auto stop = std::chrono::steady_clock::now();
                cells[k].reason = out.result.reason;
                cells[k].exit_code = out.exit_code;
                cells[k].peak_linf_u = out.result.peak_linf_u;
                cells[k].peak_energy = out.result.peak_energy;
                cells[k].runtime_s = std::chrono::duration<double>(stop - start).count();
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    std::filesystem::create_directories(root);
    std::ofstream csv(root / "sweep.csv", std::ios::trunc);
    csv << "cell_i,cell_j," << axis1.key << ',' << (axis2 ? axis2->key : std::string("axis2"))
        << ",termination_reason,exit_code,peak_linf_u,peak_energy_y,runtime_s\n";
    for (const auto& c : cells) {
        csv << c.i << ',' << c.j << ',' << format_number(c.value1) << ','
            << (c.value2 ? format_number(*c.value2) : std::string()) << ',' << to_string(c.reason)
            << ',' << c.exit_code << ',' << format_number(c.peak_linf_u) << ','
            << format_number(c.peak_energy) << ',' << format_number(c.runtime_s) << '\n';
    }
    return cells;
}

VerifyReport verify_command(double p, const std::vector<double>& deltas, double u_max,
                            int samples, const std::filesystem::path& out_dir) {
    if (!(p >= 0.0) || !(p < 1.0)) {
        throw ConfigError("p", "must lie in [0, 1)");
    }
    if (deltas.empty()) {
        throw ConfigError("delta", "need at least one delta");
    }
    VerifyReport rep;
    rep.p = p;
    rep.u_max = u_max;
    rep.samples = samples;
    rep.recertify_samples = 10 * samples;
    rep.all_pass = true;

    json rows = json::array();
    bool phi_ok = true;
    for (double delta : deltas) {
        const InequalityReport r = checked("delta", [&] {
            return verify_interpolation_inequality(p, delta, u_max, samples);
        });
        const bool recert =
            certify_interpolation_inequality(p, delta, u_max, rep.recertify_samples, r.c_delta);
        const bool pass = r.holds && recert && r.phi_bound_holds;
        rep.all_pass = rep.all_pass && pass;
        phi_ok = phi_ok && r.phi_bound_holds;
        rep.rows.push_back(r);
        rep.recertified.push_back(recert);
        rows.push_back(json{{"delta", delta},
                            {"c_delta", r.c_delta},
                            {"argmax_u", r.argmax_u},
                            {"argmax_at_boundary", r.argmax_at_boundary},
                            {"refinement_levels", r.refinement_levels},
                            {"holds", r.holds},
                            {"recertified_10x", recert},
                            {"pass", pass}});
    }

    json doc{{"p", p},
             {"u_max", u_max},
             {"samples", samples},
             {"recertify_samples", rep.recertify_samples},
             {"rows", rows},
             {"phi_bound_holds", phi_ok},
             {"all_pass", rep.all_pass}};
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "inequalities.json") << doc.dump(2) << '\n';
    return rep;
}

}  // namespace chemo
