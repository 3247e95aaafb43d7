#pragma once

// Run configuration and the command implementations behind the adiabound tool.
//
// Configs are JSON documents with "schema_version": 1; every key is checked and
// unknown keys are rejected. Datasets are written as CSV (17 significant
// digits) or JSON; nothing time- or host-dependent enters the output, so equal
// configs give byte-identical files.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "adiabound/bounds.hpp"
#include "adiabound/dynamics.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/models.hpp"
#include "adiabound/noise.hpp"
#include "adiabound/schedule.hpp"
#include "adiabound/verify.hpp"

namespace adiabound::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kPropertyFailure = 3 };

enum class ModelKind { tong, flux, custom };

struct RunConfig {
    ModelKind model = ModelKind::tong;
    TongModel tong;
    FluxQubitModel flux;
    std::optional<FluxNoiseSpec> noise;
    std::vector<std::uint64_t> seeds;
    std::optional<FluxNoiseAmplitudes> amplitudes;
    std::optional<EndpointOverlaps> overlaps;
    std::optional<double> c1;
    std::vector<double> custom_a;
    std::vector<double> custom_b;
    std::vector<double> taus;
    std::optional<double> tolerance;
    std::size_t s_points = kDefaultGridPoints;
    std::size_t calibration_samples = kDefaultCalibrationSamples;
    double window_periods = kDefaultWindowPeriods;
    IntegratorConfig integrator;
    std::string out_path = "-";
    std::string format = "csv";
    std::string trajectory_path;
    std::size_t trajectory_samples = 0;
    int parallel = 1;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail(path_, "must be an object");
    }

    [[noreturn]] static void fail(const std::string& field, const std::string& what) {
        throw ConfigError("config field '" + field + "': " + what);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json& raw(const std::string& key) const {
        seen_.insert(key);
        if (!obj_.contains(key)) fail(field(key), "is required");
        return obj_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) fail(field(key), "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(field(key), "must be finite");
        return x;
    }

    double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    double positive(const std::string& key, double fallback) const {
        const double x = number(key, fallback);
        if (!(x > 0.0)) fail(field(key), "must be positive");
        return x;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(field(key), "must be a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) fail(field(key), "must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(field(key), "must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number() || !std::isfinite(x.get<double>())) fail(field(key), "must be an array of finite numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Reader child(const std::string& key) const { return Reader(raw(key), field(key)); }

    void reject_unknown() const {
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) fail(field(k), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

inline std::vector<double> tau_range(double start, double stop, std::size_t count, bool log_spacing,
                                     const std::string& field) {
    if (count == 0) Reader::fail(field, "count must be positive");
    if (!(start > 0.0) || !(stop >= start)) Reader::fail(field, "need 0 < start <= stop");
    if (count == 1) return {start};
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(count - 1);
        out[k] = log_spacing ? start * std::pow(stop / start, u) : start + u * (stop - start);
    }
    out.back() = stop;
    return out;
}

inline std::vector<double> parse_tau_json(const json& v, const std::string& field) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number()) Reader::fail(field, "must contain numbers");
            out.push_back(x.get<double>());
        }
    } else if (v.is_object()) {
        Reader r(v, field);
        const double start = r.number("start");
        const double stop = r.number("stop");
        const auto count = r.count("count", 0);
        const std::string spacing = r.text("spacing", "linear");
        if (spacing != "linear" && spacing != "log") Reader::fail(r.field("spacing"), "must be 'linear' or 'log'");
        r.reject_unknown();
        out = tau_range(start, stop, count, spacing == "log", field);
    } else {
        Reader::fail(field, "must be a list of values or a {start, stop, count, spacing} range");
    }
    return out;
}

}  // namespace detail

/// "0.5,1,5" or "start:stop:count[:log]".
inline std::vector<double> parse_tau_argument(const std::string& arg) {
    std::vector<double> out;
    auto to_double = [&](const std::string& s) {
        std::size_t pos = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &pos);
        } catch (const std::exception&) {
            detail::Reader::fail("--tau", "cannot parse '" + s + "'");
        }
        if (pos != s.size()) detail::Reader::fail("--tau", "cannot parse '" + s + "'");
        return x;
    };
    if (arg.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(arg);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log" && parts[3] != "linear")) {
            detail::Reader::fail("--tau", "range must be start:stop:count[:log|linear]");
        }
        const double count = to_double(parts[2]);
        if (count < 1 || count != std::floor(count)) detail::Reader::fail("--tau", "count must be a positive integer");
        out = detail::tau_range(to_double(parts[0]), to_double(parts[1]), static_cast<std::size_t>(count),
                                parts.size() == 4 && parts[3] == "log", "--tau");
    } else {
        std::stringstream ss(arg);
        for (std::string p; std::getline(ss, p, ',');) {
            if (!p.empty()) out.push_back(to_double(p));
        }
    }
    return out;
}

inline void validate_taus(const std::vector<double>& taus) {
    if (taus.empty()) detail::Reader::fail("tau", "must contain at least one value");
    for (double t : taus) {
        if (!(t > 0.0) || !std::isfinite(t)) detail::Reader::fail("tau", "values must be positive and finite");
    }
}

inline RunConfig parse_config(const json& doc) {
    using detail::Reader;
    Reader root(doc, "");
    RunConfig cfg;

    if (!root.has("schema_version")) Reader::fail("schema_version", "is required");
    const json& ver = root.raw("schema_version");
    if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion) {
        Reader::fail("schema_version", "must be " + std::to_string(kSchemaVersion));
    }

    const std::string model = root.text("model", "");
    if (model == "tong") cfg.model = ModelKind::tong;
    else if (model == "flux") cfg.model = ModelKind::flux;
    else if (model == "custom") cfg.model = ModelKind::custom;
    else Reader::fail("model", "must be one of tong, flux, custom");

    if (root.has("tong")) {
        const Reader r = root.child("tong");
        cfg.tong.theta = r.number("theta", cfg.tong.theta);
        cfg.tong.omega = r.number("omega_MHz", cfg.tong.omega);
        cfg.tong.omega0 = r.number("omega0_MHz", cfg.tong.omega0);
        if (cfg.tong.omega0 == 0.0) Reader::fail(r.field("omega0_MHz"), "must be nonzero");
        r.reject_unknown();
    }

    if (root.has("flux")) {
        const Reader r = root.child("flux");
        const double ej = r.positive("E_J_MHz", kDefaultJosephsonEnergy);
        FluxQubitModel m = FluxQubitModel::with_energy(ej);
        m.t1 = r.positive("t1_EJ", 1e-3) * ej;
        m.r1 = r.positive("r1_EJ", 4.8) * ej;
        m.r2 = r.number("r2_EJ", 1.0) * ej;
        m.w = r.positive("w_EJ", 2.4) * ej;
        m.s2 = r.number("s2_EJ", m.w / ej) * ej;
        m.epsilon = r.number("epsilon", -2e-4);
        r.reject_unknown();
        cfg.flux = m;
    }

    if (root.has("noise")) {
        const Reader r = root.child("noise");
        FluxNoiseSpec n;
        n.amplitude = r.number("C", n.amplitude);
        if (n.amplitude < 0.0) Reader::fail(r.field("C"), "must be nonnegative");
        n.terms = r.count("terms", n.terms);
        if (n.terms == 0) Reader::fail(r.field("terms"), "must be positive");
        n.nu_min = 1e3 * r.positive("nu_min_GHz", n.nu_min / 1e3);
        n.nu_max = 1e3 * r.positive("nu_max_GHz", n.nu_max / 1e3);
        if (!(n.nu_max > n.nu_min)) Reader::fail(r.field("nu_max_GHz"), "must exceed nu_min_GHz");
        n.seed = r.count("seed", n.seed);
        if (r.has("seeds")) {
            for (double s : r.numbers("seeds")) {
                if (s < 0 || s != std::floor(s)) Reader::fail(r.field("seeds"), "must be nonnegative integers");
                cfg.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        } else {
            cfg.seeds.push_back(n.seed);
        }
        r.reject_unknown();
        cfg.noise = n;
    }

    if (root.has("bound_inputs")) {
        const Reader r = root.child("bound_inputs");
        if (r.has("amplitudes")) {
            const Reader a = r.child("amplitudes");
            FluxNoiseAmplitudes amp;
            amp.value = a.number("value", 0.0);
            amp.first = a.number("first", 0.0);
            amp.second = a.number("second", 0.0);
            if (amp.value < 0 || amp.first < 0 || amp.second < 0) Reader::fail(r.field("amplitudes"), "must be nonnegative");
            a.reject_unknown();
            cfg.amplitudes = amp;
        }
        if (r.has("overlaps")) {
            const Reader o = r.child("overlaps");
            EndpointOverlaps ov;
            ov.delta0 = o.number("delta0");
            ov.delta1 = o.number("delta1");
            if (ov.delta0 < 0 || ov.delta1 < 0 || ov.delta0 > 1 || ov.delta1 > 1) {
                Reader::fail(r.field("overlaps"), "deltas must lie in [0, 1]");
            }
            ov.source = OverlapSource::exact_projector;
            o.reject_unknown();
            cfg.overlaps = ov;
        }
        if (r.has("c1_MHz")) {
            cfg.c1 = r.number("c1_MHz");
            if (*cfg.c1 < 0) Reader::fail(r.field("c1_MHz"), "must be nonnegative");
        }
        r.reject_unknown();
    }

    if (root.has("custom")) {
        const Reader r = root.child("custom");
        cfg.custom_a = r.numbers("a_MHz");
        cfg.custom_b = r.numbers("b_MHz");
        if (cfg.custom_a.size() != cfg.custom_b.size()) Reader::fail(r.field("b_MHz"), "must match a_MHz in length");
        if (cfg.custom_a.size() < 4) Reader::fail(r.field("a_MHz"), "needs at least four rows");
        r.reject_unknown();
    }
    if (cfg.model == ModelKind::custom && cfg.custom_a.empty()) Reader::fail("custom", "is required for model custom");
    if (cfg.model != ModelKind::flux && cfg.noise) Reader::fail("noise", "is only supported for model flux");

    if (root.has("tau")) cfg.taus = detail::parse_tau_json(root.raw("tau"), "tau");
    if (root.has("tolerance")) {
        cfg.tolerance = root.number("tolerance");
        if (!(*cfg.tolerance > 0.0)) Reader::fail("tolerance", "must be positive");
    }

    if (root.has("grid")) {
        const Reader r = root.child("grid");
        cfg.s_points = r.count("s_points", cfg.s_points);
        if (cfg.s_points < 101) Reader::fail(r.field("s_points"), "must be at least 101");
        cfg.calibration_samples = r.count("calibration_samples", cfg.calibration_samples);
        if (cfg.calibration_samples < kMinCalibrationSamples) {
            Reader::fail(r.field("calibration_samples"), "must be at least 100000");
        }
        cfg.window_periods = r.positive("window_periods", cfg.window_periods);
        if (cfg.window_periods < 10.0) Reader::fail(r.field("window_periods"), "must be at least 10");
        r.reject_unknown();
    }

    if (root.has("integrator")) {
        const Reader r = root.child("integrator");
        cfg.integrator.rel_tol = r.positive("rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = r.positive("abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.max_step = r.number("max_step_us", cfg.integrator.max_step);
        cfg.integrator.max_steps = static_cast<long>(r.count("max_steps", static_cast<std::uint64_t>(cfg.integrator.max_steps)));
        if (cfg.integrator.max_steps <= 0) Reader::fail(r.field("max_steps"), "must be positive");
        r.reject_unknown();
    }

    if (root.has("output")) {
        const Reader r = root.child("output");
        cfg.out_path = r.text("path", cfg.out_path);
        cfg.format = r.text("format", cfg.format);
        cfg.trajectory_path = r.text("trajectory", "");
        cfg.trajectory_samples = r.count("trajectory_samples", 200);
        r.reject_unknown();
    }
    if (cfg.format != "csv" && cfg.format != "json") Reader::fail("output.format", "must be csv or json");

    if (root.has("parallel")) {
        cfg.parallel = static_cast<int>(root.count("parallel", 1));
        if (cfg.parallel < 1) Reader::fail("parallel", "must be at least 1");
    }
    root.reject_unknown();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

/// Default configuration for a model, as a JSON document.
inline json default_config(const std::string& model) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = model;
    if (model == "tong") {
        j["tong"] = {{"theta", 0.001}, {"omega_MHz", 10.0}, {"omega0_MHz", -10.0}};
        j["tau"] = {0.5, 1.0, 5.0, 10.0, 20.0};
    } else if (model == "flux") {
        j["flux"] = {{"E_J_MHz", kDefaultJosephsonEnergy}, {"t1_EJ", 1e-3}, {"r1_EJ", 4.8}, {"r2_EJ", 1.0},
                     {"w_EJ", 2.4},  {"s2_EJ", 2.4}, {"epsilon", -2e-4}};
        j["tau"] = {{"start", 0.002}, {"stop", 0.05}, {"count", 10}, {"spacing", "log"}};
    } else {
        throw ConfigError("no default configuration for model '" + model + "'");
    }
    return j;
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json meta = json::object();
};

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline void write_csv(std::ostream& os, const Dataset& d) {
    for (std::size_t c = 0; c < d.columns.size(); ++c) os << (c ? "," : "") << d.columns[c];
    os << '\n';
    for (const auto& row : d.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            const json& v = row[c];
            if (v.is_number_float()) os << format_number(v.get<double>());
            else if (v.is_string()) os << v.get<std::string>();
            else if (v.is_null()) os << "";
            else os << v.dump();
        }
        os << '\n';
    }
}

inline void write_json(std::ostream& os, const Dataset& d) {
    json out;
    out["meta"] = d.meta;
    out["columns"] = d.columns;
    json rows = json::array();
    for (const auto& row : d.rows) {
        json r = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const json& v = row[c];
            // JSON has no NaN; failed cells become null.
            r[d.columns[c]] = (v.is_number_float() && !std::isfinite(v.get<double>())) ? json() : v;
        }
        rows.push_back(r);
    }
    out["rows"] = rows;
    os << out.dump(2) << '\n';
}

inline void emit(const Dataset& d, const RunConfig& cfg, std::ostream& fallback) {
    auto write = [&](std::ostream& os) {
        if (cfg.format == "json") write_json(os, d);
        else write_csv(os, d);
    };
    if (cfg.out_path.empty() || cfg.out_path == "-") {
        write(fallback);
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + cfg.out_path + "'");
    write(f);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct CommandResult {
    Dataset data;
    int exit_code = kOk;
    std::string message;
};

namespace detail {

inline json terms_json(const BoundTerms& t) {
    return {{"A_per_us", t.tau_linear_coeff},
            {"B", t.constant_term},
            {"C_us", t.inv_tau_coeff},
            {"endpoint", t.endpoint_term}};
}

inline void bound_rows(Dataset& d, const NoiseBoundInputs& in, const std::vector<double>& taus) {
    d.columns = {"tau_us", "bound", "raw_bound", "linear_term", "constant_term", "inv_tau_term", "endpoint_term"};
    for (double tau : taus) {
        const BoundResult r = in.bound(tau);
        d.rows.push_back({tau, r.value, r.raw_value, r.terms.tau_linear_coeff * tau, r.terms.constant_term,
                          r.terms.inv_tau_coeff / tau, r.terms.endpoint_term});
    }
    const BoundTerms t = in.bound(taus.front()).terms;
    d.meta["coefficients"] = terms_json(t);
    d.meta["c1_MHz"] = in.derivatives.c1;
    d.meta["c2_MHz"] = in.derivatives.c2;
    d.meta["d1_MHz2"] = in.derivatives.d1;
    d.meta["d2_MHz3"] = in.derivatives.d2;
    d.meta["gamma_bar_MHz"] = in.gamma_bar;
    d.meta["delta0"] = in.overlaps.delta0;
    d.meta["delta1"] = in.overlaps.delta1;
    d.meta["overlap_source"] = to_string(in.overlaps.source);
}

inline void add_feasible(Dataset& d, const RunConfig& cfg, const BoundTerms& t) {
    if (!cfg.tolerance) return;
    const auto iv = feasible_tau_interval(t, *cfg.tolerance);
    json f;
    f["tolerance"] = *cfg.tolerance;
    if (iv) {
        f["tau_min_us"] = iv->tau_min;
        f["tau_max_us"] = std::isfinite(iv->tau_max) ? json(iv->tau_max) : json("inf");
        if (iv->tau_star) f["tau_star_us"] = *iv->tau_star;
    } else {
        f["empty"] = true;
    }
    d.meta["feasible"] = f;
}

inline FluxQubitModel flux_with_seed(const RunConfig& cfg, std::uint64_t seed) {
    FluxQubitModel m = cfg.flux;
    if (cfg.noise) {
        FluxNoiseSpec spec = *cfg.noise;
        spec.seed = seed;
        attach_noise(m, spec);
    }
    return m;
}

inline FluxNoiseAmplitudes flux_amplitudes(const RunConfig& cfg, const FluxQubitModel& m) {
    if (cfg.amplitudes) return *cfg.amplitudes;
    if (!m.noisy()) return {};
    const double window = cfg.window_periods / cfg.noise->nu_min;
    return calibrate_flux_noise(m, window, cfg.calibration_samples);
}

inline NoiseBoundInputs flux_inputs(const RunConfig& cfg, const FluxQubitModel& m) {
    FluxBoundOverrides over;
    over.c1 = cfg.c1;
    over.overlaps = cfg.overlaps;
    return flux_bound_inputs(m, flux_amplitudes(cfg, m), cfg.taus, over);
}

struct CustomInputs {
    TabulatedTwoLevel table;
    DerivativeBounds derivatives;
    GapProfile profile;
};

inline CustomInputs custom_inputs(const RunConfig& cfg) {
    TabulatedTwoLevel table(cfg.custom_a, cfg.custom_b);
    const HamiltonianSchedule sch = table.schedule();
    const auto grid = uniform_grid(cfg.s_points);
    DerivativeBounds db = derivative_norm_bounds(sch, grid);
    std::vector<SpectralData> spectra;
    for (double s : grid) spectra.push_back(eigendecompose(sch.at(s)));
    GapProfile gp = gap_profile(grid, spectra, 0, 0);
    return {std::move(table), std::move(db), std::move(gp)};
}

inline std::uint64_t primary_seed(const RunConfig& cfg) {
    return cfg.seeds.empty() ? 0 : cfg.seeds.front();
}

}  // namespace detail

inline CommandResult cmd_bound(const RunConfig& cfg) {
    validate_taus(cfg.taus);
    CommandResult res;
    Dataset& d = res.data;
    switch (cfg.model) {
        case ModelKind::tong: {
            d.meta["model"] = "tong";
            const NoiseBoundInputs in = tong_bound_inputs(cfg.tong);
            detail::bound_rows(d, in, cfg.taus);
            detail::add_feasible(d, cfg, in.bound(1.0).terms);
            break;
        }
        case ModelKind::flux: {
            d.meta["model"] = "flux";
            const FluxQubitModel m = detail::flux_with_seed(cfg, detail::primary_seed(cfg));
            const NoiseBoundInputs in = detail::flux_inputs(cfg, m);
            detail::bound_rows(d, in, cfg.taus);
            if (m.noisy()) d.meta["seed"] = detail::primary_seed(cfg);
            detail::add_feasible(d, cfg, in.bound(1.0).terms);
            break;
        }
        case ModelKind::custom: {
            d.meta["model"] = "custom";
            const detail::CustomInputs ci = detail::custom_inputs(cfg);
            d.columns = {"tau_us", "bound_constant", "bound_integral"};
            for (double tau : cfg.taus) {
                const BoundResult rc =
                    at_bound_constant(ci.derivatives.b1, ci.derivatives.b2, ci.profile.gamma_min, ci.profile.D_max, tau);
                const BoundResult ri = at_bound_integral(ci.profile, ci.derivatives, tau);
                d.rows.push_back({tau, rc.value, ri.value});
            }
            d.meta["b1_MHz"] = ci.derivatives.b1;
            d.meta["b2_MHz"] = ci.derivatives.b2;
            d.meta["gamma_min_MHz"] = ci.profile.gamma_min;
            break;
        }
    }
    return res;
}

inline CommandResult cmd_simulate(const RunConfig& cfg) {
    validate_taus(cfg.taus);
    CommandResult res;
    Dataset& d = res.data;
    const std::size_t nt = cfg.taus.size();
    std::vector<std::string> failures;

    auto run_rows = [&](std::size_t n_rows, const std::function<std::vector<json>(std::size_t)>& row) {
        std::vector<std::vector<json>> rows(n_rows);
        parallel_for(n_rows, cfg.parallel, [&](std::size_t i) { rows[i] = row(i); });
        d.rows = std::move(rows);
    };
    auto failure = [](const std::exception& e) { return std::string("failed: ") + e.what(); };

    switch (cfg.model) {
        case ModelKind::tong: {
            d.meta["model"] = "tong";
            d.columns = {"tau_us", "error", "exact_error", "abs_diff", "status"};
            run_rows(nt, [&](std::size_t i) -> std::vector<json> {
                const double tau = cfg.taus[i];
                const double exact = tong_exact_error(cfg.tong, tau);
                try {
                    const double err = tong_simulate(cfg.tong, tau, {tau}, cfg.integrator).errors.back();
                    return {tau, err, exact, std::abs(err - exact), "ok"};
                } catch (const Error& e) {
                    return {tau, NAN, exact, NAN, failure(e)};
                }
            });
            break;
        }
        case ModelKind::flux: {
            d.meta["model"] = "flux";
            d.columns = {"tau_us", "seed", "error", "bound", "status"};
            const bool noisy = cfg.noise.has_value();
            const std::vector<std::uint64_t> seeds = noisy ? cfg.seeds : std::vector<std::uint64_t>{0};
            // Bound inputs per seed are computed once, then the (seed, tau) grid runs in parallel.
            std::vector<FluxQubitModel> models;
            std::vector<NoiseBoundInputs> inputs;
            for (std::uint64_t seed : seeds) {
                models.push_back(detail::flux_with_seed(cfg, seed));
                inputs.push_back(detail::flux_inputs(cfg, models.back()));
            }
            run_rows(seeds.size() * nt, [&](std::size_t i) -> std::vector<json> {
                const std::size_t k = i / nt;
                const double tau = cfg.taus[i % nt];
                const json seed = noisy ? json(seeds[k]) : json("none");
                const double bound = inputs[k].bound(tau).value;
                try {
                    return {tau, seed, flux_simulate(models[k], tau, cfg.integrator).final_error, bound, "ok"};
                } catch (const Error& e) {
                    return {tau, seed, NAN, bound, failure(e)};
                }
            });
            break;
        }
        case ModelKind::custom: {
            d.meta["model"] = "custom";
            d.columns = {"tau_us", "error", "bound", "status"};
            const detail::CustomInputs ci = detail::custom_inputs(cfg);
            run_rows(nt, [&](std::size_t i) -> std::vector<json> {
                const double tau = cfg.taus[i];
                const double bound =
                    at_bound_constant(ci.derivatives.b1, ci.derivatives.b2, ci.profile.gamma_min, ci.profile.D_max, tau).value;
                try {
                    const Trajectory tr = evolve_rotating_frame(ci.table.ab(tau), tau, cfg.integrator);
                    return {tau, tr.final_error, bound, "ok"};
                } catch (const Error& e) {
                    return {tau, NAN, bound, failure(e)};
                }
            });
            break;
        }
    }

    for (const auto& row : d.rows) {
        const std::string status = row.back().get<std::string>();
        if (status != "ok") failures.push_back(status);
    }
    d.meta["failures"] = failures.size();
    if (!failures.empty()) {
        res.exit_code = kNumericalFailure;
        res.message = std::to_string(failures.size()) + " simulation(s) failed; first: " + failures.front();
    }

    if (!cfg.trajectory_path.empty()) {
        const double tau = cfg.taus.front();
        std::vector<double> times;
        const std::size_t n = std::max<std::size_t>(cfg.trajectory_samples, 1);
        for (std::size_t k = 1; k <= n; ++k) times.push_back(tau * static_cast<double>(k) / static_cast<double>(n));
        Trajectory tr;
        switch (cfg.model) {
            case ModelKind::tong: tr = tong_simulate(cfg.tong, tau, times, cfg.integrator).trajectory; break;
            case ModelKind::flux:
                tr = flux_simulate(detail::flux_with_seed(cfg, detail::primary_seed(cfg)), tau, cfg.integrator, times);
                break;
            case ModelKind::custom:
                tr = evolve_rotating_frame(TabulatedTwoLevel(cfg.custom_a, cfg.custom_b).ab(tau), tau, cfg.integrator, times);
                break;
        }
        std::ofstream f(cfg.trajectory_path, std::ios::binary);
        if (!f) throw ConfigError("cannot open trajectory file '" + cfg.trajectory_path + "'");
        write_trajectory_csv(f, tr);
    }
    return res;
}

inline CommandResult cmd_calibrate_noise(const RunConfig& cfg) {
    if (cfg.model != ModelKind::flux || !cfg.noise) {
        throw ConfigError("config field 'noise': calibrate-noise needs model flux with a noise section");
    }
    CommandResult res;
    Dataset& d = res.data;
    d.meta["model"] = "flux";
    d.meta["window_us"] = cfg.window_periods / cfg.noise->nu_min;
    d.meta["samples"] = cfg.calibration_samples;
    d.columns = {"seed",   "sup_N",  "sup_dN_MHz", "sup_d2N_MHz2", "cap_N",   "cap_dN_MHz", "cap_d2N_MHz2",
                 "d1_MHz2", "d2_MHz3", "delta0",    "delta1",       "A_per_us", "B",          "C_us"};
    const std::vector<double> taus = cfg.taus.empty() ? std::vector<double>{0.01} : cfg.taus;
    std::vector<std::vector<json>> rows(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.parallel, [&](std::size_t k) {
        const FluxQubitModel m = detail::flux_with_seed(cfg, cfg.seeds[k]);
        const double window = cfg.window_periods / cfg.noise->nu_min;
        AmplitudeBounds caps;
        FluxNoiseAmplitudes amp;
        for (const auto* n : {&m.noise1, &m.noise2}) {
            const AmplitudeBounds b = amplitude_bounds(**n, window, cfg.calibration_samples);
            amp.value = std::max(amp.value, b.value);
            amp.first = std::max(amp.first, b.first);
            amp.second = std::max(amp.second, b.second);
            caps.cap_value = std::max(caps.cap_value, b.cap_value);
            caps.cap_first = std::max(caps.cap_first, b.cap_first);
            caps.cap_second = std::max(caps.cap_second, b.cap_second);
        }
        FluxBoundOverrides over;
        over.c1 = cfg.c1;
        const NoiseBoundInputs in = flux_bound_inputs(m, amp, taus, over);
        const BoundTerms t = in.bound(1.0).terms;
        rows[k] = {cfg.seeds[k],     amp.value,         amp.first,          amp.second,
                   caps.cap_value,   caps.cap_first,    caps.cap_second,    in.derivatives.d1,
                   in.derivatives.d2, in.overlaps.delta0, in.overlaps.delta1, t.tau_linear_coeff,
                   t.constant_term + t.endpoint_term, t.inv_tau_coeff};
    });
    d.rows = std::move(rows);
    return res;
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
    CommandResult res;
    Dataset& d = res.data;
    d.columns = {"property", "status", "measured", "relation", "threshold"};
    std::vector<std::function<PropertyResult()>> checks = {
        [] { return check_intertwining(); },           [] { return check_commuting_noise(); },
        [] { return check_noncommuting_control(); },   [] { return check_projector_derivative_bound(); },
        [] { return check_overlap_ordering(); },       [] { return check_tong_oracle(); },
        [] { return check_tong_direct(); },            [] { return check_tong_bound_validity(); },
        [] { return check_flux_bound_validity(); },
    };
    std::vector<PropertyResult> results(checks.size());
    parallel_for(checks.size(), cfg.parallel, [&](std::size_t i) { results[i] = checks[i](); });
    int failed = 0;
    for (const auto& r : results) {
        d.rows.push_back({r.name, r.passed ? "pass" : "FAIL", r.measured, r.relation, r.threshold});
        failed += r.passed ? 0 : 1;
    }
    d.meta["failed"] = failed;
    if (failed > 0) {
        res.exit_code = kPropertyFailure;
        res.message = std::to_string(failed) + " propert" + (failed == 1 ? "y" : "ies") + " failed";
    }
    return res;
}

}  // namespace adiabound::cli
