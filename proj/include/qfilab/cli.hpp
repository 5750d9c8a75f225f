// Copyright 2026 The qfi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the qfi-lab experiments. Everything lives in
// qfilab::cli so the executable and the tests call the same `run`.

#pragma once

#include "qfilab/adaptive.hpp"
#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/experiments.hpp"
#include "qfilab/io.hpp"
#include "qfilab/landscape.hpp"
#include "qfilab/noise.hpp"
#include "qfilab/protocols.hpp"
#include "qfilab/regression.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qfilab::cli {

enum class KeyKind { Real, Count, Text, Flag };

struct KeySpec {
    std::string name;
    KeyKind kind;
    std::string help;
};

inline const std::vector<KeySpec>& key_registry() {
    static const std::vector<KeySpec> keys = {
        {"config", KeyKind::Text, "JSON file with flat keys named like the flags; flags win"},
        {"A", KeyKind::Real, "signal amplitude A (rad/us), default 2*pi*0.6"},
        {"omega", KeyKind::Real, "signal angular frequency (rad/us), default 2*pi"},
        {"theta", KeyKind::Real, "signal phase (rad), default 0"},
        {"T1", KeyKind::Real, "relaxation time (us), 'inf' disables, default 14"},
        {"T2star", KeyKind::Real, "coherence decay time (us), 'inf' disables, default 4"},
        {"contrast", KeyKind::Real, "readout contrast in [0, 1], default 0.8"},
        {"ideal", KeyKind::Flag, "no decoherence and unit contrast (overrides T1, T2star, contrast)"},
        {"N", KeyKind::Count, "shots per quadrature record, default 10000"},
        {"seed", KeyKind::Count, "master seed, default $QFI_LAB_SEED or 0"},
        {"noiseless", KeyKind::Flag, "exact phases instead of sampled outcomes"},
        {"out", KeyKind::Text, "output directory, default ."},
        {"format", KeyKind::Text, "csv or json, default csv"},
        {"threads", KeyKind::Count, "worker threads, default hardware concurrency"},
        {"protocol", KeyKind::Text, "uncontrolled, optimal, amplitude, rabi (sweep-sensitivity also: all)"},
        {"T", KeyKind::Real, "protocol duration (us)"},
        {"T-min", KeyKind::Real, "first duration of the T grid (us)"},
        {"T-max", KeyKind::Real, "last duration of the T grid (us)"},
        {"T-count", KeyKind::Count, "number of durations in the T grid"},
        {"omega-points", KeyKind::Count, "points in each slope fit, default 101"},
        {"omega-span", KeyKind::Real, "half-width of the slope-fit sweep as a fraction, default automatic"},
        {"N-min", KeyKind::Count, "smallest shot count, default 100"},
        {"N-max", KeyKind::Count, "largest shot count, default 100000"},
        {"N-count", KeyKind::Count, "number of log-spaced shot counts, default 7"},
        {"repetitions", KeyKind::Count, "phase estimates per shot count, default 400"},
        {"ratio-min", KeyKind::Real, "smallest control/true frequency ratio, default 0.8"},
        {"ratio-max", KeyKind::Real, "largest control/true frequency ratio, default 1.2"},
        {"freq-points", KeyKind::Count, "control frequency points, default 41"},
        {"dtheta-min", KeyKind::Real, "smallest control phase offset (rad), default -pi/2"},
        {"dtheta-max", KeyKind::Real, "largest control phase offset (rad), default pi/2"},
        {"phase-points", KeyKind::Count, "control phase points, default 41"},
        {"pulse-offset", KeyKind::Real, "constant pulse delay (us), default 0"},
        {"rounds", KeyKind::Count, "controlled adaptive rounds"},
        {"budget", KeyKind::Real, "total sensing time N*sum(T_n) (us)"},
        {"T0", KeyKind::Real, "duration of the crude first round (us), default 1.75"},
        {"omega-guess", KeyKind::Real, "prior frequency for the first round (rad/us), default omega"},
    };
    return keys;
}

inline const KeySpec* find_key(std::string_view name) {
    for (const auto& k : key_registry()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

struct Command {
    std::string name;
    std::string description;
    std::vector<std::string> keys;
};

inline const std::vector<Command>& commands() {
    static const std::vector<std::string> common = {"config", "A",    "omega",     "theta", "T1",  "T2star", "contrast",
                                                    "ideal",  "N",    "seed",      "noiseless", "out", "format",
                                                    "threads"};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> v = common;
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    static const std::vector<Command> cmds = {
        {"qfi", "print the noiseless QFI of one protocol", with({"protocol", "T"})},
        {"sweep-sensitivity", "fitted phase slope and sensitivity versus T (sensitivity.csv)",
         with({"protocol", "T-min", "T-max", "T-count", "omega-points", "omega-span"})},
        {"phase-noise", "phase-estimate spread versus shot count (phase_noise.csv)",
         with({"protocol", "T", "N-min", "N-max", "N-count", "repetitions"})},
        {"sweep-landscape", "QFI over control frequency and phase mismatch (landscape.csv)",
         with({"T", "ratio-min", "ratio-max", "freq-points", "dtheta-min", "dtheta-max", "phase-points",
               "pulse-offset", "omega-points"})},
        {"adapt", "adaptive frequency estimation rounds (adaptive.csv)", with({"rounds", "budget", "T0", "omega-guess"})},
        {"compare-rabi", "Rabi, controlled and uncontrolled QFI versus T (rabi.csv)", with({"T-min", "T-max", "T-count"})},
        {"amplitude", "amplitude slope with and without node pulses (amplitude.csv)",
         with({"T-min", "T-max", "T-count"})},
    };
    return cmds;
}

/// Merged key/value view: config file first, flags on top.
class Settings {
public:
    void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }
    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }

    [[nodiscard]] double real(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const auto& v = values_.at(key);
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            try {
                return parse_double(v.get<std::string>());
            } catch (const Error&) {
            }
        }
        throw ConfigError(key, "expected a number for '" + key + "'");
    }

    [[nodiscard]] std::optional<double> real_opt(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return real(key, 0.0);
    }

    [[nodiscard]] std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const auto& v = values_.at(key);
        double d = 0.0;
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number()) {
            d = v.get<double>();
        } else if (v.is_string()) {
            try {
                d = parse_double(v.get<std::string>());
            } catch (const Error&) {
                throw ConfigError(key, "expected a non-negative integer for '" + key + "'");
            }
        } else {
            throw ConfigError(key, "expected a non-negative integer for '" + key + "'");
        }
        if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
            throw ConfigError(key, "expected a non-negative integer for '" + key + "'");
        }
        return static_cast<std::uint64_t>(d);
    }

    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = values_.at(key);
        if (!v.is_string()) throw ConfigError(key, "expected a string for '" + key + "'");
        return v.get<std::string>();
    }

    [[nodiscard]] bool flag(const std::string& key) const {
        if (!has(key)) return false;
        const auto& v = values_.at(key);
        if (!v.is_boolean()) throw ConfigError(key, "expected true or false for '" + key + "'");
        return v.get<bool>();
    }

private:
    std::map<std::string, nlohmann::json> values_;
};

inline void load_config_file(const std::string& path, const Command& cmd, Settings& settings) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config", "cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config", std::string("malformed config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config", "config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const bool known = key != "config" && find_key(key) != nullptr &&
                           std::find(cmd.keys.begin(), cmd.keys.end(), key) != cmd.keys.end();
        if (!known) throw ConfigError(key, "unknown configuration key '" + key + "' for " + cmd.name);
        settings.set(key, it.value());
    }
}

/// Fully resolved and validated settings of one run.
struct ExperimentConfig {
    std::string command;
    ProtocolKind protocol = ProtocolKind::FrequencyOptimal;
    bool all_protocols = false;
    DriveParams drive;
    NoiseParams noise;
    SimulationMode mode = SimulationMode::Sampled;
    std::uint64_t shots = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::filesystem::path out = ".";
    OutputFormat format = OutputFormat::Csv;
    double T = 1.0;
    double T_min = 0.25;
    double T_max = 10.0;
    std::size_t T_count = 40;
    std::size_t omega_points = 101;
    std::optional<double> omega_span;
    std::uint64_t N_min = 100;
    std::uint64_t N_max = 100000;
    std::size_t N_count = 7;
    std::size_t repetitions = 400;
    LandscapeGridSpec landscape;
    double pulse_offset = 0.0;
    std::optional<int> rounds;
    std::optional<double> budget;
    double T0 = 1.75;
    std::optional<double> omega_guess;
    bool output_given = false;

    /// Canonical text of every value that influences the artifacts.
    nlohmann::json canonical;

    [[nodiscard]] std::string config_hash() const { return hex64(fnv1a64(canonical.dump())); }
};

namespace detail {

inline void check(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw ConfigError(key, message);
}

inline std::uint64_t env_seed() {
    const char* s = std::getenv("QFI_LAB_SEED");
    if (s == nullptr || *s == '\0') return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == nullptr || *end != '\0') throw ConfigError("QFI_LAB_SEED", "QFI_LAB_SEED must be an unsigned integer");
    return v;
}

}  // namespace detail

inline ExperimentConfig resolve(const Command& cmd, const Settings& s) {
    using detail::check;
    ExperimentConfig c;
    c.command = cmd.name;

    const double A = s.real("A", kTwoPi * 0.6);
    const double omega = s.real("omega", kTwoPi);
    const double theta = s.real("theta", 0.0);
    check(std::isfinite(A) && A >= 0.0, "A", "A must be finite and >= 0");
    check(std::isfinite(omega) && omega > 0.0, "omega", "omega must be finite and > 0");
    check(std::isfinite(theta), "theta", "theta must be finite");
    c.drive = DriveParams::make(A, omega, theta);

    if (s.flag("ideal")) {
        c.noise = NoiseParams::ideal();
    } else {
        c.noise.t1 = s.real("T1", 14.0);
        c.noise.t2_star = s.real("T2star", 4.0);
        c.noise.contrast = s.real("contrast", 0.8);
    }
    check(c.noise.t1 > 0.0, "T1", "T1 must be > 0");
    check(c.noise.t2_star > 0.0, "T2star", "T2star must be > 0");
    check(c.noise.contrast >= 0.0 && c.noise.contrast <= 1.0, "contrast", "contrast must lie in [0, 1]");
    check(c.noise.lindblad_physical(), "T2star", "T2star must not exceed 2*T1");

    c.mode = s.flag("noiseless") ? SimulationMode::Noiseless : SimulationMode::Sampled;
    c.shots = s.count("N", 10000);
    check(c.shots >= 1, "N", "N must be >= 1");
    c.seed = s.has("seed") ? s.count("seed", 0) : detail::env_seed();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t threads = s.count("threads", hw);
    check(threads >= 1 && threads <= 1024, "threads", "threads must lie in [1, 1024]");
    c.threads = static_cast<unsigned>(threads);
    c.output_given = s.has("out");
    c.out = s.text("out", ".");
    const std::string fmt = s.text("format", "csv");
    check(fmt == "csv" || fmt == "json", "format", "format must be csv or json");
    c.format = fmt == "csv" ? OutputFormat::Csv : OutputFormat::Json;

    const std::string proto_default = cmd.name == "sweep-sensitivity" ? "all" : "optimal";
    const std::string proto = s.text("protocol", proto_default);
    if (proto == "all" && cmd.name == "sweep-sensitivity") {
        c.all_protocols = true;
    } else {
        try {
            c.protocol = parse_protocol_kind(proto);
        } catch (const Error&) {
            throw ConfigError("protocol", "unknown protocol '" + proto + "'");
        }
    }

    const double default_T = cmd.name == "sweep-landscape" ? 1.25 : 1.0;
    c.T = s.real("T", default_T);
    check(std::isfinite(c.T) && c.T > 0.0, "T", "T must be finite and > 0");

    double tmin = 0.25, tmax = 10.0;
    std::uint64_t tcount = 40;
    if (cmd.name == "compare-rabi") tmin = 1.0, tcount = 10;
    if (cmd.name == "amplitude") tmin = 0.5, tcount = 20;
    c.T_min = s.real("T-min", tmin);
    c.T_max = s.real("T-max", tmax);
    c.T_count = static_cast<std::size_t>(s.count("T-count", tcount));
    check(std::isfinite(c.T_min) && c.T_min > 0.0, "T-min", "T-min must be > 0");
    check(std::isfinite(c.T_max) && c.T_max >= c.T_min, "T-max", "T-max must be >= T-min");
    check(c.T_count >= 1 && (c.T_count == 1 || c.T_max > c.T_min), "T-count",
          "T-count must be >= 1, and 1 when T-min equals T-max");

    c.omega_points = static_cast<std::size_t>(s.count("omega-points", 101));
    check(c.omega_points >= 3, "omega-points", "omega-points must be >= 3");
    c.omega_span = s.real_opt("omega-span");
    if (c.omega_span) check(*c.omega_span > 0.0 && *c.omega_span < 1.0, "omega-span", "omega-span must lie in (0, 1)");

    c.N_min = s.count("N-min", 100);
    c.N_max = s.count("N-max", 100000);
    c.N_count = static_cast<std::size_t>(s.count("N-count", 7));
    check(c.N_min >= 1, "N-min", "N-min must be >= 1");
    check(c.N_max >= c.N_min, "N-max", "N-max must be >= N-min");
    check(c.N_count >= 1, "N-count", "N-count must be >= 1");
    c.repetitions = static_cast<std::size_t>(s.count("repetitions", 400));
    check(c.repetitions >= 2, "repetitions", "repetitions must be >= 2");

    c.landscape.ratio_min = s.real("ratio-min", 0.8);
    c.landscape.ratio_max = s.real("ratio-max", 1.2);
    c.landscape.freq_points = static_cast<std::size_t>(s.count("freq-points", 41));
    c.landscape.phase_min = s.real("dtheta-min", -0.5 * kPi);
    c.landscape.phase_max = s.real("dtheta-max", 0.5 * kPi);
    c.landscape.phase_points = static_cast<std::size_t>(s.count("phase-points", 41));
    check(c.landscape.ratio_min > 0.0, "ratio-min", "ratio-min must be > 0");
    check(c.landscape.ratio_max > c.landscape.ratio_min || c.landscape.freq_points == 1, "ratio-max",
          "ratio-max must exceed ratio-min");
    check(c.landscape.freq_points >= 1, "freq-points", "freq-points must be >= 1");
    check(c.landscape.phase_max > c.landscape.phase_min || c.landscape.phase_points == 1, "dtheta-max",
          "dtheta-max must exceed dtheta-min");
    check(c.landscape.phase_points >= 1, "phase-points", "phase-points must be >= 1");
    c.pulse_offset = s.real("pulse-offset", 0.0);
    check(std::isfinite(c.pulse_offset), "pulse-offset", "pulse-offset must be finite");

    if (s.has("rounds")) {
        const std::uint64_t r = s.count("rounds", 0);
        check(r <= 64, "rounds", "rounds must be <= 64");
        c.rounds = static_cast<int>(r);
    }
    c.budget = s.real_opt("budget");
    if (c.budget) check(*c.budget > 0.0, "budget", "budget must be > 0");
    if (cmd.name == "adapt") check(c.rounds || c.budget, "rounds", "adapt needs rounds or budget");
    c.T0 = s.real("T0", 1.75);
    check(std::isfinite(c.T0) && c.T0 > 0.0, "T0", "T0 must be > 0");
    c.omega_guess = s.real_opt("omega-guess");
    if (c.omega_guess) check(*c.omega_guess > 0.0, "omega-guess", "omega-guess must be > 0");

    // Only keys this command reads enter the hash; threads and out never do.
    nlohmann::json canon;
    canon["command"] = c.command;
    canon["A"] = c.drive.amplitude;
    canon["omega"] = c.drive.omega;
    canon["theta"] = c.drive.theta;
    canon["T1"] = format_double(c.noise.t1);
    canon["T2star"] = format_double(c.noise.t2_star);
    canon["contrast"] = c.noise.contrast;
    canon["N"] = c.shots;
    canon["seed"] = c.seed;
    canon["noiseless"] = c.mode == SimulationMode::Noiseless;
    canon["format"] = fmt;
    for (const auto& key : cmd.keys) {
        if (canon.contains(key) || key == "config" || key == "out" || key == "threads" || key == "ideal") continue;
        if (key == "protocol") canon[key] = c.all_protocols ? "all" : std::string(to_string(c.protocol));
        else if (key == "T") canon[key] = c.T;
        else if (key == "T-min") canon[key] = c.T_min;
        else if (key == "T-max") canon[key] = c.T_max;
        else if (key == "T-count") canon[key] = c.T_count;
        else if (key == "omega-points") canon[key] = c.omega_points;
        else if (key == "omega-span") canon[key] = c.omega_span ? format_double(*c.omega_span) : "auto";
        else if (key == "N-min") canon[key] = c.N_min;
        else if (key == "N-max") canon[key] = c.N_max;
        else if (key == "N-count") canon[key] = c.N_count;
        else if (key == "repetitions") canon[key] = c.repetitions;
        else if (key == "ratio-min") canon[key] = c.landscape.ratio_min;
        else if (key == "ratio-max") canon[key] = c.landscape.ratio_max;
        else if (key == "freq-points") canon[key] = c.landscape.freq_points;
        else if (key == "dtheta-min") canon[key] = c.landscape.phase_min;
        else if (key == "dtheta-max") canon[key] = c.landscape.phase_max;
        else if (key == "phase-points") canon[key] = c.landscape.phase_points;
        else if (key == "pulse-offset") canon[key] = c.pulse_offset;
        else if (key == "rounds") canon[key] = c.rounds ? nlohmann::json(*c.rounds) : nlohmann::json("none");
        else if (key == "budget") canon[key] = c.budget ? format_double(*c.budget) : "none";
        else if (key == "T0") canon[key] = c.T0;
        else if (key == "omega-guess") canon[key] = c.omega_guess ? format_double(*c.omega_guess) : "truth";
    }
    c.canonical = std::move(canon);
    return c;
}

namespace detail {

inline std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline ProtocolSpec base_spec(const ExperimentConfig& c, ProtocolKind kind, double T) {
    ProtocolSpec s;
    s.kind = kind;
    s.drive = c.drive;
    s.T = T;
    s.noise = c.noise;
    return s;
}

inline std::vector<double> t_grid(const ExperimentConfig& c) { return linspace(c.T_min, c.T_max, c.T_count); }

inline int run_qfi(const ExperimentConfig& c, std::ostream& out) {
    const ProtocolSpec spec = base_spec(c, c.protocol, c.T);
    const QfiResult q = protocol_qfi(spec);
    const char* unit = c.protocol == ProtocolKind::AmplitudeOptimal ? "us^2 (per rad/us)^2" : "us^2";
    out << "qfi[" << to_string(c.protocol) << "] T=" << short_number(c.T) << " us: " << short_number(q.value) << " "
        << unit << "\n";
    if (c.output_given) {
        Table t{"qfi", {"protocol", "T", "qfi", "method"}, {"", "us", "us^2", ""}, {}};
        t.add_row({std::string(to_string(c.protocol)), c.T, q.value, std::string(to_string(q.method))});
        write_table(c.out, t, c.format, c.config_hash());
    }
    return 0;
}

inline int run_sweep_sensitivity(const ExperimentConfig& c, std::ostream& out) {
    std::vector<ProtocolKind> kinds;
    if (c.all_protocols) kinds = {ProtocolKind::RamseyUncontrolled, ProtocolKind::FrequencyOptimal};
    else kinds = {c.protocol};
    const auto times = t_grid(c);
    Table t{"sensitivity",
            {"T", "slope", "slope_stderr", "sensitivity", "qfi", "protocol"},
            {"us", "rad/(rad/us)", "rad/(rad/us)", "rad/us", "us^2", ""},
            {}};
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        SlopeFitOptions o;
        o.mode = c.mode;
        o.shots = c.shots;
        o.seed = derive_seed(c.seed, k);
        o.threads = c.threads;
        o.parameter = kinds[k] == ProtocolKind::AmplitudeOptimal ? SweepParameter::Amplitude : SweepParameter::Omega;
        const auto points = sensitivity_sweep(base_spec(c, kinds[k], 1.0), times, o, c.omega_points, c.omega_span);
        for (const auto& p : points) {
            t.add_row({p.T, p.slope, p.slope_stderr, p.sensitivity, p.qfi.value, std::string(to_string(kinds[k]))});
        }
    }
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    out << "sweep-sensitivity: " << t.rows.size() << " rows -> " << path.string() << "\n";
    return 0;
}

inline int run_phase_noise(const ExperimentConfig& c, std::ostream& out) {
    const auto counts = log_counts(c.N_min, c.N_max, c.N_count);
    const auto points = phase_noise_scan(base_spec(c, c.protocol, c.T), counts, c.repetitions, c.seed, c.threads);
    Table t{"phase_noise", {"N", "stddev_phase"}, {"shots per quadrature", "rad"}, {}};
    std::vector<double> lx, ly;
    for (const auto& p : points) {
        t.add_row({static_cast<std::int64_t>(p.shots), p.stddev_phase});
        lx.push_back(std::log(static_cast<double>(p.shots)));
        ly.push_back(std::log(p.stddev_phase));
    }
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    out << "phase-noise: " << t.rows.size() << " rows";
    if (lx.size() >= 3) out << ", exponent " << short_number(linear_regression(lx, ly).slope);
    out << " -> " << path.string() << "\n";
    return 0;
}

inline int run_landscape(const ExperimentConfig& c, std::ostream& out) {
    LandscapeOptions o;
    o.mode = c.mode;
    o.shots = c.shots;
    o.seed = c.seed;
    o.threads = c.threads;
    o.pulse_offset = c.pulse_offset;
    o.noise = c.noise;
    o.slope_points = c.omega_points;
    const LandscapeGrid g = landscape_sweep(c.drive, c.landscape, c.T, o);
    Table t{"landscape", {"omega_c", "delta_theta", "qfi"}, {"rad/us", "rad", "us^2"}, {}};
    for (std::size_t i = 0; i < g.control_freq_axis.size(); ++i) {
        for (std::size_t j = 0; j < g.control_phase_axis.size(); ++j) {
            t.add_row({g.control_freq_axis[i], g.control_phase_axis[j], g.at(i, j)});
        }
    }
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    const auto [bi, bj] = g.argmax();
    out << "sweep-landscape: " << t.rows.size() << " cells, max qfi " << short_number(g.at(bi, bj))
        << " at omega_c/omega=" << short_number(g.control_freq_axis[bi] / c.drive.omega)
        << " delta_theta=" << short_number(g.control_phase_axis[bj]) << " -> " << path.string() << "\n";
    return 0;
}

inline int run_adapt(const ExperimentConfig& c, std::ostream& out) {
    AdaptiveOptions o;
    o.mode = c.mode;
    o.shots_per_round = c.shots;
    o.rounds = c.rounds;
    o.time_budget = c.budget;
    o.seed = c.seed;
    o.noise = c.noise;
    o.initial_T = c.T0;
    o.omega_guess = c.omega_guess;
    const AdaptiveTrajectory traj = adaptive_loop(c.drive, o);
    Table t{"adaptive",
            {"n", "T_n", "I_n", "omega_est", "delta_omega"},
            {"", "us", "us^2", "rad/us", "rad/us"},
            {}};
    for (const auto& r : traj.iterations) {
        t.add_row({static_cast<std::int64_t>(r.n), r.T, r.info, r.omega_estimate, r.delta_omega});
    }
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    out << "adapt: " << traj.controlled_rounds() << " controlled rounds, total time "
        << short_number(traj.total_time()) << " us, total information " << short_number(traj.total_information())
        << " us^2 -> " << path.string() << "\n";
    return 0;
}

inline int run_compare_rabi(const ExperimentConfig& c, std::ostream& out) {
    const auto times = t_grid(c);
    const auto points = rabi_comparison(c.drive, times);
    Table t{"rabi",
            {"T", "rabi_qfi", "controlled_qfi", "uncontrolled_qfi"},
            {"us", "us^2", "us^2", "us^2"},
            {}};
    for (const auto& p : points) t.add_row({p.T, p.rabi_qfi, p.controlled_qfi, p.uncontrolled_qfi});
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    out << "compare-rabi: " << t.rows.size() << " rows -> " << path.string() << "\n";
    return 0;
}

inline int run_amplitude(const ExperimentConfig& c, std::ostream& out) {
    const auto times = t_grid(c);
    const auto points = amplitude_comparison(c.drive, times);
    Table t{"amplitude",
            {"T", "slope_uncontrolled", "slope_node", "sensitivity_uncontrolled", "sensitivity_node"},
            {"us", "rad/(rad/us)", "rad/(rad/us)", "rad/us", "rad/us"},
            {}};
    for (const auto& p : points) {
        t.add_row({p.T, p.slope_uncontrolled, p.slope_node, p.sensitivity_uncontrolled, p.sensitivity_node});
    }
    const auto path = write_table(c.out, t, c.format, c.config_hash());
    out << "amplitude: " << t.rows.size() << " rows -> " << path.string() << "\n";
    return 0;
}

inline void report(std::ostream& err, const std::string& kind, const std::string& key, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    if (!key.empty()) j["key"] = key;
    j["message"] = message;
    err << j.dump() << "\n";
}

}  // namespace detail

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Runs one command line (without the program name). Results go to files,
/// the summary to `out`, and failures to `err` as one JSON object.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qfi-lab: Fisher information of a qubit sensing an AC signal under pulse control", "qfi-lab"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every subcommand");

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    for (const auto& cmd : commands()) {
        CLI::App* sc = app.add_subcommand(cmd.name, cmd.description);
        for (const auto& key : cmd.keys) {
            const KeySpec* spec = find_key(key);
            if (spec->kind == KeyKind::Flag) {
                opts[cmd.name][key] = sc->add_flag("--" + key, flags[cmd.name][key], spec->help);
            } else {
                opts[cmd.name][key] = sc->add_option("--" + key, raw[cmd.name][key], spec->help);
            }
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        std::string key;
        const std::string msg = e.what();
        const auto pos = msg.find("--");
        if (pos != std::string::npos) {
            const auto end = msg.find_first_of(" ,:", pos);
            key = msg.substr(pos + 2, end == std::string::npos ? std::string::npos : end - pos - 2);
        }
        detail::report(err, "config", key, msg);
        return kExitConfig;
    }

    const Command* cmd = nullptr;
    for (const auto& c : commands()) {
        if (app.got_subcommand(c.name)) cmd = &c;
    }

    ExperimentConfig config;
    try {
        Settings settings;
        const auto& mine = opts[cmd->name];
        if (mine.at("config")->count() > 0) load_config_file(raw[cmd->name]["config"], *cmd, settings);
        for (const auto& key : cmd->keys) {
            if (key == "config" || mine.at(key)->count() == 0) continue;
            if (find_key(key)->kind == KeyKind::Flag) settings.set(key, flags[cmd->name][key]);
            else settings.set(key, raw[cmd->name][key]);
        }
        config = resolve(*cmd, settings);
    } catch (const ConfigError& e) {
        detail::report(err, "config", e.key(), e.what());
        return kExitConfig;
    } catch (const Error& e) {
        detail::report(err, "config", "", e.what());
        return kExitConfig;
    }

    try {
        if (cmd->name == "qfi") return detail::run_qfi(config, out);
        if (cmd->name == "sweep-sensitivity") return detail::run_sweep_sensitivity(config, out);
        if (cmd->name == "phase-noise") return detail::run_phase_noise(config, out);
        if (cmd->name == "sweep-landscape") return detail::run_landscape(config, out);
        if (cmd->name == "adapt") return detail::run_adapt(config, out);
        if (cmd->name == "compare-rabi") return detail::run_compare_rabi(config, out);
        if (cmd->name == "amplitude") return detail::run_amplitude(config, out);
    } catch (const Error& e) {
        detail::report(err, std::string(to_string(e.code())), "", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        detail::report(err, "runtime", "", e.what());
        return kExitRuntime;
    }
    detail::report(err, "config", "", "no subcommand");
    return kExitConfig;
}

inline int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace qfilab::cli
