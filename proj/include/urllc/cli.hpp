// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command implementations behind the `urllc` tool. Each command turns a
// parsed scenario plus options into a ResultTable; run_cli adds argument
// parsing, output files and exit codes.

#pragma once

#include "urllc/csv.hpp"
#include "urllc/error.hpp"
#include "urllc/optimizer.hpp"
#include "urllc/queueing.hpp"
#include "urllc/random.hpp"
#include "urllc/scenario.hpp"
#include "urllc/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace urllc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2 };

struct CommandOutcome {
    ResultTable table;
    int exit_code = kOk;
    std::string message;              ///< diagnostic for stderr, empty on success
    std::optional<ResultTable> extra; ///< secondary output (delay histogram)
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline void add_common_metadata(ResultTable& t, const ScenarioFile& f, const std::string& command)
{
    t.add_metadata("tool", std::string("urllc ") + kVersion);
    t.add_metadata("command", command);
    t.add_metadata("scenario_hash", f.hash);
    std::string defaults;
    for (const auto& d : f.defaults_applied) {
        defaults += (defaults.empty() ? "" : ";") + d;
    }
    t.add_metadata("defaults_applied", defaults.empty() ? "none" : defaults);
}

inline void add_rng_metadata(ResultTable& t, std::uint64_t seed)
{
    t.add_metadata("rng", kRngName);
    t.add_metadata("seed", std::to_string(seed));
}

inline MultiUserScenario select_users(const MultiUserScenario& s, const std::vector<int>& users)
{
    if (users.empty()) {
        return s;
    }
    MultiUserScenario out = s;
    out.users.clear();
    for (int k : users) {
        if (k < 0 || k >= static_cast<int>(s.users.size())) {
            throw ParseError("--users: no user with index " + std::to_string(k));
        }
        out.users.push_back(s.users[static_cast<std::size_t>(k)]);
    }
    return out;
}

inline double distance_of(const ScenarioFile& f, int id)
{
    return f.user_entries.at(static_cast<std::size_t>(id)).distance_m;
}

inline PolicyConfig policy_for(const LinkAllocation& a, const UserLink& user, const MultiUserScenario& s)
{
    SpectrumAllocation spec = s.spectrum(a.subcarriers);
    return PolicyConfig(a.threshold_power_w, a.required_snr, s.qos.frame_s * a.effective_bandwidth, a.split.eps_c,
                        spec, user.channel, s.packet_bits);
}

} // namespace detail

// ----- optimize ------------------------------------------------------------

struct OptimizeOptions {
    std::vector<int> users; ///< subset by index; empty = all
    bool exhaustive = true;
};

inline CommandOutcome cmd_optimize(const ScenarioFile& file, const OptimizeOptions& opt = {})
{
    CommandOutcome out;
    out.table = ResultTable({{"user", ColumnKind::integer},
                             {"distance_m", ColumnKind::real},
                             {"traffic", ColumnKind::text},
                             {"subcarriers", ColumnKind::integer},
                             {"eps_c", ColumnKind::probability},
                             {"eps_q", ColumnKind::probability},
                             {"eps_h", ColumnKind::probability},
                             {"required_snr", ColumnKind::real},
                             {"theta", ColumnKind::real},
                             {"effective_bandwidth_pk_s", ColumnKind::real},
                             {"threshold_power_w", ColumnKind::real},
                             {"exhaustive_subcarriers", ColumnKind::integer},
                             {"exhaustive_power_w", ColumnKind::real}});
    auto& t = out.table;
    detail::add_common_metadata(t, file, "optimize");
    const auto scenario = detail::select_users(file.scenario, opt.users);

    MultiUserSolution greedy;
    try {
        greedy = solve_multi_user(scenario);
    } catch (const InfeasibleError& e) {
        out.exit_code = kInfeasible;
        out.message = e.what();
        t.add_metadata("status", "infeasible");
        return out;
    }
    std::optional<MultiUserSolution> exhaustive;
    if (opt.exhaustive) {
        try {
            exhaustive = exhaustive_multi_user(scenario);
            t.add_metadata("exhaustive", "done");
        } catch (const SizeError&) {
            t.add_metadata("exhaustive", "skipped (search space above 1e6)");
        } catch (const InfeasibleError&) {
            t.add_metadata("exhaustive", "infeasible");
        }
    } else {
        t.add_metadata("exhaustive", "disabled");
    }

    for (std::size_t k = 0; k < greedy.links.size(); ++k) {
        const auto& a = greedy.links[k];
        const auto& user = scenario.users[k];
        t.add_row({static_cast<std::int64_t>(user.id), detail::distance_of(file, user.id), user.traffic.name(),
                   static_cast<std::int64_t>(a.subcarriers), a.split.eps_c, a.split.eps_q, a.split.eps_h,
                   a.required_snr, a.theta, a.effective_bandwidth, a.threshold_power_w,
                   exhaustive ? Cell(static_cast<std::int64_t>(exhaustive->links[k].subcarriers)) : Cell(std::int64_t{-1}),
                   exhaustive ? exhaustive->links[k].threshold_power_w : detail::kNaN});
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", greedy.total_power_w);
    t.add_metadata("total_power_w", buf);
    if (exhaustive) {
        std::snprintf(buf, sizeof buf, "%.12g", exhaustive->total_power_w);
        t.add_metadata("exhaustive_total_power_w", buf);
    }
    if (greedy.exceeds_max_power) {
        t.add_metadata("warning", "total power exceeds spectrum.max_total_power");
    }
    return out;
}

// ----- simulate ------------------------------------------------------------

enum class AllocationChoice { optimized, equal };

struct SimulateOptions {
    std::optional<std::uint64_t> frames;
    std::optional<std::uint64_t> seed;
    AllocationChoice allocation = AllocationChoice::optimized;
    std::vector<int> users;
};

inline CommandOutcome cmd_simulate(const ScenarioFile& file, const SimulateOptions& opt = {})
{
    CommandOutcome out;
    out.table = ResultTable({{"user", ColumnKind::integer},
                             {"subcarriers", ColumnKind::integer},
                             {"threshold_power_w", ColumnKind::real},
                             {"arrived", ColumnKind::real},
                             {"delivered", ColumnKind::real},
                             {"dropped_proactive", ColumnKind::real},
                             {"dropped_deadline", ColumnKind::real},
                             {"errored_transmission", ColumnKind::real},
                             {"still_queued", ColumnKind::real},
                             {"eps_c", ColumnKind::probability},
                             {"eps_q", ColumnKind::probability},
                             {"eps_h", ColumnKind::probability},
                             {"eps_h_stderr", ColumnKind::probability},
                             {"eps_total", ColumnKind::probability},
                             {"max_power_w", ColumnKind::real},
                             {"intuitive_dropped", ColumnKind::real},
                             {"intuitive_eps_h", ColumnKind::probability},
                             {"status", ColumnKind::text}});
    ResultTable hist({{"user", ColumnKind::integer},
                      {"threshold_frames", ColumnKind::real},
                      {"empirical_ccdf", ColumnKind::probability},
                      {"analytic_bound", ColumnKind::probability}});
    auto& t = out.table;
    const std::uint64_t frames = opt.frames.value_or(file.simulation.frames);
    const std::uint64_t seed = opt.seed.value_or(file.simulation.seed);
    if (frames < 1) {
        throw ParseError("--frames must be at least 1");
    }
    detail::add_common_metadata(t, file, "simulate");
    detail::add_rng_metadata(t, seed);
    t.add_metadata("frames", std::to_string(frames));
    t.add_metadata("allocation", opt.allocation == AllocationChoice::optimized ? "optimized" : "equal");
    detail::add_common_metadata(hist, file, "simulate");
    detail::add_rng_metadata(hist, seed);

    const auto scenario = detail::select_users(file.scenario, opt.users);
    MultiUserSolution solution;
    try {
        solution = solve_multi_user(scenario);
        if (opt.allocation == AllocationChoice::equal) {
            const double e = scenario.qos.loss_budget / 3.0;
            for (std::size_t k = 0; k < solution.links.size(); ++k) {
                solution.links[k] = solve_fixed_split(scenario.users[k], scenario.qos, scenario.subcarrier_bandwidth_hz,
                                                      solution.links[k].subcarriers, scenario.packet_bits, {e, e, e});
            }
        }
    } catch (const InfeasibleError& e) {
        out.exit_code = kInfeasible;
        out.message = e.what();
        t.add_metadata("status", "infeasible");
        return out;
    }

    const double deadline = scenario.qos.queue_delay_frames();
    std::vector<double> thresholds;
    for (int d = 0; d <= static_cast<int>(std::floor(deadline + 1e-9)); ++d) {
        thresholds.push_back(d);
    }
    for (std::size_t k = 0; k < solution.links.size(); ++k) {
        const auto& a = solution.links[k];
        const auto& user = scenario.users[k];
        SimulationConfig cfg;
        cfg.arrivals = user.traffic;
        cfg.service = detail::policy_for(a, user, scenario);
        cfg.mode = QueueMode::packet;
        cfg.frames = frames;
        cfg.seed = seed + 4 * static_cast<std::uint64_t>(user.id); // four streams per user
        cfg.deadline_frames = deadline;
        cfg.ccdf_thresholds_frames = thresholds;
        const auto proactive = simulate(cfg);
        cfg.drop = DropMode::intuitive;
        cfg.track_power = false;
        const auto intuitive = simulate(cfg);

        const auto& c = proactive.counters;
        const double total = proactive.eps_c.value + proactive.eps_q.value + proactive.eps_h.value;
        t.add_row({static_cast<std::int64_t>(user.id), static_cast<std::int64_t>(a.subcarriers), a.threshold_power_w,
                   c.arrived, c.delivered, c.dropped_proactive, c.dropped_deadline, c.errored_transmission,
                   c.still_queued, proactive.eps_c.value, proactive.eps_q.value, proactive.eps_h.value,
                   proactive.eps_h.std_error, total, proactive.max_power_w, intuitive.counters.dropped_proactive,
                   intuitive.eps_h.value, proactive.unstable ? proactive.diagnostic : std::string("ok")});
        for (const auto& p : proactive.ccdf) {
            hist.add_row({static_cast<std::int64_t>(user.id), p.threshold_frames, p.ccdf,
                          delay_violation_upper_bound(a.theta, a.effective_bandwidth,
                                                      p.threshold_frames * scenario.qos.frame_s)});
        }
    }
    out.extra = std::move(hist);
    return out;
}

// ----- validate-bound ------------------------------------------------------

struct ValidateBoundOptions {
    std::optional<double> violation; ///< eps^q; scenario value when unset
    std::optional<std::uint64_t> frames;
    std::optional<std::uint64_t> seed;
    int user = 0;
};

inline CommandOutcome cmd_validate_bound(const ScenarioFile& file, const ValidateBoundOptions& opt = {})
{
    CommandOutcome out;
    out.table = ResultTable({{"threshold_frames", ColumnKind::real},
                             {"L", ColumnKind::integer},
                             {"empirical_ccdf", ColumnKind::probability},
                             {"stderr", ColumnKind::probability},
                             {"hits", ColumnKind::integer},
                             {"analytic_bound", ColumnKind::probability},
                             {"mdl_exact", ColumnKind::probability}});
    auto& t = out.table;
    const auto& s = file.scenario;
    if (opt.user < 0 || opt.user >= static_cast<int>(s.users.size())) {
        throw ParseError("--user: no user with index " + std::to_string(opt.user));
    }
    const auto& user = s.users[static_cast<std::size_t>(opt.user)];
    const double eps_q = opt.violation.value_or(file.simulation.bound_violation);
    if (!(eps_q > 0.0 && eps_q < 1.0)) {
        throw ParseError("--epsilon-q must lie in (0, 1)");
    }
    const std::uint64_t frames = opt.frames.value_or(file.simulation.frames);
    const std::uint64_t seed = opt.seed.value_or(file.simulation.seed);
    if (frames < 1) {
        throw ParseError("--frames must be at least 1");
    }
    const QueueMode mode = file.simulation.mode.value_or(QueueMode::fluid);
    detail::add_common_metadata(t, file, "validate-bound");
    detail::add_rng_metadata(t, seed);
    t.add_metadata("frames", std::to_string(frames));
    t.add_metadata("mode", mode == QueueMode::fluid ? "fluid" : "packet");
    t.add_metadata("traffic", user.traffic.name());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", eps_q);
    t.add_metadata("epsilon_q", buf);

    const double dq = s.qos.queue_delay_frames();
    const bool poisson = user.traffic.get_if<PoissonArrivals>() != nullptr;
    if (!(user.traffic.mean_rate() > 0.0)) {
        // No arrivals: no delay ever exceeds a threshold; the bound collapses
        // to eps^(D / D^q).
        t.add_metadata("service_pk_per_frame", "0");
        for (int d = 0; d <= static_cast<int>(std::floor(dq + 1e-9)); ++d) {
            t.add_row({static_cast<double>(d), static_cast<std::int64_t>(d), 0.0, 0.0, std::int64_t{0},
                       std::pow(eps_q, d / dq), poisson ? 0.0 : detail::kNaN});
        }
        return out;
    }

    const auto q = qos_exponent(user.traffic, s.qos.queue_delay_s(), eps_q, s.qos.frame_s);
    const double service = q.effective_bandwidth * s.qos.frame_s;
    std::snprintf(buf, sizeof buf, "%.12g", service);
    t.add_metadata("service_pk_per_frame", buf);
    std::snprintf(buf, sizeof buf, "%.12g", q.theta);
    t.add_metadata("theta", buf);

    // Thresholds at multiples of the service time 1/s up to D^q.
    const int max_l = static_cast<int>(std::floor(service * dq + 1e-9));
    std::vector<double> thresholds;
    for (int l = 0; l <= max_l; ++l) {
        thresholds.push_back(l / service);
    }
    SimulationConfig cfg;
    cfg.arrivals = user.traffic;
    cfg.service = ConstantService{service, 0.0};
    cfg.mode = mode;
    cfg.frames = frames;
    cfg.seed = seed;
    cfg.ccdf_thresholds_frames = thresholds;
    const auto res = simulate(cfg);
    if (res.unstable) {
        t.add_metadata("warning", res.diagnostic);
    }
    for (int l = 0; l <= max_l; ++l) {
        const auto& p = res.ccdf[static_cast<std::size_t>(l)];
        const double bound = delay_violation_upper_bound(q.theta, q.effective_bandwidth, p.threshold_frames * s.qos.frame_s);
        double exact = detail::kNaN;
        if (poisson) {
            exact = mdl_queue_ccdf(user.traffic.mean_rate() / service, l);
        }
        t.add_row({p.threshold_frames, static_cast<std::int64_t>(l), p.ccdf, p.std_error,
                   static_cast<std::int64_t>(p.hits), bound, exact});
    }
    return out;
}

// ----- sweep ---------------------------------------------------------------

struct SweepParameter {
    std::string name;
    std::vector<double> values;
};

/// "name=a..b" (integer steps) or "name=v1,v2,...".
inline SweepParameter parse_sweep_parameter(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParseError("--param: expected name=a..b or name=v1,v2,...");
    }
    SweepParameter p{spec.substr(0, eq), {}};
    static const std::vector<std::string> known = {"Nt", "m", "Nc_max", "distance", "loss_budget", "rate"};
    if (std::find(known.begin(), known.end(), p.name) == known.end()) {
        throw ParseError("--param: unknown parameter '" + p.name + "' (Nt, m, Nc_max, distance, loss_budget, rate)");
    }
    const std::string rhs = spec.substr(eq + 1);
    const auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ParseError("--param: cannot read '" + s + "'");
        }
        if (used != s.size()) {
            throw ParseError("--param: cannot read '" + s + "'");
        }
        return v;
    };
    if (const auto dots = rhs.find(".."); dots != std::string::npos) {
        const double a = number(rhs.substr(0, dots));
        const double b = number(rhs.substr(dots + 2));
        if (std::floor(a) != a || std::floor(b) != b || b < a) {
            throw ParseError("--param: a..b ranges need integers with a <= b");
        }
        for (double v = a; v <= b; v += 1.0) {
            p.values.push_back(v);
        }
    } else {
        std::stringstream ss(rhs);
        std::string item;
        while (std::getline(ss, item, ',')) {
            p.values.push_back(number(item));
        }
    }
    if (p.values.empty()) {
        throw ParseError("--param: no values");
    }
    return p;
}

inline MultiUserScenario apply_sweep_value(const ScenarioFile& file, const std::string& name, double v)
{
    MultiUserScenario s = file.scenario;
    const auto as_int = [&](const char* what) {
        if (std::floor(v) != v || v < 1.0) {
            throw ParseError(std::string("--param: ") + what + " needs positive integers");
        }
        return static_cast<int>(v);
    };
    if (name == "Nc_max") {
        s.max_subcarriers = as_int("Nc_max");
    }
    for (auto& u : s.users) {
        if (name == "Nt") {
            u.channel.antennas = as_int("Nt");
        } else if (name == "m") {
            u.channel.nakagami_m = v;
        } else if (name == "distance") {
            u.channel.average_gain = path_loss_gain(v);
        } else if (name == "rate") {
            if (!(v >= 0.0)) {
                throw ParseError("--param: rate must be nonnegative");
            }
            u.traffic = ArrivalModel::poisson(v * s.qos.frame_s);
        }
    }
    if (name == "loss_budget") {
        s.qos.loss_budget = v;
    }
    try {
        s.validate();
    } catch (const std::logic_error& e) {
        throw ParseError(std::string("--param: ") + e.what());
    }
    return s;
}

inline CommandOutcome cmd_sweep(const ScenarioFile& file, const SweepParameter& param)
{
    CommandOutcome out;
    out.table = ResultTable({{"value", ColumnKind::real},
                             {"user", ColumnKind::integer},
                             {"subcarriers", ColumnKind::integer},
                             {"eps_c", ColumnKind::probability},
                             {"eps_q", ColumnKind::probability},
                             {"eps_h", ColumnKind::probability},
                             {"required_snr", ColumnKind::real},
                             {"threshold_power_w", ColumnKind::real},
                             {"equal_split_power_w", ColumnKind::real},
                             {"equal_split_gap", ColumnKind::real},
                             {"status", ColumnKind::text}});
    auto& t = out.table;
    detail::add_common_metadata(t, file, "sweep");
    t.add_metadata("parameter", param.name);
    std::size_t feasible = 0;
    for (double v : param.values) {
        const auto s = apply_sweep_value(file, param.name, v);
        try {
            const auto sol = solve_multi_user(s);
            ++feasible;
            for (std::size_t k = 0; k < sol.links.size(); ++k) {
                const auto& a = sol.links[k];
                const double e = s.qos.loss_budget / 3.0;
                double equal = detail::kNaN;
                try {
                    equal = solve_fixed_split(s.users[k], s.qos, s.subcarrier_bandwidth_hz, a.subcarriers,
                                              s.packet_bits, {e, e, e})
                                .threshold_power_w;
                } catch (const InfeasibleError&) {
                }
                t.add_row({v, static_cast<std::int64_t>(s.users[k].id), static_cast<std::int64_t>(a.subcarriers),
                           a.split.eps_c, a.split.eps_q, a.split.eps_h, a.required_snr, a.threshold_power_w, equal,
                           equal / a.threshold_power_w - 1.0, std::string("ok")});
            }
        } catch (const InfeasibleError& e) {
            for (const auto& u : s.users) {
                t.add_row({v, static_cast<std::int64_t>(u.id), std::int64_t{-1}, detail::kNaN, detail::kNaN,
                           detail::kNaN, detail::kNaN, detail::kNaN, detail::kNaN, detail::kNaN,
                           std::string("infeasible")});
            }
            out.message = e.what();
        }
    }
    if (feasible == 0) {
        out.exit_code = kInfeasible;
    } else {
        out.message.clear();
    }
    return out;
}

// ----- argument handling -----------------------------------------------------

/// Relative output paths are placed under $URLLC_OUT_DIR when it is set.
inline std::filesystem::path resolve_output(const std::string& path)
{
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("URLLC_OUT_DIR"); dir != nullptr && *dir != '\0') {
            return std::filesystem::path(dir) / p;
        }
    }
    return p;
}

inline void write_table(const ResultTable& table, const std::string& path, std::ostream& fallback)
{
    if (path.empty() || path == "-") {
        table.write(fallback);
        return;
    }
    const auto target = resolve_output(path);
    std::ofstream file(target, std::ios::binary);
    if (!file) {
        throw ParseError(target.string() + ": cannot open for writing");
    }
    table.write(file);
    if (!file) {
        throw ParseError(target.string() + ": write failed");
    }
}

/// Full command line entry point. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Minimum-power URLLC link design and queue simulation", "urllc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string scenario_path;
    std::string out_path;
    std::string format = "csv";
    const auto common = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
        sub->add_option("--out", out_path, "Output CSV path (default: stdout)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));
    };

    OptimizeOptions opt_optimize;
    bool no_exhaustive = false;
    auto* optimize = app.add_subcommand("optimize", "Per-user allocation: greedy plus exhaustive check");
    common(optimize);
    optimize->add_option("--users", opt_optimize.users, "Subset of user indices")->delimiter(',');
    optimize->add_flag("--no-exhaustive", no_exhaustive, "Skip the exhaustive allocation");

    SimulateOptions opt_simulate;
    std::uint64_t sim_frames = 0;
    std::uint64_t sim_seed = 0;
    std::string allocation = "optimized";
    std::string hist_out;
    auto* simulate_cmd = app.add_subcommand("simulate", "Policy simulation of the optimized links");
    common(simulate_cmd);
    auto* sim_frames_opt = simulate_cmd->add_option("--frames", sim_frames, "Frames to simulate")->check(CLI::PositiveNumber);
    auto* sim_seed_opt = simulate_cmd->add_option("--seed", sim_seed, "Base seed");
    simulate_cmd->add_option("--allocation", allocation, "optimized or equal reliability split")
        ->check(CLI::IsMember({"optimized", "equal"}));
    simulate_cmd->add_option("--users", opt_simulate.users, "Subset of user indices")->delimiter(',');
    simulate_cmd->add_option("--hist-out", hist_out, "Delay CCDF output CSV");

    ValidateBoundOptions opt_bound;
    double bound_eps = 0.0;
    std::uint64_t bound_frames = 0;
    std::uint64_t bound_seed = 0;
    auto* validate = app.add_subcommand("validate-bound", "Constant-service delay CCDF against the analytic bound");
    common(validate);
    auto* bound_eps_opt = validate->add_option("--epsilon-q", bound_eps, "Delay violation target");
    auto* bound_frames_opt = validate->add_option("--frames", bound_frames, "Frames to simulate")->check(CLI::PositiveNumber);
    auto* bound_seed_opt = validate->add_option("--seed", bound_seed, "Seed");
    validate->add_option("--user", opt_bound.user, "User index");

    std::string sweep_spec;
    auto* sweep = app.add_subcommand("sweep", "Re-solve over a parameter range");
    common(sweep);
    sweep->add_option("--param", sweep_spec, "name=a..b or name=v1,v2 (Nt, m, Nc_max, distance, loss_budget, rate)")
        ->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (app.get_subcommands().empty()) {
            err << "run with --help for usage\n";
        }
        return kUsage;
    }

    try {
        const auto file = load_scenario(scenario_path);
        CommandOutcome result;
        if (optimize->parsed()) {
            opt_optimize.exhaustive = !no_exhaustive;
            result = cmd_optimize(file, opt_optimize);
        } else if (simulate_cmd->parsed()) {
            if (*sim_frames_opt) {
                opt_simulate.frames = sim_frames;
            }
            if (*sim_seed_opt) {
                opt_simulate.seed = sim_seed;
            }
            opt_simulate.allocation = allocation == "equal" ? AllocationChoice::equal : AllocationChoice::optimized;
            result = cmd_simulate(file, opt_simulate);
        } else if (validate->parsed()) {
            if (*bound_eps_opt) {
                opt_bound.violation = bound_eps;
            }
            if (*bound_frames_opt) {
                opt_bound.frames = bound_frames;
            }
            if (*bound_seed_opt) {
                opt_bound.seed = bound_seed;
            }
            result = cmd_validate_bound(file, opt_bound);
        } else {
            result = cmd_sweep(file, parse_sweep_parameter(sweep_spec));
        }
        if (!result.message.empty()) {
            err << (result.exit_code == kInfeasible ? "infeasible: " : "note: ") << result.message << '\n';
        }
        if (result.exit_code != kInfeasible || !result.table.rows().empty()) {
            write_table(result.table, out_path, out);
        }
        if (result.extra && !hist_out.empty()) {
            write_table(*result.extra, hist_out, out);
        }
        return result.exit_code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace urllc::cli
