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

// Scenario files: JSON documents whose numeric fields may carry unit
// suffixes ("0.1 ms", "0.15 MHz", "-173 dBm/Hz", "20 bytes", ...).
//
//   {
//     "qos":        { "max_delay": "1 ms", "loss_budget": 1e-7,
//                     "frame": "0.1 ms", "data_phase": "0.06 ms" },
//     "channel":    { "antennas": 8, "nakagami_m": 1, "coherence_frames": 10,
//                     "noise_psd": "-173 dBm/Hz", "path_loss": true },
//     "spectrum":   { "subcarrier_bandwidth": "0.15 MHz", "max_subcarriers": 16 },
//     "packet_size": "20 bytes",
//     "users":      [ { "distance": "200 m",
//                       "traffic": { "type": "poisson", "rate": "1000 pk/s" } } ],
//     "simulation": { "frames": 1000000, "seed": 1, "mode": "packet" }
//   }
//
// Omitted blocks and fields take the defaults below; every default applied
// is recorded so that outputs can report it.

#pragma once

#include "urllc/error.hpp"
#include "urllc/optimizer.hpp"
#include "urllc/simulator.hpp"
#include "urllc/traffic.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace urllc {

/// Malformed scenario: bad JSON, unknown unit, wrong type or out-of-range
/// value. The message names the offending field.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Quantity { time, frequency, power, noise_psd, distance, bits, rate, plain };

namespace detail {

inline std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& ch : out) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return out;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Converts `value unit` to SI. `frame_s` is needed for pk/frame rates.
inline double to_si(double value, const std::string& unit_raw, Quantity kind, double frame_s, const std::string& path)
{
    const std::string unit = lower(unit_raw);
    const auto fail = [&]() -> double {
        throw ParseError(path + ": unit '" + unit_raw + "' is not valid here");
    };
    switch (kind) {
    case Quantity::plain:
        return unit.empty() ? value : fail();
    case Quantity::time:
        if (unit.empty() || unit == "s") return value;
        if (unit == "ms") return value * 1e-3;
        if (unit == "us") return value * 1e-6;
        if (unit == "frames" || unit == "frame") return value * frame_s;
        return fail();
    case Quantity::frequency:
        if (unit.empty() || unit == "hz") return value;
        if (unit == "khz") return value * 1e3;
        if (unit == "mhz") return value * 1e6;
        if (unit == "ghz") return value * 1e9;
        return fail();
    case Quantity::power:
        if (unit.empty() || unit == "w") return value;
        if (unit == "mw") return value * 1e-3;
        if (unit == "dbm") return db_to_linear(value) * 1e-3;
        if (unit == "dbw") return db_to_linear(value);
        return fail();
    case Quantity::noise_psd:
        if (unit.empty() || unit == "w/hz") return value;
        if (unit == "dbm/hz") return db_to_linear(value) * 1e-3;
        if (unit == "dbw/hz") return db_to_linear(value);
        return fail();
    case Quantity::distance:
        if (unit.empty() || unit == "m") return value;
        if (unit == "km") return value * 1e3;
        return fail();
    case Quantity::bits:
        if (unit.empty() || unit == "bits" || unit == "bit") return value;
        if (unit == "bytes" || unit == "byte") return value * 8.0;
        return fail();
    case Quantity::rate: // SI: packets per second
        if (unit.empty() || unit == "pk/s") return value;
        if (unit == "pk/frame") return value / frame_s;
        return fail();
    }
    return fail();
}

} // namespace detail

/// Reads a number, or a string "<number> <unit>", as an SI value.
inline double parse_quantity(const nlohmann::json& v, Quantity kind, const std::string& path, double frame_s = 1e-4)
{
    if (v.is_number()) {
        return v.get<double>();
    }
    if (!v.is_string()) {
        throw ParseError(path + ": expected a number or a \"<value> <unit>\" string");
    }
    const auto text = v.get<std::string>();
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParseError(path + ": cannot read a number from '" + text + "'");
    }
    std::string unit = text.substr(used);
    const auto first = unit.find_first_not_of(" \t");
    unit = first == std::string::npos ? std::string() : unit.substr(first, unit.find_last_not_of(" \t") - first + 1);
    return detail::to_si(value, unit, kind, frame_s, path);
}

struct SimulationBlock {
    std::uint64_t frames = 1000000;
    std::uint64_t seed = 1;
    std::optional<QueueMode> mode; ///< unset: each command picks its own
    double bound_violation = 1e-8; ///< eps^q used by bound validation
};

struct UserEntry {
    double distance_m = 200.0;
    double average_gain = 0.0; ///< linear mu actually used
};

struct ScenarioFile {
    MultiUserScenario scenario;
    std::vector<UserEntry> user_entries;
    SimulationBlock simulation;
    std::vector<std::string> defaults_applied;
    std::string hash; ///< FNV-1a 64 of the source text, hex
};

namespace detail {

inline std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

class BlockReader {
public:
    BlockReader(const nlohmann::json& root, std::string name, std::vector<std::string>& defaults)
        : name_(std::move(name)), defaults_(defaults)
    {
        if (!root.contains(name_)) {
            defaults_.push_back(name_);
            missing_ = true;
            return;
        }
        block_ = &root.at(name_);
        if (!block_->is_object()) {
            throw ParseError(name_ + ": expected an object");
        }
        for (const auto& [key, _] : block_->items()) {
            known_.push_back(key);
        }
    }

    double quantity(const std::string& key, Quantity kind, double fallback, double frame_s = 1e-4)
    {
        const auto* v = find(key);
        if (v == nullptr) {
            note(key);
            return fallback;
        }
        return parse_quantity(*v, kind, path(key), frame_s);
    }

    long long integer(const std::string& key, long long fallback)
    {
        const auto* v = find(key);
        if (v == nullptr) {
            note(key);
            return fallback;
        }
        if (v->is_number_integer()) {
            return v->get<long long>();
        }
        if (v->is_number_float()) {
            const double d = v->get<double>();
            if (std::floor(d) == d && std::abs(d) < 9.0e15) {
                return static_cast<long long>(d);
            }
        }
        throw ParseError(path(key) + ": expected an integer");
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const auto* v = find(key);
        if (v == nullptr) {
            note(key);
            return fallback;
        }
        if (!v->is_boolean()) {
            throw ParseError(path(key) + ": expected true or false");
        }
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        const auto* v = find(key);
        if (v == nullptr) {
            note(key);
            return fallback;
        }
        if (!v->is_string()) {
            throw ParseError(path(key) + ": expected a string");
        }
        return v->get<std::string>();
    }

    /// Rejects keys nobody asked for (typos would otherwise be silent).
    void finish() const
    {
        for (const auto& key : known_) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw ParseError(path(key) + ": unknown field");
            }
        }
    }

private:
    const nlohmann::json* find(const std::string& key)
    {
        used_.push_back(key);
        if (missing_ || !block_->contains(key)) {
            return nullptr;
        }
        return &block_->at(key);
    }

    void note(const std::string& key)
    {
        if (!missing_) {
            defaults_.push_back(path(key));
        }
    }

    std::string path(const std::string& key) const { return name_ + "." + key; }

    std::string name_;
    std::vector<std::string>& defaults_;
    const nlohmann::json* block_ = nullptr;
    bool missing_ = false;
    std::vector<std::string> known_;
    std::vector<std::string> used_;
};

inline ArrivalModel parse_traffic(const nlohmann::json& t, const std::string& path, double frame_s)
{
    if (!t.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    std::vector<std::string> unused_defaults;
    nlohmann::json wrapper = {{path, t}};
    BlockReader r(wrapper, path, unused_defaults);
    const auto type = r.text("type", "poisson");
    const auto per_frame = [&](const std::string& key, double fallback_pk_s) {
        return r.quantity(key, Quantity::rate, fallback_pk_s, frame_s) * frame_s;
    };
    const auto switch_rate = [&](const std::string& key) {
        // Mean sojourn of 1 s by default.
        const double mean_s = r.quantity(key, Quantity::time, 1.0, frame_s);
        if (!(mean_s > 0.0)) {
            throw ParseError(path + "." + key + ": must be positive");
        }
        return frame_s / mean_s;
    };
    try {
        if (type == "poisson") {
            const double rate = per_frame("rate", 1000.0);
            r.finish();
            return ArrivalModel::poisson(rate);
        }
        if (type == "ipp") {
            const double alpha = switch_rate("mean_off");
            const double beta = switch_rate("mean_on");
            const bool has_on = t.contains("on_rate");
            const double on = has_on ? per_frame("on_rate", 0.0) : 0.0;
            const double mean = has_on ? 0.0 : per_frame("rate", 1000.0);
            r.finish();
            return has_on ? ArrivalModel::ipp(on, alpha, beta) : ArrivalModel::ipp_with_mean(mean, alpha, beta);
        }
        if (type == "spp") {
            const double r1 = per_frame("rate_1", 1000.0);
            const double r2 = per_frame("rate_2", 2000.0);
            const double a1 = switch_rate("mean_1");
            const double a2 = switch_rate("mean_2");
            r.finish();
            return ArrivalModel::spp(r1, r2, a1, a2);
        }
    } catch (const DomainError& e) {
        throw ParseError(path + ": " + e.what());
    }
    throw ParseError(path + ".type: expected poisson, ipp or spp");
}

} // namespace detail

/// Parses scenario text. `origin` prefixes error messages.
inline ScenarioFile parse_scenario(const std::string& text, const std::string& origin = "scenario")
{
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!root.is_object()) {
        throw ParseError(origin + ": top level must be an object");
    }
    for (const auto& [key, _] : root.items()) {
        static const std::vector<std::string> blocks = {"qos", "channel", "spectrum", "packet_size", "users",
                                                        "simulation"};
        if (std::find(blocks.begin(), blocks.end(), key) == blocks.end()) {
            throw ParseError(origin + ": unknown block '" + key + "'");
        }
    }

    ScenarioFile out;
    out.hash = detail::fnv1a_hex(text);
    auto& s = out.scenario;
    auto& defaults = out.defaults_applied;

    try {
        detail::BlockReader qos(root, "qos", defaults);
        s.qos.frame_s = qos.quantity("frame", Quantity::time, 1e-4);
        const double f = s.qos.frame_s;
        s.qos.max_delay_s = qos.quantity("max_delay", Quantity::time, 1e-3, f);
        s.qos.loss_budget = qos.quantity("loss_budget", Quantity::plain, 1e-7);
        s.qos.data_phase_s = qos.quantity("data_phase", Quantity::time, 0.06e-3, f);
        qos.finish();
        s.qos.validate();

        detail::BlockReader chan(root, "channel", defaults);
        ChannelModel base;
        base.antennas = static_cast<int>(chan.integer("antennas", 8));
        base.nakagami_m = chan.quantity("nakagami_m", Quantity::plain, 1.0);
        base.coherence_frames = static_cast<int>(chan.integer("coherence_frames", 10));
        base.noise_psd_w_per_hz = chan.quantity("noise_psd", Quantity::noise_psd, 5.011872336272725e-21);
        const bool path_loss = chan.boolean("path_loss", true);
        chan.finish();

        detail::BlockReader spec(root, "spectrum", defaults);
        s.subcarrier_bandwidth_hz = spec.quantity("subcarrier_bandwidth", Quantity::frequency, 0.15e6);
        s.max_subcarriers = static_cast<int>(spec.integer("max_subcarriers", 4));
        const double pmax = spec.quantity("max_total_power", Quantity::power, -1.0);
        if (pmax > 0.0) {
            s.max_total_power_w = pmax;
        }
        spec.finish();

        if (root.contains("packet_size")) {
            s.packet_bits = parse_quantity(root.at("packet_size"), Quantity::bits, "packet_size");
        } else {
            s.packet_bits = 160.0;
            defaults.push_back("packet_size");
        }

        std::vector<nlohmann::json> users;
        if (root.contains("users")) {
            if (!root.at("users").is_array() || root.at("users").empty()) {
                throw ParseError("users: expected a non-empty array");
            }
            users.assign(root.at("users").begin(), root.at("users").end());
        } else {
            defaults.push_back("users");
            users.push_back(nlohmann::json::object());
        }
        for (std::size_t i = 0; i < users.size(); ++i) {
            const std::string name = "users[" + std::to_string(i) + "]";
            const auto& u = users[i];
            if (!u.is_object()) {
                throw ParseError(name + ": expected an object");
            }
            for (const auto& [key, _] : u.items()) {
                if (key != "distance" && key != "traffic" && key != "average_gain") {
                    throw ParseError(name + "." + key + ": unknown field");
                }
            }
            UserLink link;
            link.id = static_cast<int>(i);
            link.channel = base;
            UserEntry entry;
            if (u.contains("distance")) {
                entry.distance_m = parse_quantity(u.at("distance"), Quantity::distance, name + ".distance");
            }
            if (u.contains("average_gain")) {
                // dB if given with a "dB" suffix, linear otherwise.
                const auto& g = u.at("average_gain");
                if (g.is_string()) {
                    std::string t = g.get<std::string>();
                    std::size_t used = 0;
                    double db = 0.0;
                    try {
                        db = std::stod(t, &used);
                    } catch (const std::exception&) {
                        throw ParseError(name + ".average_gain: cannot read a number");
                    }
                    std::string unit = detail::lower(t.substr(used));
                    unit.erase(0, unit.find_first_not_of(' '));
                    if (unit != "db") {
                        throw ParseError(name + ".average_gain: expected a linear number or '<x> dB'");
                    }
                    entry.average_gain = detail::db_to_linear(db);
                } else {
                    entry.average_gain = parse_quantity(g, Quantity::plain, name + ".average_gain");
                }
            } else if (path_loss) {
                entry.average_gain = path_loss_gain(entry.distance_m);
            } else {
                entry.average_gain = 1.0;
            }
            link.channel.average_gain = entry.average_gain;
            if (u.contains("traffic")) {
                link.traffic = detail::parse_traffic(u.at("traffic"), name + ".traffic", f);
            } else {
                defaults.push_back(name + ".traffic");
                link.traffic = ArrivalModel::poisson(1000.0 * f);
            }
            s.users.push_back(std::move(link));
            out.user_entries.push_back(entry);
        }

        detail::BlockReader sim(root, "simulation", defaults);
        const long long frames = sim.integer("frames", 1000000);
        const long long seed = sim.integer("seed", 1);
        const auto mode = sim.text("mode", "");
        out.simulation.bound_violation = sim.quantity("bound_violation", Quantity::plain, 1e-8);
        sim.finish();
        if (frames < 1) {
            throw ParseError("simulation.frames: must be at least 1");
        }
        if (seed < 0) {
            throw ParseError("simulation.seed: must be nonnegative");
        }
        if (!mode.empty() && mode != "packet" && mode != "fluid") {
            throw ParseError("simulation.mode: expected packet or fluid");
        }
        out.simulation.frames = static_cast<std::uint64_t>(frames);
        out.simulation.seed = static_cast<std::uint64_t>(seed);
        if (!mode.empty()) {
            out.simulation.mode = mode == "fluid" ? QueueMode::fluid : QueueMode::packet;
        }

        s.validate();
    } catch (const ParseError& e) {
        throw ParseError(origin + ": " + e.what());
    } catch (const std::logic_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return out;
}

inline ScenarioFile load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

} // namespace urllc
