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

// Frame-level Monte-Carlo simulator of one user's downlink queue.
//
// Two service models:
//   fluid  - continuous-time FIFO with deterministic service time 1/s frames
//            per packet; arrivals are spread uniformly inside their frame.
//            With Poisson arrivals this is an exact M/D/1 queue.
//   packet - frame-slotted FIFO. In frame n: refresh the gain (block
//            fading), expire packets older than the deadline, serve from
//            the head, apply proactive drops, then append the frame's
//            arrivals. Service may be fractional; a packet departs when its
//            last fraction is served.

#pragma once

#include "urllc/error.hpp"
#include "urllc/phy_rate.hpp"
#include "urllc/queueing.hpp"
#include "urllc/random.hpp"
#include "urllc/traffic.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace urllc {

enum class QueueMode { fluid, packet };
enum class DropMode {
    proactive, ///< threshold-power power and drop policies
    intuitive  ///< whole queue dropped whenever g < g*
};

struct ConstantService {
    double packets_per_frame = 0.0;
    double block_error = 0.0; ///< optional Bernoulli error per served frame
};

/// Loss bookkeeping in packets. Packet mode serves and drops fractions of a
/// packet, so every field is a (mass) count rather than an integer.
struct LossCounters {
    double arrived = 0.0;
    double delivered = 0.0;
    double dropped_proactive = 0.0;
    double dropped_deadline = 0.0;
    double errored_transmission = 0.0;
    double still_queued = 0.0;
    std::uint64_t frames_simulated = 0;

    /// arrived - (all outcomes); zero up to rounding.
    double residual() const
    {
        return arrived - (delivered + dropped_proactive + dropped_deadline + errored_transmission + still_queued);
    }

    LossCounters& operator+=(const LossCounters& o)
    {
        arrived += o.arrived;
        delivered += o.delivered;
        dropped_proactive += o.dropped_proactive;
        dropped_deadline += o.dropped_deadline;
        errored_transmission += o.errored_transmission;
        still_queued += o.still_queued;
        frames_simulated += o.frames_simulated;
        return *this;
    }
};

struct SimulationConfig {
    ArrivalModel arrivals = ArrivalModel::poisson(0.0);
    std::variant<ConstantService, PolicyConfig> service = ConstantService{};
    QueueMode mode = QueueMode::packet;
    DropMode drop = DropMode::proactive;
    std::uint64_t frames = 0;
    std::uint64_t seed = 1;
    std::optional<double> deadline_frames;      ///< reactive drop beyond this waiting time
    std::vector<double> ccdf_thresholds_frames; ///< Pr{delay > x} estimated at each x
    int batches = 50;                           ///< batch-means standard errors
    double instability_queue = 1e6;             ///< backlog (packets) that aborts the run
    int histogram_bins = 64;                    ///< last bin collects the overflow
    bool track_power = true;
};

struct CcdfPoint {
    double threshold_frames;
    std::uint64_t hits;
    double ccdf;
    double std_error;
};

struct ProbabilityEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct SimulationResult {
    LossCounters counters;
    std::uint64_t packets_timed = 0; ///< packets whose delay entered the CCDF
    std::vector<CcdfPoint> ccdf;
    std::vector<std::uint64_t> delay_histogram; ///< bin i: delay in [i, i+1) frames
    ProbabilityEstimate eps_c;
    ProbabilityEstimate eps_q;
    ProbabilityEstimate eps_h;
    double max_power_w = 0.0;
    double mean_power_w = 0.0;
    bool unstable = false;
    std::string diagnostic;
};

namespace detail {

struct BatchAccumulator {
    struct Batch {
        double arrived = 0.0;
        double proactive = 0.0;
        double deadline = 0.0;
        double errored = 0.0;
        std::uint64_t timed = 0;
        std::vector<std::uint64_t> beyond; ///< beyond[i]: delays exceeding only the first i thresholds
    };

    BatchAccumulator(int count, std::size_t thresholds) : batches(static_cast<std::size_t>(count))
    {
        for (auto& b : batches) {
            b.beyond.assign(thresholds + 1, 0);
        }
    }

    std::vector<Batch> batches;
};

inline ProbabilityEstimate batch_ratio(const std::vector<double>& num, const std::vector<double>& den)
{
    double total_num = 0.0;
    double total_den = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        total_num += num[i];
        total_den += den[i];
    }
    ProbabilityEstimate out;
    if (total_den <= 0.0) {
        return out;
    }
    out.value = total_num / total_den;
    // Ratio estimator: weighted batch deviations around the pooled value.
    std::size_t used = 0;
    double ss = 0.0;
    const double mean_den = total_den / static_cast<double>(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) {
        const double dev = (num[i] - out.value * den[i]) / mean_den;
        ss += dev * dev;
        ++used;
    }
    if (used > 1) {
        out.std_error = std::sqrt(ss / static_cast<double>(used - 1) / static_cast<double>(used));
    }
    return out;
}

class DelayRecorder {
public:
    DelayRecorder(const SimulationConfig& cfg, BatchAccumulator& acc, SimulationResult& res)
        : thresholds_(cfg.ccdf_thresholds_frames), acc_(acc), res_(res)
    {
        res_.delay_histogram.assign(static_cast<std::size_t>(std::max(cfg.histogram_bins, 1)), 0);
    }

    void record(double delay, std::size_t batch)
    {
        const auto idx = static_cast<std::size_t>(
            std::lower_bound(thresholds_.begin(), thresholds_.end(), delay) - thresholds_.begin());
        auto& b = acc_.batches[batch];
        ++b.beyond[idx];
        ++b.timed;
        ++res_.packets_timed;
        const auto bins = res_.delay_histogram.size();
        const auto bin = std::min(static_cast<std::size_t>(std::max(delay, 0.0)), bins - 1);
        ++res_.delay_histogram[bin];
    }

private:
    const std::vector<double>& thresholds_;
    BatchAccumulator& acc_;
    SimulationResult& res_;
};

inline void finalize(const SimulationConfig& cfg, BatchAccumulator& acc, SimulationResult& res)
{
    const auto nb = acc.batches.size();
    std::vector<double> arrived(nb), proactive(nb), deadline(nb), errored(nb), timed(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        const auto& b = acc.batches[i];
        arrived[i] = b.arrived;
        proactive[i] = b.proactive;
        deadline[i] = b.deadline;
        errored[i] = b.errored;
        timed[i] = static_cast<double>(b.timed);
    }
    res.eps_h = batch_ratio(proactive, arrived);
    res.eps_q = batch_ratio(deadline, arrived);
    res.eps_c = batch_ratio(errored, arrived);

    const auto& th = cfg.ccdf_thresholds_frames;
    res.ccdf.clear();
    for (std::size_t t = 0; t < th.size(); ++t) {
        // A delay exceeds threshold t when its lower_bound index is > t.
        std::vector<double> hits(nb, 0.0);
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < nb; ++i) {
            std::uint64_t h = 0;
            for (std::size_t k = t + 1; k < acc.batches[i].beyond.size(); ++k) {
                h += acc.batches[i].beyond[k];
            }
            hits[i] = static_cast<double>(h);
            total += h;
        }
        const auto est = batch_ratio(hits, timed);
        res.ccdf.push_back({th[t], total, est.value, est.std_error});
    }
}

inline void check_config(const SimulationConfig& cfg)
{
    if (cfg.frames < 1) {
        throw DomainError("simulate: frames must be at least 1");
    }
    if (cfg.batches < 2) {
        throw DomainError("simulate: at least two batches are needed for standard errors");
    }
    if (cfg.deadline_frames && !(*cfg.deadline_frames >= 0.0)) {
        throw DomainError("simulate: deadline must be nonnegative");
    }
    if (!std::is_sorted(cfg.ccdf_thresholds_frames.begin(), cfg.ccdf_thresholds_frames.end())) {
        throw DomainError("simulate: CCDF thresholds must be sorted");
    }
    if (const auto* c = std::get_if<ConstantService>(&cfg.service)) {
        if (!(c->packets_per_frame > 0.0)) {
            throw DomainError("simulate: constant service rate must be positive");
        }
        if (!(c->block_error >= 0.0 && c->block_error < 1.0)) {
            throw DomainError("simulate: block error probability must lie in [0, 1)");
        }
    }
}

inline std::size_t batch_of(std::uint64_t frame, std::uint64_t frames, std::size_t batches)
{
    return static_cast<std::size_t>(static_cast<unsigned __int128>(frame) * batches / frames);
}

inline SimulationResult simulate_fluid(const SimulationConfig& cfg)
{
    const auto* service = std::get_if<ConstantService>(&cfg.service);
    if (service == nullptr) {
        throw UnsupportedError("fluid mode supports constant service only");
    }
    SimulationResult res;
    BatchAccumulator acc(cfg.batches, cfg.ccdf_thresholds_frames.size());
    DelayRecorder recorder(cfg, acc, res);

    Rng arrival_rng = make_stream(cfg.seed, 0);
    Rng place_rng = make_stream(cfg.seed, 3);
    ArrivalGenerator gen(cfg.arrivals);
    ArrivalState phase = gen.initial_state(arrival_rng);
    boost::random::uniform_01<double> uniform;

    const double d = 1.0 / service->packets_per_frame;
    double server_free = 0.0;
    std::vector<double> offsets;
    auto& c = res.counters;

    std::uint64_t n = 0;
    for (; n < cfg.frames; ++n) {
        const auto batch = batch_of(n, cfg.frames, acc.batches.size());
        const int k = gen.next(phase, arrival_rng);
        if (k > 0) {
            offsets.resize(static_cast<std::size_t>(k));
            for (auto& u : offsets) {
                u = uniform(place_rng);
            }
            std::sort(offsets.begin(), offsets.end());
            c.arrived += k;
            acc.batches[batch].arrived += k;
            for (double u : offsets) {
                const double t = static_cast<double>(n) + u;
                const double start = std::max(t, server_free);
                const double wait = start - t;
                if (cfg.deadline_frames && wait > *cfg.deadline_frames) {
                    c.dropped_deadline += 1.0;
                    acc.batches[batch].deadline += 1.0;
                    continue;
                }
                server_free = start + d;
                recorder.record(wait, batch);
            }
        }
        const double backlog = (server_free - static_cast<double>(n + 1)) * service->packets_per_frame;
        if (backlog > cfg.instability_queue) {
            res.unstable = true;
            std::ostringstream msg;
            msg << "queue exceeded " << cfg.instability_queue << " packets at frame " << n
                << " (offered load " << cfg.arrivals.mean_rate() / service->packets_per_frame << ")";
            res.diagnostic = msg.str();
            ++n;
            break;
        }
    }
    c.frames_simulated = n;
    const double end = static_cast<double>(n);
    c.still_queued = server_free > end ? std::ceil((server_free - end) / d - 1e-9) : 0.0;
    c.still_queued = std::min(c.still_queued, c.arrived - c.dropped_deadline);
    c.delivered = c.arrived - c.dropped_deadline - c.still_queued;
    finalize(cfg, acc, res);
    return res;
}

inline SimulationResult simulate_packet(const SimulationConfig& cfg)
{
    SimulationResult res;
    BatchAccumulator acc(cfg.batches, cfg.ccdf_thresholds_frames.size());
    DelayRecorder recorder(cfg, acc, res);

    Rng arrival_rng = make_stream(cfg.seed, 0);
    Rng channel_rng = make_stream(cfg.seed, 1);
    Rng error_rng = make_stream(cfg.seed, 2);
    ArrivalGenerator gen(cfg.arrivals);
    ArrivalState phase = gen.initial_state(arrival_rng);

    const auto* policy = std::get_if<PolicyConfig>(&cfg.service);
    const auto* constant = std::get_if<ConstantService>(&cfg.service);
    const double block_error = policy ? policy->block_error : constant->block_error;
    boost::random::bernoulli_distribution<double> error_draw(block_error);
    std::optional<GainSampler> sampler;
    if (policy) {
        sampler.emplace(policy->channel);
    }
    const int coherence = policy ? policy->channel.coherence_frames : 1;

    QueueState queue;
    GainSample gain{};
    double power_sum = 0.0;
    auto& c = res.counters;

    std::uint64_t n = 0;
    for (; n < cfg.frames; ++n) {
        const auto batch = batch_of(n, cfg.frames, acc.batches.size());
        auto& b = acc.batches[batch];
        if (sampler && n % static_cast<std::uint64_t>(coherence) == 0) {
            gain = (*sampler)(channel_rng);
        }
        if (cfg.deadline_frames) {
            const double expired = queue.expire(n, *cfg.deadline_frames);
            c.dropped_deadline += expired;
            b.deadline += expired;
        }

        const double q = queue.length();
        double serve = 0.0;
        double drop = 0.0;
        double power = 0.0;
        if (constant) {
            serve = std::min(q, constant->packets_per_frame);
        } else if (q > 0.0) {
            const bool faded = gain.g < policy->gain_threshold;
            if (cfg.drop == DropMode::intuitive && faded) {
                drop = q;
            } else if (q >= policy->service_packets && !faded) {
                serve = std::min(q, policy->inversion_packets);
                power = policy->required_snr / policy->snr_per_watt(gain.g);
            } else {
                const double s_th = s_threshold(*policy, gain);
                if (q >= policy->service_packets) {
                    serve = s_th;
                    drop = std::max(policy->service_packets - s_th, 0.0);
                    power = policy->threshold_power_w;
                } else if (s_th > q) {
                    serve = q;
                    power = cfg.track_power ? power_policy(*policy, q, gain) : 0.0;
                } else {
                    serve = s_th;
                    drop = q - s_th;
                    power = policy->threshold_power_w;
                }
            }
        }
        res.max_power_w = std::max(res.max_power_w, power);
        power_sum += power;

        if (serve > 0.0) {
            const bool errored = block_error > 0.0 && error_draw(error_rng);
            const double moved = queue.take(serve, [&](const QueueState::Packet& p) {
                recorder.record(static_cast<double>(n - p.arrival_frame), batch);
            });
            if (errored) {
                c.errored_transmission += moved;
                b.errored += moved;
            } else {
                c.delivered += moved;
            }
        }
        if (drop > 0.0) {
            const double removed = queue.take(drop);
            c.dropped_proactive += removed;
            b.proactive += removed;
        }

        const int k = gen.next(phase, arrival_rng);
        if (k > 0) {
            queue.push(static_cast<std::uint64_t>(k), n);
            c.arrived += k;
            b.arrived += k;
        }
        if (queue.length() > cfg.instability_queue) {
            res.unstable = true;
            std::ostringstream msg;
            msg << "queue exceeded " << cfg.instability_queue << " packets at frame " << n;
            res.diagnostic = msg.str();
            ++n;
            break;
        }
    }
    c.frames_simulated = n;
    c.still_queued = queue.length();
    res.mean_power_w = n > 0 ? power_sum / static_cast<double>(n) : 0.0;
    finalize(cfg, acc, res);
    return res;
}

} // namespace detail

/// Runs one independent replica. Streams base_seed + {0,1,2,3} drive
/// arrivals, fading, transmission errors and (fluid) arrival placement.
inline SimulationResult simulate(const SimulationConfig& cfg)
{
    detail::check_config(cfg);
    if (cfg.mode == QueueMode::fluid) {
        return detail::simulate_fluid(cfg);
    }
    return detail::simulate_packet(cfg);
}

} // namespace urllc
