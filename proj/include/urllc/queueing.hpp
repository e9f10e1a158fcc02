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

// Queue analytics (M/D/1 distributions, effective-bandwidth delay bound),
// the channel- and queue-aware power / proactive-dropping policies, and the
// FIFO queue that the frame simulator advances.

#pragma once

#include "urllc/error.hpp"
#include "urllc/numeric.hpp"
#include "urllc/phy_rate.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <sstream>
#include <vector>

namespace urllc {

// ----- analytic M/D/1 ----------------------------------------------------

namespace detail {

using HighPrecision = boost::multiprecision::cpp_bin_float_100;

/// Largest L * xi accepted by the alternating-sum evaluation; beyond it the
/// cancellation eats more than ~65 of the 100 working digits.
inline constexpr double kMaxCancellationExponent = 150.0;

inline std::vector<HighPrecision> mdl_queue_pmf_hp(double utilisation, int max_length)
{
    using HP = HighPrecision;
    std::vector<HP> pi(static_cast<std::size_t>(max_length) + 1, HP(0));
    const HP xi(utilisation);
    const HP idle = HP(1) - xi;
    pi[0] = idle;
    if (max_length >= 1) {
        pi[1] = idle * (exp(xi) - 1);
    }
    if (max_length < 2) {
        return pi;
    }
    // pi_l / (1 - xi) = e^{l xi} + sum_{j=1}^{l-1} (-1)^{l-j} e^{j xi}
    //                   [ (j xi)^{l-j} / (l-j)! + (j xi)^{l-j-1} / (l-j-1)! ]
    std::vector<HP> acc(pi.size(), HP(0));
    for (int l = 2; l <= max_length; ++l) {
        acc[l] = exp(xi * l);
    }
    for (int j = 1; j < max_length; ++j) {
        const HP ej = exp(xi * j);
        const HP jx = xi * j;
        HP term(1); // (j xi)^k / k!, k = 0
        for (int k = 1; j + k <= max_length; ++k) {
            const HP prev = term;
            term *= jx / k;
            const int l = j + k;
            if (l < 2) {
                continue;
            }
            const HP contrib = ej * (term + prev);
            if (k % 2 == 0) {
                acc[l] += contrib;
            } else {
                acc[l] -= contrib;
            }
        }
    }
    for (int l = 2; l <= max_length; ++l) {
        pi[l] = idle * acc[l];
    }
    return pi;
}

inline void check_mdl_args(double utilisation, int max_length)
{
    if (!(utilisation >= 0.0)) {
        throw DomainError("M/D/1: utilisation must be nonnegative");
    }
    if (!(utilisation < 1.0)) {
        throw InstabilityError("M/D/1: utilisation must be below 1");
    }
    if (max_length < 0) {
        throw DomainError("M/D/1: maximum length must be nonnegative");
    }
    if (max_length * utilisation > kMaxCancellationExponent) {
        std::ostringstream msg;
        msg << "M/D/1: L * xi = " << max_length * utilisation << " exceeds the precision budget ("
            << kMaxCancellationExponent << ")";
        throw DomainError(msg.str());
    }
}

} // namespace detail

/// Stationary number-in-system probabilities pi_0..pi_L of an M/D/1 queue
/// with utilisation xi.
inline std::vector<double> mdl_queue_pmf(double utilisation, int max_length)
{
    detail::check_mdl_args(utilisation, max_length);
    const auto hp = detail::mdl_queue_pmf_hp(utilisation, max_length);
    std::vector<double> out;
    out.reserve(hp.size());
    for (const auto& v : hp) {
        out.push_back(static_cast<double>(v));
    }
    return out;
}

/// Queue length CCDF Pr{Q > L} = 1 - sum_{l<=L} pi_l.
inline double mdl_queue_ccdf(double utilisation, int length)
{
    detail::check_mdl_args(utilisation, length);
    const auto hp = detail::mdl_queue_pmf_hp(utilisation, length);
    detail::HighPrecision total(0);
    for (const auto& v : hp) {
        total += v;
    }
    return std::max(0.0, static_cast<double>(detail::HighPrecision(1) - total));
}

/// Waiting-time CCDF of Poisson(lambda / frame) arrivals at a constant
/// service of s packets / frame, evaluated at D frames: 1 - sum_{l<=floor(sD)} pi_l.
/// Exact at multiples of the service time 1/s.
inline double mdl_delay_ccdf(double arrival_rate, double service_rate, double delay_frames)
{
    if (!(service_rate > 0.0) || !(arrival_rate >= 0.0) || !(delay_frames >= 0.0)) {
        throw DomainError("mdl_delay_ccdf: rates and delay must be nonnegative, service positive");
    }
    const double xi = arrival_rate / service_rate;
    const int length = static_cast<int>(std::floor(service_rate * delay_frames + 1e-9));
    return mdl_queue_ccdf(xi, length);
}

/// exp(-theta E^B D), clamped to [0, 1]. E^B in packets/s, D in seconds.
inline double delay_violation_upper_bound(double theta, double effective_bandwidth, double delay_s)
{
    if (!(theta >= 0.0) || !(effective_bandwidth >= 0.0) || !(delay_s >= 0.0)) {
        throw DomainError("delay bound: arguments must be nonnegative");
    }
    return std::clamp(std::exp(-theta * effective_bandwidth * delay_s), 0.0, 1.0);
}

// ----- transmit policies -------------------------------------------------

namespace detail {

/// ln(1 + gamma) from the required-SNR relation, with dispersion V.
inline double required_log1p_snr(double service_packets, double block_error, double blocklength,
                                  double packet_bits, double v = 1.0)
{
    return service_packets * packet_bits * std::numbers::ln2 / blocklength +
           std::sqrt(v / blocklength) * inverse_q(block_error);
}

} // namespace detail

/// Everything a frame-level transmitter needs to run the threshold-power
/// policy for one user.
struct PolicyConfig {
    double threshold_power_w;   ///< P^th
    double required_snr;        ///< gamma (linear)
    double service_packets;     ///< T_f E^B, packets per frame
    double block_error;         ///< eps^c
    SpectrumAllocation spectrum;
    ChannelModel channel;
    double packet_bits;

    // Derived once.
    double q_inv = 0.0;
    double gain_threshold = 0.0;   ///< g* = N_0 B N^c gamma / (mu P^th)
    double inversion_packets = 0.0; ///< rate at SNR gamma with exact dispersion

    PolicyConfig(double threshold_power, double gamma, double service, double eps_c, SpectrumAllocation spec,
                 ChannelModel chan, double bits)
        : threshold_power_w(threshold_power),
          required_snr(gamma),
          service_packets(service),
          block_error(eps_c),
          spectrum(std::move(spec)),
          channel(std::move(chan)),
          packet_bits(bits)
    {
        spectrum.validate();
        channel.validate();
        if (!(threshold_power_w > 0.0) || !(required_snr > 0.0) || !(service_packets > 0.0) ||
            !(packet_bits > 0.0)) {
            throw DomainError("PolicyConfig: threshold power, SNR, service and packet size must be positive");
        }
        if (!(block_error > 0.0 && block_error < 0.5)) {
            throw DomainError("PolicyConfig: block error probability must lie in (0, 0.5)");
        }
        const double expected = detail::required_log1p_snr(service_packets, block_error, spectrum.blocklength(),
                                                           packet_bits);
        if (std::abs(std::log1p(required_snr) - expected) > 1e-6 * expected) {
            std::ostringstream msg;
            msg << "PolicyConfig: gamma inconsistent with the required-SNR relation (ln(1+gamma) = "
                << std::log1p(required_snr) << ", expected " << expected << ")";
            throw ContractError(msg.str());
        }
        q_inv = inverse_q(block_error);
        gain_threshold = channel.noise_psd_w_per_hz * spectrum.bandwidth() * required_snr /
                         (channel.average_gain * threshold_power_w);
        inversion_packets = std::max(
            0.0, fbl_packets_at_snr_raw(required_snr, spectrum.blocklength(), packet_bits, q_inv));
    }

    /// Linear SNR per watt at gain g.
    double snr_per_watt(double g) const
    {
        return channel.average_gain * g / (channel.noise_psd_w_per_hz * spectrum.bandwidth());
    }

    double packets_at_snr(double snr) const
    {
        return std::max(0.0, fbl_packets_at_snr_raw(snr, spectrum.blocklength(), packet_bits, q_inv));
    }
};

/// Packets deliverable at the threshold power, s^th.
inline double s_threshold(const PolicyConfig& policy, GainSample g)
{
    if (!(g.g >= 0.0)) {
        throw DomainError("s_threshold: gain must be nonnegative");
    }
    return policy.packets_at_snr(policy.snr_per_watt(g.g) * policy.threshold_power_w);
}

/// Transmit power for the current queue length Q and gain g.
inline double power_policy(const PolicyConfig& policy, double queue, GainSample g)
{
    if (!(queue >= 0.0) || !(g.g >= 0.0)) {
        throw DomainError("power_policy: queue and gain must be nonnegative");
    }
    if (queue <= 0.0) {
        return 0.0;
    }
    if (g.g <= 0.0) {
        return policy.threshold_power_w;
    }
    const double per_watt = policy.snr_per_watt(g.g);
    if (queue >= policy.service_packets) {
        if (g.g < policy.gain_threshold) {
            return policy.threshold_power_w;
        }
        return policy.required_snr / per_watt;
    }
    const double snr_cap = per_watt * policy.threshold_power_w;
    if (policy.packets_at_snr(snr_cap) <= queue) {
        return policy.threshold_power_w;
    }
    // Smallest SNR whose (clamped) rate reaches Q; the predicate is monotone
    // because the rate is zero below its first crossing and increasing above.
    const auto [lo, hi] = numeric::bisect_predicate(
        [&](double snr) { return policy.packets_at_snr(snr) >= queue; }, 0.0, snr_cap, 200);
    (void)lo;
    return std::min(hi / per_watt, policy.threshold_power_w);
}

/// Proactively dropped packets b^d for the current frame.
inline double drop_policy(const PolicyConfig& policy, double queue, GainSample g)
{
    if (!(queue >= 0.0)) {
        throw DomainError("drop_policy: queue must be nonnegative");
    }
    if (queue <= 0.0) {
        return 0.0;
    }
    const double s_th = s_threshold(policy, g);
    if (queue >= policy.service_packets) {
        return std::max(policy.service_packets - s_th, 0.0);
    }
    return std::max(queue - s_th, 0.0);
}

// ----- FIFO queue --------------------------------------------------------

/// FIFO of unit-mass packets. Service and drops remove mass from the head,
/// so fractional per-frame service carries over between frames.
class QueueState {
public:
    struct Packet {
        std::uint64_t arrival_frame;
        double remaining;
    };

    double length() const { return total_; }
    bool empty() const { return packets_.empty(); }
    const std::deque<Packet>& packets() const { return packets_; }

    void push(std::uint64_t count, std::uint64_t frame)
    {
        for (std::uint64_t i = 0; i < count; ++i) {
            packets_.push_back({frame, 1.0});
        }
        total_ += static_cast<double>(count);
    }

    /// Removes `amount` of mass from the head. `on_done(packet)` fires for
    /// each packet whose last fraction leaves. Returns the mass removed.
    template <typename OnDone>
    double take(double amount, OnDone&& on_done)
    {
        double removed = 0.0;
        while (amount > kMassTolerance && !packets_.empty()) {
            Packet& head = packets_.front();
            const double part = std::min(head.remaining, amount);
            head.remaining -= part;
            amount -= part;
            removed += part;
            if (head.remaining <= kMassTolerance) {
                removed += head.remaining;
                const Packet done = head;
                packets_.pop_front();
                on_done(done);
            }
        }
        total_ = std::max(0.0, total_ - removed);
        if (packets_.empty()) {
            total_ = 0.0;
        }
        return removed;
    }

    double take(double amount)
    {
        return take(amount, [](const Packet&) {});
    }

    /// Drops every packet that has waited more than `max_wait` frames by
    /// `frame`. Returns the dropped mass.
    double expire(std::uint64_t frame, double max_wait)
    {
        double removed = 0.0;
        while (!packets_.empty() && static_cast<double>(frame - packets_.front().arrival_frame) > max_wait) {
            removed += packets_.front().remaining;
            packets_.pop_front();
        }
        total_ = packets_.empty() ? 0.0 : std::max(0.0, total_ - removed);
        return removed;
    }

    static constexpr double kMassTolerance = 1e-12;

private:
    std::deque<Packet> packets_;
    double total_ = 0.0;
};

struct StepOutcome {
    double departed; ///< b(n) = min(Q(n), s(n))
    double dropped;
};

/// One frame of the queue recursion: serve min(Q, s), then drop `dropped`
/// of what remains, then append the frame's arrivals (servable next frame).
inline StepOutcome step_queue(QueueState& state, std::uint64_t arrivals, double service, double dropped,
                              std::uint64_t frame)
{
    if (!(service >= 0.0) || !(dropped >= 0.0)) {
        throw ContractError("step_queue: service and drops must be nonnegative");
    }
    const double before = state.length();
    const double departed = std::min(before, service);
    if (dropped > before - departed + 1e-9) {
        throw ContractError("step_queue: drops exceed the queue left after service");
    }
    StepOutcome out{state.take(departed), 0.0};
    out.dropped = state.take(dropped);
    state.push(arrivals, frame);
    return out;
}

} // namespace urllc
