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

// Achievable-rate models for a short-frame downlink: Shannon and normal
// approximation (finite blocklength) rates, flat and frequency-selective,
// plus the Gamma-family fading gain distribution.
//
// All quantities are SI. Rates are returned in packets per frame.

#pragma once

#include "urllc/error.hpp"
#include "urllc/random.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/random/gamma_distribution.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>

namespace urllc {

// ----- domain types ------------------------------------------------------

/// Bandwidth and time resources of one link in one frame.
struct SpectrumAllocation {
    double subcarrier_bandwidth_hz = 0.15e6; ///< B
    int subcarrier_count = 1;                ///< N^c
    double data_phase_s = 0.06e-3;           ///< phi, data part of a frame
    std::optional<double> subchannel_bandwidth_hz; ///< W_c (frequency-selective only)
    std::optional<int> subchannel_count;            ///< N^sc (frequency-selective only)

    double bandwidth() const { return subcarrier_bandwidth_hz * subcarrier_count; }
    /// Symbols per coding block, phi * B * N^c.
    double blocklength() const { return data_phase_s * bandwidth(); }

    void validate() const
    {
        if (!(subcarrier_bandwidth_hz > 0.0)) {
            throw DomainError("subcarrier bandwidth must be positive");
        }
        if (subcarrier_count < 1) {
            throw DomainError("subcarrier count must be at least 1");
        }
        if (!(data_phase_s > 0.0)) {
            throw DomainError("data phase duration must be positive");
        }
        if (subchannel_bandwidth_hz && !(*subchannel_bandwidth_hz > 0.0)) {
            throw DomainError("subchannel bandwidth must be positive");
        }
        if (subchannel_count && *subchannel_count < 1) {
            throw DomainError("subchannel count must be at least 1");
        }
    }
};

/// Large-scale and small-scale description of a user's downlink channel.
struct ChannelModel {
    int antennas = 1;             ///< N_t
    double nakagami_m = 1.0;      ///< m; 1 gives Rayleigh / Wishart
    double average_gain = 1.0;    ///< mu, linear (from path loss)
    double noise_psd_w_per_hz = 5.011872336272725e-21; ///< N_0, -173 dBm/Hz
    int coherence_frames = 10;    ///< T_c / T_f

    void validate() const
    {
        if (antennas < 1) {
            throw DomainError("antenna count must be at least 1");
        }
        if (!(nakagami_m >= 1.0)) {
            throw DomainError("Nakagami m must be >= 1");
        }
        if (!(average_gain > 0.0)) {
            throw DomainError("average channel gain must be positive");
        }
        if (!(noise_psd_w_per_hz > 0.0)) {
            throw DomainError("noise PSD must be positive");
        }
        if (coherence_frames < 1) {
            throw DomainError("coherence interval must be at least one frame");
        }
        if (antennas > 1 && nakagami_m != 1.0) {
            throw UnsupportedError("multi-antenna Nakagami fading (N_t > 1, m > 1) is not modelled");
        }
    }
};

/// Normalised instantaneous power gain h^H h.
struct GainSample {
    double g = 0.0;
};

/// Packets per frame from the normal approximation. `clamped` is set when the
/// approximation went negative (very low SNR) and was floored at zero.
struct PacketRate {
    double packets = 0.0;
    bool clamped = false;
};

// ----- scalar helpers ----------------------------------------------------

/// Average gain from the 35.3 + 37.6 lg(d) dB path-loss model.
inline double path_loss_gain(double distance_m)
{
    if (!(distance_m > 0.0)) {
        throw DomainError("distance must be positive");
    }
    const double loss_db = 35.3 + 37.6 * std::log10(distance_m);
    return std::pow(10.0, -loss_db / 10.0);
}

/// Gaussian tail probability Q(x).
inline double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Q^{-1}(p) = sqrt(2) erfc^{-1}(2p).
inline double inverse_q(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("inverse_q: p must lie in (0, 1), got " + std::to_string(p));
    }
    if (p == 0.5) {
        return 0.0;
    }
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Channel dispersion V = 1 - (1 + snr)^-2.
inline double dispersion(double snr)
{
    if (!(snr >= 0.0)) {
        throw DomainError("dispersion: SNR must be nonnegative");
    }
    const double r = 1.0 / (1.0 + snr);
    return 1.0 - r * r;
}

/// Received SNR mu P g / (N_0 B N^c).
inline double received_snr(const SpectrumAllocation& spec, const ChannelModel& chan, double power_w, GainSample g)
{
    return chan.average_gain * power_w * g.g / (chan.noise_psd_w_per_hz * spec.bandwidth());
}

// ----- flat-fading rates -------------------------------------------------

inline double shannon_packets(const SpectrumAllocation& spec, const ChannelModel& chan, double power_w,
                              GainSample g, double packet_bits)
{
    if (!(power_w >= 0.0) || !(packet_bits > 0.0) || !(g.g >= 0.0)) {
        throw DomainError("shannon_packets: power and gain must be nonnegative, packet size positive");
    }
    const double n = spec.blocklength();
    return n / (packet_bits * std::numbers::ln2) * std::log1p(received_snr(spec, chan, power_w, g));
}

/// Normal-approximation rate at a given SNR, unclamped. Shared by the policy
/// code, which works in the SNR domain.
inline double fbl_packets_at_snr_raw(double snr, double blocklength, double packet_bits, double q_inv)
{
    return blocklength / (packet_bits * std::numbers::ln2) *
           (std::log1p(snr) - std::sqrt(dispersion(snr) / blocklength) * q_inv);
}

/// Finite-blocklength packets per frame, valid for block error probability
/// in (0, 0.5]. At 0.5 the dispersion term vanishes and the Shannon rate is
/// returned.
inline PacketRate fbl_packets(const SpectrumAllocation& spec, const ChannelModel& chan, double power_w,
                              GainSample g, double packet_bits, double block_error)
{
    if (!(block_error > 0.0 && block_error <= 0.5)) {
        throw DomainError("fbl_packets: block error probability must lie in (0, 0.5]");
    }
    if (!(power_w >= 0.0) || !(packet_bits > 0.0) || !(g.g >= 0.0)) {
        throw DomainError("fbl_packets: power and gain must be nonnegative, packet size positive");
    }
    const double raw = fbl_packets_at_snr_raw(received_snr(spec, chan, power_w, g), spec.blocklength(),
                                              packet_bits, inverse_q(block_error));
    if (raw < 0.0) {
        return {0.0, true};
    }
    return {raw, false};
}

// ----- frequency-selective rates -----------------------------------------

namespace detail {

struct SubchannelView {
    double bandwidth;
    int count;
};

inline SubchannelView subchannels(const SpectrumAllocation& spec, std::size_t powers, std::size_t gains)
{
    if (!spec.subchannel_bandwidth_hz || !spec.subchannel_count) {
        throw ContractError("frequency-selective rate needs subchannel bandwidth and count");
    }
    const int count = *spec.subchannel_count;
    if (powers != static_cast<std::size_t>(count) || gains != static_cast<std::size_t>(count)) {
        throw ContractError("frequency-selective rate: power/gain vectors must have one entry per subchannel");
    }
    return {*spec.subchannel_bandwidth_hz, count};
}

inline double subchannel_snr(const ChannelModel& chan, double bandwidth, double power, double gain)
{
    if (!(power >= 0.0) || !(gain >= 0.0)) {
        throw DomainError("frequency-selective rate: powers and gains must be nonnegative");
    }
    return chan.average_gain * power * gain / (chan.noise_psd_w_per_hz * bandwidth);
}

} // namespace detail

/// One code block spanning all N^sc subchannels (joint coding).
inline PacketRate fbl_packets_fs_joint(const SpectrumAllocation& spec, const ChannelModel& chan,
                                       std::span<const double> powers, std::span<const GainSample> gains,
                                       double packet_bits, double block_error)
{
    const auto sub = detail::subchannels(spec, powers.size(), gains.size());
    if (!(block_error > 0.0 && block_error <= 0.5)) {
        throw DomainError("fbl_packets_fs_joint: block error probability must lie in (0, 0.5]");
    }
    const double n = spec.data_phase_s * sub.bandwidth;
    double log_sum = 0.0;
    double v = static_cast<double>(sub.count);
    for (int j = 0; j < sub.count; ++j) {
        const double snr = detail::subchannel_snr(chan, sub.bandwidth, powers[j], gains[j].g);
        log_sum += std::log1p(snr);
        const double r = 1.0 / (1.0 + snr);
        v -= r * r;
    }
    const double raw =
        n / (packet_bits * std::numbers::ln2) * (log_sum - std::sqrt(v / n) * inverse_q(block_error));
    return raw < 0.0 ? PacketRate{0.0, true} : PacketRate{raw, false};
}

/// Each subchannel coded independently with blocklength phi * W_c.
inline PacketRate fbl_packets_fs_indep(const SpectrumAllocation& spec, const ChannelModel& chan,
                                       std::span<const double> powers, std::span<const GainSample> gains,
                                       double packet_bits, double block_error)
{
    const auto sub = detail::subchannels(spec, powers.size(), gains.size());
    if (!(block_error > 0.0 && block_error <= 0.5)) {
        throw DomainError("fbl_packets_fs_indep: block error probability must lie in (0, 0.5]");
    }
    const double n = spec.data_phase_s * sub.bandwidth;
    const double q_inv = inverse_q(block_error);
    double raw = 0.0;
    for (int j = 0; j < sub.count; ++j) {
        raw += fbl_packets_at_snr_raw(detail::subchannel_snr(chan, sub.bandwidth, powers[j], gains[j].g), n,
                                      packet_bits, q_inv);
    }
    return raw < 0.0 ? PacketRate{0.0, true} : PacketRate{raw, false};
}

/// Closed-form joint-minus-independent rate gap,
/// sqrt(phi W_c)/(u ln 2) * (sum_j sqrt(V_j) - sqrt(sum_j V_j)) * Q^{-1}(eps).
inline double fs_coding_gap(const SpectrumAllocation& spec, const ChannelModel& chan,
                            std::span<const double> powers, std::span<const GainSample> gains,
                            double packet_bits, double block_error)
{
    const auto sub = detail::subchannels(spec, powers.size(), gains.size());
    double root_sum = 0.0;
    double v_sum = 0.0;
    for (int j = 0; j < sub.count; ++j) {
        const double vj = dispersion(detail::subchannel_snr(chan, sub.bandwidth, powers[j], gains[j].g));
        root_sum += std::sqrt(vj);
        v_sum += vj;
    }
    return std::sqrt(spec.data_phase_s * sub.bandwidth) / (packet_bits * std::numbers::ln2) *
           (root_sum - std::sqrt(v_sum)) * inverse_q(block_error);
}

// ----- fading gain distribution ------------------------------------------

/// The Gamma law of g: shape N_t, scale 1 (Wishart) or shape m, scale 1/m
/// (single-antenna Nakagami-m).
inline boost::math::gamma_distribution<double> gain_distribution(const ChannelModel& chan)
{
    if (chan.antennas > 1 && chan.nakagami_m != 1.0) {
        throw UnsupportedError("multi-antenna Nakagami fading (N_t > 1, m > 1) is not modelled");
    }
    if (chan.antennas < 1 || !(chan.nakagami_m >= 1.0)) {
        throw DomainError("gain distribution needs N_t >= 1 and m >= 1");
    }
    if (chan.antennas > 1) {
        return boost::math::gamma_distribution<double>(static_cast<double>(chan.antennas), 1.0);
    }
    return boost::math::gamma_distribution<double>(chan.nakagami_m, 1.0 / chan.nakagami_m);
}

inline double gain_pdf(const ChannelModel& chan, double g)
{
    if (!(g >= 0.0)) {
        throw DomainError("gain_pdf: g must be nonnegative");
    }
    return boost::math::pdf(gain_distribution(chan), g);
}

inline double gain_cdf(const ChannelModel& chan, double g)
{
    if (!(g >= 0.0)) {
        throw DomainError("gain_cdf: g must be nonnegative");
    }
    return boost::math::cdf(gain_distribution(chan), g);
}

/// Reusable sampler; avoids rebuilding the Boost distribution every draw.
class GainSampler {
public:
    explicit GainSampler(const ChannelModel& chan)
    {
        const auto dist = gain_distribution(chan);
        draw_ = boost::random::gamma_distribution<double>(dist.shape(), dist.scale());
    }

    GainSample operator()(Rng& rng) { return {draw_(rng)}; }

private:
    boost::random::gamma_distribution<double> draw_;
};

inline GainSample sample_gain(const ChannelModel& chan, Rng& rng)
{
    return GainSampler(chan)(rng);
}

} // namespace urllc
