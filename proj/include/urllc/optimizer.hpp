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

// Minimum-power link design: required SNR, proactive-drop probability,
// threshold power, the reliability split between decoding errors, queueing
// violations and proactive drops, and subcarrier allocation across users.

#pragma once

#include "urllc/error.hpp"
#include "urllc/numeric.hpp"
#include "urllc/phy_rate.hpp"
#include "urllc/queueing.hpp"
#include "urllc/traffic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace urllc {

// ----- domain types ------------------------------------------------------

struct QosRequirement {
    double max_delay_s = 1e-3;     ///< D_max, end to end
    double loss_budget = 1e-7;     ///< eps_D
    double frame_s = 1e-4;         ///< T_f
    double data_phase_s = 0.06e-3; ///< phi

    /// Queueing share of the delay budget, D_max - 2 T_f.
    double queue_delay_s() const { return max_delay_s - 2.0 * frame_s; }
    double queue_delay_frames() const { return queue_delay_s() / frame_s; }

    void validate() const
    {
        if (!(frame_s > 0.0) || !(data_phase_s > 0.0)) {
            throw DomainError("QoS: frame and data-phase durations must be positive");
        }
        if (!(data_phase_s < frame_s)) {
            throw DomainError("QoS: data phase must be shorter than the frame");
        }
        if (!(queue_delay_s() > 0.0)) {
            throw DomainError("QoS: delay budget must exceed two frames");
        }
        if (!(loss_budget > 0.0 && loss_budget < 1.0)) {
            throw DomainError("QoS: loss budget must lie in (0, 1)");
        }
    }
};

struct ReliabilitySplit {
    double eps_c; ///< decoding error
    double eps_q; ///< queueing-delay violation
    double eps_h; ///< proactive drop

    double total() const { return eps_c + eps_q + eps_h; }
};

struct LinkAllocation {
    int user = 0;
    int subcarriers = 0;
    ReliabilitySplit split{};
    double required_snr = 0.0;      ///< gamma, linear
    double threshold_power_w = 0.0; ///< P^th (all subchannels together)
    double theta = 0.0;             ///< QoS exponent, 1/packet
    double effective_bandwidth = 0.0; ///< packets/s
    int subchannels = 1;            ///< N^sc, 1 for flat fading
    double subchannel_power_w = 0.0; ///< per-subchannel P^th
    bool unimodal = true;           ///< outer scan looked unimodal
};

struct UserLink {
    int id = 0;
    ChannelModel channel;
    ArrivalModel traffic = ArrivalModel::poisson(0.1);
};

struct MultiUserScenario {
    std::vector<UserLink> users;
    int max_subcarriers = 1;             ///< N^c_max
    double subcarrier_bandwidth_hz = 0.15e6;
    QosRequirement qos;
    double packet_bits = 160.0;
    std::optional<double> max_total_power_w; ///< reported against, not enforced

    void validate() const
    {
        qos.validate();
        if (users.empty()) {
            throw DomainError("scenario needs at least one user");
        }
        if (max_subcarriers < static_cast<int>(users.size())) {
            throw DomainError("scenario needs at least one subcarrier per user");
        }
        if (!(subcarrier_bandwidth_hz > 0.0) || !(packet_bits > 0.0)) {
            throw DomainError("subcarrier bandwidth and packet size must be positive");
        }
        for (const auto& u : users) {
            u.channel.validate();
        }
    }

    SpectrumAllocation spectrum(int subcarriers) const
    {
        SpectrumAllocation s;
        s.subcarrier_bandwidth_hz = subcarrier_bandwidth_hz;
        s.subcarrier_count = subcarriers;
        s.data_phase_s = qos.data_phase_s;
        return s;
    }
};

struct MultiUserSolution {
    std::vector<LinkAllocation> links;
    double total_power_w = 0.0;
    bool exceeds_max_power = false;
};

// ----- required SNR ------------------------------------------------------

namespace detail {

inline double required_snr_from_log(double log1p_gamma)
{
    if (!(log1p_gamma < 700.0)) {
        throw InfeasibleError("required SNR overflows (bandwidth too small for the load)");
    }
    return std::expm1(log1p_gamma);
}

} // namespace detail

/// gamma from the finite-blocklength rate with V = 1.
inline double required_snr(double eps_c, double effective_bandwidth, const SpectrumAllocation& spec,
                           const QosRequirement& qos, double packet_bits)
{
    if (!(eps_c > 0.0 && eps_c <= 0.5)) {
        throw DomainError("required_snr: eps_c must lie in (0, 0.5]");
    }
    if (!(effective_bandwidth > 0.0) || !(packet_bits > 0.0)) {
        throw DomainError("required_snr: effective bandwidth and packet size must be positive");
    }
    spec.validate();
    return detail::required_snr_from_log(detail::required_log1p_snr(
        qos.frame_s * effective_bandwidth, eps_c, spec.blocklength(), packet_bits));
}

/// Same relation with the exact dispersion V(gamma), by fixed-point iteration.
inline double required_snr_exact(double eps_c, double effective_bandwidth, const SpectrumAllocation& spec,
                                 const QosRequirement& qos, double packet_bits)
{
    double gamma = required_snr(eps_c, effective_bandwidth, spec, qos, packet_bits);
    for (int it = 0; it < 200; ++it) {
        const double next = detail::required_snr_from_log(detail::required_log1p_snr(
            qos.frame_s * effective_bandwidth, eps_c, spec.blocklength(), packet_bits, dispersion(gamma)));
        if (std::abs(next - gamma) <= 1e-14 * gamma) {
            return next;
        }
        gamma = next;
    }
    return gamma;
}

// ----- drop probability --------------------------------------------------

namespace detail {

inline double gain_threshold(double gamma, double threshold_power, const SpectrumAllocation& spec,
                             const ChannelModel& chan)
{
    return chan.noise_psd_w_per_hz * spec.bandwidth() * gamma / (chan.average_gain * threshold_power);
}

template <typename F>
double integrate_to_threshold(F&& integrand, double g_star)
{
    if (!(g_star > 0.0)) {
        return 0.0;
    }
    double error = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, g_star, 20,
                                                                                     1e-10, &error);
    return std::clamp(v, 0.0, 1.0);
}

} // namespace detail

/// Approximate fraction of packets dropped proactively by the threshold
/// policy.
inline double drop_probability(double gamma, double threshold_power, const SpectrumAllocation& spec,
                               const ChannelModel& chan)
{
    if (!(gamma > 0.0) || !(threshold_power > 0.0)) {
        throw DomainError("drop_probability: gamma and P^th must be positive");
    }
    const auto dist = gain_distribution(chan);
    const double kappa = chan.average_gain * threshold_power / (chan.noise_psd_w_per_hz * spec.bandwidth());
    const double log_gamma = std::log1p(gamma);
    const double g_star = detail::gain_threshold(gamma, threshold_power, spec, chan);
    return detail::integrate_to_threshold(
        [&](double g) { return (1.0 - std::log1p(kappa * g) / log_gamma) * boost::math::pdf(dist, g); }, g_star);
}

/// Upper bound on the drop fraction using the exact threshold rate.
inline double drop_probability_bound(double gamma, double threshold_power, const SpectrumAllocation& spec,
                                     const ChannelModel& chan, double service_packets, double eps_c,
                                     double packet_bits)
{
    if (!(gamma > 0.0) || !(threshold_power > 0.0) || !(service_packets > 0.0)) {
        throw DomainError("drop_probability_bound: gamma, P^th and service must be positive");
    }
    const auto dist = gain_distribution(chan);
    const double kappa = chan.average_gain * threshold_power / (chan.noise_psd_w_per_hz * spec.bandwidth());
    const double q_inv = inverse_q(eps_c);
    const double n = spec.blocklength();
    const double g_star = detail::gain_threshold(gamma, threshold_power, spec, chan);
    return detail::integrate_to_threshold(
        [&](double g) {
            const double s_th = std::max(0.0, fbl_packets_at_snr_raw(kappa * g, n, packet_bits, q_inv));
            return std::max(1.0 - s_th / service_packets, 0.0) * boost::math::pdf(dist, g);
        },
        g_star);
}

/// Smallest P^th whose drop probability does not exceed `target`.
inline double threshold_power(double gamma, double target, const SpectrumAllocation& spec, const ChannelModel& chan)
{
    if (!(target > 0.0 && target < 1.0)) {
        throw DomainError("threshold_power: target must lie in (0, 1)");
    }
    if (!(gamma > 0.0)) {
        throw DomainError("threshold_power: gamma must be positive");
    }
    constexpr double kMaxPower = 1e6;
    const auto dist = gain_distribution(chan);
    const double median = boost::math::median(dist);
    const auto eps_at = [&](double p) { return drop_probability(gamma, p, spec, chan); };

    double hi = chan.noise_psd_w_per_hz * spec.bandwidth() * gamma / (chan.average_gain * median);
    double lo = hi;
    while (eps_at(hi) > target) {
        lo = hi;
        hi *= 4.0;
        if (hi > kMaxPower) {
            std::ostringstream msg;
            msg << "threshold power above " << kMaxPower << " W needed for drop target " << target;
            throw InfeasibleError(msg.str());
        }
    }
    while (lo == hi || eps_at(lo) <= target) {
        hi = lo;
        lo /= 4.0;
        if (lo < 1e-300) {
            return hi;
        }
    }
    // eps(lo) > target >= eps(hi); bisect in log P.
    for (int it = 0; it < 200; ++it) {
        const double e_hi = eps_at(hi);
        if (std::abs(e_hi - target) <= 1e-3 * target) {
            break;
        }
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (eps_at(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

// ----- reliability split -------------------------------------------------

struct EpsilonSplit {
    double eps_c;
    double eps_q;
    double required_snr; ///< V = 1
    double theta;
    double effective_bandwidth; ///< packets/s
};

namespace detail {

/// Resources of one coding block: the spectrum the block spans and the share
/// of the user's traffic it carries.
struct BlockResources {
    SpectrumAllocation spectrum;
    double traffic_share = 1.0;
};

struct SplitPoint {
    double log1p_gamma;
    QosExponentResult qos;
};

inline SplitPoint split_objective(double eps_c, double eps_q, const BlockResources& block,
                                  const QosRequirement& qos, const ArrivalModel& traffic, double packet_bits)
{
    const auto q = qos_exponent(traffic, qos.queue_delay_s(), eps_q, qos.frame_s);
    return {required_log1p_snr(qos.frame_s * q.effective_bandwidth * block.traffic_share, eps_c,
                               block.spectrum.blocklength(), packet_bits),
            q};
}

inline EpsilonSplit solve_epsilon_split(double budget, const BlockResources& block, const QosRequirement& qos,
                                        const ArrivalModel& traffic, double packet_bits)
{
    using numeric::kEpsilonMin;
    if (!(budget > 2.0 * kEpsilonMin && budget < 1.0)) {
        throw DomainError("solve_epsilon_split: budget must lie in (2 eps_min, 1)");
    }
    const double cap = std::min(budget - kEpsilonMin, 0.5);
    const double lo = std::log(kEpsilonMin);
    const double hi = std::log(cap);
    const auto f = [&](double log_eps_c) {
        const double eps_c = std::exp(log_eps_c);
        const double eps_q = budget - eps_c;
        if (!(eps_q > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        return split_objective(eps_c, eps_q, block, qos, traffic, packet_bits).log1p_gamma;
    };
    const auto found = numeric::scan_then_golden(f, lo, hi, 25, 1e-4);
    const double eps_c = std::exp(found.best.x);
    const double eps_q = budget - eps_c;
    const auto point = split_objective(eps_c, eps_q, block, qos, traffic, packet_bits);
    return {eps_c, eps_q, required_snr_from_log(point.log1p_gamma), point.qos.theta,
            point.qos.effective_bandwidth};
}

inline LinkAllocation allocation_for(const UserLink& user, const BlockResources& block, int subchannels,
                                     const EpsilonSplit& inner, double eps_h)
{
    LinkAllocation out;
    out.user = user.id;
    out.split = {inner.eps_c, inner.eps_q, eps_h};
    out.required_snr = inner.required_snr;
    out.theta = inner.theta;
    out.effective_bandwidth = inner.effective_bandwidth;
    out.subchannels = subchannels;
    out.subchannel_power_w = threshold_power(inner.required_snr, eps_h, block.spectrum, user.channel);
    out.threshold_power_w = out.subchannel_power_w * subchannels;
    return out;
}

inline LinkAllocation solve_link(const UserLink& user, const BlockResources& block, int subchannels,
                                 const QosRequirement& qos, double packet_bits)
{
    using numeric::kEpsilonMin;
    qos.validate();
    user.channel.validate();
    block.spectrum.validate();
    const double budget = qos.loss_budget;
    const double t_lo = kEpsilonMin / budget;
    const double t_hi = 1.0 - 2.0 * kEpsilonMin / budget;

    const auto power_at = [&](double t) {
        try {
            const double eps_h = t * budget;
            const auto inner = solve_epsilon_split(budget - eps_h, block, qos, user.traffic, packet_bits);
            return threshold_power(inner.required_snr, eps_h, block.spectrum, user.channel);
        } catch (const InfeasibleError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const auto found = numeric::scan_then_golden(power_at, t_lo, t_hi, 25, 1e-4);
    if (!std::isfinite(found.best.value)) {
        std::ostringstream msg;
        msg << "no feasible reliability split for user " << user.id;
        throw InfeasibleError(msg.str(), user.id);
    }
    const double eps_h = found.best.x * budget;
    const auto inner = solve_epsilon_split(budget - eps_h, block, qos, user.traffic, packet_bits);
    auto out = allocation_for(user, block, subchannels, inner, eps_h);
    out.unimodal = found.unimodal;
    return out;
}

} // namespace detail

/// Optimal eps_c + eps_q = budget minimising the required SNR.
inline EpsilonSplit solve_epsilon_split(double budget, const SpectrumAllocation& spec, const QosRequirement& qos,
                                        const ArrivalModel& traffic, double packet_bits)
{
    return detail::solve_epsilon_split(budget, {spec, 1.0}, qos, traffic, packet_bits);
}

/// ln(1 + gamma) for a given (eps_c, eps_q): the split objective.
inline double split_objective(double eps_c, double eps_q, const SpectrumAllocation& spec, const QosRequirement& qos,
                              const ArrivalModel& traffic, double packet_bits)
{
    return detail::split_objective(eps_c, eps_q, {spec, 1.0}, qos, traffic, packet_bits).log1p_gamma;
}

/// Minimum-threshold-power design of one user on `subcarriers` subcarriers.
inline LinkAllocation solve_single_user(const UserLink& user, const QosRequirement& qos, double subcarrier_bandwidth_hz,
                                        int subcarriers, double packet_bits)
{
    SpectrumAllocation spec;
    spec.subcarrier_bandwidth_hz = subcarrier_bandwidth_hz;
    spec.subcarrier_count = subcarriers;
    spec.data_phase_s = qos.data_phase_s;
    auto out = detail::solve_link(user, {spec, 1.0}, 1, qos, packet_bits);
    out.subcarriers = subcarriers;
    return out;
}

/// Design at a fixed split; the power follows from gamma(eps_c, eps_q) and eps_h.
inline LinkAllocation solve_fixed_split(const UserLink& user, const QosRequirement& qos, double subcarrier_bandwidth_hz,
                                        int subcarriers, double packet_bits, const ReliabilitySplit& split)
{
    SpectrumAllocation spec;
    spec.subcarrier_bandwidth_hz = subcarrier_bandwidth_hz;
    spec.subcarrier_count = subcarriers;
    spec.data_phase_s = qos.data_phase_s;
    const auto point = detail::split_objective(split.eps_c, split.eps_q, {spec, 1.0}, qos, user.traffic, packet_bits);
    const EpsilonSplit inner{split.eps_c, split.eps_q, detail::required_snr_from_log(point.log1p_gamma),
                             point.qos.theta, point.qos.effective_bandwidth};
    auto out = detail::allocation_for(user, {spec, 1.0}, 1, inner, split.eps_h);
    out.subcarriers = subcarriers;
    return out;
}

/// Independent coding over N^sc subchannels of width W_c, each carrying
/// 1/N^sc of the traffic; the reported P^th sums all subchannels.
inline LinkAllocation solve_frequency_selective(const UserLink& user, const QosRequirement& qos,
                                                double subcarrier_bandwidth_hz, int subcarriers,
                                                double subchannel_bandwidth_hz, int subchannels,
                                                double packet_bits)
{
    if (subchannels < 1 || !(subchannel_bandwidth_hz > 0.0)) {
        throw DomainError("frequency-selective solve needs N^sc >= 1 and W_c > 0");
    }
    const double total = subcarrier_bandwidth_hz * subcarriers;
    if (std::abs(subchannel_bandwidth_hz * subchannels - total) > 1e-9 * total) {
        throw ContractError("W_c * N^sc must equal the allocated bandwidth");
    }
    SpectrumAllocation block;
    block.subcarrier_bandwidth_hz = subchannel_bandwidth_hz;
    block.subcarrier_count = 1;
    block.data_phase_s = qos.data_phase_s;
    auto out = detail::solve_link(user, {block, 1.0 / subchannels}, subchannels, qos, packet_bits);
    out.subcarriers = subcarriers;
    return out;
}

// ----- multi-user allocation ---------------------------------------------

namespace detail {

/// Single-user solutions keyed by (user index, subcarriers); shared by the
/// greedy and exhaustive allocators.
class AllocationCache {
public:
    explicit AllocationCache(const MultiUserScenario& s) : scenario_(s) {}

    const LinkAllocation& get(std::size_t user, int subcarriers)
    {
        const auto key = std::make_pair(user, subcarriers);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_
                     .emplace(key, solve_single_user(scenario_.users[user], scenario_.qos,
                                                     scenario_.subcarrier_bandwidth_hz, subcarriers,
                                                     scenario_.packet_bits))
                     .first;
        }
        return it->second;
    }

    /// P^th, or +inf when the user is infeasible at this width.
    double power(std::size_t user, int subcarriers)
    {
        const auto key = std::make_pair(user, subcarriers);
        if (infeasible_.count(key) != 0) {
            return std::numeric_limits<double>::infinity();
        }
        try {
            return get(user, subcarriers).threshold_power_w;
        } catch (const InfeasibleError&) {
            infeasible_.emplace(key, true);
            return std::numeric_limits<double>::infinity();
        }
    }

    std::size_t solves() const { return cache_.size() + infeasible_.size(); }

private:
    const MultiUserScenario& scenario_;
    std::map<std::pair<std::size_t, int>, LinkAllocation> cache_;
    std::map<std::pair<std::size_t, int>, bool> infeasible_;
};

inline MultiUserSolution assemble(const MultiUserScenario& s, AllocationCache& cache, const std::vector<int>& counts)
{
    MultiUserSolution out;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        auto link = cache.get(k, counts[k]);
        out.total_power_w += link.threshold_power_w;
        out.links.push_back(std::move(link));
    }
    out.exceeds_max_power = s.max_total_power_w && out.total_power_w > *s.max_total_power_w;
    return out;
}

inline MultiUserSolution greedy(const MultiUserScenario& s, AllocationCache& cache)
{
    s.validate();
    const std::size_t users = s.users.size();
    std::vector<int> counts(users, 1);
    for (std::size_t k = 0; k < users; ++k) {
        if (!std::isfinite(cache.power(k, 1))) {
            std::ostringstream msg;
            msg << "user " << s.users[k].id << " is infeasible on a single subcarrier";
            throw InfeasibleError(msg.str(), s.users[k].id);
        }
    }
    for (int left = s.max_subcarriers - static_cast<int>(users); left > 0; --left) {
        std::size_t pick = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < users; ++k) {
            const double gain = cache.power(k, counts[k]) - cache.power(k, counts[k] + 1);
            if (gain > best_gain) {
                best_gain = gain;
                pick = k;
            }
        }
        ++counts[pick];
    }
    return assemble(s, cache, counts);
}

} // namespace detail

/// Greedy steepest-descent subcarrier allocation: every user starts with one
/// subcarrier; each remaining subcarrier goes to the user whose P^th drops
/// most (ties to the lowest index).
inline MultiUserSolution solve_multi_user(const MultiUserScenario& scenario)
{
    detail::AllocationCache cache(scenario);
    return detail::greedy(scenario, cache);
}

/// Global optimum over all compositions of N^c_max into K positive parts.
inline MultiUserSolution exhaustive_multi_user(const MultiUserScenario& scenario)
{
    scenario.validate();
    const auto users = static_cast<int>(scenario.users.size());
    const int spare = scenario.max_subcarriers - users;
    if (std::pow(static_cast<double>(users), static_cast<double>(spare)) > 1e6) {
        throw SizeError("exhaustive search: K^(N^c_max - K) exceeds 1e6");
    }
    detail::AllocationCache cache(scenario);
    std::vector<int> counts(static_cast<std::size_t>(users), 1);
    std::vector<int> best;
    double best_total = std::numeric_limits<double>::infinity();

    // Enumerate compositions recursively: user k takes 1..rest subcarriers.
    const auto visit = [&](auto&& self, int k, int rest) -> void {
        if (k == users - 1) {
            counts[static_cast<std::size_t>(k)] = rest;
            double total = 0.0;
            for (int j = 0; j < users; ++j) {
                total += cache.power(static_cast<std::size_t>(j), counts[static_cast<std::size_t>(j)]);
            }
            if (total < best_total) {
                best_total = total;
                best = counts;
            }
            return;
        }
        for (int take = 1; take <= rest - (users - 1 - k); ++take) {
            counts[static_cast<std::size_t>(k)] = take;
            self(self, k + 1, rest - take);
        }
    };
    visit(visit, 0, scenario.max_subcarriers);
    if (best.empty()) {
        throw InfeasibleError("no feasible subcarrier allocation");
    }
    return detail::assemble(scenario, cache, best);
}

} // namespace urllc
