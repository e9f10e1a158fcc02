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

#include "urllc/optimizer.hpp"
#include "urllc/queueing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace urllc;

namespace {

// Classical M/D/1 waiting-time distribution with unit service time,
// Pr{W <= t} = (1 - rho) sum_{k=0}^{floor t} (rho (k - t))^k / k! e^{-rho (k - t)}.
// Evaluated at integer t in long double; fine for the small t used here.
long double md1_wait_cdf(long double rho, int t)
{
    long double sum = 0.0L;
    long double fact = 1.0L;
    for (int k = 0; k <= t; ++k) {
        if (k > 0) {
            fact *= k;
        }
        sum += std::pow(rho * (k - t), static_cast<long double>(k)) / fact * std::exp(-rho * (k - t));
    }
    return (1.0L - rho) * sum;
}

SpectrumAllocation spectrum(int nc)
{
    SpectrumAllocation s;
    s.subcarrier_bandwidth_hz = 0.15e6;
    s.subcarrier_count = nc;
    s.data_phase_s = 0.06e-3;
    return s;
}

// Policy for the 200 m, N^c = 4, N_t = 8 link, at eps^c = 1e-8.
PolicyConfig example_policy(double threshold_power = 0.12)
{
    const auto spec = spectrum(4);
    ChannelModel chan;
    chan.antennas = 8;
    chan.average_gain = path_loss_gain(200.0);
    const QosRequirement qos;
    const auto q = qos_exponent(ArrivalModel::poisson(0.1), qos.queue_delay_s(), 3e-8, qos.frame_s);
    const double gamma = required_snr(1e-8, q.effective_bandwidth, spec, qos, 160.0);
    return PolicyConfig(threshold_power, gamma, q.effective_bandwidth * qos.frame_s, 1e-8, spec, chan, 160.0);
}

} // namespace

TEST(Mdl, EmptySystem)
{
    const auto pi = mdl_queue_pmf(0.0, 6);
    EXPECT_EQ(pi[0], 1.0);
    for (std::size_t l = 1; l < pi.size(); ++l) {
        EXPECT_EQ(pi[l], 0.0);
    }
}

TEST(Mdl, FirstTwoProbabilities)
{
    for (double xi : {0.1, 0.5, 0.9}) {
        const auto pi = mdl_queue_pmf(xi, 3);
        EXPECT_DOUBLE_EQ(pi[0], 1.0 - xi);
        EXPECT_NEAR(pi[1], (1.0 - xi) * std::expm1(xi), 1e-15);
    }
}

TEST(Mdl, CcdfMatchesWaitingTimeDistribution)
{
    for (long double xi : {0.138L, 0.3L, 0.5L, 0.8L}) {
        for (int l = 0; l <= 12; ++l) {
            const double expected = static_cast<double>(1.0L - md1_wait_cdf(xi, l));
            const double got = mdl_queue_ccdf(static_cast<double>(xi), l);
            EXPECT_NEAR(got, expected, 1e-13 + 1e-9 * expected) << "xi = " << static_cast<double>(xi) << " L = " << l;
        }
    }
}

TEST(Mdl, ProbabilitiesAreNonnegativeAndSumBelowOne)
{
    for (double xi : {0.2, 0.6, 0.95}) {
        const auto pi = mdl_queue_pmf(xi, 120);
        double sum = 0.0;
        for (double p : pi) {
            EXPECT_GE(p, -1e-15);
            sum += p;
        }
        EXPECT_LE(sum, 1.0 + 1e-12);
    }
}

TEST(Mdl, Errors)
{
    EXPECT_THROW(mdl_queue_pmf(1.0, 3), InstabilityError);
    EXPECT_THROW(mdl_delay_ccdf(0.8, 0.5, 3.0), InstabilityError);
    EXPECT_THROW(mdl_queue_pmf(-0.1, 3), DomainError);
    EXPECT_THROW(mdl_queue_pmf(0.9, 1000), DomainError);
}

TEST(Mdl, DelayCcdfAtZeroIsUtilisation)
{
    EXPECT_DOUBLE_EQ(mdl_delay_ccdf(0.1, 0.7243, 0.0), 0.1 / 0.7243);
}

TEST(Mdl, DelayCcdfBelowEffectiveBandwidthBound)
{
    const QosRequirement qos;
    for (double eps : {1e-3, 1e-5, 1e-8}) {
        const auto q = qos_exponent(ArrivalModel::poisson(0.1), qos.queue_delay_s(), eps, qos.frame_s);
        const double s = q.effective_bandwidth * qos.frame_s;
        // Delays resolved on the service-time grid D = l / s.
        for (int l = 0; l <= static_cast<int>(s * qos.queue_delay_frames()); ++l) {
            const double d = l / s;
            EXPECT_LE(mdl_delay_ccdf(0.1, s, d), delay_violation_upper_bound(q.theta, q.effective_bandwidth, d * qos.frame_s))
                << "eps = " << eps << " L = " << l;
        }
    }
}

TEST(DelayBound, Identities)
{
    const QosRequirement qos;
    const auto q = qos_exponent(ArrivalModel::poisson(0.1), qos.queue_delay_s(), 1e-8, qos.frame_s);
    EXPECT_EQ(delay_violation_upper_bound(q.theta, q.effective_bandwidth, 0.0), 1.0);
    EXPECT_NEAR(delay_violation_upper_bound(q.theta, q.effective_bandwidth, qos.queue_delay_s()) / 1e-8, 1.0, 1e-12);
    double prev = 1.0;
    for (double d = 1e-5; d < 1e-3; d += 1e-5) {
        const double b = delay_violation_upper_bound(q.theta, q.effective_bandwidth, d);
        EXPECT_LT(b, prev);
        prev = b;
    }
}

TEST(Policy, ConstructionChecksTheRequiredSnr)
{
    const auto p = example_policy();
    EXPECT_THROW(PolicyConfig(0.1, p.required_snr * 1.01, p.service_packets, p.block_error, p.spectrum, p.channel,
                              p.packet_bits),
                 ContractError);
    EXPECT_THROW(PolicyConfig(-1.0, p.required_snr, p.service_packets, p.block_error, p.spectrum, p.channel,
                              p.packet_bits),
                 DomainError);
}

TEST(Policy, ThresholdRateAtTheBoundaryGain)
{
    const auto p = example_policy();
    // The design relation uses V = 1; the exact dispersion is slightly
    // smaller, so s^th(g*) sits marginally above T_f E^B.
    const double at_boundary = s_threshold(p, {p.gain_threshold});
    EXPECT_GE(at_boundary, p.service_packets);
    EXPECT_NEAR(at_boundary / p.service_packets, 1.0, 1e-3);
    EXPECT_EQ(s_threshold(p, {0.0}), 0.0);
    EXPECT_GT(s_threshold(p, {10.0 * p.gain_threshold}), p.service_packets);
}

TEST(Policy, PowerBranches)
{
    const auto p = example_policy();
    const double q_full = 2.0 * p.service_packets;
    EXPECT_EQ(power_policy(p, 0.0, {1.0}), 0.0);
    EXPECT_EQ(power_policy(p, q_full, {0.5 * p.gain_threshold}), p.threshold_power_w);
    EXPECT_NEAR(power_policy(p, q_full, {2.0 * p.gain_threshold}) / (p.threshold_power_w / 2.0), 1.0, 1e-12);
}

TEST(Policy, PartialQueueGetsJustEnoughPower)
{
    const auto p = example_policy();
    const double queue = 0.4 * p.service_packets;
    const GainSample g{3.0 * p.gain_threshold};
    const double power = power_policy(p, queue, g);
    EXPECT_LT(power, p.threshold_power_w);
    const double rate = p.packets_at_snr(p.snr_per_watt(g.g) * power);
    EXPECT_GE(rate, queue);
    EXPECT_NEAR(rate, queue, 1e-9);
    // Deeply faded: capped.
    EXPECT_EQ(power_policy(p, queue, {0.05 * p.gain_threshold}), p.threshold_power_w);
}

TEST(Policy, PowerNeverExceedsTheThreshold)
{
    const auto p = example_policy();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> q(0.0, 3.0);
    std::exponential_distribution<double> g(1.0 / p.gain_threshold);
    for (int i = 0; i < 5000; ++i) {
        EXPECT_LE(power_policy(p, q(rng), {g(rng)}), p.threshold_power_w * (1.0 + 1e-15));
    }
}

TEST(Policy, DropBranches)
{
    const auto p = example_policy();
    const double q_full = 2.0 * p.service_packets;
    EXPECT_EQ(drop_policy(p, q_full, {2.0 * p.gain_threshold}), 0.0);
    EXPECT_EQ(drop_policy(p, 0.0, {0.0}), 0.0);
    EXPECT_DOUBLE_EQ(drop_policy(p, q_full, {0.0}), p.service_packets);
    const GainSample faded{0.3 * p.gain_threshold};
    EXPECT_NEAR(drop_policy(p, q_full, faded), p.service_packets - s_threshold(p, faded), 1e-15);
    const double partial = 0.9 * p.service_packets;
    EXPECT_NEAR(drop_policy(p, partial, faded), std::max(partial - s_threshold(p, faded), 0.0), 1e-15);
}

TEST(StepQueue, Examples)
{
    QueueState q;
    auto r = step_queue(q, 3, 5.0, 0.0, 0);
    EXPECT_EQ(r.departed, 0.0);
    EXPECT_EQ(q.length(), 3.0);

    QueueState ten;
    ten.push(10, 0);
    r = step_queue(ten, 0, 4.0, 0.0, 1);
    EXPECT_EQ(r.departed, 4.0);
    EXPECT_EQ(ten.length(), 6.0);
}

TEST(StepQueue, RecursionIdentityAndFifoOrder)
{
    std::mt19937_64 rng(1);
    std::poisson_distribution<int> arrivals(1.2);
    std::uniform_real_distribution<double> service(0.0, 2.5);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    QueueState q;
    for (std::uint64_t n = 0; n < 20000; ++n) {
        const double before = q.length();
        const int a = arrivals(rng);
        const double s = service(rng);
        const double room = std::max(before - std::min(before, s), 0.0);
        const double d = frac(rng) < 0.2 ? frac(rng) * room : 0.0;
        const auto r = step_queue(q, static_cast<std::uint64_t>(a), s, d, n);
        EXPECT_NEAR(r.departed, std::min(before, s), 1e-9);
        EXPECT_NEAR(q.length() - before, a - r.departed - r.dropped, 1e-9);
        EXPECT_GE(q.length(), 0.0);
        for (std::size_t i = 1; i < q.packets().size(); ++i) {
            ASSERT_LE(q.packets()[i - 1].arrival_frame, q.packets()[i].arrival_frame);
        }
    }
}

TEST(StepQueue, Errors)
{
    QueueState q;
    q.push(2, 0);
    EXPECT_THROW(step_queue(q, 0, -1.0, 0.0, 1), ContractError);
    EXPECT_THROW(step_queue(q, 0, 1.0, -0.5, 1), ContractError);
    EXPECT_THROW(step_queue(q, 0, 1.0, 1.5, 1), ContractError);
}

TEST(StepQueue, ExpiryDropsOnlyOldPackets)
{
    QueueState q;
    q.push(2, 0);
    q.push(3, 5);
    EXPECT_EQ(q.expire(8, 8.0), 0.0);
    EXPECT_EQ(q.expire(9, 8.0), 2.0);
    EXPECT_EQ(q.length(), 3.0);
}
