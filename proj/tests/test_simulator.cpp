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
#include "urllc/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace urllc;

namespace {

SimulationConfig constant_config(ArrivalModel arrivals, double service, std::uint64_t frames, std::uint64_t seed = 7)
{
    SimulationConfig cfg;
    cfg.arrivals = std::move(arrivals);
    cfg.service = ConstantService{service};
    cfg.frames = frames;
    cfg.seed = seed;
    return cfg;
}

PolicyConfig link_policy()
{
    SpectrumAllocation spec;
    spec.subcarrier_bandwidth_hz = 0.15e6;
    spec.subcarrier_count = 4;
    spec.data_phase_s = 0.06e-3;
    ChannelModel chan;
    chan.antennas = 8;
    chan.average_gain = path_loss_gain(200.0);
    const QosRequirement qos;
    const auto q = qos_exponent(ArrivalModel::poisson(0.1), qos.queue_delay_s(), 1e-3, qos.frame_s);
    const double gamma = required_snr(1e-5, q.effective_bandwidth, spec, qos, 160.0);
    // Low threshold so that proactive drops are frequent enough to count.
    const double p_th = threshold_power(gamma, 1e-3, spec, chan);
    return PolicyConfig(p_th, gamma, q.effective_bandwidth * qos.frame_s, 1e-5, spec, chan, 160.0);
}

SimulationConfig policy_config(DropMode drop, std::uint64_t frames)
{
    SimulationConfig cfg;
    cfg.arrivals = ArrivalModel::poisson(0.1);
    cfg.service = link_policy();
    cfg.drop = drop;
    cfg.frames = frames;
    cfg.seed = 21;
    cfg.deadline_frames = 8.0;
    cfg.ccdf_thresholds_frames = {1, 2, 4, 8};
    return cfg;
}

} // namespace

TEST(Simulator, ZeroArrivals)
{
    for (auto mode : {QueueMode::fluid, QueueMode::packet}) {
        auto cfg = constant_config(ArrivalModel::poisson(0.0), 0.5, 10000);
        cfg.mode = mode;
        cfg.ccdf_thresholds_frames = {1.0, 4.0};
        const auto r = simulate(cfg);
        EXPECT_EQ(r.counters.arrived, 0.0);
        EXPECT_EQ(r.counters.frames_simulated, 10000u);
        for (const auto& p : r.ccdf) {
            EXPECT_EQ(p.hits, 0u);
            EXPECT_EQ(p.ccdf, 0.0);
        }
        EXPECT_EQ(r.eps_q.value, 0.0);
    }
}

TEST(Simulator, ConservationInBothModes)
{
    for (auto mode : {QueueMode::fluid, QueueMode::packet}) {
        auto cfg = constant_config(ArrivalModel::ipp(0.8, 0.01, 0.01), 0.5, 200000);
        cfg.mode = mode;
        cfg.deadline_frames = 6.0;
        const auto r = simulate(cfg);
        EXPECT_GT(r.counters.arrived, 0.0);
        EXPECT_GT(r.counters.dropped_deadline, 0.0);
        EXPECT_NEAR(r.counters.residual(), 0.0, 1e-6 * r.counters.arrived);
    }
    const auto r = simulate(policy_config(DropMode::proactive, 200000));
    EXPECT_NEAR(r.counters.residual(), 0.0, 1e-6 * r.counters.arrived);
}

TEST(Simulator, DeterministicForAFixedSeed)
{
    auto cfg = policy_config(DropMode::proactive, 50000);
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    EXPECT_EQ(a.counters.delivered, b.counters.delivered);
    EXPECT_EQ(a.counters.dropped_proactive, b.counters.dropped_proactive);
    EXPECT_EQ(a.delay_histogram, b.delay_histogram);
    EXPECT_EQ(a.mean_power_w, b.mean_power_w);
    cfg.seed += 1;
    EXPECT_NE(simulate(cfg).counters.arrived, a.counters.arrived);
}

TEST(Simulator, FluidModeReproducesTheMd1Distribution)
{
    const double s = 0.5;
    for (double xi : {0.3, 0.5, 0.8}) {
        auto cfg = constant_config(ArrivalModel::poisson(xi * s), s, 2000000, 3);
        cfg.mode = QueueMode::fluid;
        for (int l = 0; l <= 6; ++l) {
            cfg.ccdf_thresholds_frames.push_back(l / s);
        }
        const auto r = simulate(cfg);
        ASSERT_FALSE(r.unstable);
        for (int l = 0; l <= 6; ++l) {
            const auto& p = r.ccdf[static_cast<std::size_t>(l)];
            const double exact = mdl_queue_ccdf(xi, l);
            EXPECT_NEAR(p.ccdf, exact, 4.0 * p.std_error + 1e-5) << "xi = " << xi << " L = " << l;
        }
    }
}

TEST(Simulator, DelayCcdfStaysBelowTheBound)
{
    const QosRequirement qos;
    const std::vector<ArrivalModel> models = {ArrivalModel::poisson(0.1), ArrivalModel::ipp(0.2, 0.02, 0.02),
                                              ArrivalModel::spp(0.1, 0.2, 0.02, 0.02)};
    for (const auto& m : models) {
        const auto q = qos_exponent(m, qos.queue_delay_s(), 1e-3, qos.frame_s);
        auto cfg = constant_config(m, q.effective_bandwidth * qos.frame_s, 1000000, 5);
        cfg.mode = QueueMode::fluid;
        cfg.ccdf_thresholds_frames = {0.5, 1, 2, 4, 6, 8};
        const auto r = simulate(cfg);
        for (const auto& p : r.ccdf) {
            const double bound =
                delay_violation_upper_bound(q.theta, q.effective_bandwidth, p.threshold_frames * qos.frame_s);
            EXPECT_LE(p.ccdf, bound + 3.0 * p.std_error) << m.name() << " x = " << p.threshold_frames;
        }
    }
}

TEST(Simulator, PolicyRunProperties)
{
    const auto pro = simulate(policy_config(DropMode::proactive, 1000000));
    const auto intu = simulate(policy_config(DropMode::intuitive, 1000000));
    const auto policy = link_policy();
    EXPECT_LE(pro.max_power_w, policy.threshold_power_w * (1.0 + 1e-12));
    EXPECT_LE(intu.max_power_w, policy.threshold_power_w * (1.0 + 1e-12));
    EXPECT_GT(pro.mean_power_w, 0.0);
    // Served packets leave one frame after arrival at the earliest.
    EXPECT_EQ(pro.delay_histogram[0], 0u);
    EXPECT_GT(pro.eps_h.value, 0.0);
    EXPECT_GE(intu.eps_h.value, pro.eps_h.value);
}

TEST(Simulator, InstabilityIsReported)
{
    auto cfg = constant_config(ArrivalModel::poisson(0.6), 0.5, 10000000);
    cfg.mode = QueueMode::fluid;
    cfg.instability_queue = 1000;
    const auto r = simulate(cfg);
    EXPECT_TRUE(r.unstable);
    EXPECT_FALSE(r.diagnostic.empty());
    EXPECT_LT(r.counters.frames_simulated, cfg.frames);

    cfg.mode = QueueMode::packet;
    EXPECT_TRUE(simulate(cfg).unstable);
}

TEST(Simulator, ConfigurationErrors)
{
    auto cfg = constant_config(ArrivalModel::poisson(0.1), 0.5, 0);
    EXPECT_THROW(simulate(cfg), DomainError);
    cfg.frames = 10;
    cfg.ccdf_thresholds_frames = {3.0, 1.0};
    EXPECT_THROW(simulate(cfg), DomainError);
    auto policy = policy_config(DropMode::proactive, 10);
    policy.mode = QueueMode::fluid;
    EXPECT_THROW(simulate(policy), UnsupportedError);
}

TEST(Simulator, CountersAccumulate)
{
    LossCounters a;
    a.arrived = 3;
    a.delivered = 2;
    a.still_queued = 1;
    a.frames_simulated = 10;
    LossCounters b = a;
    b += a;
    EXPECT_EQ(b.arrived, 6.0);
    EXPECT_EQ(b.frames_simulated, 20u);
    EXPECT_EQ(b.residual(), 0.0);
}
