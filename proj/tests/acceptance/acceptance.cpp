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

// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include "urllc/urllc.hpp"

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace urllc;

namespace {

constexpr double kBits = 160.0;
constexpr double kB = 0.15e6;

struct Verdict {
    bool pass = true;
    std::string detail;
};

template <typename... Args>
std::string fmt(const char* format, Args... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void note(Verdict& v, bool ok, const std::string& text)
{
    if (!v.detail.empty()) {
        v.detail += "; ";
    }
    v.detail += text;
    v.pass = v.pass && ok;
}

SpectrumAllocation spectrum(int nc)
{
    SpectrumAllocation s;
    s.subcarrier_bandwidth_hz = kB;
    s.subcarrier_count = nc;
    s.data_phase_s = QosRequirement{}.data_phase_s;
    return s;
}

UserLink link_at(double distance_m, int antennas, ArrivalModel traffic = ArrivalModel::poisson(0.1))
{
    UserLink u;
    u.channel.antennas = antennas;
    u.channel.average_gain = path_loss_gain(distance_m);
    u.traffic = std::move(traffic);
    return u;
}

double log_uniform(Rng& rng, double lo, double hi)
{
    boost::random::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// Constant-service simulation at the effective bandwidth for eps^q; checks
// bound dominance at every threshold with at least 100 hits and, for
// Poisson traffic, agreement with the M/D/1 distribution.
void check_bound(Verdict& v, const char* label, const ArrivalModel& traffic, double eps_q, std::uint64_t frames,
                 std::uint64_t seed)
{
    const QosRequirement qos;
    const auto q = qos_exponent(traffic, qos.queue_delay_s(), eps_q, qos.frame_s);
    const double s = q.effective_bandwidth * qos.frame_s;
    SimulationConfig cfg;
    cfg.arrivals = traffic;
    cfg.service = ConstantService{s};
    cfg.mode = QueueMode::fluid;
    cfg.frames = frames;
    cfg.seed = seed;
    const int max_l = static_cast<int>(std::floor(s * qos.queue_delay_frames() + 1e-9));
    for (int l = 0; l <= max_l; ++l) {
        cfg.ccdf_thresholds_frames.push_back(l / s);
    }
    const auto res = simulate(cfg);
    const bool poisson = traffic.get_if<PoissonArrivals>() != nullptr;
    int checked = 0;
    bool dominated = true;
    bool matched = true;
    double worst_z = 0.0;
    double worst_ratio = 0.0;
    for (int l = 0; l <= max_l; ++l) {
        const auto& p = res.ccdf[static_cast<std::size_t>(l)];
        if (p.hits < 100) {
            continue;
        }
        ++checked;
        const double bound = delay_violation_upper_bound(q.theta, q.effective_bandwidth, p.threshold_frames * qos.frame_s);
        dominated = dominated && p.ccdf <= bound;
        worst_ratio = std::max(worst_ratio, p.ccdf / bound);
        if (poisson) {
            const double z = std::abs(p.ccdf - mdl_queue_ccdf(traffic.mean_rate() / s, l)) / p.std_error;
            worst_z = std::max(worst_z, z);
            matched = matched && z <= 3.0;
        }
    }
    note(v, dominated && checked > 0 && !res.unstable, fmt("%s: %d thresholds, max sim/bound %.3g", label, checked, worst_ratio));
    if (poisson) {
        note(v, matched, fmt("max |sim - M/D/1|/sigma %.2f", worst_z));
    }
}

Verdict criterion_1()
{
    Verdict v;
    check_bound(v, "Poisson 0.1 pk/frame", ArrivalModel::poisson(0.1), 1e-8, 100000000, 101);
    return v;
}

Verdict criterion_2()
{
    Verdict v;
    const auto ipp = ArrivalModel::ipp(0.2, 1e-4, 1e-4);
    note(v, std::abs(variance_coefficient(ipp) - 1001.0) < 1e-6, fmt("IPP C^2 = %.1f", variance_coefficient(ipp)));
    check_bound(v, "IPP", ipp, 1e-8, 100000000, 202);
    check_bound(v, "SPP", ArrivalModel::spp(0.1, 0.2, 1e-4, 1e-4), 1e-8, 100000000, 303);
    return v;
}

Verdict criterion_3()
{
    Verdict v;
    const QosRequirement qos;
    for (int nt : {4, 8, 16}) {
        const auto poisson = solve_single_user(link_at(200.0, nt), qos, kB, 4, kBits);
        const auto ipp = solve_single_user(link_at(200.0, nt, ArrivalModel::ipp(0.2, 1e-4, 1e-4)), qos, kB, 4, kBits);
        const auto& sp = poisson.split;
        const double spread = std::max({sp.eps_c, sp.eps_q, sp.eps_h}) / std::min({sp.eps_c, sp.eps_q, sp.eps_h});
        note(v, spread <= 100.0 && ipp.split.eps_q > sp.eps_q, fmt("Nt=%d spread %.2f, eps_q IPP/Poisson %.3f",
             nt, spread, ipp.split.eps_q / sp.eps_q));
    }
    return v;
}

Verdict criterion_4()
{
    Verdict v;
    const QosRequirement qos;
    const double third = qos.loss_budget / 3.0;
    for (int nt : {8, 16}) {
        const auto opt = solve_single_user(link_at(200.0, nt), qos, kB, 4, kBits);
        const auto eq = solve_fixed_split(link_at(200.0, nt), qos, kB, 4, kBits, {third, third, third});
        const double gap = eq.threshold_power_w / opt.threshold_power_w - 1.0;
        note(v, gap >= 0.0 && gap <= 0.10, fmt("Nt=%d gap %.2f%%", nt, 100.0 * gap));
    }
    return v;
}

Verdict criterion_5()
{
    Verdict v;
    Rng rng(505);
    boost::random::uniform_real_distribution<double> distance(50.0, 200.0);
    double worst = 0.0;
    int exact = 0;
    for (int i = 0; i < 20; ++i) {
        MultiUserScenario s;
        const int k = 2 + i % 2;
        s.max_subcarriers = (i / 2) % 2 == 0 ? 6 : 8;
        for (int j = 0; j < k; ++j) {
            auto u = link_at(distance(rng), 8);
            u.id = j;
            s.users.push_back(u);
        }
        const double g = solve_multi_user(s).total_power_w;
        const double e = exhaustive_multi_user(s).total_power_w;
        const double gap = g / e - 1.0;
        worst = std::max(worst, gap);
        exact += gap <= 1e-9 ? 1 : 0;
        if (gap > 0.01) {
            note(v, false, fmt("instance %d gap %.3g", i, gap));
        }
    }
    note(v, worst <= 0.01, fmt("20 instances, worst gap %.3g, %d exact", worst, exact));
    return v;
}

Verdict criterion_6()
{
    Verdict v;
    const QosRequirement qos;
    Rng rng(606);
    boost::random::uniform_int_distribution<int> antenna_pick(0, 2);
    const int antennas[] = {1, 2, 4};
    int within = 0;
    int bounded = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 10; ++i) {
        ChannelModel chan;
        chan.antennas = antennas[antenna_pick(rng)];
        chan.average_gain = path_loss_gain(200.0);
        const auto spec = spectrum(4);
        const double eps_c = log_uniform(rng, 1e-6, 1e-4);
        const double eps_q = log_uniform(rng, 1e-6, 1e-3);
        const auto q = qos_exponent(ArrivalModel::poisson(0.1), qos.queue_delay_s(), eps_q, qos.frame_s);
        const double gamma = required_snr(eps_c, q.effective_bandwidth, spec, qos, kBits);
        const double p_th = threshold_power(gamma, log_uniform(rng, 2e-3, 2e-2), spec, chan);
        const double svc = q.effective_bandwidth * qos.frame_s;
        const PolicyConfig policy(p_th, gamma, svc, eps_c, spec, chan, kBits);

        SimulationConfig cfg;
        cfg.arrivals = ArrivalModel::poisson(0.1);
        cfg.service = policy;
        cfg.frames = 10000000;
        cfg.seed = 6000 + 4 * static_cast<std::uint64_t>(i);
        cfg.track_power = false;
        const auto res = simulate(cfg);

        const double analytic = drop_probability(gamma, p_th, spec, chan);
        const double bound = drop_probability_bound(gamma, p_th, spec, chan, svc, eps_c, kBits);
        const double z = std::abs(analytic - res.eps_h.value) / res.eps_h.std_error;
        worst_z = std::max(worst_z, z);
        within += z <= 3.0 ? 1 : 0;
        bounded += bound >= res.eps_h.value ? 1 : 0;
        std::printf("  c6[%d] Nt=%d gamma=%.3g P=%.4g W: analytic %.4e, sim %.4e +- %.2e (z %.2f), bound %.4e\n", i,
                    chan.antennas, gamma, p_th, analytic, res.eps_h.value, res.eps_h.std_error, z, bound);
    }
    note(v, within == 10, fmt("%d/10 analytic within 3 sigma (worst %.2f)", within, worst_z));
    note(v, bounded == 10, fmt("%d/10 bound >= simulation", bounded));
    return v;
}

Verdict criterion_7()
{
    Verdict v;
    const QosRequirement qos;
    const auto traffic = ArrivalModel::poisson(0.1);
    const auto f = [&](double c, double q) { return split_objective(c, q, spectrum(4), qos, traffic, kBits); };
    const int n = 50;
    std::vector<double> grid;
    for (int i = 0; i < n; ++i) {
        grid.push_back(std::pow(10.0, -9.0 + 4.0 * i / (n - 1)));
    }
    int bad = 0;
    for (int i = 1; i + 1 < n; ++i) {
        for (int j = 1; j + 1 < n; ++j) {
            const double c0 = grid[i - 1], c1 = grid[i], c2 = grid[i + 1];
            const double q0 = grid[j - 1], q1 = grid[j], q2 = grid[j + 1];
            const double fcc =
                2.0 * ((f(c2, q1) - f(c1, q1)) / (c2 - c1) - (f(c1, q1) - f(c0, q1)) / (c1 - c0)) / (c2 - c0);
            const double fqq =
                2.0 * ((f(c1, q2) - f(c1, q1)) / (q2 - q1) - (f(c1, q1) - f(c1, q0)) / (q1 - q0)) / (q2 - q0);
            const double fcq = (f(c2, q2) - f(c2, q1) - f(c1, q2) + f(c1, q1)) / ((c2 - c1) * (q2 - q1));
            bad += (fcc > 0.0 && fqq > 0.0 && fcc * fqq - fcq * fcq > 0.0) ? 0 : 1;
        }
    }
    note(v, bad == 0, fmt("50x50 grid: %d points without positive curvature", bad));

    const auto user = link_at(200.0, 8);
    const auto best = solve_single_user(user, qos, kB, 4, kBits);
    const int m = 20;
    double min_ratio = std::numeric_limits<double>::infinity();
    int infeasible = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const double wc = std::pow(10.0, -3.0 + 3.0 * i / (m - 1));
                const double wq = std::pow(10.0, -3.0 + 3.0 * j / (m - 1));
                const double wh = std::pow(10.0, -3.0 + 3.0 * k / (m - 1));
                const double scale = qos.loss_budget / (wc + wq + wh);
                try {
                    const auto a = solve_fixed_split(user, qos, kB, 4, kBits, {wc * scale, wq * scale, wh * scale});
                    min_ratio = std::min(min_ratio, a.threshold_power_w / best.threshold_power_w);
                } catch (const InfeasibleError&) {
                    ++infeasible;
                }
            }
        }
    }
    // threshold_power resolves eps^h to 1e-3 relative, so P^th carries a
    // matching tolerance.
    note(v, min_ratio >= 1.0 - 1e-3, fmt("20^3 grid: min P_grid/P_opt %.6f (%d infeasible points)", min_ratio,
         infeasible));
    return v;
}

Verdict criterion_8()
{
    Verdict v;
    QosRequirement qos;
    qos.loss_budget = 1e-3;
    const auto user = link_at(200.0, 8);
    const auto a = solve_single_user(user, qos, kB, 4, kBits);
    SimulationConfig cfg;
    cfg.arrivals = user.traffic;
    cfg.service = PolicyConfig(a.threshold_power_w, a.required_snr, qos.frame_s * a.effective_bandwidth, a.split.eps_c,
                               spectrum(4), user.channel, kBits);
    cfg.frames = 10000000;
    cfg.seed = 808;
    cfg.deadline_frames = qos.queue_delay_frames();
    const auto res = simulate(cfg);
    const double total = res.eps_c.value + res.eps_q.value + res.eps_h.value;
    note(v, total <= 1.2 * qos.loss_budget && !res.unstable, fmt("empirical eps_c %.3e + eps_q %.3e + eps_h %.3e", res.eps_c.value,
         res.eps_q.value, res.eps_h.value));
    note(v, true, fmt("total %.3e vs 1.2 eps_D = %.3e", total, 1.2 * qos.loss_budget));
    return v;
}

Verdict criterion_9()
{
    Verdict v;
    const QosRequirement qos;
    const auto user = link_at(200.0, 8);
    const auto flat = solve_single_user(user, qos, kB, 4, kBits);
    const auto fs = solve_frequency_selective(user, qos, kB, 4, 4 * kB, 1, kBits);
    const double diff = std::abs(fs.threshold_power_w / flat.threshold_power_w - 1.0);
    note(v, diff <= 1e-9, fmt("N^sc=1 vs flat P^th relative difference %.2g", diff));

    // Equal gains: fixed subchannel width, growing subchannel count.
    ChannelModel chan;
    chan.average_gain = 1.0;
    chan.noise_psd_w_per_hz = 1.0;
    const double w_c = kB;
    const auto loss = [&](int nsc) {
        SpectrumAllocation spec;
        spec.subcarrier_bandwidth_hz = w_c;
        spec.subcarrier_count = nsc;
        spec.data_phase_s = qos.data_phase_s;
        spec.subchannel_bandwidth_hz = w_c;
        spec.subchannel_count = nsc;
        const std::vector<double> powers(static_cast<std::size_t>(nsc), 10.0 * w_c); // SNR 10 per subchannel
        const std::vector<GainSample> gains(static_cast<std::size_t>(nsc), GainSample{1.0});
        const double joint = fbl_packets_fs_joint(spec, chan, powers, gains, kBits, 1e-7).packets;
        const double indep = fbl_packets_fs_indep(spec, chan, powers, gains, kBits, 1e-7).packets;
        return (joint - indep) / indep;
    };
    bool monotone = true;
    double prev = -1.0;
    for (int nsc = 1; nsc <= 64; ++nsc) {
        const double l = loss(nsc);
        monotone = monotone && l >= prev;
        prev = l;
    }
    const double at32 = loss(32);
    const double at64 = loss(64);
    const double rel = std::abs(at32 / at64 - 1.0);
    note(v, monotone, fmt("normalized loss monotone over N^sc = 1..64: %s", monotone ? "yes" : "no"));
    note(v, rel <= 0.05, fmt("loss(32) = %.4f, loss(64) = %.4f, relative gap %.2f%% (limit 5%%)", at32, at64, 100.0 * rel));
    return v;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"1 bound validation, Poisson", criterion_1},
        {"2 bound validation, IPP and SPP", criterion_2},
        {"3 reliability split structure", criterion_3},
        {"4 equal-split near-optimality", criterion_4},
        {"5 greedy vs exhaustive", criterion_5},
        {"6 drop-probability oracle", criterion_6},
        {"7 convexity and grid optimality", criterion_7},
        {"8 end-to-end QoS at eps_D = 1e-3", criterion_8},
        {"9 frequency-selective consistency", criterion_9},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", name, secs, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
