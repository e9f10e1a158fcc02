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

// Arrival processes (Poisson, interrupted Poisson, switched Poisson), their
// effective bandwidths and QoS exponents, and per-frame generators.
//
// Rates are stored in packets per frame and switching rates in 1/frames.
// Effective bandwidths are returned in packets per second.

#pragma once

#include "urllc/error.hpp"
#include "urllc/random.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

namespace urllc {

struct PoissonArrivals {
    double rate; ///< lambda, packets/frame
};

/// Two-phase on/off source: OFF emits nothing, ON is Poisson(on_rate).
/// OFF lasts 1/alpha frames on average, ON lasts 1/beta.
struct IppArrivals {
    double on_rate;
    double alpha;
    double beta;
};

/// Two Poisson phases with rates rate_1 <= rate_2; phase 1 lasts
/// 1/alpha_1 frames on average, phase 2 lasts 1/alpha_2.
struct SppArrivals {
    double rate_1;
    double rate_2;
    double alpha_1;
    double alpha_2;
};

class ArrivalModel {
public:
    using Variant = std::variant<PoissonArrivals, IppArrivals, SppArrivals>;

    static ArrivalModel poisson(double rate_per_frame)
    {
        if (!(rate_per_frame >= 0.0)) {
            throw DomainError("Poisson rate must be nonnegative");
        }
        return ArrivalModel(PoissonArrivals{rate_per_frame});
    }

    static ArrivalModel poisson_per_second(double rate_per_s, double frame_s)
    {
        return poisson(rate_per_s * frame_s);
    }

    static ArrivalModel ipp(double on_rate, double alpha, double beta)
    {
        if (!(on_rate >= 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
            throw DomainError("IPP needs on_rate >= 0 and alpha, beta > 0");
        }
        return ArrivalModel(IppArrivals{on_rate, alpha, beta});
    }

    /// IPP parameterised by its mean rate instead of the ON rate.
    static ArrivalModel ipp_with_mean(double mean_rate, double alpha, double beta)
    {
        if (!(alpha > 0.0) || !(beta > 0.0)) {
            throw DomainError("IPP needs alpha, beta > 0");
        }
        return ipp(mean_rate * (alpha + beta) / alpha, alpha, beta);
    }

    /// Phases are swapped so that rate_1 <= rate_2.
    static ArrivalModel spp(double rate_1, double rate_2, double alpha_1, double alpha_2)
    {
        if (!(rate_1 >= 0.0) || !(rate_2 >= 0.0) || !(alpha_1 > 0.0) || !(alpha_2 > 0.0)) {
            throw DomainError("SPP needs nonnegative rates and positive switching rates");
        }
        if (rate_1 > rate_2) {
            std::swap(rate_1, rate_2);
            std::swap(alpha_1, alpha_2);
        }
        return ArrivalModel(SppArrivals{rate_1, rate_2, alpha_1, alpha_2});
    }

    const Variant& variant() const { return model_; }

    template <typename T>
    const T* get_if() const
    {
        return std::get_if<T>(&model_);
    }

    /// Stationary mean, packets/frame.
    double mean_rate() const
    {
        return std::visit(
            [](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, PoissonArrivals>) {
                    return m.rate;
                } else if constexpr (std::is_same_v<T, IppArrivals>) {
                    return m.on_rate * m.alpha / (m.alpha + m.beta);
                } else {
                    return (m.alpha_2 * m.rate_1 + m.alpha_1 * m.rate_2) / (m.alpha_1 + m.alpha_2);
                }
            },
            model_);
    }

    /// Largest phase rate, packets/frame.
    double peak_rate() const
    {
        return std::visit(
            [](const auto& m) -> double {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, PoissonArrivals>) {
                    return m.rate;
                } else if constexpr (std::is_same_v<T, IppArrivals>) {
                    return m.on_rate;
                } else {
                    return m.rate_2;
                }
            },
            model_);
    }

    std::string name() const
    {
        switch (model_.index()) {
        case 0:
            return "poisson";
        case 1:
            return "ipp";
        default:
            return "spp";
        }
    }

private:
    explicit ArrivalModel(Variant v) : model_(std::move(v)) {}

    Variant model_;
};

struct QosExponentResult {
    double theta;               ///< 1/packet
    double effective_bandwidth; ///< packets/s
};

namespace detail {

inline double poisson_eb(double rate, double theta, double frame_s)
{
    return rate * std::expm1(theta) / (frame_s * theta);
}

/// Dominant eigenvalue of the IPP's tilted generator, per frame. Written
/// so that the large-alpha regime does not cancel.
inline double ipp_omega(const IppArrivals& m, double theta)
{
    const double x = std::expm1(theta) * m.on_rate;
    const double b = x - (m.alpha + m.beta);
    const double disc = std::sqrt(b * b + 4.0 * m.alpha * x);
    if (b >= 0.0) {
        return 0.5 * (b + disc);
    }
    return 2.0 * m.alpha * x / (disc - b);
}

} // namespace detail

/// Effective bandwidth in packets/s. For the SPP this is the Poisson upper
/// bound at the larger phase rate.
inline double effective_bandwidth(const ArrivalModel& model, double theta, double frame_s)
{
    if (!(theta > 0.0)) {
        throw DomainError("effective_bandwidth: theta must be positive");
    }
    if (!(frame_s > 0.0)) {
        throw DomainError("effective_bandwidth: frame duration must be positive");
    }
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonArrivals>) {
                return detail::poisson_eb(m.rate, theta, frame_s);
            } else if constexpr (std::is_same_v<T, IppArrivals>) {
                return detail::ipp_omega(m, theta) / (theta * frame_s);
            } else {
                return detail::poisson_eb(m.rate_2, theta, frame_s);
            }
        },
        model.variant());
}

/// QoS exponent theta with exp(-theta E^B(theta) D) = eps and the matching
/// effective bandwidth.
inline QosExponentResult qos_exponent(const ArrivalModel& model, double delay_bound_s, double violation,
                                      double frame_s)
{
    if (!(violation > 0.0 && violation < 1.0)) {
        throw DomainError("qos_exponent: violation probability must lie in (0, 1)");
    }
    if (!(delay_bound_s > 0.0) || !(frame_s > 0.0)) {
        throw DomainError("qos_exponent: delay bound and frame duration must be positive");
    }
    const double log_target = -std::log(violation); // theta E^B D must equal this
    if (!(model.mean_rate() > 0.0)) {
        throw SolverError("qos_exponent: zero-rate arrivals have no finite QoS exponent");
    }

    const auto poisson_closed_form = [&](double rate) {
        const double theta = std::log1p(frame_s * log_target / (rate * delay_bound_s));
        return QosExponentResult{theta, log_target / (delay_bound_s * theta)};
    };

    if (const auto* p = model.get_if<PoissonArrivals>()) {
        return poisson_closed_form(p->rate);
    }
    if (const auto* s = model.get_if<SppArrivals>()) {
        return poisson_closed_form(s->rate_2);
    }

    // IPP: theta E^B(theta) D = Omega(theta) D / T_f is increasing in theta.
    const auto& ipp = *model.get_if<IppArrivals>();
    const auto residual = [&](double theta) {
        return detail::ipp_omega(ipp, theta) * delay_bound_s / frame_s - log_target;
    };
    double lo = 1e-9;
    double hi = 50.0;
    for (int expand = 0; residual(lo) > 0.0 && expand < 60; ++expand) {
        lo *= 1e-3;
    }
    for (int expand = 0; residual(hi) < 0.0 && expand < 8; ++expand) {
        hi *= 2.0;
    }
    if (!(residual(lo) <= 0.0 && residual(hi) >= 0.0)) {
        std::ostringstream msg;
        msg << "qos_exponent: no root in bracket [" << lo << ", " << hi << "], residuals " << residual(lo)
            << ", " << residual(hi);
        throw SolverError(msg.str());
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double r = residual(mid);
        if (std::abs(r) <= 1e-13 * log_target) {
            lo = hi = mid;
            break;
        }
        (r < 0.0 ? lo : hi) = mid;
    }
    const double theta = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
    return {theta, effective_bandwidth(model, theta, frame_s)};
}

/// Squared coefficient of variation of an IPP's inter-arrival time.
inline double variance_coefficient(const ArrivalModel& model)
{
    const auto* ipp = model.get_if<IppArrivals>();
    if (ipp == nullptr) {
        throw ContractError("variance_coefficient is defined for IPP arrivals only");
    }
    const double delta = ipp->beta / ipp->alpha;
    return 1.0 + 2.0 * delta * ipp->on_rate / ((1.0 + delta) * (1.0 + delta) * ipp->alpha);
}

// ----- sample paths ------------------------------------------------------

/// Phase of a modulated source: 0 = OFF / phase 1, 1 = ON / phase 2.
/// Poisson sources always stay in phase 0.
struct ArrivalState {
    int phase = 0;
};

/// Per-frame packet generator. Phase switches are evaluated once at each
/// frame boundary with probability 1 - exp(-rate), then a Poisson count is
/// drawn at the current phase's rate.
class ArrivalGenerator {
public:
    explicit ArrivalGenerator(const ArrivalModel& model) : model_(model)
    {
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, PoissonArrivals>) {
                    rates_[0] = rates_[1] = m.rate;
                    switch_[0] = switch_[1] = 0.0;
                } else if constexpr (std::is_same_v<T, IppArrivals>) {
                    rates_[0] = 0.0;
                    rates_[1] = m.on_rate;
                    switch_[0] = -std::expm1(-m.alpha);
                    switch_[1] = -std::expm1(-m.beta);
                } else {
                    rates_[0] = m.rate_1;
                    rates_[1] = m.rate_2;
                    switch_[0] = -std::expm1(-m.alpha_1);
                    switch_[1] = -std::expm1(-m.alpha_2);
                }
            },
            model.variant());
        for (int i = 0; i < 2; ++i) {
            if (rates_[i] > 0.0) {
                poisson_[i] = boost::random::poisson_distribution<int, double>(rates_[i]);
            }
        }
    }

    /// Phase drawn from the stationary distribution of the modulating chain.
    ArrivalState initial_state(Rng& rng) const
    {
        if (switch_[0] == 0.0 && switch_[1] == 0.0) {
            return {0};
        }
        const double p_phase0 = switch_[1] / (switch_[0] + switch_[1]);
        return {uniform_(rng) < p_phase0 ? 0 : 1};
    }

    int next(ArrivalState& state, Rng& rng)
    {
        if (switch_[state.phase] > 0.0 && uniform_(rng) < switch_[state.phase]) {
            state.phase ^= 1;
        }
        if (rates_[state.phase] <= 0.0) {
            return 0;
        }
        return poisson_[state.phase](rng);
    }

    double phase_rate(const ArrivalState& state) const { return rates_[state.phase]; }

    const ArrivalModel& model() const { return model_; }

private:
    ArrivalModel model_;
    double rates_[2] = {0.0, 0.0};
    double switch_[2] = {0.0, 0.0};
    boost::random::poisson_distribution<int, double> poisson_[2];
    mutable boost::random::uniform_01<double> uniform_;
};

/// One-frame step of the arrival process: (packet count, next state).
inline std::pair<int, ArrivalState> sample_arrivals(const ArrivalModel& model, ArrivalState state, Rng& rng)
{
    ArrivalGenerator gen(model);
    const int count = gen.next(state, rng);
    return {count, state};
}

} // namespace urllc
