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

#pragma once

#include <cstdint>
#include <random>

namespace urllc {

/// Generator used by every stochastic component. The engine's output
/// sequence is fixed by the C++ standard; all distributions on top of it
/// come from Boost.Random, whose algorithms do not vary by platform.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64+boost.random";

/// Stream `index` of a run seeded with `base_seed`. Stream k is seeded with
/// base_seed + k.
inline Rng make_stream(std::uint64_t base_seed, std::uint64_t index = 0)
{
    return Rng(base_seed + index);
}

} // namespace urllc
