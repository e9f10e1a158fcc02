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

#include <stdexcept>
#include <string>

namespace urllc {

/// Argument outside the mathematical domain of a formula (p outside (0,1),
/// negative SNR, nonpositive distance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a structural precondition (length mismatch, wrong variant).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter combination the models deliberately do not cover.
class UnsupportedError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A root or bracket search failed to converge.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No finite resource allocation satisfies the QoS target.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what, int user = -1)
        : std::runtime_error(what), user_(user) {}

    /// Index of the offending user, or -1 when not user specific.
    int user() const noexcept { return user_; }

private:
    int user_;
};

/// Queue utilisation at or above one.
class InstabilityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Enumeration larger than the configured guard.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace urllc
