// SPDX-License-Identifier: Apache-2.0
//
// nakarate: rate outage probability of OFDMA links over Nakagami-m channels
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

#ifndef NAKARATE_ERROR_HPP
#define NAKARATE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nakarate {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical backend could not reach its accuracy target. The message
// carries the diagnostics of every backend that was tried.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) {
        throw DomainError(what);
    }
}

inline void require(bool ok, const std::string& what) {
    if (!ok) {
        throw DomainError(what);
    }
}

} // namespace detail
} // namespace nakarate

#endif
