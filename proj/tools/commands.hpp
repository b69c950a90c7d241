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


#ifndef NAKARATE_TOOLS_COMMANDS_HPP
#define NAKARATE_TOOLS_COMMANDS_HPP

#include "config.hpp"

#include <exception>
#include <iosfwd>
#include <string>

namespace nakarate::cli {

// Each command returns the primary document (CSV or YAML) and appends a
// human summary to `summary`.
std::string cmd_outage(const RunConfig& config, std::string& summary);
std::string cmd_sweep(const RunConfig& config, std::string& summary);
std::string cmd_simulate(const RunConfig& config, std::string& summary);
std::string cmd_allocate(const RunConfig& config, std::string& summary);

struct Failure {
    int status;
    std::string message;
};

/// Exit status and message for an exception escaping a command: 2 for
/// configuration or input errors, 3 for numerical and other failures.
Failure classify_failure(std::exception_ptr e);

/// Full command-line entry. Returns the process exit status:
/// 0 success, 2 usage or config error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nakarate::cli

#endif
