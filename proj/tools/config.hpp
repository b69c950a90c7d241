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


#ifndef NAKARATE_TOOLS_CONFIG_HPP
#define NAKARATE_TOOLS_CONFIG_HPP

#include "nakarate/allocator.hpp"
#include "nakarate/channel.hpp"
#include "nakarate/mcsim.hpp"
#include "nakarate/outage.hpp"
#include "nakarate/ratestats.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace nakarate::cli {

/// Schema violation; the message starts with "line L, column C:".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { SingleHop, MultiHop, Sweep, Simulate, Allocate };

const char* to_string(Scenario s);

struct ChannelSpec {
    double m = 0.0;
    double omega = 0.0;
    double power_w = 0.0;

    bool operator==(const ChannelSpec&) const = default;
};

/// One hop: either its channels or an analytic outage probability.
struct HopSpec {
    std::vector<ChannelSpec> channels;
    std::optional<double> outage;

    bool operator==(const HopSpec&) const = default;
};

enum class SweepVariable { RMin, Bandwidth, Power, M };

struct SweepSpec {
    SweepVariable variable = SweepVariable::RMin;
    double start = 0.0;
    double stop = 0.0;
    int points = 2;
    bool log_scale = false;
    bool simulate = false;

    std::vector<double> grid() const;
    bool operator==(const SweepSpec&) const = default;
};

struct SimSpec {
    std::uint64_t seed = 0;
    std::int64_t frames = 100000;
    unsigned threads = 0;

    bool operator==(const SimSpec&) const = default;
};

struct RunConfig {
    Scenario scenario = Scenario::SingleHop;
    std::optional<channel::LinkConfig> link;
    std::optional<double> r_min_bps;
    std::vector<ChannelSpec> channels;
    std::vector<HopSpec> path;
    std::optional<SweepSpec> sweep;
    SimSpec sim;
    std::optional<ratestats::AmcTable> amc;
    std::vector<allocator::UserDemand> users;
    std::vector<std::vector<allocator::ChannelTemplate>> pool;
    std::optional<double> power_total_w;
    std::optional<long> eval_frame;
    bool water_filling = false;
    std::string output;

    bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a config document. Throws ConfigError.
/// 17 significant digits with a '.' decimal point whatever the locale.
std::string format_double(double v);

/// Locale-free text of a number, for writing through YAML emitters.
template <typename T>
std::string plain(T v) {
    if constexpr (std::is_floating_point_v<T>) {
        return format_double(v);
    } else {
        return std::to_string(v);
    }
}

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical YAML for a config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Model objects built from a validated config.
channel::AllocationSet allocation_from(const std::vector<ChannelSpec>& channels,
                                       const channel::LinkConfig& link);
mcsim::SimConfig sim_config_from(const RunConfig& config);

} // namespace nakarate::cli

#endif
