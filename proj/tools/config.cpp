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


#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <type_traits>

namespace nakarate::cli {

const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::SingleHop:
        return "single_hop";
    case Scenario::MultiHop:
        return "multi_hop";
    case Scenario::Sweep:
        return "sweep";
    case Scenario::Simulate:
        return "simulate";
    case Scenario::Allocate:
        return "allocate";
    }
    return "?";
}

namespace {

const char* to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::RMin:
        return "r_min";
    case SweepVariable::Bandwidth:
        return "bandwidth";
    case SweepVariable::Power:
        return "power";
    case SweepVariable::M:
        return "m";
    }
    return "?";
}

[[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) {
    std::ostringstream os;
    if (mark.is_null()) {
        os << "line 1, column 1: " << msg;
    } else {
        os << "line " << mark.line + 1 << ", column " << mark.column + 1 << ": " << msg;
    }
    throw ConfigError(os.str());
}

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) { fail(at.Mark(), msg); }

void expect_map(const YAML::Node& node, const std::string& what) {
    if (!node.IsMap()) {
        fail(node, what + " must be a mapping");
    }
}

void expect_seq(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence()) {
        fail(node, what + " must be a sequence");
    }
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            fail(kv.first, "unknown key '" + key + "' in " + where);
        }
    }
}

// Numbers go through from_chars: the stream-based yaml-cpp conversion follows
// the global locale.
template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
    if (!node.IsScalar()) {
        fail(node, what + " must be a scalar");
    }
    if constexpr (std::is_arithmetic_v<T> && !std::is_same_v<T, bool>) {
        std::string_view text = node.Scalar();
        if (text.starts_with('+')) {
            text.remove_prefix(1);
        }
        T value{};
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
            fail(node, what + " has the wrong type");
        }
        return value;
    } else {
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, what + " has the wrong type");
        }
    }
}

template <typename T>
T required(const YAML::Node& map, const char* key, const std::string& where) {
    const YAML::Node v = map[key];
    if (!v) {
        fail(map, "missing required key '" + std::string(key) + "' in " + where);
    }
    return scalar<T>(v, key);
}

double positive(const YAML::Node& map, const char* key, const std::string& where) {
    const double v = required<double>(map, key, where);
    if (!(std::isfinite(v) && v > 0.0)) {
        fail(map[key], std::string(key) + " must be a finite value > 0");
    }
    return v;
}

double nonnegative(const YAML::Node& map, const char* key, const std::string& where) {
    const double v = required<double>(map, key, where);
    if (!(std::isfinite(v) && v >= 0.0)) {
        fail(map[key], std::string(key) + " must be a finite value >= 0");
    }
    return v;
}

channel::LinkConfig parse_link(const YAML::Node& node) {
    expect_map(node, "link");
    check_keys(node, {"bandwidth_hz", "subcarriers", "noise_psd_w_per_hz"}, "link");
    channel::LinkConfig link;
    link.b_total = positive(node, "bandwidth_hz", "link");
    link.n_subcarriers = required<int>(node, "subcarriers", "link");
    if (link.n_subcarriers < 1) {
        fail(node["subcarriers"], "subcarriers must be >= 1");
    }
    link.n0 = positive(node, "noise_psd_w_per_hz", "link");
    return link;
}

std::vector<ChannelSpec> parse_channels(const YAML::Node& node, const std::string& where) {
    expect_seq(node, where);
    if (node.size() == 0) {
        fail(node, where + " must list at least one subcarrier");
    }
    std::vector<ChannelSpec> out;
    for (const auto& item : node) {
        expect_map(item, where + " entry");
        check_keys(item, {"m", "omega", "power_w"}, where + " entry");
        out.push_back({positive(item, "m", where), positive(item, "omega", where),
                       positive(item, "power_w", where)});
    }
    return out;
}

std::vector<HopSpec> parse_path(const YAML::Node& node) {
    expect_seq(node, "path");
    if (node.size() == 0) {
        fail(node, "path must list at least one hop");
    }
    std::vector<HopSpec> out;
    for (const auto& item : node) {
        expect_map(item, "path entry");
        check_keys(item, {"channels", "outage"}, "path entry");
        HopSpec hop;
        const bool has_channels = static_cast<bool>(item["channels"]);
        const bool has_outage = static_cast<bool>(item["outage"]);
        if (has_channels == has_outage) {
            fail(item, "a hop needs exactly one of 'channels' or 'outage'");
        }
        if (has_channels) {
            hop.channels = parse_channels(item["channels"], "hop channels");
        } else {
            const double p = required<double>(item, "outage", "path entry");
            if (!(p >= 0.0 && p <= 1.0)) {
                fail(item["outage"], "outage must lie in [0, 1]");
            }
            hop.outage = p;
        }
        out.push_back(std::move(hop));
    }
    return out;
}

SweepSpec parse_sweep(const YAML::Node& node) {
    expect_map(node, "sweep");
    check_keys(node, {"variable", "start", "stop", "points", "scale", "simulate"}, "sweep");
    SweepSpec s;
    const std::string var = required<std::string>(node, "variable", "sweep");
    if (var == "r_min") {
        s.variable = SweepVariable::RMin;
    } else if (var == "bandwidth") {
        s.variable = SweepVariable::Bandwidth;
    } else if (var == "power") {
        s.variable = SweepVariable::Power;
    } else if (var == "m") {
        s.variable = SweepVariable::M;
    } else {
        fail(node["variable"], "variable must be one of r_min, bandwidth, power, m");
    }
    s.start = required<double>(node, "start", "sweep");
    s.stop = required<double>(node, "stop", "sweep");
    s.points = required<int>(node, "points", "sweep");
    if (s.points < 2) {
        fail(node["points"], "points must be >= 2");
    }
    if (node["scale"]) {
        const std::string scale = scalar<std::string>(node["scale"], "scale");
        if (scale != "linear" && scale != "log") {
            fail(node["scale"], "scale must be 'linear' or 'log'");
        }
        s.log_scale = scale == "log";
    }
    if (node["simulate"]) {
        s.simulate = scalar<bool>(node["simulate"], "simulate");
    }
    const double lowest = std::min(s.start, s.stop);
    if (!std::isfinite(s.start) || !std::isfinite(s.stop) || lowest < 0.0 ||
        (s.variable != SweepVariable::RMin && lowest <= 0.0) || (s.log_scale && lowest <= 0.0)) {
        fail(node, "sweep range must be finite and inside the variable's domain");
    }
    return s;
}

SimSpec parse_sim(const YAML::Node& node) {
    expect_map(node, "sim");
    check_keys(node, {"seed", "frames", "threads"}, "sim");
    SimSpec s;
    if (node["seed"]) {
        s.seed = scalar<std::uint64_t>(node["seed"], "seed");
    }
    if (node["frames"]) {
        s.frames = scalar<std::int64_t>(node["frames"], "frames");
        if (s.frames < 1) {
            fail(node["frames"], "frames must be >= 1");
        }
    }
    if (node["threads"]) {
        s.threads = scalar<unsigned>(node["threads"], "threads");
    }
    return s;
}

ratestats::AmcTable parse_amc(const YAML::Node& node) {
    expect_map(node, "amc");
    check_keys(node, {"thresholds", "bits", "thresholds_in_db"}, "amc");
    ratestats::AmcTable t;
    for (const char* key : {"thresholds", "bits"}) {
        const YAML::Node list = node[key];
        if (!list) {
            fail(node, std::string("missing required key '") + key + "' in amc");
        }
        expect_seq(list, key);
        if (list.size() != 7) {
            fail(list, std::string(key) + " must have exactly 7 entries");
        }
        auto& dst = std::string(key) == "bits" ? t.bits : t.thresholds;
        for (std::size_t i = 0; i < 7; ++i) {
            dst[i] = scalar<double>(list[i], key);
        }
    }
    if (node["thresholds_in_db"]) {
        t.thresholds_in_db = scalar<bool>(node["thresholds_in_db"], "thresholds_in_db");
    }
    try {
        t.validate();
    } catch (const DomainError& e) {
        fail(node, e.what());
    }
    return t;
}

std::vector<allocator::UserDemand> parse_users(const YAML::Node& node) {
    expect_seq(node, "users");
    if (node.size() == 0) {
        fail(node, "users must list at least one user");
    }
    std::vector<allocator::UserDemand> out;
    for (const auto& item : node) {
        expect_map(item, "users entry");
        check_keys(item, {"r_min_bps", "rho", "nu", "window"}, "users entry");
        allocator::UserDemand u;
        u.r_min = nonnegative(item, "r_min_bps", "users entry");
        u.rho = required<double>(item, "rho", "users entry");
        if (!(u.rho >= 1.0)) {
            fail(item["rho"], "rho must be >= 1");
        }
        u.nu = required<double>(item, "nu", "users entry");
        if (!(u.nu > 0.0 && u.nu < 1.0)) {
            fail(item["nu"], "nu must lie in (0, 1)");
        }
        u.T = required<int>(item, "window", "users entry");
        if (u.T < 1) {
            fail(item["window"], "window must be >= 1");
        }
        out.push_back(u);
    }
    return out;
}

std::vector<std::vector<allocator::ChannelTemplate>> parse_pool(const YAML::Node& node) {
    expect_seq(node, "pool");
    std::vector<std::vector<allocator::ChannelTemplate>> out;
    for (const auto& row : node) {
        expect_seq(row, "pool row");
        std::vector<allocator::ChannelTemplate> r;
        for (const auto& item : row) {
            expect_map(item, "pool entry");
            check_keys(item, {"m", "omega"}, "pool entry");
            r.push_back({positive(item, "m", "pool entry"), positive(item, "omega", "pool entry")});
        }
        if (!out.empty() && r.size() != out.front().size()) {
            fail(row, "every pool row needs the same number of subcarriers");
        }
        out.push_back(std::move(r));
    }
    return out;
}

void require_present(bool present, const YAML::Node& root, const std::string& key, Scenario s) {
    if (!present) {
        fail(root, std::string("scenario '") + to_string(s) + "' requires '" + key + "'");
    }
}

} // namespace

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        g[static_cast<std::size_t>(i)] =
            log_scale ? start * std::pow(stop / start, f) : start + (stop - start) * f;
    }
    g.back() = stop;
    return g;
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        fail(e.mark, e.msg);
    }
    if (!root || !root.IsMap()) {
        fail(root, "config must be a mapping");
    }
    check_keys(root,
               {"scenario", "link", "r_min_bps", "channels", "path", "sweep", "sim", "amc", "users",
                "pool", "power_total_w", "eval_frame", "water_filling", "output"},
               "config");
    RunConfig c;
    const std::string scenario = required<std::string>(root, "scenario", "config");
    if (scenario == "single_hop") {
        c.scenario = Scenario::SingleHop;
    } else if (scenario == "multi_hop") {
        c.scenario = Scenario::MultiHop;
    } else if (scenario == "sweep") {
        c.scenario = Scenario::Sweep;
    } else if (scenario == "simulate") {
        c.scenario = Scenario::Simulate;
    } else if (scenario == "allocate") {
        c.scenario = Scenario::Allocate;
    } else {
        fail(root["scenario"], "scenario must be one of single_hop, multi_hop, sweep, simulate, allocate");
    }
    if (root["link"]) {
        c.link = parse_link(root["link"]);
    }
    if (root["r_min_bps"]) {
        c.r_min_bps = nonnegative(root, "r_min_bps", "config");
    }
    if (root["channels"]) {
        c.channels = parse_channels(root["channels"], "channels");
    }
    if (root["path"]) {
        c.path = parse_path(root["path"]);
    }
    if (root["sweep"]) {
        c.sweep = parse_sweep(root["sweep"]);
    }
    if (root["sim"]) {
        c.sim = parse_sim(root["sim"]);
    }
    if (root["amc"]) {
        c.amc = parse_amc(root["amc"]);
    }
    if (root["users"]) {
        c.users = parse_users(root["users"]);
    }
    if (root["pool"]) {
        c.pool = parse_pool(root["pool"]);
    }
    if (root["power_total_w"]) {
        c.power_total_w = positive(root, "power_total_w", "config");
    }
    if (root["eval_frame"]) {
        c.eval_frame = scalar<long>(root["eval_frame"], "eval_frame");
        if (*c.eval_frame < 0) {
            fail(root["eval_frame"], "eval_frame must be >= 0");
        }
    }
    if (root["water_filling"]) {
        c.water_filling = scalar<bool>(root["water_filling"], "water_filling");
    }
    if (root["output"]) {
        c.output = scalar<std::string>(root["output"], "output");
    }

    const Scenario s = c.scenario;
    const bool hop_channels =
        std::any_of(c.path.begin(), c.path.end(), [](const HopSpec& h) { return !h.channels.empty(); });
    switch (s) {
    case Scenario::SingleHop:
        require_present(c.link.has_value(), root, "link", s);
        require_present(c.r_min_bps.has_value(), root, "r_min_bps", s);
        require_present(!c.channels.empty(), root, "channels", s);
        break;
    case Scenario::MultiHop:
        require_present(c.r_min_bps.has_value(), root, "r_min_bps", s);
        require_present(!c.path.empty(), root, "path", s);
        require_present(c.link.has_value() || !hop_channels, root, "link", s);
        break;
    case Scenario::Sweep:
        require_present(c.link.has_value(), root, "link", s);
        require_present(c.sweep.has_value(), root, "sweep", s);
        require_present(!c.channels.empty() || !c.path.empty(), root, "channels", s);
        require_present(c.r_min_bps.has_value() || c.sweep->variable == SweepVariable::RMin, root,
                        "r_min_bps", s);
        if (std::any_of(c.path.begin(), c.path.end(), [](const HopSpec& h) { return h.outage.has_value(); })) {
            fail(root["path"], "sweep paths need channels on every hop");
        }
        break;
    case Scenario::Simulate:
        require_present(c.link.has_value(), root, "link", s);
        require_present(c.r_min_bps.has_value(), root, "r_min_bps", s);
        require_present(!c.channels.empty() || !c.path.empty(), root, "channels", s);
        if (std::any_of(c.path.begin(), c.path.end(), [](const HopSpec& h) { return h.outage.has_value(); })) {
            fail(root["path"], "simulated paths need channels on every hop");
        }
        break;
    case Scenario::Allocate:
        require_present(c.link.has_value(), root, "link", s);
        require_present(!c.users.empty(), root, "users", s);
        require_present(!c.pool.empty(), root, "pool", s);
        require_present(c.power_total_w.has_value(), root, "power_total_w", s);
        if (c.pool.size() != c.users.size()) {
            fail(root["pool"], "pool needs one row per user");
        }
        if (c.pool.front().size() < c.users.size()) {
            fail(root["pool"], "pool needs at least as many subcarriers as users");
        }
        break;
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("line 1, column 1: cannot open config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void emit_channels(YAML::Emitter& out, const std::vector<ChannelSpec>& channels) {
    out << YAML::BeginSeq;
    for (const auto& ch : channels) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "m" << YAML::Value << plain(ch.m) << YAML::Key << "omega"
            << YAML::Value << plain(ch.omega) << YAML::Key << "power_w" << YAML::Value << plain(ch.power_w) << YAML::EndMap;
    }
    out << YAML::EndSeq;
}

} // namespace

std::string serialize_config(const RunConfig& c) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "scenario" << YAML::Value << to_string(c.scenario);
    if (c.link) {
        out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "bandwidth_hz" << YAML::Value << plain(c.link->b_total);
        out << YAML::Key << "subcarriers" << YAML::Value << plain(c.link->n_subcarriers);
        out << YAML::Key << "noise_psd_w_per_hz" << YAML::Value << plain(c.link->n0);
        out << YAML::EndMap;
    }
    if (c.r_min_bps) {
        out << YAML::Key << "r_min_bps" << YAML::Value << plain(*c.r_min_bps);
    }
    if (!c.channels.empty()) {
        out << YAML::Key << "channels" << YAML::Value;
        emit_channels(out, c.channels);
    }
    if (!c.path.empty()) {
        out << YAML::Key << "path" << YAML::Value << YAML::BeginSeq;
        for (const auto& hop : c.path) {
            out << YAML::BeginMap;
            if (hop.outage) {
                out << YAML::Key << "outage" << YAML::Value << plain(*hop.outage);
            } else {
                out << YAML::Key << "channels" << YAML::Value;
                emit_channels(out, hop.channels);
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    if (c.sweep) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "variable" << YAML::Value << to_string(c.sweep->variable);
        out << YAML::Key << "start" << YAML::Value << plain(c.sweep->start);
        out << YAML::Key << "stop" << YAML::Value << plain(c.sweep->stop);
        out << YAML::Key << "points" << YAML::Value << plain(c.sweep->points);
        out << YAML::Key << "scale" << YAML::Value << (c.sweep->log_scale ? "log" : "linear");
        out << YAML::Key << "simulate" << YAML::Value << c.sweep->simulate;
        out << YAML::EndMap;
    }
    out << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << plain(c.sim.seed);
    out << YAML::Key << "frames" << YAML::Value << plain(c.sim.frames);
    out << YAML::Key << "threads" << YAML::Value << plain(c.sim.threads);
    out << YAML::EndMap;
    if (c.amc) {
        out << YAML::Key << "amc" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "thresholds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : c.amc->thresholds) {
            out << plain(v);
        }
        out << YAML::EndSeq;
        out << YAML::Key << "bits" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double v : c.amc->bits) {
            out << plain(v);
        }
        out << YAML::EndSeq;
        out << YAML::Key << "thresholds_in_db" << YAML::Value << c.amc->thresholds_in_db;
        out << YAML::EndMap;
    }
    if (!c.users.empty()) {
        out << YAML::Key << "users" << YAML::Value << YAML::BeginSeq;
        for (const auto& u : c.users) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "r_min_bps" << YAML::Value << plain(u.r_min)
                << YAML::Key << "rho" << YAML::Value << plain(u.rho) << YAML::Key << "nu" << YAML::Value << plain(u.nu)
                << YAML::Key << "window" << YAML::Value << plain(u.T) << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    if (!c.pool.empty()) {
        out << YAML::Key << "pool" << YAML::Value << YAML::BeginSeq;
        for (const auto& row : c.pool) {
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& g : row) {
                out << YAML::BeginMap << YAML::Key << "m" << YAML::Value << plain(g.m) << YAML::Key << "omega"
                    << YAML::Value << plain(g.omega) << YAML::EndMap;
            }
            out << YAML::EndSeq;
        }
        out << YAML::EndSeq;
    }
    if (c.power_total_w) {
        out << YAML::Key << "power_total_w" << YAML::Value << plain(*c.power_total_w);
    }
    if (c.eval_frame) {
        out << YAML::Key << "eval_frame" << YAML::Value << plain(*c.eval_frame);
    }
    out << YAML::Key << "water_filling" << YAML::Value << c.water_filling;
    if (!c.output.empty()) {
        out << YAML::Key << "output" << YAML::Value << c.output;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

channel::AllocationSet allocation_from(const std::vector<ChannelSpec>& channels,
                                       const channel::LinkConfig& link) {
    std::vector<channel::SubcarrierChannel> sc;
    sc.reserve(channels.size());
    for (const auto& ch : channels) {
        sc.push_back({ch.m, ch.omega, ch.power_w, link.n0, link.b_sc()});
    }
    return channel::AllocationSet(std::move(sc));
}

mcsim::SimConfig sim_config_from(const RunConfig& config) {
    mcsim::SimConfig s;
    s.seed = config.sim.seed;
    s.n_frames = config.sim.frames;
    s.threads = config.sim.threads;
    return s;
}

} // namespace nakarate::cli
