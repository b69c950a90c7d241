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


#include "commands.hpp"

#include "nakarate/error.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>
#include <utility>
#include <yaml-cpp/yaml.h>

namespace nakarate::cli {

namespace {

std::vector<ChannelSpec> hop_channels(const RunConfig& c, std::size_t hop) {
    return c.path.empty() ? c.channels : c.path[hop].channels;
}

std::size_t hop_count(const RunConfig& c) { return c.path.empty() ? 1 : c.path.size(); }

outage::HopPath build_path(const RunConfig& c, const channel::LinkConfig& link) {
    std::vector<channel::AllocationSet> hops;
    for (std::size_t h = 0; h < hop_count(c); ++h) {
        hops.push_back(allocation_from(hop_channels(c, h), link));
    }
    return outage::HopPath(std::move(hops));
}

// Config with the sweep variable set to x.
RunConfig at_point(const RunConfig& c, double x) {
    RunConfig p = c;
    auto set_all = [&](auto&& fn) {
        for (auto& ch : p.channels) {
            fn(ch);
        }
        for (auto& hop : p.path) {
            for (auto& ch : hop.channels) {
                fn(ch);
            }
        }
    };
    switch (c.sweep->variable) {
    case SweepVariable::RMin:
        p.r_min_bps = x;
        break;
    case SweepVariable::Bandwidth:
        p.link->b_total = x;
        break;
    case SweepVariable::Power:
        set_all([x](ChannelSpec& ch) { ch.power_w = x; });
        break;
    case SweepVariable::M:
        set_all([x](ChannelSpec& ch) { ch.m = x; });
        break;
    }
    return p;
}

outage::OutageResult closed_form(const RunConfig& c) {
    if (c.path.empty()) {
        return outage::single_hop_outage(allocation_from(c.channels, *c.link), *c.r_min_bps);
    }
    std::vector<double> per_hop;
    std::vector<double> errors;
    for (const auto& hop : c.path) {
        if (hop.outage) {
            per_hop.push_back(*hop.outage);
            errors.push_back(0.0);
        } else {
            const auto r = outage::single_hop_outage(allocation_from(hop.channels, *c.link), *c.r_min_bps);
            per_hop.push_back(r.probability);
            errors.push_back(r.abs_error_estimate);
        }
    }
    return outage::combine_hops(std::move(per_hop), std::move(errors));
}

mcsim::SimReport simulate(const RunConfig& c, std::uint64_t seed) {
    mcsim::SimConfig cfg = sim_config_from(c);
    cfg.seed = seed;
    return mcsim::simulate_multi_hop(build_path(c, *c.link), *c.r_min_bps, cfg);
}

// Distinct seed per sweep point, fixed by the base seed and the index.
std::uint64_t point_seed(std::uint64_t base, std::size_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void require_scenario(const RunConfig& c, std::initializer_list<Scenario> allowed, const char* command) {
    for (Scenario s : allowed) {
        if (c.scenario == s) {
            return;
        }
    }
    throw ConfigError(std::string("line 1, column 1: command '") + command + "' cannot run scenario '" +
                      to_string(c.scenario) + "'");
}

} // namespace

std::string cmd_outage(const RunConfig& config, std::string& summary) {
    require_scenario(config, {Scenario::SingleHop, Scenario::MultiHop}, "outage");
    const outage::OutageResult r = closed_form(config);
    std::string csv = "scope,probability,abs_error_estimate\n";
    csv += "total," + format_double(r.probability) + "," + format_double(r.abs_error_estimate) + "\n";
    for (std::size_t i = 0; i < r.per_hop.size(); ++i) {
        csv += "hop" + std::to_string(i + 1) + "," + format_double(r.per_hop[i]) + ",\n";
    }
    summary += "outage probability " + format_double(r.probability) + " (+/- " +
               format_double(r.abs_error_estimate) + ")\n";
    return csv;
}

std::string cmd_sweep(const RunConfig& config, std::string& summary) {
    require_scenario(config, {Scenario::Sweep}, "sweep");
    const SweepSpec& s = *config.sweep;
    std::string csv = s.simulate ? "x,closed_form,simulated,sim_stderr\n" : "x,closed_form\n";
    const std::vector<double> grid = s.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const RunConfig point = at_point(config, grid[i]);
        csv += format_double(grid[i]) + "," + format_double(closed_form(point).probability);
        if (s.simulate) {
            const mcsim::SimReport rep = simulate(point, point_seed(config.sim.seed, i));
            csv += "," + format_double(rep.empirical_outage) + "," + format_double(rep.stderr_outage);
        }
        csv += "\n";
    }
    summary += std::to_string(grid.size()) + " sweep points\n";
    return csv;
}

std::string cmd_simulate(const RunConfig& config, std::string& summary) {
    require_scenario(config, {Scenario::Simulate}, "simulate");
    const mcsim::SimReport rep = simulate(config, config.sim.seed);
    std::string csv = "empirical_outage,mean_rate,stderr_outage,n_frames\n";
    csv += format_double(rep.empirical_outage) + "," + format_double(rep.mean_rate) + "," +
           format_double(rep.stderr_outage) + "," + std::to_string(rep.n_frames) + "\n";
    summary += "simulated outage " + format_double(rep.empirical_outage) + " over " +
               std::to_string(rep.n_frames) + " frames\n";
    return csv;
}

std::string cmd_allocate(const RunConfig& config, std::string& summary) {
    require_scenario(config, {Scenario::Allocate}, "allocate");
    allocator::SubcarrierPool pool{config.pool, config.link->n0, config.link->b_sc()};
    allocator::AllocatorOptions opt;
    if (config.amc) {
        opt.table = *config.amc;
    }
    opt.water_filling = config.water_filling;
    opt.t = config.eval_frame;
    const allocator::AllocationPlan plan =
        allocator::sca_out_allocate(config.users, pool, *config.power_total_w, opt);

    auto sequence = [](YAML::Emitter& e, const auto& values) {
        e << YAML::Flow << YAML::BeginSeq;
        for (const auto v : values) {
            e << plain(v);
        }
        e << YAML::EndSeq;
    };
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "feasible" << YAML::Value << plan.feasible;
    out << YAML::Key << "objective_bps" << YAML::Value << plain(plan.objective);
    out << YAML::Key << "assignment" << YAML::Value;
    sequence(out, plan.assignment);
    out << YAML::Key << "powers_w" << YAML::Value;
    sequence(out, plan.powers);
    out << YAML::Key << "slack" << YAML::Value;
    sequence(out, plan.slack);
    out << YAML::EndMap;
    summary += std::string(plan.feasible ? "feasible" : "infeasible") + " plan, objective " +
               format_double(plan.objective) + " bit/s\n";
    return std::string(out.c_str()) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rate outage probability of OFDMA links over Nakagami-m channels", "nakarate"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string command;
    const std::pair<const char*, const char*> commands[] = {
        {"outage", "closed-form outage probability (single or multi hop) as CSV"},
        {"sweep", "outage against r_min, bandwidth, power or m as CSV"},
        {"simulate", "Monte Carlo outage and mean rate as CSV"},
        {"allocate", "subcarrier allocation plan as YAML"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "YAML run configuration")->required();
        sub->add_option("--out", out_path, "output file (default: config 'output', else stdout)");
        sub->add_option("--seed", seed, "override sim.seed");
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "nakarate: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig config = load_config(config_path);
        if (seed) {
            config.sim.seed = *seed;
        }
        std::string summary;
        std::string doc;
        if (command == "outage") {
            doc = cmd_outage(config, summary);
        } else if (command == "sweep") {
            doc = cmd_sweep(config, summary);
        } else if (command == "simulate") {
            doc = cmd_simulate(config, summary);
        } else {
            doc = cmd_allocate(config, summary);
        }
        const std::string target = out_path.empty() ? config.output : out_path;
        if (target.empty()) {
            out << doc;
        } else {
            std::ofstream f(target, std::ios::binary);
            f << doc;
            if (!f) {
                err << "nakarate: cannot write '" << target << "'\n";
                return 2;
            }
            out << summary;
        }
        return 0;
    } catch (...) {
        const Failure f = classify_failure(std::current_exception());
        err << "nakarate: " << f.message << "\n";
        return f.status;
    }
}

Failure classify_failure(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError& x) {
        return {2, std::string("config error: ") + x.what()};
    } catch (const DomainError& x) {
        return {2, std::string("invalid input: ") + x.what()};
    } catch (const EvaluationError& x) {
        return {3, std::string("numerical failure: ") + x.what()};
    } catch (const std::exception& x) {
        return {3, std::string("internal error: ") + x.what()};
    }
}

} // namespace nakarate::cli
