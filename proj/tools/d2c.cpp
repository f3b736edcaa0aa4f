// d2c: interpreter, simulator, and verification toolkit for Declarative
// Distributed Systems, with compilers to and from communicating finite state
// machines.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "d2c/cfsm.hpp"
#include "d2c/reductions.hpp"
#include "d2c/scenario.hpp"
#include "d2c/sim.hpp"
#include "d2c/termcheck.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotReachable = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;

bool use_color() {
    const char* env = std::getenv("D2C_COLOR");
    if (env && std::string(env) == "0") return false;
    return isatty(1);
}

std::string paint(const std::string& s, const char* code) {
    if (!use_color()) return s;
    return std::string("\033[") + code + "m" + s + "\033[0m";
}

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    return base;
}

int verdict_exit(d2c::VerdictKind k) {
    switch (k) {
        case d2c::VerdictKind::terminates: return kExitOk;
        case d2c::VerdictKind::not_reachable: return kExitNotReachable;
        case d2c::VerdictKind::unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw d2c::ScenarioError({d2c::Diagnostic{d2c::Diagnostic::Kind::scenario, 0, 0,
                                                        "cannot write '" + path + "'"}});
    out << content;
}

struct VerifyOpts {
    std::string scenario;
    long max_configs = 1000000;
    int max_channel = 0;
    int max_depth = 0;
    int threads = 1;
    std::string witness_path;
    std::string format = "text";
};

int cmd_verify(const VerifyOpts& o) {
    d2c::Scenario sc = d2c::load_scenario_file(o.scenario);
    d2c::SearchBudget budget;
    budget.max_configs = o.max_configs;
    if (o.max_channel > 0) budget.max_channel = o.max_channel;
    if (o.max_depth > 0) budget.max_depth = o.max_depth;
    d2c::Verdict v = d2c::check_sometimes_termination(sc, budget, o.threads);
    if (o.format == "records") {
        std::cout << d2c::verdict_to_json(v) << "\n";
    } else {
        std::cout << "verdict: " << paint(d2c::to_string(v.kind), v.kind == d2c::VerdictKind::terminates ? "32" : "31")
                  << "\nconfigs explored: " << v.configs_explored
                  << "\nfrontier peak: " << v.frontier_peak << "\n";
    }
    if (v.witness) {
        std::string path = o.witness_path.empty() ? stem_of(o.scenario) + ".witness" : o.witness_path;
        write_file(path, d2c::write_trace_text(*v.witness));
        if (o.format != "records")
            std::cout << "witness (" << v.witness->steps.size() << " steps) written to " << path
                      << "\n";
    }
    return verdict_exit(v.kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"D2C: declarative distributed systems toolkit"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "statically validate a scenario");
    std::string check_path, check_format = "text";
    check->add_option("scenario", check_path, "scenario file")->required();
    check->add_option("--format", check_format, "text|records");

    // run
    auto* runc = app.add_subcommand("run", "random simulation run");
    std::string run_path, run_trace, run_format = "text";
    uint64_t run_seed = 0;
    int run_steps = 100;
    runc->add_option("scenario", run_path, "scenario file")->required();
    runc->add_option("--seed", run_seed, "random seed");
    runc->add_option("--steps", run_steps, "maximum transitions");
    runc->add_option("--trace", run_trace, "write the trace to this file");
    runc->add_option("--format", run_format, "text|records");

    // verify
    auto* verify = app.add_subcommand("verify", "check sometimes-termination");
    VerifyOpts vo;
    verify->add_option("scenario", vo.scenario, "scenario file")->required();
    verify->add_option("--max-configs", vo.max_configs, "configuration budget");
    verify->add_option("--max-channel", vo.max_channel, "per-channel message cap");
    verify->add_option("--max-depth", vo.max_depth, "depth cap");
    verify->add_option("--threads", vo.threads, "worker threads");
    verify->add_option("--witness", vo.witness_path, "witness output path");
    verify->add_option("--format", vo.format, "text|records");

    // compile-to-cfsm
    auto* c2c = app.add_subcommand("compile-to-cfsm", "compile a PLB scenario to a CFSM");
    std::string c2c_path, c2c_out;
    int c2c_bound = 0;
    c2c->add_option("scenario", c2c_path, "scenario file")->required();
    c2c->add_option("--bound", c2c_bound, "non-rigid constant bound b")->required();
    c2c->add_option("-o,--output", c2c_out, "output file (stdout when absent)");

    // compile-to-dds
    auto* c2d = app.add_subcommand("compile-to-dds", "compile a single-node CFSM to a DDS gadget");
    std::string c2d_path, c2d_out;
    c2d->add_option("cfsm", c2d_path, "cfsm file")->required();
    c2d->add_option("-o,--output", c2d_out, "output file (stdout when absent)");

    // cfsm-reach
    auto* reach = app.add_subcommand("cfsm-reach", "CFSM reachability of the target set");
    std::string reach_path, reach_channel = "queue", reach_format = "text";
    long reach_max = 1000000;
    int reach_cap = 0, reach_depth = 0;
    reach->add_option("cfsm", reach_path, "cfsm file")->required();
    reach->add_option("--channel", reach_channel, "queue|multiset");
    reach->add_option("--max-configs", reach_max, "configuration budget");
    reach->add_option("--max-channel", reach_cap, "per-channel message cap");
    reach->add_option("--max-depth", reach_depth, "depth cap");
    reach->add_option("--format", reach_format, "text|records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) {
            try {
                d2c::Scenario sc = d2c::load_scenario_file(check_path);
                auto plb = d2c::check_plb(sc.program);
                if (check_format == "records") {
                    nlohmann::json j;
                    j["ok"] = true;
                    j["nodes"] = sc.network.nodes.size();
                    j["rules"] = sc.program.rules.size();
                    j["strata"] = sc.strata.num_levels;
                    j["propositionalTransport"] = !plb.has_value();
                    std::cout << j.dump() << "\n";
                } else {
                    std::cout << check_path << ": ok (" << sc.network.nodes.size() << " node(s), "
                              << sc.program.rules.size() << " rule(s), " << sc.strata.num_levels
                              << " stratum/a, transport "
                              << (plb ? "not propositional" : "propositional") << ")\n";
                }
                return kExitOk;
            } catch (const d2c::ScenarioError& e) {
                if (check_format == "records") {
                    for (const auto& d : e.diagnostics) {
                        nlohmann::json j;
                        j["ok"] = false;
                        j["error"] = d.format();
                        std::cout << j.dump() << "\n";
                    }
                } else {
                    for (const auto& d : e.diagnostics)
                        std::cout << check_path << ":" << d.format() << "\n";
                }
                return kExitInput;
            }
        }
        if (runc->parsed()) {
            d2c::Scenario sc = d2c::load_scenario_file(run_path);
            d2c::Trace tr = d2c::run(sc, run_seed, run_steps);
            d2c::GlobalConfig end = d2c::replay(sc, tr);
            if (run_format == "records") {
                std::cout << d2c::trace_to_json(tr) << "\n";
            } else {
                std::cout << "steps: " << tr.steps.size() << "\n"
                          << "terminated: " << (d2c::is_terminated(end) ? "yes" : "no") << "\n";
            }
            if (!run_trace.empty()) write_file(run_trace, d2c::write_trace_text(tr));
            return kExitOk;
        }
        if (verify->parsed()) return cmd_verify(vo);
        if (c2c->parsed()) {
            d2c::Scenario sc = d2c::load_scenario_file(c2c_path);
            d2c::CfsmFile built = d2c::dds_to_cfsm(sc, c2c_bound);
            std::string text = d2c::write_cfsm_text(built.machine, built.targets);
            if (c2c_out.empty())
                std::cout << text;
            else
                write_file(c2c_out, text);
            return kExitOk;
        }
        if (c2d->parsed()) {
            d2c::CfsmFile f = d2c::load_cfsm_file(c2d_path);
            d2c::Scenario sc = d2c::cfsm_to_dds(f.machine, f.targets);
            std::string text = d2c::write_scenario_text(sc);
            if (c2d_out.empty())
                std::cout << text;
            else
                write_file(c2d_out, text);
            return kExitOk;
        }
        if (reach->parsed()) {
            d2c::CfsmFile f = d2c::load_cfsm_file(reach_path);
            d2c::ChannelKind kind;
            if (reach_channel == "queue")
                kind = d2c::ChannelKind::queue;
            else if (reach_channel == "multiset")
                kind = d2c::ChannelKind::multiset;
            else {
                std::cerr << "unknown channel kind '" << reach_channel << "'\n";
                return kExitUsage;
            }
            d2c::SearchBudget budget;
            budget.max_configs = reach_max;
            if (reach_cap > 0) budget.max_channel = reach_cap;
            if (reach_depth > 0) budget.max_depth = reach_depth;
            d2c::CfsmVerdict v = d2c::cfsm_reach(f.machine, f.targets, kind, budget);
            if (reach_format == "records")
                std::cout << d2c::cfsm_verdict_to_json(v) << "\n";
            else
                std::cout << d2c::cfsm_verdict_report_text(v);
            return verdict_exit(v.kind);
        }
    } catch (const d2c::ScenarioError& e) {
        for (const auto& d : e.diagnostics) std::cerr << d.format() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
