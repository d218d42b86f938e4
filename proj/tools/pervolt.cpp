#include "pervolt/cli/config.hpp"
#include "pervolt/cli/scenarios.hpp"
#include "pervolt/errors.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace {

using namespace pervolt;
using namespace pervolt::cli;

enum Exit { ok = 0, internal = 1, config = 2, precondition = 3 };

struct Outcome {
    int code = ok;
    std::string message;
};

Outcome run_one(const ScenarioConfig& cfg, const RunOptions& opt) {
    try {
        return {ok, run_scenario(cfg, opt)};
    } catch (const ConfigError& e) {
        return {config, e.what()};
    } catch (const ConditionNotMet& e) {
        return {precondition, e.what()};
    } catch (const std::invalid_argument& e) {
        return {precondition, e.what()};
    } catch (const std::length_error& e) {
        return {precondition, e.what()};
    } catch (const std::domain_error& e) {
        return {precondition, e.what()};
    } catch (const std::exception& e) {
        return {internal, std::string("internal error: ") + e.what()};
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic Volterra summation equations: resolvents, limits, conditions, ARCH memory"};
    app.require_subcommand(1);

    std::string config_path;
    RunOptions opt;
    std::string out_dir = ".";
    unsigned jobs = 1;

    for (const char* name : {"resolvent", "solve", "verify", "arch", "weights"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "seed for randomized verification suites");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config;
    }
    opt.out_dir = out_dir;
    const ScenarioKind kind = parse_kind(app.get_subcommands().front()->get_name(), "subcommand");

    std::vector<ScenarioConfig> scenarios;
    try {
        scenarios = load_config(config_path, kind);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal;
    }

    std::vector<Outcome> outcomes(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            outcomes[i] = run_one(scenarios[i], opt);
        }
    };
    const unsigned nthreads = std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    int code = ok;
    for (const Outcome& o : outcomes) {
        if (o.code == ok) {
            std::cout << o.message << "\n";
        } else {
            std::cerr << o.message << "\n";
            // internal errors dominate, then preconditions, then config
            if (code == ok || o.code == internal || (o.code == precondition && code == config)) {
                code = o.code;
            }
        }
    }
    return code;
}
