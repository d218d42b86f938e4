#pragma once

#include "pervolt/cli/config.hpp"
#include "pervolt/profile.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace pervolt::cli {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 20240601;
};

/// Each writes into out_dir/<scenario name>/ and returns a one-line summary.
std::string run_resolvent(const ScenarioConfig& cfg, const RunOptions& opt);
std::string run_solve(const ScenarioConfig& cfg, const RunOptions& opt);
std::string run_verify(const ScenarioConfig& cfg, const RunOptions& opt);
std::string run_arch(const ScenarioConfig& cfg, const RunOptions& opt);
std::string run_weights(const ScenarioConfig& cfg, const RunOptions& opt);
std::string run_scenario(const ScenarioConfig& cfg, const RunOptions& opt);

/// Kernel limits: from the config, derived for modulated kernels, zero for
/// finite tables, otherwise estimated empirically (modeled).
AsymptoticProfile kernel_limits(const ScenarioConfig& cfg, const WeightFn& phi);

struct RandomKernel {
    std::size_t N = 1;
    double alpha = 2.0;
    WeightFn phi = WeightFn::poly(1.0, 2.0, 1.0);
    std::shared_ptr<const ModulatedSeries> U;
    AsymptoticProfile A;
    double c3 = 0.0;
};

RandomKernel random_kernel(std::mt19937_64& rng, std::size_t N, double alpha_lo, double alpha_hi, double c3_lo,
                           double c3_hi);

/// One row of the randomized verification suite.
struct SuiteRecord {
    RandomKernel kernel;
    double rho_rel_err = 0.0;
    bool c3_holds = false;
    bool spec_bound_holds = false;
    bool sumZ_holds = false;
    bool c5_holds = false;
    /// Negative when the converse was not run.
    double converse_rel_err = -1.0;
};

SuiteRecord evaluate_random_kernel(const RandomKernel& k, std::size_t horizon, std::size_t sumZ_T,
                                   std::size_t lifted_terms, bool converse);

} // namespace pervolt::cli
