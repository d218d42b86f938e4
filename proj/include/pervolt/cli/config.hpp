#pragma once

// Scenario configuration: one JSON document per scenario (or a
// {"scenarios": [...]} list), validated before anything runs.

#include "pervolt/arch.hpp"
#include "pervolt/series.hpp"
#include "pervolt/weights.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pervolt::cli {

/// Malformed or inconsistent configuration. The message names the field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class ScenarioKind { resolvent, solve, verify, arch, weights };
std::string_view to_string(ScenarioKind k) noexcept;
ScenarioKind parse_kind(const std::string& s, const std::string& field);

/// Sequence given by the config: parametric, inline table, CSV file, or the
/// ARCH kernel U(n) = lambda1 b(n+1).
struct SequenceSpec {
    std::string kind = "zero";
    SeriesPtr series;
    /// lim S(N n + i)/phi(N n), when stated in the config.
    std::optional<std::vector<Matrix>> limits;
};

/// Random kernels U(n) = phi(n) P(n mod N), phi = poly(1, alpha), P > 0,
/// scaled so the c3 value is uniform in [c3_lo, c3_hi].
struct RandomSuiteSpec {
    std::size_t count = 50;
    std::vector<std::size_t> periods = {1, 2, 3};
    double alpha_lo = 1.5;
    double alpha_hi = 3.0;
    double c3_lo = 0.2;
    double c3_hi = 0.9;
    std::size_t horizon = 5000;
    std::size_t sumZ_T = 2000;
    std::size_t lifted_terms = 200;
    /// Also run the converse on kernels that pass c5.
    bool converse = true;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::resolvent;
    std::string name;
    std::size_t d = 1;
    std::size_t N = 1;
    double r = 1.0;
    std::optional<WeightFn> weight;
    SequenceSpec kernel;
    SequenceSpec forcing;
    Matrix x0;
    std::size_t n_max = 4000;
    std::size_t u_max = 512;
    /// 0 means half of the available strided indices.
    std::size_t window = 0;
    std::size_t horizon = 2048;
    std::size_t sumZ_T = 0;
    std::size_t lifted_terms = 200;
    double tail_tol = 1e-10;
    std::optional<ArchModel> arch;
    std::vector<std::pair<std::string, WeightFn>> weights;
    std::optional<RandomSuiteSpec> random_suite;
};

/// Parses and validates. A scenario without "kind" takes `expected`; one
/// whose kind differs from it is rejected. Throws ConfigError.
std::vector<ScenarioConfig> load_config(const std::filesystem::path& path,
                                        std::optional<ScenarioKind> expected = std::nullopt);
std::vector<ScenarioConfig> parse_config(const std::string& text, const std::filesystem::path& base_dir,
                                         std::optional<ScenarioKind> expected = std::nullopt);

} // namespace pervolt::cli
