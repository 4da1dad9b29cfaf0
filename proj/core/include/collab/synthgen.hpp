#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collab/rng.hpp"
#include "collab/types.hpp"

namespace collab {

// Yearly event count: round(scale * T^alpha) with T = year - start + 1;
// after the breakpoint the curve continues with exponent alpha2, joined
// continuously at the breakpoint year.
struct GrowthSpec {
    double alpha = 1.0;
    double scale = 1.0;
    std::optional<Year> breakpoint;
    double alpha2 = 0.0;
};

struct TeamSizeSpec {
    enum class Kind { fixed, categorical, partner_powerlaw };
    Kind kind = Kind::fixed;
    std::uint32_t fixed_size = 3;
    std::vector<std::pair<std::uint32_t, double>> categories;  // size -> weight
    // partner_powerlaw: team size n in [2, max_size] drawn with
    // q(n) ~ (n-1)^-gamma / n, so that under a participation cap of 1 the
    // per-member new-partner count k = n-1 is distributed exactly ~ k^-gamma.
    double gamma = 2.0;
    std::uint32_t max_size = 100;
};

// Career length in years: ceil of a continuous Weibull draw, minimum 1.
struct CareerSpec {
    double weibull_k = 1.0;
    double weibull_lambda = 5.0;
};

// entry_multiplier scales the number of new contributors available during
// [start, end] (event counts and team sizes are untouched by it); after the
// epoch the multiplier returns to 1 along a linear ramp of
// recovery_ramp_years. size_multiplier scales drawn team sizes over the
// epoch via unbiased stochastic rounding.
struct ShockSpec {
    std::string name;
    Year start = 0;
    Year end = 0;
    double entry_multiplier = 1.0;
    double size_multiplier = 1.0;
    Year recovery_ramp_years = 0;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    Year start_year = 1900;
    Year end_year = 1950;
    GrowthSpec growth;
    TeamSizeSpec team_size;
    CareerSpec career;
    double entrant_share = 0.5;        // fraction of yearly slots given to new ids
    double entrant_share_decay = 0.0;  // share(t) = entrant_share * T^-decay
    std::uint32_t participation_cap = 0;  // max events per contributor per year; 0 = unlimited
    std::vector<ShockSpec> shocks;
};

// Throws ConfigError listing every violated field.
void validate_scenario(const ScenarioConfig& config);

struct YearTruth {
    Year year{};
    std::uint64_t events{};
    std::uint64_t slots{};
    std::uint64_t entrants_target{};
    std::uint64_t entrants_placed{};  // < target only when slots ran out
    std::uint64_t leavers_due{};
    std::uint64_t leavers_placed{};
};

struct GroundTruth {
    ScenarioConfig config;  // echoed verbatim
    std::vector<YearTruth> yearly;
    std::uint64_t total_events{};
    std::uint64_t total_contributors{};
};

struct GeneratedScenario {
    std::vector<ProjectEvent> events;
    GroundTruth truth;
};

// Deterministic given config: per-year substreams of (seed, year index)
// keep every year's draws independent of all other years. Contributors due
// to leave appear once in their final career year (slots permitting), so
// observed lifespans equal planted careers. Slot priority when short:
// entrants, then leavers, then surviving pool members.
GeneratedScenario generate(const ScenarioConfig& config);

// Continuous inverse-CDF draw lambda * (-ln U)^(1/k), U in (0, 1].
// Career materialization in generate() applies ceil(., minimum 1).
double sample_weibull(double k, double lambda, SplitMix64& rng);
double weibull_from_uniform(double k, double lambda, double u);

// Closed-form quantile lambda * (-ln(1 - p))^(1/k).
double weibull_quantile(double k, double lambda, double p);

}  // namespace collab
