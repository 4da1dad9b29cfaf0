#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "collab/graph.hpp"
#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

namespace collab {

// Hurwitz zeta sum_{n>=0} (n+a)^-s for s > 1, a > 0, and its s-derivative.
// Euler-Maclaurin with a 25-term head; accurate to ~1e-12 relative.
double hurwitz_zeta(double s, double a);
double hurwitz_zeta_ds(double s, double a);

struct GofStats {
    double ks_stat{};
    double chi2{};
    int dof{};
};

struct PowerLawFit {
    double gamma{};
    std::uint32_t xmin{};
    std::uint64_t n_samples{};
    GofStats gof;
};

using CountHistogram = std::map<std::uint32_t, std::uint64_t>;

// Per-node counts of distinct new partners gained in `year` (nodes with at
// least one edge created that year); empty when the year saw no edges.
std::vector<std::uint32_t> edge_addition_samples(const TemporalGraph& graph, Year year);

// Discrete MLE for P(k) ~ k^-gamma, k >= xmin: solves the zeta likelihood
// equation; KS against the fitted CDF; chi2 on log2-binned counts merged to
// expected >= 5. Samples below xmin are ignored. Throws
// InsufficientDataError below min_samples and DegenerateDistributionError
// when every sample equals xmin.
PowerLawFit fit_power_law(const std::vector<std::uint32_t>& samples, std::uint32_t xmin = 1,
                          std::uint64_t min_samples = 50);
PowerLawFit fit_power_law(const CountHistogram& histogram, std::uint32_t xmin = 1,
                          std::uint64_t min_samples = 50);

struct GrowthFit {
    double alpha1{};
    double alpha2{};
    Year breakpoint_year{};  // first year governed by alpha2
    double residual{};       // total SSE in log space
    std::vector<Year> dropped_years;  // non-positive values excluded from the fit
};

// Two-segment least squares of ln(value) on ln(year - t0 + 1). Exhaustive
// breakpoint scan requiring >= 8 points per side; ties resolve to the
// earliest breakpoint. Needs >= 20 positive-valued years.
GrowthFit fit_growth(const YearlySeries& series, Year t0);

struct WeibullFit {
    double k{};
    double lambda{};
    std::uint64_t n_samples{};
    std::uint64_t n_censored{};
    double chi2{};
    int dof{};
};

// Weighted, censoring-aware sample. Censored entries are lower bounds
// (still-active durations) contributing survival terms only. weights/
// censored may be empty (all ones / none).
struct WeibullData {
    std::vector<double> values;
    std::vector<std::uint64_t> weights;
    std::vector<std::uint8_t> censored;
};

struct WeibullOptions {
    int max_iterations = 200;
    std::uint64_t min_samples = 50;
};

// Profile log-likelihood in k (lambda eliminated by its closed-form MLE)
// and its analytic k-derivative; exposed for direct numerical validation.
double weibull_profile_loglik(double k, const WeibullData& data);
double weibull_profile_loglik_deriv(double k, const WeibullData& data);

// MLE via bracketed Newton on the profile derivative; lambda closed-form.
// chi2 uses integer-width bins (merged to expected >= 5) when all values
// are integral, ~12 equiprobable bins otherwise. Throws on non-positive
// durations, too few samples, or non-convergence within max_iterations.
WeibullFit fit_weibull(const std::vector<double>& durations, const WeibullOptions& opts = {});
WeibullFit fit_weibull(const WeibullData& data, const WeibullOptions& opts = {});

struct FitSkip {
    Year year{};
    std::string reason;
    std::uint64_t n_samples{};
};

struct PowerLawEvolution {
    std::map<Year, PowerLawFit> fits;
    std::vector<FitSkip> skipped;
};

// Per-year power-law fits of the edge-addition distributions; years that
// cannot be fit are recorded, never fatal. Per-year fits are independent
// and run across `threads` with thread-count-independent results.
PowerLawEvolution power_law_evolution(const TemporalGraph& graph, std::uint32_t xmin = 1,
                                      std::uint64_t min_samples = 50, unsigned threads = 1);
PowerLawEvolution power_law_evolution(const YearlyAggregates& agg, std::uint32_t xmin = 1,
                                      std::uint64_t min_samples = 50, unsigned threads = 1);

struct WeibullEvolution {
    std::map<Year, WeibullFit> fits;
    std::vector<FitSkip> skipped;
    std::vector<Year> censoring_flagged;  // cohorts within 10 years of dataset end
};

// Per-start-cohort Weibull fits of pair durations. With censoring enabled,
// timelines still active in the final dataset year enter as survival terms.
WeibullEvolution weibull_evolution(const TemporalGraph& graph, bool censoring = true,
                                   const WeibullOptions& opts = {}, unsigned threads = 1);
WeibullEvolution weibull_evolution(const YearlyAggregates& agg, bool censoring = true,
                                   const WeibullOptions& opts = {}, unsigned threads = 1);

}  // namespace collab
