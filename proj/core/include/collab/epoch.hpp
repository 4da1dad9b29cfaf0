#pragma once

#include <string>
#include <utility>
#include <vector>

#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

namespace collab {

enum class BaselineKind { log_linear, mean };

// Pre-epoch trend extrapolated over the epoch and beyond. log_linear fits
// ln(value) on year by least squares over the window's positive values;
// mean uses the plain window average.
struct BaselineModel {
    BaselineKind kind = BaselineKind::log_linear;
    Year window = 10;
    double slope = 0.0;
    double intercept = 0.0;
    Year fit_start = 0;  // populated window actually used
    Year fit_end = 0;

    double predict(Year year) const;
};

// Fits on the populated years in [epoch.start - window, epoch.start).
// Fewer than 5 usable years -> InsufficientDataError naming the first
// available year.
BaselineModel fit_baseline(const YearlySeries& series, const EpochDefinition& epoch,
                           Year window = 10, BaselineKind kind = BaselineKind::log_linear);

// 100 * (1 - min over epoch years of observed/predicted): trough depth.
// Negative when the series stays above baseline.
double disruption_magnitude(const YearlySeries& series, const EpochDefinition& epoch,
                            const BaselineModel& baseline);

// Mean-based variant: 100 * (1 - mean over epoch of observed/predicted).
double disruption_magnitude_mean(const YearlySeries& series, const EpochDefinition& epoch,
                                 const BaselineModel& baseline);

struct RecoveryTime {
    bool recovered = false;
    Year years = 0;  // meaningful only when recovered
};

// Smallest r >= 0 with observed(end + r) >= (1 - tolerance) * predicted.
// Scans populated years through the end of the series; never throws —
// "not recovered" is a value.
RecoveryTime recovery_time(const YearlySeries& series, const EpochDefinition& epoch,
                           const BaselineModel& baseline, double tolerance_pct = 5.0);

// 100 * (mean over epoch years of observed/predicted - 1).
double excess_growth(const YearlySeries& series, const EpochDefinition& epoch,
                     const BaselineModel& baseline);

struct EpochReport {
    EpochDefinition epoch;
    std::string series_name;
    std::string status;  // "ok", "no data", or the failure message
    double decline_pct = 0.0;       // trough (canonical)
    double decline_mean_pct = 0.0;  // mean variant
    RecoveryTime recovery;
    double excess_growth_pct = 0.0;
    BaselineModel baseline;
};

struct EpochAnalysisConfig {
    Year baseline_window = 10;
    BaselineKind baseline_kind = BaselineKind::log_linear;
    double tolerance_pct = 5.0;
};

// Full series x epoch cross product; per-cell failures become statuses.
std::vector<EpochReport> epoch_report_matrix(
    const std::vector<std::pair<std::string, YearlySeries>>& series_set,
    const std::vector<EpochDefinition>& epochs, const EpochAnalysisConfig& config = {});

// The five built-in historical windows (inclusive years; adjacent epochs
// share boundary years).
std::vector<EpochDefinition> default_epochs();

}  // namespace collab
