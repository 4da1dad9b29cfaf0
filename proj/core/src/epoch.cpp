#include "collab/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "collab/errors.hpp"

namespace collab {

namespace {

// Populated years in [epoch.start - window, epoch.start) that the given
// baseline kind can use (log-linear needs positive values).
std::vector<std::pair<Year, double>> baseline_window_points(const YearlySeries& series,
                                                            const EpochDefinition& epoch,
                                                            Year window, BaselineKind kind) {
    std::vector<std::pair<Year, double>> points;
    for (Year year = epoch.start - window; year < epoch.start; ++year) {
        if (!series.contains(year)) continue;
        const double value = series.at(year);
        if (kind == BaselineKind::log_linear && value <= 0.0) continue;
        points.emplace_back(year, value);
    }
    return points;
}

double mean_epoch_ratio(const YearlySeries& series, const EpochDefinition& epoch,
                        const BaselineModel& baseline) {
    double sum = 0.0;
    std::size_t n = 0;
    for (Year year = epoch.start; year <= epoch.end; ++year) {
        if (!series.contains(year)) continue;
        sum += series.at(year) / baseline.predict(year);
        ++n;
    }
    if (n == 0) {
        throw InsufficientDataError("epoch '" + epoch.name + "' has no populated years");
    }
    return sum / static_cast<double>(n);
}

}  // namespace

double BaselineModel::predict(Year year) const {
    if (kind == BaselineKind::log_linear) {
        return std::exp(intercept + slope * static_cast<double>(year));
    }
    return intercept;
}

BaselineModel fit_baseline(const YearlySeries& series, const EpochDefinition& epoch, Year window,
                           BaselineKind kind) {
    if (window < 1) throw ConfigError("baseline window must be >= 1");
    if (epoch.end < epoch.start) {
        throw ConfigError("epoch '" + epoch.name + "' ends before it starts");
    }
    const auto points = baseline_window_points(series, epoch, window, kind);
    if (points.size() < 5) {
        std::string msg = "baseline for epoch '" + epoch.name + "' needs >= 5 usable years in [" +
                          std::to_string(epoch.start - window) + ", " +
                          std::to_string(epoch.start) + "), found " +
                          std::to_string(points.size());
        if (series.size() > 0) {
            msg += "; series first available year is " + std::to_string(series.first_year());
        } else {
            msg += "; series is empty";
        }
        throw InsufficientDataError(msg);
    }
    BaselineModel model;
    model.kind = kind;
    model.window = window;
    model.fit_start = points.front().first;
    model.fit_end = points.back().first;
    if (kind == BaselineKind::mean) {
        double sum = 0.0;
        for (const auto& [year, value] : points) sum += value;
        model.intercept = sum / static_cast<double>(points.size());
        if (model.intercept <= 0.0) {
            throw InsufficientDataError("baseline for epoch '" + epoch.name +
                                        "' has zero mean level");
        }
        return model;
    }
    const auto n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [year, value] : points) {
        const double x = static_cast<double>(year);
        const double y = std::log(value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double cxx = sxx - sx * sx / n;
    model.slope = cxx > 0.0 ? (sxy - sx * sy / n) / cxx : 0.0;
    model.intercept = sy / n - model.slope * sx / n;
    return model;
}

double disruption_magnitude(const YearlySeries& series, const EpochDefinition& epoch,
                            const BaselineModel& baseline) {
    double min_ratio = std::numeric_limits<double>::infinity();
    bool seen = false;
    for (Year year = epoch.start; year <= epoch.end; ++year) {
        if (!series.contains(year)) continue;
        min_ratio = std::min(min_ratio, series.at(year) / baseline.predict(year));
        seen = true;
    }
    if (!seen) {
        throw InsufficientDataError("epoch '" + epoch.name + "' has no populated years");
    }
    return 100.0 * (1.0 - min_ratio);
}

double disruption_magnitude_mean(const YearlySeries& series, const EpochDefinition& epoch,
                                 const BaselineModel& baseline) {
    return 100.0 * (1.0 - mean_epoch_ratio(series, epoch, baseline));
}

RecoveryTime recovery_time(const YearlySeries& series, const EpochDefinition& epoch,
                           const BaselineModel& baseline, double tolerance_pct) {
    RecoveryTime result;
    if (series.size() == 0) return result;
    const double threshold_factor = 1.0 - tolerance_pct / 100.0;
    const Year last = series.last_year();
    for (Year year = epoch.end; year <= last; ++year) {
        if (!series.contains(year)) continue;
        if (series.at(year) >= threshold_factor * baseline.predict(year)) {
            result.recovered = true;
            result.years = year - epoch.end;
            return result;
        }
    }
    return result;
}

double excess_growth(const YearlySeries& series, const EpochDefinition& epoch,
                     const BaselineModel& baseline) {
    return 100.0 * (mean_epoch_ratio(series, epoch, baseline) - 1.0);
}

std::vector<EpochReport> epoch_report_matrix(
    const std::vector<std::pair<std::string, YearlySeries>>& series_set,
    const std::vector<EpochDefinition>& epochs, const EpochAnalysisConfig& config) {
    std::vector<EpochReport> reports;
    reports.reserve(series_set.size() * epochs.size());
    for (const auto& [name, series] : series_set) {
        for (const auto& epoch : epochs) {
            EpochReport report;
            report.epoch = epoch;
            report.series_name = name;
            const auto usable =
                baseline_window_points(series, epoch, config.baseline_window, config.baseline_kind);
            if (usable.empty()) {
                report.status = "no data";
                reports.push_back(std::move(report));
                continue;
            }
            try {
                report.baseline =
                    fit_baseline(series, epoch, config.baseline_window, config.baseline_kind);
                report.decline_pct = disruption_magnitude(series, epoch, report.baseline);
                report.decline_mean_pct = disruption_magnitude_mean(series, epoch, report.baseline);
                report.recovery =
                    recovery_time(series, epoch, report.baseline, config.tolerance_pct);
                report.excess_growth_pct = excess_growth(series, epoch, report.baseline);
                report.status = "ok";
            } catch (const Error& e) {
                report.status = e.what();
            }
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

std::vector<EpochDefinition> default_epochs() {
    return {
        {"belle_epoque", 1890, 1914}, {"wwi", 1914, 1918},     {"interwar", 1918, 1939},
        {"wwii", 1939, 1945},         {"postwar", 1945, 1960},
    };
}

}  // namespace collab
