#include "collab/fitdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "collab/errors.hpp"
#include "collab/parallel.hpp"

namespace collab {

namespace {

struct ZetaParts {
    double value;
    double ds;
};

// Euler-Maclaurin: 25-term head, integral + half correction, Bernoulli
// tail through B12. The s-derivative differentiates every term.
ZetaParts hurwitz_zeta_parts(double s, double a) {
    if (!(s > 1.0)) throw RangeError("hurwitz_zeta requires s > 1");
    if (!(a > 0.0)) throw RangeError("hurwitz_zeta requires a > 0");
    constexpr int kHead = 25;
    double value = 0.0;
    double ds = 0.0;
    for (int n = 0; n < kHead; ++n) {
        const double base = a + n;
        const double term = std::pow(base, -s);
        value += term;
        ds -= std::log(base) * term;
    }
    const double q = a + kHead;
    const double lq = std::log(q);
    const double qs = std::pow(q, -s);
    const double integral = q * qs / (s - 1.0);
    value += integral;
    ds += integral * (-lq - 1.0 / (s - 1.0));
    value += 0.5 * qs;
    ds -= 0.5 * lq * qs;

    constexpr double kBernoulli[6] = {1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,
                                      -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0};
    constexpr double kFactorial[6] = {2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0};
    double poch = 1.0;   // (s)_m
    double dpoch = 0.0;  // d/ds (s)_m
    int m = 0;
    double qpow = qs / q;  // q^-(s + 2j - 1), starting at j = 1
    for (int j = 1; j <= 6; ++j) {
        while (m < 2 * j - 1) {
            dpoch = dpoch * (s + m) + poch;
            poch *= (s + m);
            ++m;
        }
        const double coeff = kBernoulli[j - 1] / kFactorial[j - 1];
        value += coeff * poch * qpow;
        ds += coeff * qpow * (dpoch - poch * lq);
        qpow /= q * q;
    }
    return {value, ds};
}

struct WeightedCounts {
    std::vector<std::pair<std::uint32_t, double>> bins;  // ascending k -> weight
    double n = 0.0;
    double sum_log = 0.0;
    std::uint32_t max_k = 0;
};

WeightedCounts collect_counts(const CountHistogram& histogram, std::uint32_t xmin) {
    WeightedCounts wc;
    for (const auto& [k, w] : histogram) {
        if (k < xmin || w == 0) continue;
        const double weight = static_cast<double>(w);
        wc.bins.emplace_back(k, weight);
        wc.n += weight;
        wc.sum_log += weight * std::log(static_cast<double>(k));
        wc.max_k = std::max(wc.max_k, k);
    }
    return wc;
}

// chi-square over [lo, hi) integer bins with a terminal open tail; adjacent
// bins are pooled until every expected count reaches 5.
struct Chi2Result {
    double chi2 = 0.0;
    int dof = 0;
};

Chi2Result pooled_chi2(std::vector<double> observed, std::vector<double> expected,
                       int fitted_params) {
    std::vector<double> obs;
    std::vector<double> exp;
    double o_acc = 0.0;
    double e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (!exp.empty()) {
            obs.back() += o_acc;
            exp.back() += e_acc;
        } else {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        }
    }
    Chi2Result result;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        if (exp[i] <= 0.0) continue;
        const double d = obs[i] - exp[i];
        result.chi2 += d * d / exp[i];
    }
    result.dof = std::max(0, static_cast<int>(exp.size()) - 1 - fitted_params);
    return result;
}

// Validated, weight-normalized Weibull sample with values scaled by their
// maximum so x^k stays in range for any bracketed k.
struct WeibullWork {
    std::vector<double> logr;  // ln(x / xmax), <= 0
    std::vector<double> w;
    std::vector<bool> cens;
    double n_unc = 0.0;
    double n_total = 0.0;
    double sum_log_unc = 0.0;  // sum of w * ln(x) over uncensored
    double log_xmax = 0.0;
};

WeibullWork prepare_weibull(const WeibullData& data) {
    const std::size_t n = data.values.size();
    if (!data.weights.empty() && data.weights.size() != n) {
        throw Error("weibull data: weights length mismatch");
    }
    if (!data.censored.empty() && data.censored.size() != n) {
        throw Error("weibull data: censored length mismatch");
    }
    double xmax = 0.0;
    for (double x : data.values) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw Error("weibull fit: durations must be positive and finite");
        }
        xmax = std::max(xmax, x);
    }
    WeibullWork work;
    if (n == 0) return work;
    work.log_xmax = std::log(xmax);
    work.logr.reserve(n);
    work.w.reserve(n);
    work.cens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double weight = data.weights.empty() ? 1.0 : static_cast<double>(data.weights[i]);
        if (weight <= 0.0) continue;
        const bool censored = !data.censored.empty() && data.censored[i] != 0;
        work.logr.push_back(std::log(data.values[i] / xmax));
        work.w.push_back(weight);
        work.cens.push_back(censored);
        work.n_total += weight;
        if (!censored) {
            work.n_unc += weight;
            work.sum_log_unc += weight * std::log(data.values[i]);
        }
    }
    return work;
}

struct WeibullDerivs {
    double d1;  // profile dl/dk
    double d2;  // profile d2l/dk2
};

// A(k) = sum w x^k computed on the scaled sample: a = sum w r^k with
// r = x/xmax, plus log-derivative pieces.
WeibullDerivs profile_derivs(double k, const WeibullWork& work) {
    double a = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    for (std::size_t i = 0; i < work.logr.size(); ++i) {
        const double rk = work.w[i] * std::exp(k * work.logr[i]);
        a += rk;
        a1 += rk * work.logr[i];
        a2 += rk * work.logr[i] * work.logr[i];
    }
    WeibullDerivs d;
    d.d1 = work.n_unc / k - work.n_unc * (work.log_xmax + a1 / a) + work.sum_log_unc;
    d.d2 = -work.n_unc / (k * k) - work.n_unc * (a2 * a - a1 * a1) / (a * a);
    return d;
}

double profile_loglik(double k, const WeibullWork& work) {
    double a = 0.0;
    for (std::size_t i = 0; i < work.logr.size(); ++i) {
        a += work.w[i] * std::exp(k * work.logr[i]);
    }
    // l(k) = n_u ln k - n_u ln(A/n_u) + (k-1) B - n_u, with A = xmax^k * a
    return work.n_unc * std::log(k) -
           work.n_unc * (k * work.log_xmax + std::log(a / work.n_unc)) +
           (k - 1.0) * work.sum_log_unc - work.n_unc;
}

double weibull_cdf(double x, double k, double lambda) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-std::pow(x / lambda, k));
}

WeibullFit fit_weibull_impl(const WeibullData& data, const WeibullOptions& opts) {
    WeibullWork work = prepare_weibull(data);
    if (work.n_total < static_cast<double>(opts.min_samples)) {
        throw InsufficientDataError("weibull fit needs >= " + std::to_string(opts.min_samples) +
                                    " samples, got " +
                                    std::to_string(static_cast<std::uint64_t>(work.n_total)));
    }
    if (work.n_unc <= 0.0) throw Error("weibull fit: every observation is censored");

    int budget = opts.max_iterations;
    const auto spend = [&]() {
        if (--budget < 0) {
            throw ConvergenceError("weibull MLE did not converge within " +
                                   std::to_string(opts.max_iterations) + " iterations");
        }
    };

    // Bracket the root of the profile derivative: positive at k -> 0+,
    // negative beyond the MLE (no sign change means a degenerate sample).
    double lo = 1.0;
    while (profile_derivs(lo, work).d1 <= 0.0) {
        spend();
        lo *= 0.5;
    }
    double hi = std::max(1.0, 2.0 * lo);
    while (profile_derivs(hi, work).d1 > 0.0) {
        spend();
        hi *= 2.0;
        if (hi > 1e9) {
            throw ConvergenceError("weibull MLE diverged: no finite shape maximizes the profile "
                                   "likelihood (degenerate sample)");
        }
    }

    double k = 0.5 * (lo + hi);
    for (;;) {
        spend();
        const WeibullDerivs d = profile_derivs(k, work);
        if (d.d1 > 0.0) {
            lo = k;
        } else {
            hi = k;
        }
        double next = k - d.d1 / d.d2;
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo <= 1e-12 * hi || next == k) {
            k = next;
            break;
        }
        k = next;
    }

    double a = 0.0;
    for (std::size_t i = 0; i < work.logr.size(); ++i) {
        a += work.w[i] * std::exp(k * work.logr[i]);
    }
    const double lambda = std::exp(work.log_xmax + std::log(a / work.n_unc) / k);

    WeibullFit fit;
    fit.k = k;
    fit.lambda = lambda;
    fit.n_samples = static_cast<std::uint64_t>(std::llround(work.n_total));
    double n_cens = 0.0;
    for (std::size_t i = 0; i < work.w.size(); ++i) {
        if (work.cens[i]) n_cens += work.w[i];
    }
    fit.n_censored = static_cast<std::uint64_t>(std::llround(n_cens));

    // Goodness of fit on the uncensored part only.
    std::vector<std::pair<double, double>> sample;  // value -> weight
    bool integral = true;
    double n_unc = 0.0;
    for (std::size_t i = 0; i < data.values.size(); ++i) {
        const double weight = data.weights.empty() ? 1.0 : static_cast<double>(data.weights[i]);
        const bool censored = !data.censored.empty() && data.censored[i] != 0;
        if (weight <= 0.0 || censored) continue;
        sample.emplace_back(data.values[i], weight);
        n_unc += weight;
        if (data.values[i] != std::floor(data.values[i])) integral = false;
    }
    std::sort(sample.begin(), sample.end());
    Chi2Result gof;
    if (integral && !sample.empty()) {
        // Whole-year durations are ceilings of continuous spans, so the
        // model mass for duration m is F(m) - F(m-1), tail mass pooled into
        // the last bin.
        const auto max_d = static_cast<std::uint32_t>(sample.back().first);
        std::vector<double> observed(max_d, 0.0);
        std::vector<double> expected(max_d, 0.0);
        for (const auto& [x, weight] : sample) {
            observed[static_cast<std::uint32_t>(x) - 1] += weight;
        }
        for (std::uint32_t m = 1; m <= max_d; ++m) {
            double p = weibull_cdf(m, k, lambda) - weibull_cdf(m - 1.0, k, lambda);
            if (m == max_d) p += 1.0 - weibull_cdf(max_d, k, lambda);
            expected[m - 1] = n_unc * p;
        }
        gof = pooled_chi2(std::move(observed), std::move(expected), 2);
    } else if (!sample.empty()) {
        const auto nbins = static_cast<std::size_t>(
            std::max<double>(3.0, std::min<double>(12.0, n_unc / 5.0)));
        std::vector<double> observed(nbins, 0.0);
        std::size_t cursor = 0;
        double cum = 0.0;
        for (std::size_t b = 0; b < nbins; ++b) {
            const double edge = b + 1 == nbins
                                    ? std::numeric_limits<double>::infinity()
                                    : lambda * std::pow(-std::log1p(-(static_cast<double>(b + 1) /
                                                                      static_cast<double>(nbins))),
                                                        1.0 / k);
            while (cursor < sample.size() && sample[cursor].first <= edge) {
                cum += sample[cursor].second;
                ++cursor;
            }
            observed[b] = cum;
            cum = 0.0;
        }
        std::vector<double> expected(nbins, n_unc / static_cast<double>(nbins));
        gof = pooled_chi2(std::move(observed), std::move(expected), 2);
    }
    fit.chi2 = gof.chi2;
    fit.dof = gof.dof;
    return fit;
}

}  // namespace

double hurwitz_zeta(double s, double a) { return hurwitz_zeta_parts(s, a).value; }
double hurwitz_zeta_ds(double s, double a) { return hurwitz_zeta_parts(s, a).ds; }

std::vector<std::uint32_t> edge_addition_samples(const TemporalGraph& graph, Year year) {
    std::vector<std::uint32_t> samples;
    const auto& hist = graph.aggregates().edge_addition_hist;
    auto it = hist.find(year);
    if (it == hist.end()) return samples;
    for (const auto& [k, count] : it->second) {
        samples.insert(samples.end(), count, k);
    }
    return samples;
}

PowerLawFit fit_power_law(const CountHistogram& histogram, std::uint32_t xmin,
                          std::uint64_t min_samples) {
    if (xmin < 1) throw ConfigError("power-law xmin must be >= 1");
    const WeightedCounts wc = collect_counts(histogram, xmin);
    if (wc.n < static_cast<double>(min_samples)) {
        throw InsufficientDataError(
            "power-law fit needs >= " + std::to_string(min_samples) + " samples >= xmin, got " +
            std::to_string(static_cast<std::uint64_t>(wc.n)));
    }
    if (wc.bins.size() == 1) {
        throw DegenerateDistributionError(
            "all samples share the single value " + std::to_string(wc.bins.front().first) +
            "; the tail exponent is unidentifiable");
    }
    const double mean_log = wc.sum_log / wc.n;

    // dl/dgamma = 0  <=>  zeta'(g, xmin)/zeta(g, xmin) = -mean_log; the
    // left side increases from -inf toward -ln(xmin), so g() brackets a
    // unique root whenever the sample is non-degenerate.
    const auto g = [&](double gamma) {
        const ZetaParts z = hurwitz_zeta_parts(gamma, xmin);
        return z.ds / z.value + mean_log;
    };
    double lo = 1.0 + 1e-9;
    double hi = 64.0;
    if (g(lo) >= 0.0) {
        throw DegenerateDistributionError("power-law exponent estimate is at or below 1");
    }
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6) {
            throw DegenerateDistributionError("power-law exponent estimate exceeds 1e6");
        }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double gamma = 0.5 * (lo + hi);

    PowerLawFit fit;
    fit.gamma = gamma;
    fit.xmin = xmin;
    fit.n_samples = static_cast<std::uint64_t>(wc.n);

    const double z0 = hurwitz_zeta(gamma, xmin);
    double cum = 0.0;
    double ks = 0.0;
    for (const auto& [k, w] : wc.bins) {
        cum += w;
        const double model = 1.0 - hurwitz_zeta(gamma, static_cast<double>(k) + 1.0) / z0;
        ks = std::max(ks, std::abs(cum / wc.n - model));
    }
    fit.gof.ks_stat = ks;

    // log2-spaced bins from xmin with an open tail.
    std::vector<double> observed;
    std::vector<double> expected;
    std::uint64_t bin_lo = xmin;
    std::size_t cursor = 0;
    while (bin_lo <= wc.max_k) {
        const std::uint64_t bin_hi = bin_lo * 2;
        const bool tail = bin_hi > wc.max_k;
        double obs = 0.0;
        while (cursor < wc.bins.size() &&
               (tail || wc.bins[cursor].first < bin_hi)) {
            obs += wc.bins[cursor].second;
            ++cursor;
        }
        const double z_lo = hurwitz_zeta(gamma, static_cast<double>(bin_lo));
        const double z_hi = tail ? 0.0 : hurwitz_zeta(gamma, static_cast<double>(bin_hi));
        observed.push_back(obs);
        expected.push_back(wc.n * (z_lo - z_hi) / z0);
        bin_lo = bin_hi;
    }
    const Chi2Result chi2 = pooled_chi2(std::move(observed), std::move(expected), 1);
    fit.gof.chi2 = chi2.chi2;
    fit.gof.dof = chi2.dof;
    return fit;
}

PowerLawFit fit_power_law(const std::vector<std::uint32_t>& samples, std::uint32_t xmin,
                          std::uint64_t min_samples) {
    CountHistogram histogram;
    for (std::uint32_t k : samples) ++histogram[k];
    return fit_power_law(histogram, xmin, min_samples);
}

GrowthFit fit_growth(const YearlySeries& series, Year t0) {
    GrowthFit fit;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<Year> years;
    for (const auto& [year, value] : series.data()) {
        if (year < t0) {
            throw ConfigError("growth fit: series year " + std::to_string(year) +
                              " precedes t0 " + std::to_string(t0));
        }
        if (value <= 0.0) {
            fit.dropped_years.push_back(year);
            continue;
        }
        xs.push_back(std::log(static_cast<double>(year - t0 + 1)));
        ys.push_back(std::log(value));
        years.push_back(year);
    }
    const std::size_t n = xs.size();
    if (n < 20) {
        throw InsufficientDataError("growth fit needs >= 20 positive-valued years, got " +
                                    std::to_string(n));
    }

    std::vector<double> px(n + 1, 0.0), py(n + 1, 0.0), pxx(n + 1, 0.0), pxy(n + 1, 0.0),
        pyy(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        px[i + 1] = px[i] + xs[i];
        py[i + 1] = py[i] + ys[i];
        pxx[i + 1] = pxx[i] + xs[i] * xs[i];
        pxy[i + 1] = pxy[i] + xs[i] * ys[i];
        pyy[i + 1] = pyy[i] + ys[i] * ys[i];
    }
    struct Segment {
        double slope;
        double sse;
    };
    const auto fit_segment = [&](std::size_t lo, std::size_t hi) -> Segment {
        const double m = static_cast<double>(hi - lo);
        const double sx = px[hi] - px[lo];
        const double sy = py[hi] - py[lo];
        const double sxx = pxx[hi] - pxx[lo];
        const double sxy = pxy[hi] - pxy[lo];
        const double syy = pyy[hi] - pyy[lo];
        const double cxx = sxx - sx * sx / m;
        const double cxy = sxy - sx * sy / m;
        const double cyy = syy - sy * sy / m;
        const double slope = cxy / cxx;
        return Segment{slope, std::max(0.0, cyy - slope * cxy)};
    };
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 8; i + 8 <= n; ++i) {
        const double total = fit_segment(0, i).sse + fit_segment(i, n).sse;
        if (total < best) {
            best = total;
            best_i = i;
        }
    }
    fit.alpha1 = fit_segment(0, best_i).slope;
    fit.alpha2 = fit_segment(best_i, n).slope;
    fit.breakpoint_year = years[best_i];
    fit.residual = best;
    return fit;
}

double weibull_profile_loglik(double k, const WeibullData& data) {
    if (!(k > 0.0)) throw RangeError("weibull shape must be positive");
    const WeibullWork work = prepare_weibull(data);
    if (work.n_unc <= 0.0) throw Error("weibull likelihood: no uncensored observations");
    return profile_loglik(k, work);
}

double weibull_profile_loglik_deriv(double k, const WeibullData& data) {
    if (!(k > 0.0)) throw RangeError("weibull shape must be positive");
    const WeibullWork work = prepare_weibull(data);
    if (work.n_unc <= 0.0) throw Error("weibull likelihood: no uncensored observations");
    return profile_derivs(k, work).d1;
}

WeibullFit fit_weibull(const WeibullData& data, const WeibullOptions& opts) {
    return fit_weibull_impl(data, opts);
}

WeibullFit fit_weibull(const std::vector<double>& durations, const WeibullOptions& opts) {
    WeibullData data;
    data.values = durations;
    return fit_weibull_impl(data, opts);
}

PowerLawEvolution power_law_evolution(const YearlyAggregates& agg, std::uint32_t xmin,
                                      std::uint64_t min_samples, unsigned threads) {
    std::vector<Year> years;
    years.reserve(agg.edge_addition_hist.size());
    for (const auto& [year, hist] : agg.edge_addition_hist) years.push_back(year);

    std::vector<std::optional<PowerLawFit>> fits(years.size());
    std::vector<std::optional<FitSkip>> skips(years.size());
    parallel_for(years.size(), threads, [&](std::size_t i) {
        const auto& hist = agg.edge_addition_hist.at(years[i]);
        std::uint64_t n = 0;
        for (const auto& [k, w] : hist) n += w;
        try {
            fits[i] = fit_power_law(hist, xmin, min_samples);
        } catch (const InsufficientDataError&) {
            skips[i] = FitSkip{years[i], "insufficient samples", n};
        } catch (const DegenerateDistributionError&) {
            skips[i] = FitSkip{years[i], "degenerate distribution", n};
        }
    });
    PowerLawEvolution out;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (fits[i]) out.fits.emplace(years[i], *fits[i]);
        if (skips[i]) out.skipped.push_back(*skips[i]);
    }
    return out;
}

PowerLawEvolution power_law_evolution(const TemporalGraph& graph, std::uint32_t xmin,
                                      std::uint64_t min_samples, unsigned threads) {
    return power_law_evolution(graph.aggregates(), xmin, min_samples, threads);
}

WeibullEvolution weibull_evolution(const YearlyAggregates& agg, bool censoring,
                                   const WeibullOptions& opts, unsigned threads) {
    std::vector<Year> cohorts;
    cohorts.reserve(agg.duration_cohorts.size());
    for (const auto& [year, durations] : agg.duration_cohorts) cohorts.push_back(year);

    std::vector<std::optional<WeibullFit>> fits(cohorts.size());
    std::vector<std::optional<FitSkip>> skips(cohorts.size());
    parallel_for(cohorts.size(), threads, [&](std::size_t i) {
        const auto& durations = agg.duration_cohorts.at(cohorts[i]);
        WeibullData data;
        std::uint64_t n = 0;
        for (const auto& [d, counts] : durations) {
            const double value = static_cast<double>(d);
            if (counts.complete > 0 || (!censoring && counts.censored > 0)) {
                data.values.push_back(value);
                data.weights.push_back(counts.complete + (censoring ? 0 : counts.censored));
                data.censored.push_back(0);
            }
            if (censoring && counts.censored > 0) {
                data.values.push_back(value);
                data.weights.push_back(counts.censored);
                data.censored.push_back(1);
            }
            n += counts.complete + counts.censored;
        }
        try {
            fits[i] = fit_weibull(data, opts);
        } catch (const InsufficientDataError&) {
            skips[i] = FitSkip{cohorts[i], "insufficient samples", n};
        } catch (const ConvergenceError&) {
            skips[i] = FitSkip{cohorts[i], "no convergence", n};
        } catch (const Error&) {
            skips[i] = FitSkip{cohorts[i], "all observations censored", n};
        }
    });
    WeibullEvolution out;
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
        if (fits[i]) out.fits.emplace(cohorts[i], *fits[i]);
        if (skips[i]) out.skipped.push_back(*skips[i]);
        if (cohorts[i] > agg.last_year - 10) out.censoring_flagged.push_back(cohorts[i]);
    }
    return out;
}

WeibullEvolution weibull_evolution(const TemporalGraph& graph, bool censoring,
                                   const WeibullOptions& opts, unsigned threads) {
    return weibull_evolution(graph.aggregates(), censoring, opts, threads);
}

}  // namespace collab
