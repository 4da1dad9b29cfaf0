// Acceptance gate: one pass/fail line per criterion, tolerances pinned
// below. Exit code 0 only when every criterion passes.

#include <fcntl.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "collab/epoch.hpp"
#include "collab/fitdist.hpp"
#include "collab/graph.hpp"
#include "collab/io.hpp"
#include "collab/rng.hpp"
#include "collab/series.hpp"
#include "collab/synthgen.hpp"
#include "collab/timescale.hpp"
#include "collab/types.hpp"
#include "collab/yearly_series.hpp"

#include "support/naive.hpp"

using namespace collab;
namespace fs = std::filesystem;

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string fmt(double value, int precision = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

YearlySeries to_series(const std::map<Year, std::uint64_t>& counts) {
    YearlySeries out;
    for (const auto& [year, value] : counts) out.set(year, static_cast<double>(value));
    return out;
}

// ---- criterion 1: planted heavy-tail distributions round-trip ------------

std::string criterion_distributions() {
    std::ostringstream detail;

    const struct {
        double gamma;
        double scale;
        std::uint64_t seed;
    } plans[] = {{1.6, 36000.0, 101}, {2.1, 48000.0, 102}};
    for (const auto& plan : plans) {
        ScenarioConfig config;
        config.seed = plan.seed;
        config.start_year = 1900;
        config.end_year = 1901;
        config.growth.alpha = 0.0;
        config.growth.scale = plan.scale;
        config.team_size.kind = TeamSizeSpec::Kind::partner_powerlaw;
        config.team_size.gamma = plan.gamma;
        config.team_size.max_size = 10001;
        config.career.weibull_k = 1.0;
        config.career.weibull_lambda = 2.0;
        config.entrant_share = 1.0;     // every slot a fresh contributor:
        config.participation_cap = 1;   // per-member partner count == planted draw
        const GeneratedScenario gen = generate(config);
        const TemporalGraph graph = build_graph(gen.events, 0);
        const PowerLawEvolution evo = power_law_evolution(graph.aggregates(), 1, 50, 2);
        require(evo.fits.size() == 2, "expected a fit for each of the two years");
        for (const auto& [year, fit] : evo.fits) {
            require(fit.n_samples >= 100000,
                    "year " + std::to_string(year) + " has only " +
                        std::to_string(fit.n_samples) + " samples (need >= 1e5)");
            require(std::abs(fit.gamma - plan.gamma) <= 0.1,
                    "gamma " + fmt(plan.gamma, 1) + " year " + std::to_string(year) +
                        ": fitted " + fmt(fit.gamma) + " off by more than 0.1");
        }
        detail << "gamma " << fmt(plan.gamma, 1) << "->" << fmt(evo.fits.begin()->second.gamma)
               << "/" << fmt(evo.fits.rbegin()->second.gamma) << "  ";
    }

    const struct {
        double k;
        double lambda;
        std::uint64_t seed;
    } weibulls[] = {{0.2, 10.0, 201}, {0.5, 5.0, 202}};
    for (const auto& plan : weibulls) {
        SplitMix64 rng(plan.seed);
        std::vector<double> values;
        values.reserve(100000);
        for (int i = 0; i < 100000; ++i) values.push_back(sample_weibull(plan.k, plan.lambda, rng));
        const WeibullFit fit = fit_weibull(values);
        require(std::abs(fit.k - plan.k) <= 0.03,
                "weibull k " + fmt(plan.k, 1) + ": fitted " + fmt(fit.k) +
                    " off by more than 0.03");
        detail << "k " << fmt(plan.k, 1) << "->" << fmt(fit.k) << "  ";
    }
    return detail.str();
}

// ---- criterion 2: two-regime growth round-trip ---------------------------

std::string criterion_growth() {
    ScenarioConfig config;
    config.seed = 77;
    config.start_year = 1900;
    config.end_year = 2019;  // 120 years
    config.growth.alpha = 2.3;
    config.growth.scale = 0.5;
    config.growth.breakpoint = 1979;  // alpha2 governs 1980 onward
    config.growth.alpha2 = 3.1;
    config.team_size.kind = TeamSizeSpec::Kind::fixed;
    config.team_size.fixed_size = 1;
    config.career.weibull_k = 1.0;
    config.career.weibull_lambda = 2.0;
    config.entrant_share = 1.0;
    const GeneratedScenario gen = generate(config);
    const TemporalGraph graph = build_graph(gen.events, 0);
    // Fit on years with >= ~30 events: rounding counts below ~10 to integers
    // injects log-space leverage noise at the window's left edge that can
    // drag the knot search a couple of years early.
    YearlySeries counts;
    for (const auto& [year, n] : graph.aggregates().event_counts) {
        if (year >= 1905) counts.set(year, static_cast<double>(n));
    }
    const GrowthFit fit = fit_growth(counts, 1900);

    require(std::abs(fit.alpha1 - 2.3) <= 0.1,
            "alpha1 fitted " + fmt(fit.alpha1) + ", planted 2.3 (tolerance 0.1)");
    require(std::abs(fit.alpha2 - 3.1) <= 0.1,
            "alpha2 fitted " + fmt(fit.alpha2) + ", planted 3.1 (tolerance 0.1)");
    require(std::abs(fit.breakpoint_year - 1980) <= 1,
            "breakpoint fitted " + std::to_string(fit.breakpoint_year) +
                ", expected 1980 +- 1");
    return "alpha 2.3->" + fmt(fit.alpha1) + ", 3.1->" + fmt(fit.alpha2) + ", break 1980->" +
           std::to_string(fit.breakpoint_year);
}

// ---- criterion 3: entry shocks, declines and recovery ramps --------------

std::string criterion_shocks() {
    ScenarioConfig config;
    config.seed = 303;
    config.start_year = 1900;
    config.end_year = 1975;
    config.growth.alpha = 0.0;  // stationary base keeps the baseline exact
    config.growth.scale = 400.0;
    config.team_size.kind = TeamSizeSpec::Kind::fixed;
    config.team_size.fixed_size = 3;
    config.career.weibull_k = 1.0;
    config.career.weibull_lambda = 4.0;
    config.entrant_share = 0.5;
    config.shocks = {{"shock_a", 1915, 1919, 0.55, 1.0, 5},
                     {"shock_b", 1935, 1938, 0.48, 1.0, 3},
                     {"shock_c", 1955, 1960, 0.72, 1.0, 7}};
    const GeneratedScenario gen = generate(config);
    const TemporalGraph graph = build_graph(gen.events, 0);
    const YearlySeries entrants = node_series(graph.aggregates()).new_nodes;

    const double expected_decline[] = {45.0, 52.0, 28.0};
    const Year planted_ramp[] = {5, 3, 7};
    std::ostringstream detail;
    for (std::size_t i = 0; i < config.shocks.size(); ++i) {
        const ShockSpec& shock = config.shocks[i];
        const EpochDefinition epoch{shock.name, shock.start, shock.end};
        const BaselineModel baseline =
            fit_baseline(entrants, epoch, 10, BaselineKind::log_linear);
        const double decline = disruption_magnitude(entrants, epoch, baseline);
        require(std::abs(decline - expected_decline[i]) <= 3.0,
                shock.name + ": decline " + fmt(decline, 2) + "%, planted " +
                    fmt(expected_decline[i], 0) + "% (tolerance 3pp)");
        const RecoveryTime recovery = recovery_time(entrants, epoch, baseline, 5.0);
        require(recovery.recovered, shock.name + ": series never rejoined its baseline");
        require(std::abs(recovery.years - planted_ramp[i]) <= 1,
                shock.name + ": recovery " + std::to_string(recovery.years) +
                    "y, planted ramp " + std::to_string(planted_ramp[i]) + "y (tolerance 1)");
        detail << shock.name << " " << fmt(decline, 1) << "%/" << recovery.years << "y  ";
    }
    return detail.str();
}

// ---- criterion 4: timescale stability and differential sensitivity -------

std::string criterion_timescales() {
    ScenarioConfig steady;
    steady.seed = 404;
    steady.start_year = 1900;
    steady.end_year = 1960;
    steady.growth.alpha = 1.0;
    steady.growth.scale = 30.0;
    steady.team_size.kind = TeamSizeSpec::Kind::fixed;
    steady.team_size.fixed_size = 3;
    steady.career.weibull_k = 1.0;
    steady.career.weibull_lambda = 4.0;
    steady.entrant_share = 0.5;
    const TemporalGraph steady_graph = build_graph(generate(steady).events, 0);
    const TimescaleSeries steady_ts = process_timescales(steady_graph.aggregates(), 5);

    std::vector<double> ratios;
    for (const auto& [year, value] : steady_ts.ratio.data()) {
        if (year >= 1930) ratios.push_back(value);  // final half of 1900-1960
    }
    require(ratios.size() >= 20, "too few ratio years in the final half");
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double cv = std::sqrt(var / static_cast<double>(ratios.size())) / mean;
    require(cv < 0.15, "tau_N/tau_E coefficient of variation " + fmt(cv) + " >= 0.15");

    ScenarioConfig shocked = steady;
    shocked.seed = 405;
    shocked.end_year = 1990;
    shocked.growth.alpha = 0.0;
    shocked.growth.scale = 400.0;
    shocked.shocks = {{"entry_shock", 1980, 1983, 0.54, 1.0, 0}};
    const TemporalGraph shocked_graph = build_graph(generate(shocked).events, 0);
    const TimescaleSeries shocked_ts = process_timescales(shocked_graph.aggregates(), 5);
    const ShockResponse response =
        shock_response(shocked_ts, EpochDefinition{"entry_shock", 1980, 1983}, 5);
    require(response.tau_node_change_pct >= 50.0,
            "tau_N moved only " + fmt(response.tau_node_change_pct, 1) + "% (need >= +50%)");
    require(std::abs(response.tau_edge_change_pct) <= 15.0,
            "tau_E moved " + fmt(response.tau_edge_change_pct, 1) + "% (need within +-15%)");
    return "ratio CV " + fmt(cv) + ", shock tau_N +" + fmt(response.tau_node_change_pct, 1) +
           "% tau_E " + fmt(response.tau_edge_change_pct, 1) + "%";
}

// ---- criterion 5: exact equivalence against the naive rescan -------------

std::string criterion_equivalence() {
    for (int i = 0; i < 25; ++i) {
        const std::uint64_t seed = 9000 + static_cast<std::uint64_t>(i);
        const Year tau = static_cast<Year>(i % 4);
        const std::vector<ProjectEvent> events =
            naive::random_events(seed, 100, 40, 1990, 2015);
        const naive::Model model = naive::scan(events, tau);
        const TemporalGraph graph = build_graph(events, tau);
        const std::string mismatch = naive::compare(graph, model);
        require(mismatch.empty(),
                "fixture seed " + std::to_string(seed) + " tau " + std::to_string(tau) + ": " +
                    mismatch);
    }
    return "25 fixtures, tau 0-3, all tables exact";
}

// ---- criterion 6: numerical identities -----------------------------------

std::string criterion_numerics() {
    // (a) profile-likelihood derivative vs central differences.
    SplitMix64 rng(606);
    WeibullData data;
    for (int i = 0; i < 150; ++i) {
        data.values.push_back(sample_weibull(1.1, 7.0, rng));
        data.weights.push_back(1 + rng.next_below(5));
        data.censored.push_back(rng.next_double() < 0.2 ? 1 : 0);
    }
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double k = 0.3 + 3.7 * rng.next_double();
        const double h = 3e-6 * k;
        const double fd = (weibull_profile_loglik(k + h, data) -
                           weibull_profile_loglik(k - h, data)) /
                          (2.0 * h);
        const double an = weibull_profile_loglik_deriv(k, data);
        const double err = std::abs(fd - an) / std::max(1.0, std::abs(an));
        worst = std::max(worst, err);
        require(err <= 1e-6, "derivative mismatch " + fmt(err, 9) + " at k=" + fmt(k));
    }

    // (b) team-size fractions sum to 1 on every populated year.
    ScenarioConfig config;
    config.seed = 607;
    config.start_year = 1900;
    config.end_year = 1959;
    config.growth.alpha = 1.0;
    config.growth.scale = 30.0;
    config.team_size.kind = TeamSizeSpec::Kind::partner_powerlaw;
    config.team_size.gamma = 2.2;
    config.team_size.max_size = 40;
    config.career.weibull_k = 1.0;
    config.career.weibull_lambda = 4.0;
    config.entrant_share = 0.5;
    const TemporalGraph graph = build_graph(generate(config).events, 0);
    const EventSeries es = event_series(graph.aggregates(), 10);
    std::size_t checked = 0;
    for (const auto& [year, count] : es.event_count.data()) {
        double sum = 0.0;
        for (const auto& [size, series] : es.size_fractions) {
            if (series.contains(year)) sum += series.at(year);
        }
        require(std::abs(sum - 1.0) <= 1e-12,
                "fractions for year " + std::to_string(year) + " sum to " + fmt(sum, 15));
        ++checked;
    }
    require(checked >= 50, "too few populated years for the fraction check");

    // (c) per-capita round trip.
    PopulationTable table;
    table.set(1900, 5e6);
    table.set(1930, 8e6);
    table.set(1960, 12e6);
    const YearlySeries events_series = to_series(graph.aggregates().event_counts);
    const YearlySeries pc = per_capita(events_series, table);
    for (const auto& [year, value] : events_series.data()) {
        const double back = pc.at(year) * table.interpolate(year);
        require(std::abs(back - value) <= 1e-12 * std::max(1.0, std::abs(value)),
                "per-capita round trip error at year " + std::to_string(year));
    }
    return "derivative worst rel err " + fmt(worst, 9) + ", " + std::to_string(checked) +
           " fraction years, per-capita exact";
}

// ---- criterion 7: determinism and bounded-memory scale -------------------

struct ChildResult {
    int exit_code = -1;
    long maxrss_kib = 0;
};

ChildResult spawn(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid == 0) {
        const int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) ::dup2(devnull, 1);
        ::execv(argv[0], argv.data());
        _exit(127);
    }
    ChildResult result;
    int status = 0;
    struct rusage usage {};
    if (::wait4(pid, &status, 0, &usage) == pid && WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
        result.maxrss_kib = usage.ru_maxrss;
    }
    return result;
}

std::string criterion_scale() {
    constexpr long kMemoryBudgetKib = 512 * 1024;  // documented ingest budget: 512 MiB
    const std::string cli = COLLABNET_CLI_PATH;
    require(fs::exists(cli), "CLI binary not found: " + cli);

    const fs::path work =
        fs::temp_directory_path() / ("cnet-accept-" + std::to_string(::getpid()));
    fs::remove_all(work);
    fs::create_directories(work);
    const auto at = [&](const char* name) { return (work / name).string(); };

    write_file(at("scenario.ini"),
               "[scenario]\n"
               "seed = 7701\n"
               "start_year = 1900\n"
               "end_year = 1949\n"
               "entrant_share = 0.3\n"
               "[growth]\n"
               "alpha = 1.0\n"
               "scale = 800\n"
               "[team_size]\n"
               "kind = fixed\n"
               "size = 3\n"
               "[career]\n"
               "weibull_k = 1.0\n"
               "weibull_lambda = 4\n");

    const ChildResult synth =
        spawn({cli, "synth", "--scenario", at("scenario.ini"), "--out", at("gen")});
    require(synth.exit_code == 0,
            "synth exited " + std::to_string(synth.exit_code));
    const auto truth = nlohmann::json::parse(slurp_file(at("gen/ground_truth.json")));
    const std::uint64_t total_events = truth.at("total_events").get<std::uint64_t>();
    require(total_events >= 1000000,
            "generated only " + std::to_string(total_events) + " events (need >= 1e6)");

    const std::string events = at("gen/events.jsonl");
    const ChildResult ingest = spawn({cli, "ingest", "--events", events, "--out", at("ing"),
                                      "--cache-dir", at("cache_ing")});
    require(ingest.exit_code == 0, "ingest exited " + std::to_string(ingest.exit_code));
    require(ingest.maxrss_kib > 0 && ingest.maxrss_kib < kMemoryBudgetKib,
            "ingest peak rss " + std::to_string(ingest.maxrss_kib / 1024) +
                " MiB exceeds the 512 MiB budget");

    write_file(at("population.csv"),
               "year,population\n1900,1000000\n1925,2400000\n1949,4000000\n");
    const ChildResult r1 = spawn({cli, "report", "--events", events, "--out", at("run1"),
                                  "--cache-dir", at("cache1"), "--threads", "1",
                                  "--population", at("population.csv")});
    require(r1.exit_code == 0, "report --threads 1 exited " + std::to_string(r1.exit_code));
    const ChildResult r4 = spawn({cli, "report", "--events", events, "--out", at("run4"),
                                  "--cache-dir", at("cache4"), "--threads", "4",
                                  "--population", at("population.csv")});
    require(r4.exit_code == 0, "report --threads 4 exited " + std::to_string(r4.exit_code));

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(work / "run1")) {
        if (entry.path().extension() != ".csv") continue;
        const std::string name = entry.path().filename().string();
        const std::string a = slurp_file(entry.path().string());
        const std::string b = slurp_file((work / "run4" / name).string());
        require(a == b, name + " differs between --threads 1 and --threads 4");
        ++compared;
    }
    require(compared >= 13, "expected at least 13 csv artifacts, compared " +
                                std::to_string(compared));

    fs::remove_all(work);
    return std::to_string(total_events) + " events, " + std::to_string(compared) +
           " artifacts byte-identical across threads, ingest rss " +
           std::to_string(ingest.maxrss_kib / 1024) + " MiB < 512 MiB";
}

}  // namespace

int main() {
    ::unsetenv("COLLABNET_CACHE");

    struct Entry {
        int index;
        const char* label;
        std::string (*body)();
        double limit_seconds;  // 0: no budget stated
    };
    const Entry entries[] = {
        {1, "distribution round-trip", criterion_distributions, 120.0},
        {2, "growth-regime round-trip", criterion_growth, 30.0},
        {3, "shock decline/recovery round-trip", criterion_shocks, 60.0},
        {4, "timescale stability and sensitivity", criterion_timescales, 60.0},
        {5, "brute-force equivalence", criterion_equivalence, 30.0},
        {6, "numerical identities", criterion_numerics, 0.0},
        {7, "determinism and bounded memory", criterion_scale, 300.0},
    };

    int failures = 0;
    for (const Entry& entry : entries) {
        const auto start = std::chrono::steady_clock::now();
        bool ok = true;
        std::string detail;
        try {
            detail = entry.body();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && entry.limit_seconds > 0.0 && seconds > entry.limit_seconds) {
            ok = false;
            detail += " (exceeded " + fmt(entry.limit_seconds, 0) + "s budget)";
        }
        if (!ok) ++failures;
        std::printf("criterion %d [%s] %6.1fs  %s: %s\n", entry.index, ok ? "PASS" : "FAIL",
                    seconds, entry.label, detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
