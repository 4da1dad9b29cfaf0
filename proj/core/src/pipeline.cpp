#include "collab/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "json.hpp"

#include "collab/config.hpp"
#include "collab/csv.hpp"
#include "collab/epoch.hpp"
#include "collab/errors.hpp"
#include "collab/fitdist.hpp"
#include "collab/series.hpp"
#include "collab/synthgen.hpp"
#include "collab/timescale.hpp"

namespace collab {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

YearlySeries to_series(const std::map<Year, std::uint64_t>& counts) {
    YearlySeries series;
    for (const auto& [year, count] : counts) {
        series.set(year, static_cast<double>(count));
    }
    return series;
}

ordered_json counts_json(const std::map<Year, std::uint64_t>& counts) {
    ordered_json arr = ordered_json::array();
    for (const auto& [year, count] : counts) arr.push_back({year, count});
    return arr;
}

std::map<Year, std::uint64_t> counts_from_json(const ordered_json& arr) {
    std::map<Year, std::uint64_t> counts;
    for (const auto& e : arr) {
        counts[e.at(0).get<Year>()] = e.at(1).get<std::uint64_t>();
    }
    return counts;
}

ordered_json hist_json(const std::map<Year, std::map<std::uint32_t, std::uint64_t>>& table) {
    ordered_json arr = ordered_json::array();
    for (const auto& [year, hist] : table) {
        ordered_json inner = ordered_json::array();
        for (const auto& [k, v] : hist) inner.push_back({k, v});
        arr.push_back({year, inner});
    }
    return arr;
}

std::map<Year, std::map<std::uint32_t, std::uint64_t>> hist_from_json(const ordered_json& arr) {
    std::map<Year, std::map<std::uint32_t, std::uint64_t>> table;
    for (const auto& e : arr) {
        auto& hist = table[e.at(0).get<Year>()];
        for (const auto& kv : e.at(1)) {
            hist[kv.at(0).get<std::uint32_t>()] = kv.at(1).get<std::uint64_t>();
        }
    }
    return table;
}

// Tracks every analysis artifact written into the run directory; the list
// lands in the manifest so consumers never have to glob.
struct Outputs {
    fs::path dir;
    std::vector<std::string> written;

    std::ofstream open(const std::string& name) {
        std::ofstream file(dir / name, std::ios::binary);
        if (!file) throw Error("cannot write file: " + (dir / name).string());
        written.push_back(name);
        return file;
    }
};

struct LoadedAggregates {
    YearlyAggregates agg;
    ParseStats parse;
    bool parsed = false;
    bool cache_hit = false;
    std::string key;
    std::string cache_dir;
    std::uint64_t events_hash = 0;
};

std::string resolve_cache_dir(const RunConfig& config) {
    if (!config.cache_dir.empty()) return config.cache_dir;
    if (const char* env = std::getenv(kCacheEnvVar); env != nullptr && *env != '\0') {
        return env;
    }
    return (fs::path(config.out_dir) / "cache").string();
}

LoadedAggregates load_aggregates(const RunConfig& config, std::ostream& log) {
    if (config.events_path.empty()) {
        throw ConfigError("--events is required for subcommand '" + config.subcommand + "'");
    }
    LoadedAggregates loaded;
    loaded.events_hash = fnv1a_file(config.events_path);
    loaded.key =
        cache_key(loaded.events_hash, config.tau_project, config.min_year, config.max_year);
    loaded.cache_dir = resolve_cache_dir(config);

    const fs::path agg_path = fs::path(loaded.cache_dir) / ("agg-" + loaded.key + ".json");
    if (fs::exists(agg_path)) {
        try {
            loaded.agg = deserialize_aggregates(slurp_file(agg_path.string()));
            loaded.cache_hit = true;
            log << "aggregate cache hit: " << agg_path.string() << "\n";
            return loaded;
        } catch (const Error& e) {
            log << "aggregate cache ignored (" << e.what() << "); rebuilding\n";
        }
    }

    GraphBuilder builder(config.tau_project, YearRange{config.min_year, config.max_year});
    IdDictionary dict;
    ParseOptions popts;
    popts.format = config.format;
    popts.max_malformed_fraction = config.max_malformed_fraction;
    loaded.parse = parse_events(
        config.events_path, dict, [&](ProjectEvent&& event) { builder.add(event); }, popts);
    loaded.parsed = true;

    const TemporalGraph graph = std::move(builder).finalize();
    loaded.agg = graph.aggregates();

    fs::create_directories(loaded.cache_dir);
    write_file(agg_path.string(), serialize_aggregates(loaded.agg));
    write_id_dictionary((fs::path(loaded.cache_dir) / ("dict-" + loaded.key + ".csv")).string(),
                        dict);
    log << "ingested " << loaded.parse.records_ok << " events ("
        << loaded.parse.records_malformed << " malformed, " << loaded.agg.rejected_year_records
        << " outside year range)\n";
    return loaded;
}

// year + N value columns, blank cells where a series has no year.
void write_wide_csv(std::ofstream& file,
                    const std::vector<std::pair<std::string, const YearlySeries*>>& columns) {
    file << "year";
    for (const auto& [name, series] : columns) file << ',' << name;
    file << '\n';
    std::set<Year> years;
    for (const auto& [name, series] : columns) {
        for (const auto& [year, value] : series->data()) years.insert(year);
    }
    for (const Year year : years) {
        file << format_int(year);
        for (const auto& [name, series] : columns) {
            file << ',';
            if (series->contains(year)) file << format_double(series->at(year));
        }
        file << '\n';
    }
}

void write_node_series(Outputs& outputs, const YearlyAggregates& agg) {
    const NodeSeries ns = node_series(agg);
    const YearlySeries nf = new_fraction_series(agg);
    auto file = outputs.open("node_series.csv");
    file << "year,cumulative_nodes,new_nodes,active_with_new_edges,new_fraction\n";
    for (const auto& [year, cumulative] : ns.cumulative_total.data()) {
        file << format_int(year) << ',' << format_double(cumulative) << ',';
        file << format_double(ns.new_nodes.contains(year) ? ns.new_nodes.at(year) : 0.0) << ',';
        file << format_double(
            ns.active_with_new_edges.contains(year) ? ns.active_with_new_edges.at(year) : 0.0);
        file << ',';
        if (nf.contains(year)) file << format_double(nf.at(year));
        file << '\n';
    }
}

void write_event_series(Outputs& outputs, const YearlyAggregates& agg, std::uint32_t size_cap) {
    const EventSeries es = event_series(agg, size_cap);
    {
        auto file = outputs.open("event_series.csv");
        file << "year,events,mean_team_size,mode_team_size,max_team_size\n";
        for (const auto& stat : es.stats) {
            file << format_int(stat.year) << ','
                 << format_double(es.event_count.at(stat.year)) << ','
                 << format_double(stat.mean) << ',' << format_uint(stat.mode) << ','
                 << format_uint(stat.max) << '\n';
        }
    }
    {
        auto file = outputs.open("team_size_fractions.csv");
        file << "year,team_size,fraction\n";
        for (const auto& [year, count] : es.event_count.data()) {
            for (const auto& [size, series] : es.size_fractions) {
                if (!series.contains(year)) continue;
                file << format_int(year) << ',' << format_uint(size) << ','
                     << format_double(series.at(year)) << '\n';
            }
        }
    }
}

void write_single_year_series(Outputs& outputs, const YearlyAggregates& agg) {
    const SingleYearSeries sy = single_year_series(agg);
    auto file = outputs.open("single_year_series.csv");
    write_wide_csv(file, {{"single_year_nodes", &sy.count},
                          {"single_year_fraction", &sy.fraction},
                          {"single_project_nodes", &sy.variant_count},
                          {"single_project_fraction", &sy.variant_fraction}});
}

YearlySeries clip_to_population(const YearlySeries& series, const PopulationTable& table) {
    YearlySeries out;
    if (table.empty()) return out;
    const Year lo = table.first_year();
    const Year hi = table.last_year();
    for (const auto& [year, value] : series.data()) {
        if (year >= lo && year <= hi) out.set(year, value);
    }
    return out;
}

void write_per_capita(Outputs& outputs, const YearlyAggregates& agg,
                      const PopulationTable& table) {
    const YearlySeries new_nodes =
        per_capita(clip_to_population(to_series(agg.new_nodes), table), table);
    const YearlySeries events =
        per_capita(clip_to_population(to_series(agg.event_counts), table), table);
    auto file = outputs.open("per_capita.csv");
    write_wide_csv(file,
                   {{"new_nodes_per_capita", &new_nodes}, {"events_per_capita", &events}});
}

void write_timescales(Outputs& outputs, const TimescaleSeries& ts) {
    auto file = outputs.open("timescales.csv");
    write_wide_csv(file, {{"tau_node_add", &ts.tau_node_add},
                          {"tau_node_rem", &ts.tau_node_rem},
                          {"tau_edge_add", &ts.tau_edge_add},
                          {"tau_edge_rem", &ts.tau_edge_rem},
                          {"ratio", &ts.ratio}});
}

void write_power_law(Outputs& outputs, const YearlyAggregates& agg, const RunConfig& config) {
    const PowerLawEvolution evo =
        power_law_evolution(agg, config.xmin, config.min_fit_samples, config.threads);
    {
        auto file = outputs.open("power_law_fits.csv");
        file << "year,gamma,xmin,n_samples,ks_stat,chi2,dof\n";
        for (const auto& [year, fit] : evo.fits) {
            file << format_int(year) << ',' << format_double(fit.gamma) << ','
                 << format_uint(fit.xmin) << ',' << format_uint(fit.n_samples) << ','
                 << format_double(fit.gof.ks_stat) << ',' << format_double(fit.gof.chi2) << ','
                 << format_int(fit.gof.dof) << '\n';
        }
    }
    {
        auto file = outputs.open("power_law_skips.csv");
        file << "year,reason,n_samples\n";
        for (const auto& skip : evo.skipped) {
            file << format_int(skip.year) << ',' << csv_escape(skip.reason) << ','
                 << format_uint(skip.n_samples) << '\n';
        }
    }
    if (evo.fits.empty()) {
        throw InsufficientDataError("no year produced a power-law fit (" +
                                    std::to_string(evo.skipped.size()) + " skipped)");
    }
}

void write_weibull(Outputs& outputs, const YearlyAggregates& agg, const RunConfig& config) {
    WeibullOptions opts;
    opts.min_samples = config.min_fit_samples;
    const WeibullEvolution evo =
        weibull_evolution(agg, config.censoring, opts, config.threads);
    const std::set<Year> flagged(evo.censoring_flagged.begin(), evo.censoring_flagged.end());
    {
        auto file = outputs.open("weibull_fits.csv");
        file << "cohort,k,lambda,n_samples,n_censored,chi2,dof,censoring_flagged\n";
        for (const auto& [year, fit] : evo.fits) {
            file << format_int(year) << ',' << format_double(fit.k) << ','
                 << format_double(fit.lambda) << ',' << format_uint(fit.n_samples) << ','
                 << format_uint(fit.n_censored) << ',' << format_double(fit.chi2) << ','
                 << format_int(fit.dof) << ',' << (flagged.count(year) ? '1' : '0') << '\n';
        }
    }
    {
        auto file = outputs.open("weibull_skips.csv");
        file << "cohort,reason,n_samples\n";
        for (const auto& skip : evo.skipped) {
            file << format_int(skip.year) << ',' << csv_escape(skip.reason) << ','
                 << format_uint(skip.n_samples) << '\n';
        }
    }
    if (evo.fits.empty()) {
        throw InsufficientDataError("no cohort produced a duration fit (" +
                                    std::to_string(evo.skipped.size()) + " skipped)");
    }
}

YearlySeries growth_input(const YearlyAggregates& agg, const std::string& name) {
    if (name == "events") return to_series(agg.event_counts);
    if (name == "new_nodes") return to_series(agg.new_nodes);
    if (name == "cumulative_nodes") return node_series(agg).cumulative_total;
    throw ConfigError("unknown growth series '" + name +
                      "' (expected events, new_nodes, or cumulative_nodes)");
}

void write_growth(Outputs& outputs, const YearlyAggregates& agg, const RunConfig& config) {
    const YearlySeries series = growth_input(agg, config.growth_series);
    const Year t0 = series.first_year();  // RangeError if the series is empty
    const GrowthFit fit = fit_growth(series, t0);
    auto file = outputs.open("growth_fit.csv");
    file << "series,t0,alpha1,alpha2,breakpoint_year,residual,dropped_years\n";
    file << csv_escape(config.growth_series) << ',' << format_int(t0) << ','
         << format_double(fit.alpha1) << ',' << format_double(fit.alpha2) << ','
         << format_int(fit.breakpoint_year) << ',' << format_double(fit.residual) << ',';
    for (std::size_t i = 0; i < fit.dropped_years.size(); ++i) {
        if (i) file << ';';
        file << format_int(fit.dropped_years[i]);
    }
    file << '\n';
}

void write_epoch_reports(Outputs& outputs, const YearlyAggregates& agg,
                         const std::vector<EpochDefinition>& epochs, const RunConfig& config) {
    const std::vector<std::pair<std::string, YearlySeries>> series_set = {
        {"new_nodes", to_series(agg.new_nodes)},
        {"events", to_series(agg.event_counts)},
        {"new_timelines", to_series(agg.new_timelines)},
        {"active_nodes", to_series(agg.active_nodes)},
    };
    EpochAnalysisConfig ec;
    ec.baseline_window = config.baseline_window;
    ec.tolerance_pct = config.tolerance_pct;
    const auto reports = epoch_report_matrix(series_set, epochs, ec);

    auto file = outputs.open("epoch_reports.csv");
    file << "series,epoch,start,end,status,decline_pct,decline_mean_pct,recovered,"
            "recovery_years,excess_growth_pct,baseline_slope,baseline_intercept\n";
    std::size_t failed = 0;
    for (const auto& r : reports) {
        file << csv_escape(r.series_name) << ',' << csv_escape(r.epoch.name) << ','
             << format_int(r.epoch.start) << ',' << format_int(r.epoch.end) << ','
             << csv_escape(r.status) << ',';
        if (r.status == "ok") {
            file << format_double(r.decline_pct) << ',' << format_double(r.decline_mean_pct)
                 << ',' << (r.recovery.recovered ? '1' : '0') << ',';
            if (r.recovery.recovered) file << format_int(r.recovery.years);
            file << ',' << format_double(r.excess_growth_pct) << ','
                 << format_double(r.baseline.slope) << ','
                 << format_double(r.baseline.intercept);
        } else {
            ++failed;
            file << ",,,,,,";
        }
        file << '\n';
    }
    if (!reports.empty() && failed == reports.size()) {
        throw InsufficientDataError("no series x epoch cell could be analyzed");
    }
}

void write_shock_response(Outputs& outputs, const TimescaleSeries& ts,
                          const std::vector<EpochDefinition>& epochs) {
    auto file = outputs.open("shock_response.csv");
    file << "epoch,start,end,status,tau_node_change_pct,tau_edge_change_pct\n";
    std::size_t failed = 0;
    for (const auto& epoch : epochs) {
        file << csv_escape(epoch.name) << ',' << format_int(epoch.start) << ','
             << format_int(epoch.end) << ',';
        try {
            const ShockResponse r = shock_response(ts, epoch);
            file << "ok," << format_double(r.tau_node_change_pct) << ','
                 << format_double(r.tau_edge_change_pct);
        } catch (const Error& e) {
            ++failed;
            file << csv_escape(e.what()) << ",,";
        }
        file << '\n';
    }
    if (!epochs.empty() && failed == epochs.size()) {
        throw InsufficientDataError("no epoch had enough timescale data");
    }
}

ordered_json scenario_json(const ScenarioConfig& config) {
    ordered_json j;
    j["seed"] = config.seed;
    j["start_year"] = config.start_year;
    j["end_year"] = config.end_year;
    ordered_json growth;
    growth["alpha"] = config.growth.alpha;
    growth["scale"] = config.growth.scale;
    if (config.growth.breakpoint) {
        growth["breakpoint"] = *config.growth.breakpoint;
        growth["alpha2"] = config.growth.alpha2;
    }
    j["growth"] = growth;
    ordered_json team;
    switch (config.team_size.kind) {
        case TeamSizeSpec::Kind::fixed:
            team["kind"] = "fixed";
            team["size"] = config.team_size.fixed_size;
            break;
        case TeamSizeSpec::Kind::categorical: {
            team["kind"] = "categorical";
            ordered_json sizes = ordered_json::array();
            for (const auto& [size, weight] : config.team_size.categories) {
                sizes.push_back({size, weight});
            }
            team["sizes"] = sizes;
            break;
        }
        case TeamSizeSpec::Kind::partner_powerlaw:
            team["kind"] = "partner_powerlaw";
            team["gamma"] = config.team_size.gamma;
            team["max_size"] = config.team_size.max_size;
            break;
    }
    j["team_size"] = team;
    j["career"] = {{"weibull_k", config.career.weibull_k},
                   {"weibull_lambda", config.career.weibull_lambda}};
    j["entrant_share"] = config.entrant_share;
    j["entrant_share_decay"] = config.entrant_share_decay;
    j["participation_cap"] = config.participation_cap;
    ordered_json shocks = ordered_json::array();
    for (const auto& s : config.shocks) {
        ordered_json shock;
        shock["name"] = s.name;
        shock["start"] = s.start;
        shock["end"] = s.end;
        shock["entry_multiplier"] = s.entry_multiplier;
        shock["size_multiplier"] = s.size_multiplier;
        shock["recovery_ramp_years"] = s.recovery_ramp_years;
        shocks.push_back(shock);
    }
    j["shocks"] = shocks;
    return j;
}

ordered_json input_json(const std::string& path) {
    ordered_json j;
    j["path"] = path;
    j["fnv1a"] = hex64(fnv1a_file(path));
    return j;
}

ordered_json parameters_json(const RunConfig& config) {
    ordered_json p;
    p["tau_project"] = config.tau_project;
    p["min_year"] = config.min_year;
    p["max_year"] = config.max_year;
    p["censor_window"] = config.censor_window;
    p["size_cap"] = config.size_cap;
    p["xmin"] = config.xmin;
    p["min_fit_samples"] = config.min_fit_samples;
    p["censoring"] = config.censoring;
    p["growth_series"] = config.growth_series;
    p["baseline_window"] = config.baseline_window;
    p["tolerance_pct"] = config.tolerance_pct;
    p["max_malformed_fraction"] = config.max_malformed_fraction;
    return p;
}

int run_synth(const RunConfig& config, Outputs& outputs, std::ostream& out) {
    if (config.scenario_path.empty()) {
        throw ConfigError("--scenario is required for subcommand 'synth'");
    }
    ScenarioConfig scenario = parse_scenario_file(config.scenario_path);
    if (config.seed) scenario.seed = *config.seed;
    const GeneratedScenario generated = generate(scenario);

    const fs::path events_path = outputs.dir / "events.jsonl";
    write_events_jsonl(events_path.string(), generated.events);
    outputs.written.push_back("events.jsonl");

    ordered_json truth;
    truth["scenario"] = scenario_json(generated.truth.config);
    ordered_json yearly = ordered_json::array();
    for (const auto& y : generated.truth.yearly) {
        ordered_json row;
        row["year"] = y.year;
        row["events"] = y.events;
        row["slots"] = y.slots;
        row["entrants_target"] = y.entrants_target;
        row["entrants_placed"] = y.entrants_placed;
        row["leavers_due"] = y.leavers_due;
        row["leavers_placed"] = y.leavers_placed;
        yearly.push_back(row);
    }
    truth["yearly"] = yearly;
    truth["total_events"] = generated.truth.total_events;
    truth["total_contributors"] = generated.truth.total_contributors;
    write_file((outputs.dir / "ground_truth.json").string(), truth.dump(2) + "\n");
    outputs.written.push_back("ground_truth.json");

    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["subcommand"] = config.subcommand;
    manifest["inputs"] = {{"scenario", input_json(config.scenario_path)}};
    manifest["scenario"] = scenario_json(generated.truth.config);
    manifest["outputs"] = outputs.written;
    manifest["statuses"] = {{"synth", "ok"}};
    write_file((outputs.dir / "manifest.json").string(), manifest.dump(2) + "\n");

    out << "synth: " << generated.truth.total_events << " events, "
        << generated.truth.total_contributors << " contributors -> "
        << (outputs.dir / "events.jsonl").string() << "\n";
    return 0;
}

int run_impl(const RunConfig& config, std::ostream& out, std::ostream& err) {
    static_cast<void>(err);
    const std::string& cmd = config.subcommand;
    const bool known = cmd == "ingest" || cmd == "series" || cmd == "timescales" ||
                       cmd == "fit" || cmd == "epochs" || cmd == "synth" || cmd == "report";
    if (!known) throw ConfigError("unknown subcommand '" + cmd + "'");
    if (config.threads < 1) throw ConfigError("--threads must be >= 1");
    if (config.tau_project < 0) throw ConfigError("--tau-project must be >= 0");
    if (config.censor_window < 0) throw ConfigError("--censor-window must be >= 0");
    if (config.max_year < config.min_year) throw ConfigError("year range is empty");
    if (config.size_cap < 1) throw ConfigError("--size-cap must be >= 1");

    fs::create_directories(config.out_dir);
    Outputs outputs{fs::path(config.out_dir), {}};

    if (cmd == "synth") return run_synth(config, outputs, out);

    const bool wants_series = cmd == "series" || cmd == "report";
    const bool wants_timescales = cmd == "timescales" || cmd == "report";
    const bool wants_fit = cmd == "fit" || cmd == "report";
    const bool wants_epochs = cmd == "epochs" || cmd == "report";

    if (wants_fit && config.growth_series != "events" && config.growth_series != "new_nodes" &&
        config.growth_series != "cumulative_nodes") {
        throw ConfigError("unknown growth series '" + config.growth_series +
                          "' (expected events, new_nodes, or cumulative_nodes)");
    }

    PopulationTable population;
    bool has_population = false;
    if (!config.population_path.empty()) {
        population = parse_population(config.population_path);
        has_population = true;
    }
    std::vector<EpochDefinition> epochs;
    if (wants_epochs) {
        epochs = config.epochs_path.empty() ? default_epochs() : parse_epochs(config.epochs_path);
    }

    const LoadedAggregates loaded = load_aggregates(config, out);

    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["subcommand"] = cmd;
    ordered_json inputs;
    {
        ordered_json ev;
        ev["path"] = config.events_path;
        ev["fnv1a"] = hex64(loaded.events_hash);
        inputs["events"] = ev;
    }
    if (has_population) inputs["population"] = input_json(config.population_path);
    if (wants_epochs && !config.epochs_path.empty()) {
        inputs["epochs"] = input_json(config.epochs_path);
    }
    manifest["inputs"] = inputs;
    manifest["parameters"] = parameters_json(config);
    {
        ordered_json cache;
        cache["mode"] = loaded.cache_hit ? "hit" : "built";
        cache["key"] = loaded.key;
        cache["dir"] = loaded.cache_dir;
        manifest["cache"] = cache;
    }
    if (loaded.parsed) {
        ordered_json parse;
        parse["records_ok"] = loaded.parse.records_ok;
        parse["records_malformed"] = loaded.parse.records_malformed;
        parse["duplicate_members"] = loaded.parse.duplicate_members;
        manifest["parse"] = parse;
    }
    {
        ordered_json agg;
        agg["first_year"] = loaded.agg.first_year;
        agg["last_year"] = loaded.agg.last_year;
        agg["total_events"] = loaded.agg.total_events;
        agg["total_contributors"] = loaded.agg.total_contributors;
        agg["total_nodes"] = loaded.agg.total_nodes;
        agg["total_timelines"] = loaded.agg.total_timelines;
        agg["rejected_year_records"] = loaded.agg.rejected_year_records;
        manifest["aggregates"] = agg;
    }

    ordered_json statuses = ordered_json::object();
    bool partial = false;
    const auto step = [&](const std::string& name, auto&& body) {
        try {
            body();
            statuses[name] = "ok";
        } catch (const Error& e) {
            statuses[name] = std::string(e.what());
            partial = true;
        }
    };

    if (cmd == "ingest") statuses["ingest"] = "ok";
    if (wants_series) {
        step("node_series", [&] { write_node_series(outputs, loaded.agg); });
        step("event_series", [&] { write_event_series(outputs, loaded.agg, config.size_cap); });
        step("single_year_series", [&] { write_single_year_series(outputs, loaded.agg); });
        if (has_population) {
            step("per_capita", [&] { write_per_capita(outputs, loaded.agg, population); });
        }
    }
    TimescaleSeries timescales;
    if (wants_timescales || wants_epochs) {
        timescales = process_timescales(loaded.agg, config.censor_window);
    }
    if (wants_timescales) {
        step("timescales", [&] { write_timescales(outputs, timescales); });
    }
    if (wants_fit) {
        step("power_law", [&] { write_power_law(outputs, loaded.agg, config); });
        step("weibull", [&] { write_weibull(outputs, loaded.agg, config); });
        step("growth", [&] { write_growth(outputs, loaded.agg, config); });
    }
    if (wants_epochs) {
        step("epochs", [&] { write_epoch_reports(outputs, loaded.agg, epochs, config); });
        step("shock_response", [&] { write_shock_response(outputs, timescales, epochs); });
    }

    manifest["outputs"] = outputs.written;
    manifest["statuses"] = statuses;
    write_file((outputs.dir / "manifest.json").string(), manifest.dump(2) + "\n");

    out << cmd << ": wrote " << outputs.written.size() + 1 << " file(s) to "
        << fs::path(config.out_dir).string() << "\n";
    return partial ? 2 : 0;
}

}  // namespace

std::string cache_key(std::uint64_t events_hash, Year tau_project, Year min_year, Year max_year) {
    std::uint64_t h = events_hash;
    const auto fold = [&h](const void* data, std::size_t len) { h = fnv1a(data, len, h); };
    fold(&tau_project, sizeof tau_project);
    fold(&min_year, sizeof min_year);
    fold(&max_year, sizeof max_year);
    const std::string version = kVersion;
    fold(version.data(), version.size());
    return hex64(h);
}

std::string serialize_aggregates(const YearlyAggregates& agg) {
    ordered_json j;
    j["version"] = kVersion;
    j["first_year"] = agg.first_year;
    j["last_year"] = agg.last_year;
    j["new_nodes"] = counts_json(agg.new_nodes);
    j["removed_nodes"] = counts_json(agg.removed_nodes);
    j["active_new_edge_nodes"] = counts_json(agg.active_new_edge_nodes);
    j["active_nodes"] = counts_json(agg.active_nodes);
    j["active_edges"] = counts_json(agg.active_edges);
    j["new_timelines"] = counts_json(agg.new_timelines);
    j["ended_timelines"] = counts_json(agg.ended_timelines);
    j["single_year_nodes"] = counts_json(agg.single_year_nodes);
    j["event_counts"] = counts_json(agg.event_counts);
    j["team_size_hist"] = hist_json(agg.team_size_hist);
    j["single_project_nodes"] = counts_json(agg.single_project_nodes);
    j["first_event_nodes"] = counts_json(agg.first_event_nodes);
    j["edge_addition_hist"] = hist_json(agg.edge_addition_hist);
    ordered_json cohorts = ordered_json::array();
    for (const auto& [year, durations] : agg.duration_cohorts) {
        ordered_json inner = ordered_json::array();
        for (const auto& [d, counts] : durations) {
            inner.push_back({d, counts.complete, counts.censored});
        }
        cohorts.push_back({year, inner});
    }
    j["duration_cohorts"] = cohorts;
    j["total_nodes"] = agg.total_nodes;
    j["total_contributors"] = agg.total_contributors;
    j["total_timelines"] = agg.total_timelines;
    j["total_events"] = agg.total_events;
    j["rejected_year_records"] = agg.rejected_year_records;
    return j.dump();
}

YearlyAggregates deserialize_aggregates(const std::string& json) {
    const ordered_json j = ordered_json::parse(json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error("aggregate cache: invalid JSON");
    }
    try {
        if (j.at("version").get<std::string>() != kVersion) {
            throw Error("aggregate cache: version mismatch");
        }
        YearlyAggregates agg;
        agg.first_year = j.at("first_year").get<Year>();
        agg.last_year = j.at("last_year").get<Year>();
        agg.new_nodes = counts_from_json(j.at("new_nodes"));
        agg.removed_nodes = counts_from_json(j.at("removed_nodes"));
        agg.active_new_edge_nodes = counts_from_json(j.at("active_new_edge_nodes"));
        agg.active_nodes = counts_from_json(j.at("active_nodes"));
        agg.active_edges = counts_from_json(j.at("active_edges"));
        agg.new_timelines = counts_from_json(j.at("new_timelines"));
        agg.ended_timelines = counts_from_json(j.at("ended_timelines"));
        agg.single_year_nodes = counts_from_json(j.at("single_year_nodes"));
        agg.event_counts = counts_from_json(j.at("event_counts"));
        agg.team_size_hist = hist_from_json(j.at("team_size_hist"));
        agg.single_project_nodes = counts_from_json(j.at("single_project_nodes"));
        agg.first_event_nodes = counts_from_json(j.at("first_event_nodes"));
        agg.edge_addition_hist = hist_from_json(j.at("edge_addition_hist"));
        for (const auto& e : j.at("duration_cohorts")) {
            auto& cohort = agg.duration_cohorts[e.at(0).get<Year>()];
            for (const auto& d : e.at(1)) {
                cohort[d.at(0).get<std::uint32_t>()] =
                    DurationCount{d.at(1).get<std::uint64_t>(), d.at(2).get<std::uint64_t>()};
            }
        }
        agg.total_nodes = j.at("total_nodes").get<std::uint64_t>();
        agg.total_contributors = j.at("total_contributors").get<std::uint64_t>();
        agg.total_timelines = j.at("total_timelines").get<std::uint64_t>();
        agg.total_events = j.at("total_events").get<std::uint64_t>();
        agg.rejected_year_records = j.at("rejected_year_records").get<std::uint64_t>();
        return agg;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string("aggregate cache: ") + e.what());
    }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        return run_impl(config, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace collab
