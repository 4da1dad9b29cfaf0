#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "collab/pipeline.hpp"

namespace {

struct CliState {
    collab::RunConfig config;
    std::string format = "infer";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool no_censoring = false;
};

void add_ingest_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--events", state.config.events_path, "Event file (JSONL or CSV)")
        ->required();
    cmd->add_option("--format", state.format, "Event file format")
        ->check(CLI::IsMember({"infer", "jsonl", "csv"}));
    cmd->add_option("--tau-project", state.config.tau_project,
                    "Years of collaboration activity before each completion year");
    cmd->add_option("--min-year", state.config.min_year, "Reject events before this year");
    cmd->add_option("--max-year", state.config.max_year, "Reject events after this year");
    cmd->add_option("--max-malformed-fraction", state.config.max_malformed_fraction,
                    "Fatal threshold for the malformed record fraction");
    cmd->add_option("--cache-dir", state.config.cache_dir,
                    "Aggregate cache directory (default: $COLLABNET_CACHE or <out>/cache)");
    cmd->add_option("--threads", state.config.threads, "Worker threads for per-year fits");
}

void add_out_option(CLI::App* cmd, CliState& state) {
    cmd->add_option("--out", state.config.out_dir, "Output directory (default: .)");
}

void add_series_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--population", state.config.population_path,
                    "Census CSV (year,population) for per-capita series");
    cmd->add_option("--size-cap", state.config.size_cap,
                    "Pool team sizes >= this value into one bucket");
}

void add_timescale_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--censor-window", state.config.censor_window,
                    "Suppress removal timescales for the final N years");
}

void add_fit_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--xmin", state.config.xmin, "Smallest partner count included in tail fits");
    cmd->add_option("--min-fit-samples", state.config.min_fit_samples,
                    "Minimum samples before a per-year fit is attempted");
    cmd->add_flag("--no-censoring", state.no_censoring,
                  "Treat still-active pair timelines as complete durations");
    cmd->add_option("--growth-series", state.config.growth_series,
                    "Series for the segmented growth fit")
        ->check(CLI::IsMember({"events", "new_nodes", "cumulative_nodes"}));
}

void add_epoch_options(CLI::App* cmd, CliState& state) {
    cmd->add_option("--epochs", state.config.epochs_path,
                    "Epoch CSV (name,start,end); omit for the built-in windows");
    cmd->add_option("--baseline-window", state.config.baseline_window,
                    "Years of pre-epoch trend behind each baseline");
    cmd->add_option("--tolerance-pct", state.config.tolerance_pct,
                    "Recovery threshold as percent below baseline");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collabnet: temporal collaboration-network measurement pipeline"};
    app.require_subcommand(1);

    CliState state;

    CLI::App* ingest = app.add_subcommand("ingest", "Parse events and build the aggregate cache");
    add_ingest_options(ingest, state);
    add_out_option(ingest, state);

    CLI::App* series = app.add_subcommand("series", "Yearly node/event series");
    add_ingest_options(series, state);
    add_out_option(series, state);
    add_series_options(series, state);

    CLI::App* timescales = app.add_subcommand("timescales", "Stock/flow process timescales");
    add_ingest_options(timescales, state);
    add_out_option(timescales, state);
    add_timescale_options(timescales, state);

    CLI::App* fit = app.add_subcommand("fit", "Distribution and growth fits");
    add_ingest_options(fit, state);
    add_out_option(fit, state);
    add_fit_options(fit, state);

    CLI::App* epochs = app.add_subcommand("epochs", "Disruption, recovery, and excess growth");
    add_ingest_options(epochs, state);
    add_out_option(epochs, state);
    add_timescale_options(epochs, state);
    add_epoch_options(epochs, state);

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic event corpus");
    synth->add_option("--scenario", state.config.scenario_path, "Scenario config file")
        ->required();
    synth->add_option("--seed", state.seed, "Override the scenario seed");
    add_out_option(synth, state);

    CLI::App* report = app.add_subcommand("report", "Full pipeline: series through epochs");
    add_ingest_options(report, state);
    add_out_option(report, state);
    add_series_options(report, state);
    add_timescale_options(report, state);
    add_fit_options(report, state);
    add_epoch_options(report, state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    state.config.subcommand = app.get_subcommands().front()->get_name();
    if (state.format == "jsonl") {
        state.config.format = collab::EventFormat::jsonl;
    } else if (state.format == "csv") {
        state.config.format = collab::EventFormat::csv;
    }
    if (synth->count("--seed") > 0) state.config.seed = state.seed;
    state.config.censoring = !state.no_censoring;

    return collab::run(state.config, std::cout, std::cerr);
}
