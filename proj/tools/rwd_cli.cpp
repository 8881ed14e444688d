// Batch CLI: synthetic market generation, chain ingestion checks,
// full density-forecast studies, score reports, and plot data.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rwd/common.hpp"
#include "rwd/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string profile;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* opt = cmd->add_option("--config", flags.config_path,
                                "JSON study configuration file");
    if (config_required) opt->required();
    cmd->add_option("--out", flags.out_dir, "output directory override");
    cmd->add_option("--seed", flags.seed, "RNG seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--profile", flags.profile,
                    "sentiment profile override (none|low|high)")
        ->check(CLI::IsMember({"none", "low", "high"}));
}

rwd::StudyConfig load_study_config(const CommonFlags& flags) {
    rwd::StudyConfig cfg = rwd::StudyConfig::from_json_file(flags.config_path);
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.seed_set) {
        cfg.seed = flags.seed;
        cfg.calibration.seed = flags.seed;
    }
    if (!flags.profile.empty()) cfg.profiles = {flags.profile};
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Option-implied density forecasting toolkit"};
    app.require_subcommand(1);

    CommonFlags simulate_flags, ingest_flags, run_flags, report_flags, plot_flags;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic market");
    add_common(sim, simulate_flags, true);
    auto* ingest = app.add_subcommand("ingest", "parse and filter an option chain");
    add_common(ingest, ingest_flags, true);
    auto* run = app.add_subcommand("run", "run a full out-of-sample study");
    add_common(run, run_flags, true);
    auto* report = app.add_subcommand("report", "render scores.csv as a table");
    add_common(report, report_flags, false);
    std::string scores_path;
    report->add_option("--scores", scores_path, "path to scores.csv");
    auto* plot = app.add_subcommand("plot-data", "emit density panel CSVs");
    add_common(plot, plot_flags, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            const rwd::SyntheticMarketSpec spec =
                rwd::synthetic_spec_from_json_file(simulate_flags.config_path);
            std::string out = simulate_flags.out_dir;
            if (out.empty()) {
                out = rwd::StudyConfig::from_json_file(simulate_flags.config_path)
                          .out_dir;
            }
            const std::uint64_t seed =
                simulate_flags.seed_set ? simulate_flags.seed : 42;
            rwd::simulate_market(spec, seed, out);
            std::cout << "simulated " << spec.n_dates << " dates into " << out
                      << "\n";
        } else if (ingest->parsed()) {
            rwd::ingest_report(load_study_config(ingest_flags));
            std::cout << "ingest diagnostics written\n";
        } else if (run->parsed()) {
            const rwd::StudyConfig cfg = load_study_config(run_flags);
            const rwd::StudyResult res = rwd::run_study(cfg);
            std::cout << "scored " << res.summaries.size() << " variants over "
                      << res.n_dates - res.n_failed << "/" << res.n_dates
                      << " dates\n";
        } else if (report->parsed()) {
            std::string path = scores_path;
            if (path.empty()) {
                std::string out = report_flags.out_dir;
                if (out.empty() && !report_flags.config_path.empty()) {
                    out = load_study_config(report_flags).out_dir;
                }
                if (out.empty()) {
                    throw rwd::ConfigError(
                        "report needs --scores, --out, or --config");
                }
                path = out + "/scores.csv";
            }
            std::cout << rwd::render_report(path);
        } else if (plot->parsed()) {
            rwd::emit_plot_data(load_study_config(plot_flags));
            std::cout << "plot data written\n";
        }
    } catch (const rwd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rwd::StudyAbortError& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
