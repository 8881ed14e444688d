#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwd/calibration.hpp"
#include "rwd/char_models.hpp"
#include "rwd/dates.hpp"
#include "rwd/evaluation.hpp"
#include "rwd/sentiment.hpp"

namespace rwd {

// Bad or inconsistent study configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too many per-date failures to trust the study (CLI exit code 4).
struct StudyAbortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataPaths {
    std::string chain;
    std::string settlements;
    std::string closes;   // daily closes, needed by the IRRA risk profile
    std::string volumes;  // monthly traded volume, feeds the volume proxy
};

enum class RiskKind { RN, Crra2, Crra4, Irra };

std::string risk_name(RiskKind risk);
RiskKind parse_risk(const std::string& name);

struct StudyConfig {
    DataPaths data;
    std::vector<std::string> models = {"LN"};  // LN|HESTON|BATES|VG|BLMALZ
    std::vector<RiskKind> risks = {RiskKind::RN};
    std::vector<std::string> profiles = {"none"};  // none|low|high
    bool recalibrate = false;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    SentimentConfig sentiment;
    IfsNormalization ifs_normalization = IfsNormalization::CrossModel;
    CalibrationConfig calibration;
    GridSpec grid;
    std::vector<Date> plot_dates;

    // Parses the JSON config file; unknown model/risk/profile names or
    // empty lists raise ConfigError.
    static StudyConfig from_json_file(const std::string& path);
    void validate() const;
};

// Synthetic market: a known model prices the strike ladder, the
// settlement is drawn from that model's horizon distribution
// (optionally distorted by a behavioral state), and bid/ask spreads
// are layered on top.
struct SyntheticMarketSpec {
    ModelParams true_model = LnParams{0.2};
    int n_dates = 60;
    int tau_days = 28;
    double half_spread = 0.0025;  // relative half bid-ask spread
    int n_strikes = 13;
    double strike_width_stdevs = 2.0;
    double rate = 0.02;
    double start_forward = 100.0;
    Date start_date{2015, 1, 16};
    SentimentState distortion;  // neutral = undistorted market
    double alpha_tail = 0.05;
};

// Reads the "simulate" section of a JSON config file.
SyntheticMarketSpec synthetic_spec_from_json_file(const std::string& path);

// Writes chain.csv, settlements.csv, closes.csv, volumes.csv.
void simulate_market(const SyntheticMarketSpec& spec, std::uint64_t seed,
                     const std::string& out_dir);

struct StudyResult {
    std::vector<ScoreSummary> summaries;  // one per (model, risk, profile)
    int n_dates = 0;
    int n_failed = 0;
    std::vector<std::string> failures;  // "<date>: <reason>"
};

// Full out-of-sample study: sequential over observation dates so no
// proxy history, PIT window, or KDE sample ever sees the future.
// Writes scores.csv and pit_<variant>.csv to config.out_dir; aborts
// (StudyAbortError) when more than 20% of dates fail.
StudyResult run_study(const StudyConfig& config);

// Per-date density panels (risk-neutral, risk-adjusted, real-world
// densities plus the kernel columns), the trigger time series, and
// the final score bars, for the dates listed in config.plot_dates.
StudyResult emit_plot_data(const StudyConfig& config);

// Ingestion dry run: parse + filter the chain and write a per-date
// diagnostic table (quote counts, ATM vol) to out_dir/ingest.csv.
void ingest_report(const StudyConfig& config);

// Render scores.csv from a completed study as an aligned text table
// (CRPS shown in percent).
std::string render_report(const std::string& scores_csv_path);

}  // namespace rwd
