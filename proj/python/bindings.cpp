#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "rwd/black76.hpp"
#include "rwd/calibration.hpp"
#include "rwd/char_models.hpp"
#include "rwd/common.hpp"
#include "rwd/dates.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/evaluation.hpp"
#include "rwd/market_data.hpp"
#include "rwd/pipeline.hpp"
#include "rwd/sentiment.hpp"
#include "rwd/stats.hpp"

namespace py = pybind11;
using namespace rwd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Option-implied density forecasting core";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<StudyAbortError>(m, "StudyAbortError");

    // ---- dates -------------------------------------------------------
    py::class_<Date>(m, "Date")
        .def(py::init<>())
        .def(py::init([](int y, int mth, int d) { return Date{y, mth, d}; }),
             py::arg("year"), py::arg("month"), py::arg("day"))
        .def_readwrite("year", &Date::year)
        .def_readwrite("month", &Date::month)
        .def_readwrite("day", &Date::day)
        .def("serial", &Date::serial)
        .def("add_days", &Date::add_days)
        .def_static("parse", &Date::parse)
        .def_static("from_serial", &Date::from_serial)
        .def("__str__", &Date::to_string)
        .def("__repr__",
             [](const Date& d) { return "Date(" + d.to_string() + ")"; })
        .def(py::self == py::self)
        .def(py::self != py::self)
        .def(py::self < py::self)
        .def(py::self <= py::self)
        .def(py::self > py::self)
        .def(py::self >= py::self);
    m.def("year_fraction_act360", &year_fraction_act360);

    // ---- Black-76 ----------------------------------------------------
    m.def("black76_call", &black76_call, py::arg("forward"), py::arg("strike"),
          py::arg("vol"), py::arg("tau"), py::arg("rate"));
    m.def("black76_put", &black76_put, py::arg("forward"), py::arg("strike"),
          py::arg("vol"), py::arg("tau"), py::arg("rate"));
    m.def("black76_implied_vol", &black76_implied_vol, py::arg("call_price"),
          py::arg("forward"), py::arg("strike"), py::arg("tau"), py::arg("rate"));

    // ---- model parameters and pricing --------------------------------
    py::class_<LnParams>(m, "LnParams")
        .def(py::init<>())
        .def(py::init([](double s) { return LnParams{s}; }), py::arg("sigma"))
        .def_readwrite("sigma", &LnParams::sigma);
    py::class_<HestonParams>(m, "HestonParams")
        .def(py::init<>())
        .def(py::init([](double v0, double v_bar, double kappa, double eta,
                         double rho) {
                 return HestonParams{v0, v_bar, kappa, eta, rho};
             }),
             py::arg("v0"), py::arg("v_bar"), py::arg("kappa"), py::arg("eta"),
             py::arg("rho"))
        .def_readwrite("v0", &HestonParams::v0)
        .def_readwrite("v_bar", &HestonParams::v_bar)
        .def_readwrite("kappa", &HestonParams::kappa)
        .def_readwrite("eta", &HestonParams::eta)
        .def_readwrite("rho", &HestonParams::rho);
    py::class_<BatesParams>(m, "BatesParams")
        .def(py::init<>())
        .def(py::init([](HestonParams h, double li, double lm, double ls) {
                 return BatesParams{h, li, lm, ls};
             }),
             py::arg("heston"), py::arg("jump_intensity"), py::arg("jump_mean"),
             py::arg("jump_std"))
        .def_readwrite("heston", &BatesParams::heston)
        .def_readwrite("jump_intensity", &BatesParams::jump_intensity)
        .def_readwrite("jump_mean", &BatesParams::jump_mean)
        .def_readwrite("jump_std", &BatesParams::jump_std);
    py::class_<VgParams>(m, "VgParams")
        .def(py::init<>())
        .def(py::init([](double s, double n, double t) {
                 return VgParams{s, n, t};
             }),
             py::arg("sigma"), py::arg("nu"), py::arg("theta"))
        .def_readwrite("sigma", &VgParams::sigma)
        .def_readwrite("nu", &VgParams::nu)
        .def_readwrite("theta", &VgParams::theta);

    py::enum_<ModelKind>(m, "ModelKind")
        .value("LN", ModelKind::LN)
        .value("HESTON", ModelKind::Heston)
        .value("BATES", ModelKind::Bates)
        .value("VG", ModelKind::VG);

    m.def("model_name", &model_name);
    m.def("model_kind", &model_kind);
    m.def("validate_params", &validate_params);
    m.def("params_admissible", &params_admissible);
    m.def("characteristic_function", &characteristic_function, py::arg("params"),
          py::arg("w"), py::arg("tau"), py::arg("forward"));
    m.def("log_return_stdev", &log_return_stdev);
    m.def("cdf_from_cf", &cdf_from_cf, py::arg("params"), py::arg("strikes"),
          py::arg("tau"), py::arg("forward"));
    m.def("price_european_call", &price_european_call, py::arg("params"),
          py::arg("strike"), py::arg("tau"), py::arg("forward"), py::arg("rate"));
    m.def("price_european_calls", &price_european_calls, py::arg("params"),
          py::arg("strikes"), py::arg("tau"), py::arg("forward"), py::arg("rate"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def(py::init([](std::size_t points, double stdevs) {
                 return GridSpec{points, stdevs};
             }),
             py::arg("points"), py::arg("stdevs"))
        .def_readwrite("points", &GridSpec::points)
        .def_readwrite("stdevs", &GridSpec::stdevs);

    m.def("density_from_model", &density_from_model, py::arg("params"),
          py::arg("tau"), py::arg("forward"), py::arg("spec") = GridSpec{});

    // ---- density grids and transforms ---------------------------------
    py::class_<DensityGrid>(m, "DensityGrid")
        .def(py::init<>())
        .def_readwrite("returns", &DensityGrid::returns)
        .def_readwrite("pdf", &DensityGrid::pdf)
        .def_readwrite("cdf", &DensityGrid::cdf)
        .def_readwrite("forward", &DensityGrid::forward)
        .def_readwrite("tau", &DensityGrid::tau)
        .def("__len__", &DensityGrid::size);

    py::class_<GridMoments>(m, "GridMoments")
        .def_readonly("mean", &GridMoments::mean)
        .def_readonly("variance", &GridMoments::variance)
        .def_readonly("skewness", &GridMoments::skewness)
        .def_readonly("kurtosis", &GridMoments::kurtosis);

    m.def("trapezoid", [](const std::vector<double>& xs,
                          const std::vector<double>& ys) {
        return trapezoid(xs, ys);
    });
    m.def("normalize", &normalize);
    m.def("moments", &moments);
    m.def("quantile", &quantile);
    m.def("cdf_at", &cdf_at);
    m.def("pdf_at", &pdf_at);
    m.def("crra_adjust", &crra_adjust, py::arg("grid"), py::arg("gamma"));
    m.def("utility_adjust", &utility_adjust, py::arg("grid"),
          py::arg("marginal_utility"));

    py::class_<BkmMoments>(m, "BkmMoments")
        .def_readonly("vol", &BkmMoments::vol)
        .def_readonly("skew", &BkmMoments::skew)
        .def_readonly("kurt", &BkmMoments::kurt)
        .def_readonly("v", &BkmMoments::v)
        .def_readonly("w", &BkmMoments::w)
        .def_readonly("x", &BkmMoments::x)
        .def_readonly("mu", &BkmMoments::mu)
        .def_readonly("var_horizon", &BkmMoments::var_horizon);
    m.def("bkm_moments", &bkm_moments);

    py::class_<IrraResult>(m, "IrraResult")
        .def_readonly("gamma", &IrraResult::gamma)
        .def_readonly("clamped", &IrraResult::clamped)
        .def_readonly("residual", &IrraResult::residual);
    m.def("irra_estimate", &irra_estimate, py::arg("bkm"),
          py::arg("physical_var_horizon"));
    m.def("realized_variance", [](const std::vector<double>& closes, double tau) {
        return realized_variance(closes, tau);
    });

    // ---- market data ---------------------------------------------------
    py::enum_<OptionSide>(m, "OptionSide")
        .value("CALL", OptionSide::Call)
        .value("PUT", OptionSide::Put);
    py::class_<OptionQuote>(m, "OptionQuote")
        .def(py::init<>())
        .def_readwrite("strike", &OptionQuote::strike)
        .def_readwrite("bid", &OptionQuote::bid)
        .def_readwrite("ask", &OptionQuote::ask)
        .def_readwrite("side", &OptionQuote::side)
        .def("mid", &OptionQuote::mid)
        .def("spread", &OptionQuote::spread);
    py::class_<CrossSection>(m, "CrossSection")
        .def(py::init<>())
        .def_readwrite("obs_date", &CrossSection::obs_date)
        .def_readwrite("expiry_date", &CrossSection::expiry_date)
        .def_readwrite("tau", &CrossSection::tau)
        .def_readwrite("forward", &CrossSection::forward)
        .def_readwrite("rate", &CrossSection::rate)
        .def_readwrite("quotes", &CrossSection::quotes)
        .def_readwrite("call_mids", &CrossSection::call_mids);
    py::class_<SettlementObservation>(m, "SettlementObservation")
        .def_readwrite("expiry_date", &SettlementObservation::expiry_date)
        .def_readwrite("settlement", &SettlementObservation::settlement);

    m.def("parse_option_chain", &parse_option_chain);
    m.def("parse_settlements", &parse_settlements);
    m.def("put_call_parity_convert", &put_call_parity_convert);
    m.def("arbitrage_filter", &arbitrage_filter);
    m.def("prepare_cross_section", &prepare_cross_section);
    m.def("atm_implied_vol", &atm_implied_vol);

    // ---- calibration -----------------------------------------------------
    py::class_<CalibrationConfig>(m, "CalibrationConfig")
        .def(py::init<>())
        .def_readwrite("restarts", &CalibrationConfig::restarts)
        .def_readwrite("max_iters", &CalibrationConfig::max_iters)
        .def_readwrite("seed", &CalibrationConfig::seed);
    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("params", &CalibrationResult::params)
        .def_readonly("sre", &CalibrationResult::sre)
        .def_readonly("iterations", &CalibrationResult::iterations)
        .def_readonly("converged", &CalibrationResult::converged)
        .def_readonly("restarts_used", &CalibrationResult::restarts_used)
        .def_readonly("worst_quote_sre", &CalibrationResult::worst_quote_sre);
    m.def("sre_objective", &sre_objective);
    m.def("calibrate", &calibrate, py::arg("kind"), py::arg("section"),
          py::arg("config") = CalibrationConfig{});

    py::class_<VolSurface>(m, "VolSurface")
        .def(py::init<std::vector<double>, std::vector<double>>(),
             py::arg("strikes"), py::arg("vols"))
        .def("vol_at", &VolSurface::vol_at)
        .def_property_readonly("strikes", &VolSurface::strikes)
        .def_property_readonly("vols", &VolSurface::vols);
    m.def("build_vol_surface", &build_vol_surface);
    m.def(
        "blmalz_density",
        [](const VolSurface& surface, const CrossSection& section, double delta,
           const GridSpec& spec) {
            BlmalzDiagnostics diag;
            DensityGrid g = blmalz_density(surface, section, delta, spec, &diag);
            return py::make_tuple(g, diag.clamped_mass, diag.clamp_warning);
        },
        py::arg("surface"), py::arg("section"), py::arg("delta"),
        py::arg("spec") = GridSpec{},
        "Returns (grid, clamped_mass, clamp_warning)");

    // ---- behavioral layer -------------------------------------------------
    py::class_<SentimentState>(m, "SentimentState")
        .def(py::init<>())
        .def_readwrite("theta1", &SentimentState::theta1)
        .def_readwrite("theta2", &SentimentState::theta2)
        .def_readwrite("theta3", &SentimentState::theta3)
        .def_readwrite("alpha_iv", &SentimentState::alpha_iv)
        .def_readwrite("alpha_tv", &SentimentState::alpha_tv)
        .def_readwrite("skew", &SentimentState::skew)
        .def_readwrite("mean_active", &SentimentState::mean_active)
        .def_readwrite("vol_active", &SentimentState::vol_active)
        .def_readwrite("tail_active", &SentimentState::tail_active)
        .def("neutral", &SentimentState::neutral);
    py::class_<SentimentCalibration>(m, "SentimentCalibration")
        .def_readwrite("k1", &SentimentCalibration::k1)
        .def_readwrite("k2", &SentimentCalibration::k2)
        .def_readwrite("k3", &SentimentCalibration::k3)
        .def_readwrite("profile", &SentimentCalibration::profile)
        .def_static("low", &SentimentCalibration::low)
        .def_static("high", &SentimentCalibration::high)
        .def_static("from_profile", &SentimentCalibration::from_profile);
    py::class_<SentimentConfig>(m, "SentimentConfig")
        .def(py::init<>())
        .def_readwrite("profile", &SentimentConfig::profile)
        .def_readwrite("alpha_tail", &SentimentConfig::alpha_tail)
        .def_readwrite("burn_in", &SentimentConfig::burn_in)
        .def_readwrite("august_adjust", &SentimentConfig::august_adjust)
        .def_readwrite("august_factor", &SentimentConfig::august_factor)
        .def_readwrite("printed_tail_sign", &SentimentConfig::printed_tail_sign);
    py::class_<ProxyHistory>(m, "ProxyHistory")
        .def(py::init<>())
        .def_readwrite("dates", &ProxyHistory::dates)
        .def_readwrite("values", &ProxyHistory::values)
        .def("append", &ProxyHistory::append)
        .def("before", &ProxyHistory::before)
        .def("__len__", &ProxyHistory::size);

    m.def("delta_iv",
          [](double current, const std::vector<double>& priors)
              -> std::optional<double> {
              double out = 0.0;
              if (!delta_iv(current, priors, &out)) return std::nullopt;
              return out;
          });
    m.def("delta_tv",
          [](double current, const std::vector<double>& priors, bool is_august,
             bool august_adjust, double august_factor) -> std::optional<double> {
              double out = 0.0;
              if (!delta_tv(current, priors, is_august, august_adjust,
                            august_factor, &out)) {
                  return std::nullopt;
              }
              return out;
          },
          py::arg("current"), py::arg("priors"), py::arg("is_august") = false,
          py::arg("august_adjust") = false, py::arg("august_factor") = 1.0);
    m.def("kde_quantile",
          [](const std::vector<double>& prior, double new_obs,
             std::size_t burn_in) { return kde_quantile(prior, new_obs, burn_in); },
          py::arg("prior"), py::arg("new_obs"), py::arg("burn_in") = 24);
    m.def("theta1", &theta1, py::arg("alpha_iv"), py::arg("rate"), py::arg("tau"),
          py::arg("k1"));
    m.def("theta2", &theta2, py::arg("alpha_tv"), py::arg("k2"));
    m.def("theta3", &theta3, py::arg("skew"), py::arg("k3"),
          py::arg("printed_sign") = false);
    m.def(
        "mean_variance_shift",
        [](const DensityGrid& grid, double t1, double t2) {
            bool warn = false;
            DensityGrid out = mean_variance_shift(grid, t1, t2, &warn);
            return py::make_tuple(out, warn);
        },
        py::arg("grid"), py::arg("theta1"), py::arg("theta2"),
        "Returns (grid, clamp_warning)");
    m.def("tail_shift", &tail_shift, py::arg("grid"), py::arg("theta3"),
          py::arg("alpha_tail") = 0.05);
    m.def("real_world_density", &real_world_density, py::arg("risk_adjusted"),
          py::arg("state"), py::arg("alpha_tail") = 0.05);
    m.def("sentiment_function", &sentiment_function);
    m.def("behavioral_sdf", &behavioral_sdf, py::arg("risk_adjusted"),
          py::arg("real_world"), py::arg("rate"), py::arg("tau"),
          py::arg("marginal_utility"));
    m.def("sentiment_state", &sentiment_state, py::arg("asof"),
          py::arg("iv_history"), py::arg("tv_history"), py::arg("delta_iv_now"),
          py::arg("delta_tv_now"), py::arg("skew_now"), py::arg("rate"),
          py::arg("tau"), py::arg("config"));

    // ---- evaluation ---------------------------------------------------------
    py::class_<ForecastRecord>(m, "ForecastRecord")
        .def(py::init<>())
        .def_readwrite("obs_date", &ForecastRecord::obs_date)
        .def_readwrite("model_id", &ForecastRecord::model_id)
        .def_readwrite("density", &ForecastRecord::density)
        .def_readwrite("realization", &ForecastRecord::realization);
    py::class_<LogScoreResult>(m, "LogScoreResult")
        .def_readonly("total", &LogScoreResult::total)
        .def_readonly("floored", &LogScoreResult::floored);
    py::class_<PitSeries>(m, "PitSeries")
        .def_readonly("pits", &PitSeries::pits)
        .def_readonly("t_pits", &PitSeries::t_pits);
    py::class_<ScoreSummary>(m, "ScoreSummary")
        .def_readonly("model_id", &ScoreSummary::model_id)
        .def_readonly("total_log_score", &ScoreSummary::total_log_score)
        .def_readonly("crps_mean", &ScoreSummary::crps_mean)
        .def_readonly("pits", &ScoreSummary::pits)
        .def_readonly("t_pits", &ScoreSummary::t_pits)
        .def_readonly("p_lr3", &ScoreSummary::p_lr3)
        .def_readonly("p_jb", &ScoreSummary::p_jb)
        .def_readonly("p_ks", &ScoreSummary::p_ks)
        .def_readonly("l_bar", &ScoreSummary::l_bar)
        .def_readonly("crps_bar", &ScoreSummary::crps_bar)
        .def_readonly("stat_bar", &ScoreSummary::stat_bar)
        .def_readonly("ifs", &ScoreSummary::ifs)
        .def_readonly("floored", &ScoreSummary::floored);
    py::enum_<IfsNormalization>(m, "IfsNormalization")
        .value("CROSS_MODEL", IfsNormalization::CrossModel)
        .value("WITHIN_MODEL", IfsNormalization::WithinModel);

    m.def("log_score", [](const std::vector<ForecastRecord>& e) {
        return log_score(e);
    });
    m.def("crps_single", &crps_single);
    m.def("crps_aggregate", [](const std::vector<ForecastRecord>& e) {
        return crps_aggregate(e);
    });
    m.def("pit_series", [](const std::vector<ForecastRecord>& e) {
        return pit_series(e);
    });
    m.def("berkowitz_lr3", [](const std::vector<double>& t) {
        return berkowitz_lr3(t);
    });
    m.def("jarque_bera", [](const std::vector<double>& t) {
        return jarque_bera(t);
    });
    m.def("ks_normal", [](const std::vector<double>& t) { return ks_normal(t); });
    m.def("summarize",
          [](const std::string& id, const std::vector<ForecastRecord>& e) {
              return summarize(id, e);
          });
    m.def(
        "ifs",
        [](std::vector<ScoreSummary> summaries,
           const std::vector<std::vector<double>>& per_date_log_scores,
           const std::vector<std::vector<double>>& per_date_crps,
           IfsNormalization normalization) {
            ifs(summaries, per_date_log_scores, per_date_crps, normalization);
            return summaries;
        },
        py::arg("summaries"),
        py::arg("per_date_log_scores") = std::vector<std::vector<double>>{},
        py::arg("per_date_crps") = std::vector<std::vector<double>>{},
        py::arg("normalization") = IfsNormalization::CrossModel);
    m.def(
        "recalibrate",
        [](const DensityGrid& grid, const std::vector<double>& past_t_pits,
           std::size_t min_history) {
            bool warned = false;
            DensityGrid out = recalibrate(grid, past_t_pits, min_history, &warned);
            return py::make_tuple(out, warned);
        },
        py::arg("grid"), py::arg("past_t_pits"), py::arg("min_history") = 24,
        "Returns (grid, warned)");

    // ---- pipeline --------------------------------------------------------
    py::enum_<RiskKind>(m, "RiskKind")
        .value("RN", RiskKind::RN)
        .value("CRRA2", RiskKind::Crra2)
        .value("CRRA4", RiskKind::Crra4)
        .value("IRRA", RiskKind::Irra);
    m.def("risk_name", &risk_name);
    m.def("parse_risk", &parse_risk);

    py::class_<DataPaths>(m, "DataPaths")
        .def(py::init<>())
        .def_readwrite("chain", &DataPaths::chain)
        .def_readwrite("settlements", &DataPaths::settlements)
        .def_readwrite("closes", &DataPaths::closes)
        .def_readwrite("volumes", &DataPaths::volumes);
    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("data", &StudyConfig::data)
        .def_readwrite("models", &StudyConfig::models)
        .def_readwrite("risks", &StudyConfig::risks)
        .def_readwrite("profiles", &StudyConfig::profiles)
        .def_readwrite("recalibrate", &StudyConfig::recalibrate)
        .def_readwrite("seed", &StudyConfig::seed)
        .def_readwrite("out_dir", &StudyConfig::out_dir)
        .def_readwrite("sentiment", &StudyConfig::sentiment)
        .def_readwrite("ifs_normalization", &StudyConfig::ifs_normalization)
        .def_readwrite("calibration", &StudyConfig::calibration)
        .def_readwrite("grid", &StudyConfig::grid)
        .def_readwrite("plot_dates", &StudyConfig::plot_dates)
        .def_static("from_json_file", &StudyConfig::from_json_file)
        .def("validate", &StudyConfig::validate);
    py::class_<SyntheticMarketSpec>(m, "SyntheticMarketSpec")
        .def(py::init<>())
        .def_readwrite("true_model", &SyntheticMarketSpec::true_model)
        .def_readwrite("n_dates", &SyntheticMarketSpec::n_dates)
        .def_readwrite("tau_days", &SyntheticMarketSpec::tau_days)
        .def_readwrite("half_spread", &SyntheticMarketSpec::half_spread)
        .def_readwrite("n_strikes", &SyntheticMarketSpec::n_strikes)
        .def_readwrite("strike_width_stdevs",
                       &SyntheticMarketSpec::strike_width_stdevs)
        .def_readwrite("rate", &SyntheticMarketSpec::rate)
        .def_readwrite("start_forward", &SyntheticMarketSpec::start_forward)
        .def_readwrite("start_date", &SyntheticMarketSpec::start_date)
        .def_readwrite("distortion", &SyntheticMarketSpec::distortion)
        .def_readwrite("alpha_tail", &SyntheticMarketSpec::alpha_tail);
    py::class_<StudyResult>(m, "StudyResult")
        .def_readonly("summaries", &StudyResult::summaries)
        .def_readonly("n_dates", &StudyResult::n_dates)
        .def_readonly("n_failed", &StudyResult::n_failed)
        .def_readonly("failures", &StudyResult::failures);

    m.def("synthetic_spec_from_json_file", &synthetic_spec_from_json_file);
    m.def("simulate_market", &simulate_market, py::arg("spec"), py::arg("seed"),
          py::arg("out_dir"));
    m.def("run_study", &run_study, py::call_guard<py::gil_scoped_release>());
    m.def("emit_plot_data", &emit_plot_data,
          py::call_guard<py::gil_scoped_release>());
    m.def("ingest_report", &ingest_report);
    m.def("render_report", &render_report);
}
