#include "rwd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <sstream>

#include "json.hpp"

#include "rwd/common.hpp"
#include "rwd/csv.hpp"
#include "rwd/density_ops.hpp"
#include "rwd/market_data.hpp"
#include "rwd/stats.hpp"

namespace rwd {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse failure in " + path + ": " + e.what());
    }
}

ModelParams model_params_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "LN") {
        return LnParams{j.value("sigma", 0.2)};
    }
    if (kind == "HESTON" || kind == "BATES") {
        HestonParams h;
        h.v0 = j.value("v0", 0.04);
        h.v_bar = j.value("v_bar", 0.04);
        h.kappa = j.value("kappa", 1.5);
        h.eta = j.value("eta", 0.5);
        h.rho = j.value("rho", -0.5);
        if (kind == "HESTON") return h;
        BatesParams b;
        b.heston = h;
        b.jump_intensity = j.value("jump_intensity", 0.5);
        b.jump_mean = j.value("jump_mean", -0.05);
        b.jump_std = j.value("jump_std", 0.1);
        return b;
    }
    if (kind == "VG") {
        VgParams v;
        v.sigma = j.value("sigma", 0.12);
        v.nu = j.value("nu", 0.2);
        v.theta = j.value("theta", -0.14);
        return v;
    }
    throw ConfigError("unknown model kind in config: " + kind);
}

const std::vector<std::string> kModelNames = {"LN", "HESTON", "BATES", "VG",
                                              "BLMALZ"};

}  // namespace

std::string risk_name(RiskKind risk) {
    switch (risk) {
        case RiskKind::RN: return "RN";
        case RiskKind::Crra2: return "CRRA2";
        case RiskKind::Crra4: return "CRRA4";
        case RiskKind::Irra: return "IRRA";
    }
    throw ConfigError("risk_name: unknown risk kind");
}

RiskKind parse_risk(const std::string& name) {
    if (name == "RN") return RiskKind::RN;
    if (name == "CRRA2") return RiskKind::Crra2;
    if (name == "CRRA4") return RiskKind::Crra4;
    if (name == "IRRA") return RiskKind::Irra;
    throw ConfigError("unknown risk profile: " + name);
}

void StudyConfig::validate() const {
    if (models.empty()) throw ConfigError("model list must be nonempty");
    if (risks.empty()) throw ConfigError("risk list must be nonempty");
    if (profiles.empty()) throw ConfigError("profile list must be nonempty");
    for (const std::string& m : models) {
        if (std::find(kModelNames.begin(), kModelNames.end(), m) ==
            kModelNames.end()) {
            throw ConfigError("unknown model: " + m);
        }
    }
    for (const std::string& p : profiles) {
        if (p != "none" && p != "low" && p != "high") {
            throw ConfigError("unknown sentiment profile: " + p);
        }
    }
    if (!(sentiment.alpha_tail > 0.0 && sentiment.alpha_tail < 0.5)) {
        throw ConfigError("sentiment.alpha_tail must be in (0, 0.5)");
    }
    if (data.chain.empty() || data.settlements.empty()) {
        throw ConfigError("data.chain and data.settlements are required");
    }
    if (std::find(risks.begin(), risks.end(), RiskKind::Irra) != risks.end() &&
        data.closes.empty()) {
        throw ConfigError("IRRA risk adjustment requires data.closes");
    }
}

StudyConfig StudyConfig::from_json_file(const std::string& path) {
    const json j = load_json(path);
    StudyConfig cfg;
    try {
        const json data = j.value("data", json::object());
        cfg.data.chain = data.value("chain", "");
        cfg.data.settlements = data.value("settlements", "");
        cfg.data.closes = data.value("closes", "");
        cfg.data.volumes = data.value("volumes", "");
        if (j.contains("models")) cfg.models = j["models"].get<std::vector<std::string>>();
        if (j.contains("risks")) {
            cfg.risks.clear();
            for (const auto& r : j["risks"]) cfg.risks.push_back(parse_risk(r.get<std::string>()));
        }
        if (j.contains("profiles")) cfg.profiles = j["profiles"].get<std::vector<std::string>>();
        cfg.recalibrate = j.value("recalibrate", false);
        cfg.seed = j.value("seed", std::uint64_t{42});
        cfg.out_dir = j.value("out_dir", std::string("out"));
        const json s = j.value("sentiment", json::object());
        cfg.sentiment.alpha_tail = s.value("alpha_tail", 0.05);
        cfg.sentiment.burn_in = s.value("burn_in", std::size_t{24});
        cfg.sentiment.august_adjust = s.value("august_adjust", false);
        cfg.sentiment.august_factor = s.value("august_factor", 1.0);
        cfg.sentiment.printed_tail_sign = s.value("printed_tail_sign", false);
        const json ifs_cfg = j.value("ifs", json::object());
        const std::string norm = ifs_cfg.value("normalization", std::string("cross_model"));
        if (norm == "cross_model") {
            cfg.ifs_normalization = IfsNormalization::CrossModel;
        } else if (norm == "within_model") {
            cfg.ifs_normalization = IfsNormalization::WithinModel;
        } else {
            throw ConfigError("ifs.normalization must be cross_model or within_model");
        }
        const json cal = j.value("calibration", json::object());
        cfg.calibration.restarts = cal.value("restarts", 5);
        cfg.calibration.max_iters = cal.value("max_iters", 400);
        cfg.calibration.seed = cal.value("seed", cfg.seed);
        const json grid = j.value("grid", json::object());
        cfg.grid.points = grid.value("points", std::size_t{2048});
        cfg.grid.stdevs = grid.value("stdevs", 10.0);
        if (j.contains("plot_dates")) {
            for (const auto& d : j["plot_dates"]) {
                cfg.plot_dates.push_back(Date::parse(d.get<std::string>()));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    } catch (const ParseError& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SyntheticMarketSpec synthetic_spec_from_json_file(const std::string& path) {
    const json root = load_json(path);
    const json j = root.value("simulate", json::object());
    SyntheticMarketSpec spec;
    try {
        if (j.contains("model")) spec.true_model = model_params_from_json(j["model"]);
        spec.n_dates = j.value("n_dates", 60);
        spec.tau_days = j.value("tau_days", 28);
        spec.half_spread = j.value("half_spread", 0.0025);
        spec.n_strikes = j.value("n_strikes", 13);
        spec.strike_width_stdevs = j.value("strike_width_stdevs", 2.0);
        spec.rate = j.value("rate", 0.02);
        spec.start_forward = j.value("start_forward", 100.0);
        if (j.contains("start_date")) {
            spec.start_date = Date::parse(j["start_date"].get<std::string>());
        }
        const json d = j.value("distortion", json::object());
        spec.distortion.theta1 = d.value("theta1", 0.0);
        spec.distortion.theta2 = d.value("theta2", 1.0);
        spec.distortion.theta3 = d.value("theta3", 0.0);
        spec.distortion.mean_active = spec.distortion.theta1 != 0.0;
        spec.distortion.vol_active = spec.distortion.theta2 != 1.0;
        spec.distortion.tail_active = spec.distortion.theta3 != 0.0;
        spec.alpha_tail = j.value("alpha_tail", 0.05);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed simulate config: ") + e.what());
    } catch (const ParseError& e) {
        throw ConfigError(std::string("malformed simulate config: ") + e.what());
    }
    return spec;
}

void simulate_market(const SyntheticMarketSpec& spec, std::uint64_t seed,
                     const std::string& out_dir) {
    if (spec.n_dates < 30) throw ConfigError("simulate: n_dates must be >= 30");
    if (spec.n_strikes < static_cast<int>(kMinQuotes)) {
        throw ConfigError("simulate: need at least 8 strikes");
    }
    validate_params(spec.true_model);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    auto chain = open_out(dir / "chain.csv");
    auto settlements = open_out(dir / "settlements.csv");
    auto closes = open_out(dir / "closes.csv");
    auto volumes = open_out(dir / "volumes.csv");
    chain << "obs_date,expiry_date,forward,rate,strike,side,bid,ask\n";
    settlements << "expiry_date,settlement\n";
    closes << "date,close\n";
    volumes << "date,volume\n";

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double tau = static_cast<double>(spec.tau_days) / 360.0;
    const double s = log_return_stdev(spec.true_model, tau);

    // The gross-return distribution is the same every cycle, so build
    // it once (optionally behaviorally distorted) on a unit forward.
    DensityGrid truth = density_from_model(spec.true_model, tau, 1.0);
    if (!spec.distortion.neutral()) {
        truth = real_world_density(truth, spec.distortion, spec.alpha_tail);
    }

    double forward = spec.start_forward;
    Date obs = spec.start_date;
    const double sd_daily = s / std::sqrt(static_cast<double>(spec.tau_days));

    for (int i = 0; i < spec.n_dates; ++i) {
        const Date expiry = obs.add_days(spec.tau_days);

        // strike ladder around the forward
        for (int k = 0; k < spec.n_strikes; ++k) {
            const double z = -spec.strike_width_stdevs +
                             2.0 * spec.strike_width_stdevs * k /
                                 (spec.n_strikes - 1);
            const double strike = forward * std::exp(z * s);
            const double call = price_european_call(spec.true_model, strike, tau,
                                                    forward, spec.rate);
            const bool is_put = strike < forward;
            double mid = call;
            if (is_put) {
                mid = call - std::exp(-spec.rate * tau) * (forward - strike);
            }
            if (spec.half_spread > 0.0) {
                mid *= 1.0 + spec.half_spread * (2.0 * unit(rng) - 1.0);
            }
            const double bid = mid * (1.0 - spec.half_spread);
            const double ask = mid * (1.0 + spec.half_spread);
            if (!(bid > 0.0)) continue;  // too far out of the money to quote
            chain << obs.to_string() << ',' << expiry.to_string() << ','
                  << fmt(forward) << ',' << fmt(spec.rate) << ',' << fmt(strike)
                  << ',' << (is_put ? 'P' : 'C') << ',' << fmt(bid) << ','
                  << fmt(ask) << '\n';
        }

        const double settlement = forward * quantile(truth, unit(rng));
        settlements << expiry.to_string() << ',' << fmt(settlement) << '\n';

        // daily closes: Brownian bridge in logs between forward and
        // settlement, so realized variance tracks the true model
        double log_px = std::log(forward);
        const double log_target = std::log(settlement);
        for (int d = 1; d <= spec.tau_days; ++d) {
            const int remaining = spec.tau_days - d;
            if (remaining == 0) {
                log_px = log_target;
            } else {
                const double drift = (log_target - log_px) / (remaining + 1);
                const double vol = sd_daily *
                                   std::sqrt(static_cast<double>(remaining) /
                                             (remaining + 1));
                log_px += drift + vol * gauss(rng);
            }
            closes << obs.add_days(d).to_string() << ',' << fmt(std::exp(log_px))
                   << '\n';
        }

        volumes << obs.to_string() << ','
                << fmt(1e5 * std::exp(0.4 * gauss(rng))) << '\n';

        obs = expiry;
        forward = settlement;
    }
}

namespace {

struct VariantAccum {
    std::string id;
    std::vector<std::string> dates;
    std::vector<double> log_terms;   // per-date price-space log densities
    std::vector<double> crps_roots;  // per-date sqrt of the CRPS integral
    std::vector<double> pits;
    std::vector<double> t_pits;

    void record(const Date& date, const DensityGrid& density, double realization) {
        dates.push_back(date.to_string());
        const double pd = pdf_at(density, realization) / density.forward;
        log_terms.push_back(std::log(std::max(pd, 1e-300)));
        crps_roots.push_back(std::sqrt(crps_single(density, realization)));
        const double pit =
            std::clamp(cdf_at(density, realization), 1e-10, 1.0 - 1e-10);
        pits.push_back(pit);
        t_pits.push_back(norm_inv(pit));
    }
};

struct CloseSeries {
    std::vector<long> serials;  // sorted
    std::vector<double> values;
};

CloseSeries parse_closes(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_date = table.column("date");
    const int c_close = table.column("close");
    if (c_date < 0 || c_close < 0) {
        throw ParseError(path + ": need columns date,close");
    }
    std::vector<std::pair<long, double>> rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        try {
            rows.emplace_back(Date::parse(table.rows[i][c_date]).serial(),
                              std::stod(table.rows[i][c_close]));
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(table.line_numbers[i]) +
                             ": malformed close row");
        }
    }
    std::sort(rows.begin(), rows.end());
    CloseSeries out;
    for (const auto& [d, v] : rows) {
        out.serials.push_back(d);
        out.values.push_back(v);
    }
    return out;
}

std::map<long, double> parse_dated_values(const std::string& path,
                                          const std::string& value_column) {
    const CsvTable table = read_csv(path);
    const int c_date = table.column("date");
    const int c_val = table.column(value_column);
    if (c_date < 0 || c_val < 0) {
        throw ParseError(path + ": need columns date," + value_column);
    }
    std::map<long, double> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        try {
            out[Date::parse(table.rows[i][c_date]).serial()] =
                std::stod(table.rows[i][c_val]);
        } catch (const std::exception&) {
            throw ParseError(path + " line " + std::to_string(table.line_numbers[i]) +
                             ": malformed row");
        }
    }
    return out;
}

// Everything one observation date contributes before risk/sentiment
// adjustments fan out.
struct DateContext {
    CrossSection section;
    double realization = 0.0;
    double atm_iv = 0.0;
    bool bkm_ok = false;
    BkmMoments bkm;
    double irra_gamma = 2.0;  // fallback when closes or BKM are unusable
    bool irra_fallback = true;
};

std::string variant_id(const std::string& model, RiskKind risk,
                       const std::string& profile) {
    std::string id = model + "-" + risk_name(risk);
    if (profile != "none") id += "-" + profile;
    return id;
}

StudyResult run_engine(const StudyConfig& config, bool write_scores,
                       bool write_plots) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);

    // ---- load inputs -------------------------------------------------
    std::vector<CrossSection> raw = parse_option_chain(config.data.chain);
    std::sort(raw.begin(), raw.end(), [](const CrossSection& a, const CrossSection& b) {
        return a.obs_date.serial() < b.obs_date.serial();
    });
    std::map<long, double> settle;
    for (const SettlementObservation& s : parse_settlements(config.data.settlements)) {
        settle[s.expiry_date.serial()] = s.settlement;
    }
    const bool need_irra = std::find(config.risks.begin(), config.risks.end(),
                                     RiskKind::Irra) != config.risks.end();
    CloseSeries closes;
    if (!config.data.closes.empty()) {
        closes = parse_closes(config.data.closes);
    } else if (need_irra) {
        throw ConfigError("IRRA risk profile requires data.closes");
    }
    std::map<long, double> volume_by_date;
    if (!config.data.volumes.empty()) {
        volume_by_date = parse_dated_values(config.data.volumes, "volume");
    }

    // ---- variant table ------------------------------------------------
    std::vector<VariantAccum> variants;
    std::map<std::string, std::size_t> index;
    for (const std::string& m : config.models) {
        for (RiskKind r : config.risks) {
            for (const std::string& p : config.profiles) {
                VariantAccum v;
                v.id = variant_id(m, r, p);
                index[v.id] = variants.size();
                variants.push_back(std::move(v));
            }
            if (config.recalibrate) {
                VariantAccum v;
                v.id = m + "-" + risk_name(r) + "-RC";
                index[v.id] = variants.size();
                variants.push_back(std::move(v));
            }
        }
    }

    const bool wants_sentiment =
        std::any_of(config.profiles.begin(), config.profiles.end(),
                    [](const std::string& p) { return p != "none"; });

    // proxy state, appended strictly after each date is processed
    std::vector<double> monthly_ivs;      // prior ATM implied vols
    std::vector<double> monthly_volumes;  // prior 20-day volumes
    ProxyHistory iv_hist{ProxyKind::DeltaIv, {}, {}};
    ProxyHistory tv_hist{ProxyKind::DeltaTv, {}, {}};

    StudyResult result;
    std::ofstream theta_series;
    if (write_plots) {
        theta_series = open_out(dir / "theta_series.csv");
        theta_series << "date,profile,alpha_iv,alpha_tv,skew,theta1,theta2,theta3\n";
    }
    std::ofstream run_log = open_out(dir / "run_log.txt");

    for (const CrossSection& raw_section : raw) {
        ++result.n_dates;
        const Date date = raw_section.obs_date;
        DateContext ctx;
        try {
            ctx.section = prepare_cross_section(raw_section);
            const auto it = settle.find(ctx.section.expiry_date.serial());
            if (it == settle.end()) {
                throw DataError("no settlement for expiry " +
                                ctx.section.expiry_date.to_string());
            }
            ctx.realization = it->second / ctx.section.forward;
            ctx.atm_iv = atm_implied_vol(ctx.section);
        } catch (const std::exception& e) {
            ++result.n_failed;
            result.failures.push_back(date.to_string() + ": " + e.what());
            run_log << "FAIL " << result.failures.back() << '\n';
            continue;
        }

        try {
            ctx.bkm = bkm_moments(ctx.section);
            ctx.bkm_ok = true;
        } catch (const std::exception& e) {
            run_log << "WARN " << date.to_string()
                    << ": model-free moments unavailable (" << e.what() << ")\n";
        }
        if (need_irra && ctx.bkm_ok && !closes.serials.empty()) {
            const auto end = std::upper_bound(closes.serials.begin(),
                                              closes.serials.end(),
                                              date.serial());
            const std::size_t n_avail =
                static_cast<std::size_t>(end - closes.serials.begin());
            if (n_avail >= 31) {
                const std::size_t lo = n_avail - 31;
                std::span<const double> window(closes.values.data() + lo, 31);
                try {
                    const double rv = realized_variance(window, ctx.section.tau);
                    ctx.irra_gamma = irra_estimate(ctx.bkm, rv).gamma;
                    ctx.irra_fallback = false;
                } catch (const std::exception& e) {
                    run_log << "WARN " << date.to_string()
                            << ": risk-aversion estimate fell back (" << e.what()
                            << ")\n";
                }
            }
        }

        // per-profile behavioral state from information strictly before
        // this date
        std::map<std::string, SentimentState> states;
        double div_now = 0.0, dtv_now = 1.0;
        bool div_ok = false, dtv_ok = false;
        if (wants_sentiment || write_plots) {
            div_ok = delta_iv(ctx.atm_iv, monthly_ivs, &div_now);
            const auto vit = volume_by_date.find(date.serial());
            if (vit != volume_by_date.end()) {
                dtv_ok = delta_tv(vit->second, monthly_volumes,
                                  date.month == 8, config.sentiment.august_adjust,
                                  config.sentiment.august_factor, &dtv_now);
            }
            for (const std::string& p : {std::string("low"), std::string("high")}) {
                const SentimentCalibration cal = SentimentCalibration::from_profile(p);
                SentimentState st;
                st.alpha_iv = div_ok ? kde_quantile(iv_hist.before(date), div_now,
                                                    config.sentiment.burn_in)
                                     : 0.5;
                st.alpha_tv = dtv_ok ? kde_quantile(tv_hist.before(date), dtv_now,
                                                    config.sentiment.burn_in)
                                     : 0.5;
                st.skew = ctx.bkm_ok ? ctx.bkm.skew : 0.0;
                st.theta1 = theta1(st.alpha_iv, ctx.section.rate, ctx.section.tau,
                                   cal.k1);
                st.theta2 = theta2(st.alpha_tv, cal.k2);
                st.theta3 = theta3(st.skew, cal.k3,
                                   config.sentiment.printed_tail_sign);
                st.mean_active = st.theta1 != 0.0;
                st.vol_active = st.theta2 != 1.0;
                st.tail_active = st.theta3 != 0.0;
                states[p] = st;
            }
        }

        const bool plot_this =
            write_plots && (config.plot_dates.empty() ||
                            std::any_of(config.plot_dates.begin(),
                                        config.plot_dates.end(),
                                        [&](const Date& d) {
                                            return d.serial() == date.serial();
                                        }));

        // ---- model densities -> risk adjustments -> profiles ----------
        for (const std::string& model : config.models) {
            DensityGrid f_q;
            bool fallback = false;
            try {
                if (model == "BLMALZ") {
                    const VolSurface surface = build_vol_surface(ctx.section);
                    f_q = blmalz_density(surface, ctx.section,
                                         0.01 * ctx.section.forward, config.grid);
                } else if (model == "LN") {
                    CalibrationConfig cal = config.calibration;
                    const CalibrationResult res =
                        calibrate(ModelKind::LN, ctx.section, cal);
                    f_q = density_from_model(res.params, ctx.section.tau,
                                             ctx.section.forward, config.grid);
                } else {
                    const ModelKind kind = model == "HESTON" ? ModelKind::Heston
                                           : model == "BATES" ? ModelKind::Bates
                                                              : ModelKind::VG;
                    const CalibrationResult res =
                        calibrate(kind, ctx.section, config.calibration);
                    f_q = density_from_model(res.params, ctx.section.tau,
                                             ctx.section.forward, config.grid);
                }
            } catch (const std::exception& e) {
                fallback = true;
                run_log << "WARN " << date.to_string() << ' ' << model
                        << ": fell back to the lognormal density (" << e.what()
                        << ")\n";
                f_q = density_from_model(LnParams{ctx.atm_iv}, ctx.section.tau,
                                         ctx.section.forward, config.grid);
            }
            (void)fallback;

            for (RiskKind risk : config.risks) {
                DensityGrid f_ra;
                double gamma = 0.0;
                switch (risk) {
                    case RiskKind::RN: f_ra = f_q; break;
                    case RiskKind::Crra2: gamma = 2.0; break;
                    case RiskKind::Crra4: gamma = 4.0; break;
                    case RiskKind::Irra: gamma = ctx.irra_gamma; break;
                }
                if (risk != RiskKind::RN) f_ra = crra_adjust(f_q, gamma);

                for (const std::string& profile : config.profiles) {
                    DensityGrid f = f_ra;
                    if (profile != "none") {
                        f = real_world_density(f_ra, states[profile],
                                               config.sentiment.alpha_tail);
                    }
                    variants[index[variant_id(model, risk, profile)]].record(
                        date, f, ctx.realization);

                    if (plot_this && profile != "none") {
                        auto panel = open_out(
                            dir / ("plot_" + date.to_string() + "_" + model + "_" +
                                   risk_name(risk) + "_" + profile + ".csv"));
                        panel << "x,f_q,f_ra,f_rw,m_crra,psi,m_rw\n";
                        const std::vector<double> psi = sentiment_function(f_ra, f);
                        const double df =
                            std::exp(-ctx.section.rate * ctx.section.tau);
                        for (std::size_t i = 0; i < f_q.size(); ++i) {
                            const double x = f_q.returns[i];
                            const double m_crra = std::pow(x, -gamma);
                            panel << fmt(x) << ',' << fmt(f_q.pdf[i]) << ','
                                  << fmt(f_ra.pdf[i]) << ',' << fmt(f.pdf[i]) << ','
                                  << fmt(m_crra) << ',' << fmt(psi[i]) << ','
                                  << fmt(df * m_crra * psi[i]) << '\n';
                        }
                    }
                }
                if (config.recalibrate) {
                    const std::size_t base =
                        index[variant_id(model, risk, "none")];
                    // expanding window of the base forecaster's own
                    // past transformed PITs; never sees today's
                    const DensityGrid f_rc = recalibrate(
                        f_ra, variants[base].t_pits, config.sentiment.burn_in);
                    variants[index[model + "-" + risk_name(risk) + "-RC"]].record(
                        date, f_rc, ctx.realization);
                }
            }
        }

        if (write_plots) {
            for (const std::string& p : {std::string("low"), std::string("high")}) {
                const SentimentState& st = states[p];
                theta_series << date.to_string() << ',' << p << ','
                             << fmt(st.alpha_iv) << ',' << fmt(st.alpha_tv) << ','
                             << fmt(st.skew) << ',' << fmt(st.theta1) << ','
                             << fmt(st.theta2) << ',' << fmt(st.theta3) << '\n';
            }
        }

        // only now does this date enter the proxy histories
        if (wants_sentiment || write_plots) {
            if (div_ok) iv_hist.append(date, div_now);
            if (dtv_ok) tv_hist.append(date, dtv_now);
            monthly_ivs.push_back(ctx.atm_iv);
            const auto vit = volume_by_date.find(date.serial());
            if (vit != volume_by_date.end()) monthly_volumes.push_back(vit->second);
        }
    }

    if (result.n_dates == 0) throw DataError("study has no observation dates");
    if (result.n_failed * 5 > result.n_dates) {
        throw StudyAbortError("study aborted: " + std::to_string(result.n_failed) +
                              " of " + std::to_string(result.n_dates) +
                              " dates failed (> 20%)");
    }

    // ---- scoring ------------------------------------------------------
    std::vector<std::vector<double>> per_date_l, per_date_crps;
    for (const VariantAccum& v : variants) {
        if (v.t_pits.size() < 20) {
            throw DataError("variant " + v.id +
                            " scored fewer than 20 dates; study too small");
        }
        ScoreSummary s;
        s.model_id = v.id;
        s.total_log_score = 0.0;
        for (double l : v.log_terms) s.total_log_score += l;
        double crps_sum = 0.0;
        for (double c : v.crps_roots) crps_sum += c;
        s.crps_mean = crps_sum / static_cast<double>(v.crps_roots.size());
        s.pits = v.pits;
        s.t_pits = v.t_pits;
        s.p_lr3 = berkowitz_lr3(v.t_pits);
        s.p_jb = jarque_bera(v.t_pits);
        s.p_ks = ks_normal(v.t_pits);
        result.summaries.push_back(std::move(s));
        per_date_l.push_back(v.log_terms);
        per_date_crps.push_back(v.crps_roots);
    }
    if (result.summaries.size() >= 2) {
        ifs(result.summaries, per_date_l, per_date_crps, config.ifs_normalization);
    } else {
        result.summaries.front().l_bar = 0.5;
        result.summaries.front().crps_bar = 0.5;
        result.summaries.front().stat_bar = 0.5;
        result.summaries.front().ifs = 0.5;
    }

    if (write_scores) {
        auto scores = open_out(dir / "scores.csv");
        scores << "model,L,crps,p_lr3,p_jb,p_ks,Lbar,crpsbar,statbar,ifs\n";
        for (const ScoreSummary& s : result.summaries) {
            scores << s.model_id << ',' << fmt(s.total_log_score) << ','
                   << fmt(s.crps_mean) << ',' << fmt(s.p_lr3) << ',' << fmt(s.p_jb)
                   << ',' << fmt(s.p_ks) << ',' << fmt(s.l_bar) << ','
                   << fmt(s.crps_bar) << ',' << fmt(s.stat_bar) << ','
                   << fmt(s.ifs) << '\n';
        }
        for (std::size_t i = 0; i < result.summaries.size(); ++i) {
            const ScoreSummary& s = result.summaries[i];
            auto pit_file = open_out(dir / ("pit_" + s.model_id + ".csv"));
            pit_file << "date,pit,t_pit\n";
            const VariantAccum& v = variants[i];
            for (std::size_t t = 0; t < v.pits.size(); ++t) {
                pit_file << v.dates[t] << ',' << fmt(v.pits[t]) << ','
                         << fmt(v.t_pits[t]) << '\n';
            }
        }
    }
    if (write_plots) {
        auto bars = open_out(dir / "ifs_bars.csv");
        bars << "model,ifs\n";
        for (const ScoreSummary& s : result.summaries) {
            bars << s.model_id << ',' << fmt(s.ifs) << '\n';
        }
    }
    return result;
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
    return run_engine(config, true, !config.plot_dates.empty());
}

StudyResult emit_plot_data(const StudyConfig& config) {
    return run_engine(config, false, true);
}

void ingest_report(const StudyConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    std::vector<CrossSection> raw = parse_option_chain(config.data.chain);
    std::sort(raw.begin(), raw.end(), [](const CrossSection& a, const CrossSection& b) {
        return a.obs_date.serial() < b.obs_date.serial();
    });
    auto out = open_out(std::filesystem::path(config.out_dir) / "ingest.csv");
    out << "obs_date,expiry_date,raw_quotes,filtered_quotes,atm_iv,status\n";
    for (const CrossSection& section : raw) {
        out << section.obs_date.to_string() << ','
            << section.expiry_date.to_string() << ',' << section.quotes.size()
            << ',';
        try {
            const CrossSection prepared = prepare_cross_section(section);
            out << prepared.quotes.size() << ','
                << fmt(atm_implied_vol(prepared)) << ",ok\n";
        } catch (const std::exception& e) {
            out << "0,,failed: " << e.what() << '\n';
        }
    }
}

std::string render_report(const std::string& scores_csv_path) {
    const CsvTable table = read_csv(scores_csv_path);
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-22s %12s %9s %7s %7s %7s %7s\n",
                  "model", "L", "crps(%)", "p_lr3", "p_jb", "p_ks", "IFS");
    out << line;
    const int c_model = table.column("model");
    const int c_l = table.column("L");
    const int c_crps = table.column("crps");
    const int c_lr3 = table.column("p_lr3");
    const int c_jb = table.column("p_jb");
    const int c_ks = table.column("p_ks");
    const int c_ifs = table.column("ifs");
    if (c_model < 0 || c_l < 0 || c_crps < 0 || c_ifs < 0) {
        throw ParseError(scores_csv_path + ": not a scores table");
    }
    for (const auto& row : table.rows) {
        std::snprintf(line, sizeof(line), "%-22s %12.2f %9.3f %7.3f %7.3f %7.3f %7.3f\n",
                      row[c_model].c_str(), std::stod(row[c_l]),
                      100.0 * std::stod(row[c_crps]), std::stod(row[c_lr3]),
                      std::stod(row[c_jb]), std::stod(row[c_ks]),
                      std::stod(row[c_ifs]));
        out << line;
    }
    return out.str();
}

}  // namespace rwd
