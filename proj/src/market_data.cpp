#include "rwd/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rwd/black76.hpp"
#include "rwd/common.hpp"
#include "rwd/csv.hpp"

namespace rwd {

namespace {

double parse_number(const std::string& s, int lineno, const char* field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad " +
                         std::string(field) + " value '" + s + "'");
    }
}

// Count of monotonicity + convexity violations over call mids.
int count_violations(const std::vector<double>& strikes,
                     const std::vector<double>& mids) {
    constexpr double eps = 1e-12;
    int n = 0;
    for (std::size_t i = 0; i + 1 < mids.size(); ++i) {
        if (mids[i + 1] >= mids[i] - eps) ++n;
    }
    for (std::size_t i = 1; i + 1 < mids.size(); ++i) {
        const double s1 = (mids[i] - mids[i - 1]) / (strikes[i] - strikes[i - 1]);
        const double s2 = (mids[i + 1] - mids[i]) / (strikes[i + 1] - strikes[i]);
        if (s2 < s1 - eps) ++n;
    }
    return n;
}

}  // namespace

std::vector<CrossSection> parse_option_chain(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_obs = table.column("obs_date");
    const int c_exp = table.column("expiry_date");
    const int c_fwd = table.column("forward");
    const int c_rate = table.column("rate");
    const int c_strike = table.column("strike");
    const int c_side = table.column("side");
    const int c_bid = table.column("bid");
    const int c_ask = table.column("ask");
    if (c_obs < 0 || c_exp < 0 || c_fwd < 0 || c_rate < 0 || c_strike < 0 ||
        c_side < 0 || c_bid < 0 || c_ask < 0) {
        throw ParseError("option-chain header must be "
                         "obs_date,expiry_date,forward,rate,strike,side,bid,ask");
    }
    if (table.rows.empty()) throw DataError("empty option-chain file: " + path);

    std::map<std::pair<std::int64_t, std::int64_t>, CrossSection> groups;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int lineno = table.line_numbers[r];
        if (row.size() != table.header.size()) {
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(row.size()));
        }
        if (row[c_bid].empty() || row[c_ask].empty()) continue;  // missing quote

        OptionQuote q;
        q.strike = parse_number(row[c_strike], lineno, "strike");
        q.bid = parse_number(row[c_bid], lineno, "bid");
        q.ask = parse_number(row[c_ask], lineno, "ask");
        const std::string& side = row[c_side];
        if (side == "C") {
            q.side = OptionSide::Call;
        } else if (side == "P") {
            q.side = OptionSide::Put;
        } else {
            throw ParseError("line " + std::to_string(lineno) +
                             ": side must be C or P, got '" + side + "'");
        }
        if (!(q.strike > 0.0) || !(q.bid > 0.0) || q.ask < q.bid) {
            throw ParseError("line " + std::to_string(lineno) +
                             ": quote violates bid > 0, ask >= bid, strike > 0");
        }

        Date obs, exp;
        try {
            obs = Date::parse(row[c_obs]);
            exp = Date::parse(row[c_exp]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto& section = groups[{obs.serial(), exp.serial()}];
        if (section.quotes.empty()) {
            section.obs_date = obs;
            section.expiry_date = exp;
            section.tau = year_fraction_act360(obs, exp);
            section.forward = parse_number(row[c_fwd], lineno, "forward");
            section.rate = parse_number(row[c_rate], lineno, "rate");
        }
        section.quotes.push_back(q);
    }

    std::vector<CrossSection> out;
    out.reserve(groups.size());
    for (auto& [key, section] : groups) {
        std::stable_sort(section.quotes.begin(), section.quotes.end(),
                         [](const OptionQuote& a, const OptionQuote& b) {
                             return a.strike < b.strike;
                         });
        if (!(section.tau > 0.0)) {
            throw DataError("cross-section " + section.obs_date.to_string() +
                            " has non-positive horizon");
        }
        if (!(section.forward > 0.0)) {
            throw DataError("cross-section " + section.obs_date.to_string() +
                            " has non-positive forward");
        }
        out.push_back(std::move(section));
    }
    return out;
}

std::vector<SettlementObservation> parse_settlements(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_exp = table.column("expiry_date");
    const int c_set = table.column("settlement");
    if (c_exp < 0 || c_set < 0) {
        throw ParseError("settlement header must be expiry_date,settlement");
    }
    std::vector<SettlementObservation> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        SettlementObservation s;
        s.expiry_date = Date::parse(table.rows[r][c_exp]);
        s.settlement = parse_number(table.rows[r][c_set], table.line_numbers[r],
                                    "settlement");
        if (!(s.settlement > 0.0)) {
            throw ParseError("line " + std::to_string(table.line_numbers[r]) +
                             ": settlement must be positive");
        }
        out.push_back(s);
    }
    return out;
}

double put_call_parity_convert(const OptionQuote& quote, double forward,
                               double rate, double tau) {
    if (quote.side != OptionSide::Put) {
        throw DataError("put_call_parity_convert: quote is not a put");
    }
    return quote.mid() + std::exp(-rate * tau) * (forward - quote.strike);
}

CrossSection arbitrage_filter(const CrossSection& section) {
    CrossSection out = section;
    auto& quotes = out.quotes;
    auto& mids = out.call_mids;
    if (mids.size() != quotes.size()) {
        throw DataError("arbitrage_filter: call-equivalent mids missing");
    }

    while (true) {
        std::vector<double> strikes(quotes.size());
        for (std::size_t i = 0; i < quotes.size(); ++i) strikes[i] = quotes[i].strike;
        if (count_violations(strikes, mids) == 0) break;
        if (quotes.size() <= kMinQuotes) {
            throw DataError("insufficient data on " + out.obs_date.to_string() +
                            ": arbitrage filter would leave fewer than 8 quotes");
        }
        // Remove the quote that resolves the most violations; ties go
        // to the larger bid-ask spread.
        std::size_t best = 0;
        int best_remaining = -1;
        double best_spread = -1.0;
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            std::vector<double> ks, ms;
            ks.reserve(quotes.size() - 1);
            ms.reserve(quotes.size() - 1);
            for (std::size_t j = 0; j < quotes.size(); ++j) {
                if (j == i) continue;
                ks.push_back(quotes[j].strike);
                ms.push_back(mids[j]);
            }
            const int remaining = count_violations(ks, ms);
            const double spread = quotes[i].spread();
            if (best_remaining < 0 || remaining < best_remaining ||
                (remaining == best_remaining && spread > best_spread)) {
                best = i;
                best_remaining = remaining;
                best_spread = spread;
            }
        }
        quotes.erase(quotes.begin() + static_cast<std::ptrdiff_t>(best));
        mids.erase(mids.begin() + static_cast<std::ptrdiff_t>(best));
    }

    if (quotes.size() < kMinQuotes) {
        throw DataError("insufficient data on " + out.obs_date.to_string() + ": " +
                        std::to_string(quotes.size()) + " quotes after filtering");
    }
    return out;
}

CrossSection prepare_cross_section(const CrossSection& raw) {
    CrossSection work = raw;
    work.quotes.clear();
    work.call_mids.clear();

    // OTM/ATM selection and put conversion; on a duplicated strike the
    // call is retained.
    for (const OptionQuote& q : raw.quotes) {
        const bool keep = q.side == OptionSide::Put ? q.strike <= raw.forward
                                                    : q.strike >= raw.forward;
        if (!keep) continue;
        const double mid = q.side == OptionSide::Put
                               ? put_call_parity_convert(q, raw.forward, raw.rate, raw.tau)
                               : q.mid();
        if (!(mid > 0.0)) continue;  // negative call equivalent: excluded

        bool duplicate = false;
        for (std::size_t i = 0; i < work.quotes.size(); ++i) {
            if (work.quotes[i].strike == q.strike) {
                duplicate = true;
                if (work.quotes[i].side == OptionSide::Put && q.side == OptionSide::Call) {
                    work.quotes[i] = q;
                    work.call_mids[i] = mid;
                }
                break;
            }
        }
        if (!duplicate) {
            work.quotes.push_back(q);
            work.call_mids.push_back(mid);
        }
    }
    return arbitrage_filter(work);
}

double atm_implied_vol(const CrossSection& section) {
    if (section.quotes.size() < 2 || section.call_mids.size() != section.quotes.size()) {
        throw DataError("atm_implied_vol: need at least 2 call-equivalent quotes");
    }
    // Two closest-to-the-money strikes.
    std::vector<std::size_t> order(section.quotes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(section.quotes[a].strike - section.forward) <
               std::fabs(section.quotes[b].strike - section.forward);
    });
    const std::size_t i1 = order[0];
    const std::size_t i2 = order[1];
    auto invert = [&](std::size_t i) {
        try {
            return black76_implied_vol(section.call_mids[i], section.forward,
                                       section.quotes[i].strike, section.tau,
                                       section.rate);
        } catch (const NumericalError& e) {
            throw NumericalError("atm_implied_vol: IV inversion failed at strike " +
                                 std::to_string(section.quotes[i].strike) + ": " +
                                 e.what());
        }
    };
    const double k1 = section.quotes[i1].strike;
    const double iv1 = invert(i1);
    if (std::fabs(k1 - section.forward) < 1e-12 * section.forward) return iv1;
    const double k2 = section.quotes[i2].strike;
    const double iv2 = invert(i2);
    return iv1 + (iv2 - iv1) * (section.forward - k1) / (k2 - k1);
}

}  // namespace rwd
