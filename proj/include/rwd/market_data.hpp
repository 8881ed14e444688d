#pragma once

#include <string>
#include <vector>

#include "rwd/dates.hpp"

namespace rwd {

enum class OptionSide { Call, Put };

struct OptionQuote {
    double strike = 0.0;
    double bid = 0.0;
    double ask = 0.0;
    OptionSide side = OptionSide::Call;

    double mid() const { return 0.5 * (bid + ask); }
    double spread() const { return ask - bid; }
};

// One observation date's filtered option quotes plus the market state
// needed to price them. After filtering, quotes are call-equivalent
// mids sorted by strictly increasing strike.
struct CrossSection {
    Date obs_date;
    Date expiry_date;
    double tau = 0.0;      // act/360 year fraction
    double forward = 0.0;  // F_t
    double rate = 0.0;     // continuously compounded
    std::vector<OptionQuote> quotes;
    std::vector<double> call_mids;  // call-equivalent mid per quote
};

struct SettlementObservation {
    Date expiry_date;
    double settlement = 0.0;
};

// Minimum surviving quotes per cross-section.
inline constexpr std::size_t kMinQuotes = 8;

// Option-chain CSV -> one raw CrossSection per (obs_date, expiry)
// pair. Rows with missing bid or ask are dropped; quotes end up
// sorted by strike. No arbitrage filtering yet.
std::vector<CrossSection> parse_option_chain(const std::string& path);

// Settlement CSV: expiry_date,settlement.
std::vector<SettlementObservation> parse_settlements(const std::string& path);

// Futures-style parity: C = P_mid + e^{-r tau} (F - K).
double put_call_parity_convert(const OptionQuote& quote, double forward,
                               double rate, double tau);

// Keeps OTM/ATM quotes, converts puts to call equivalents, then
// greedily removes quotes until the mids are strictly decreasing and
// convex in strike. Throws DataError when fewer than 8 survive.
CrossSection arbitrage_filter(const CrossSection& section);

// Full ingestion pipeline for one raw cross-section.
CrossSection prepare_cross_section(const CrossSection& raw);

// ATM implied volatility: Black-76 inversion of the two strikes
// nearest the forward, linearly interpolated to K = F.
double atm_implied_vol(const CrossSection& section);

}  // namespace rwd
