#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pegrisk/config.hpp"
#include "pegrisk/features.hpp"
#include "pegrisk/marketdata.hpp"
#include "pegrisk/pegmodel.hpp"
#include "pegrisk/simkit.hpp"

namespace pegrisk::app {

/// Where the rho used for inversion comes from.
enum class RhoSource {
    Fixed,        // the `rho` parameter as given
    RollingMean,  // mean of rolling AR(1) fits over the aligned spot deviations
    FullSample,   // single AR(1) fit over the whole sample
};

std::string_view to_string(RhoSource source) noexcept;
RhoSource parse_rho_source(std::string_view text);

struct InputFile {
    std::filesystem::path path;
    std::string instrument;
    std::string venue;

    [[nodiscard]] bool given() const { return !path.empty(); }
};

/// Every knob of a run. `to_config` writes all of them, defaults included,
/// so a manifest is enough to repeat the run.
struct RunConfig {
    InputFile spot{{}, "USDT_USD", "FTX"};
    InputFile futures{{}, "USDT_USD_FUT", "FTX"};
    InputFile btc{{}, "BTC_USDT", "Binance"};
    InputFile usdt{{}, "USDT_USD", "Kraken"};  // optional alternative USDT venue for sigma_usdt
    std::filesystem::path aligned;
    std::filesystem::path features;
    std::filesystem::path out_dir = "out";
    std::filesystem::path output;  // single-file subcommands; empty means stdout
    std::string format = "text";    // text | csv for table subcommands

    PegParams params;
    RhoSource rho_source = RhoSource::Fixed;
    std::size_t window = 60;
    VolEstimator estimator = VolEstimator::Parkinson;
    bool trim = true;
    CsvSchema schema;

    SimConfig sim;
    FixtureConfig fixture;
    unsigned threads = 0;

    /// Unknown keys raise Error(Config), except the informational `result.` block.
    static RunConfig from_config(const KeyValueConfig& cfg);
    [[nodiscard]] KeyValueConfig to_config() const;

    /// Domain checks on the model parameters; throws Error(Domain).
    void validate() const;
};

}  // namespace pegrisk::app
