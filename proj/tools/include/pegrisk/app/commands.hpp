#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pegrisk/app/run_config.hpp"

namespace pegrisk::app {

struct PipelineOutputs {
    std::vector<std::filesystem::path> files;
    double rho_used = 0.0;
    std::size_t observations = 0;
    double mean_p_annualized_bps = 0.0;  // untrimmed
};

/// Runs align -> prob -> features -> tables and writes into out_dir:
/// aligned.csv, prob.csv, features.csv, table3.{txt,csv}, table4.{txt,csv},
/// manifest.txt and two Vega-Lite plot specs. Nothing is left behind on failure.
PipelineOutputs cmd_pipeline(const RunConfig& cfg);

void cmd_align(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void cmd_fit(const RunConfig& cfg, std::ostream& out);
void cmd_prob(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void cmd_features(const RunConfig& cfg, std::ostream& out);
void cmd_regress(const RunConfig& cfg, std::ostream& out);
void cmd_stats(const RunConfig& cfg, std::ostream& out);
void cmd_simulate(const RunConfig& cfg, std::ostream& out);
std::vector<std::filesystem::path> cmd_fixture(const RunConfig& cfg);

/// Single line, `error[<kind>]: <message>` with newlines flattened.
std::string format_error_line(std::string_view kind, std::string_view message);

}  // namespace pegrisk::app
