#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mimobsp/sim.hpp"

namespace mimobsp {

/// Invalid command line or config file.  The message lists every violated
/// constraint, not just the first.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliOptions {
    SimulationConfig config;
    std::string csv_path;   ///< empty: CSV to stdout
    std::string json_path;  ///< empty: no JSON output
};

/// Parses command line arguments (without argv[0]) plus an optional JSON
/// config file given via --config.  Flags override file values, which
/// override defaults.  The MIMOBSP_WORKERS environment variable supplies the
/// default worker count.
CliOptions parse_config(const std::vector<std::string>& args);

std::string usage_text();

/// "5:1:20" (start:step:stop, inclusive) or a comma list of values.
std::vector<double> parse_value_list(const std::string& text);

/// map | mmse | obp[:lmmse] | bsp:<d_m>:<d_f>[:uniform] | ebrdf:<d_f>
DetectorSpec parse_detector_token(const std::string& token);

} // namespace mimobsp
