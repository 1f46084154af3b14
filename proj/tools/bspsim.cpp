#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "mimobsp/cli_config.hpp"
#include "mimobsp/report.hpp"
#include "mimobsp/sim.hpp"

namespace {

constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << mimobsp::usage_text();
        return kExitUsage;
    }

    mimobsp::CliOptions opts;
    try {
        opts = mimobsp::parse_config(args);
    } catch (const mimobsp::UsageError& e) {
        std::cerr << e.what() << "\n\n" << mimobsp::usage_text();
        return kExitUsage;
    }

    std::vector<mimobsp::BerRecord> records;
    try {
        records = mimobsp::run_sweep(opts.config);
    } catch (const std::exception& e) {
        std::cerr << "bspsim: " << e.what() << "\n";
        return kExitFailures;
    }

    const mimobsp::RunManifest manifest =
        mimobsp::make_manifest(opts.config, opts.csv_path, opts.json_path);
    try {
        if (opts.csv_path.empty()) {
            std::cout << mimobsp::render_csv(records);
        } else {
            mimobsp::emit_csv(records, opts.csv_path);
        }
        if (!opts.json_path.empty()) {
            mimobsp::emit_json(manifest, records, opts.json_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "bspsim: " << e.what() << "\n";
        return kExitIo;
    }

    uint64_t failures = 0;
    for (const mimobsp::BerRecord& r : records) failures += r.failures;
    if (failures > 0) {
        std::cerr << "bspsim: " << failures << " detector-level numerical failure(s) recorded\n";
        return kExitFailures;
    }
    return 0;
}
