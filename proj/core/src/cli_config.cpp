#include "mimobsp/cli_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimobsp/channel.hpp"

namespace mimobsp {

namespace {

int bits_from_modulation(const std::string& mod, std::vector<std::string>& violations) {
    if (mod == "qpsk" || mod == "4qam") return 2;
    if (mod == "16qam") return 4;
    if (mod == "64qam") return 6;
    if (mod == "256qam") return 8;
    violations.push_back("--mod: unknown modulation '" + mod +
                         "' (expected qpsk, 4qam, 16qam, 64qam or 256qam)");
    return 0;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

} // namespace

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    const std::vector<std::string> colon = split(text, ':');
    if (colon.size() == 3) {
        const double start = std::stod(colon[0]);
        const double step = std::stod(colon[1]);
        const double stop = std::stod(colon[2]);
        if (!(step > 0.0)) throw UsageError("range step must be positive in '" + text + "'");
        const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count < 1) throw UsageError("empty range '" + text + "'");
        for (long i = 0; i < count; ++i) values.push_back(start + step * static_cast<double>(i));
        return values;
    }
    if (colon.size() != 1) throw UsageError("expected start:step:stop or a comma list, got '" + text + "'");
    for (const std::string& part : split(text, ',')) {
        if (part.empty()) continue;
        values.push_back(std::stod(part));
    }
    if (values.empty()) throw UsageError("no values in '" + text + "'");
    return values;
}

DetectorSpec parse_detector_token(const std::string& token) {
    const std::vector<std::string> parts = split(token, ':');
    DetectorSpec det;
    if (parts.empty()) throw UsageError("empty detector token");
    const std::string& name = parts[0];
    if (name == "map") {
        if (parts.size() != 1) throw UsageError("map takes no parameters: '" + token + "'");
        det.kind = DetectorKind::Map;
    } else if (name == "mmse") {
        if (parts.size() != 1) throw UsageError("mmse takes no parameters: '" + token + "'");
        det.kind = DetectorKind::MmseHard;
    } else if (name == "obp") {
        det.kind = DetectorKind::OriginalBp;
        det.init = InitMode::Uniform;
        if (parts.size() == 2 && parts[1] == "lmmse") {
            det.init = InitMode::Lmmse;
        } else if (parts.size() != 1) {
            throw UsageError("obp accepts only an optional ':lmmse': '" + token + "'");
        }
    } else if (name == "bsp") {
        det.kind = DetectorKind::Bsp;
        det.init = InitMode::Lmmse;
        if (parts.size() < 3 || parts.size() > 4) {
            throw UsageError("bsp token must be bsp:<d_m>:<d_f>[:uniform]: '" + token + "'");
        }
        det.d_m = std::stoi(parts[1]);
        det.d_f = std::stoi(parts[2]);
        if (parts.size() == 4) {
            if (parts[3] == "uniform") {
                det.init = InitMode::Uniform;
            } else if (parts[3] == "lmmse") {
                det.init = InitMode::Lmmse;
            } else {
                throw UsageError("bsp init must be uniform or lmmse: '" + token + "'");
            }
        }
        if (det.d_m < 1 || det.d_f < 1) throw UsageError("bsp d_m and d_f must be >= 1: '" + token + "'");
    } else if (name == "ebrdf") {
        det.kind = DetectorKind::Ebrdf;
        if (parts.size() != 2) throw UsageError("ebrdf token must be ebrdf:<d_f>: '" + token + "'");
        det.d_f = std::stoi(parts[1]);
        if (det.d_f < 1) throw UsageError("ebrdf d_f must be >= 1: '" + token + "'");
    } else {
        throw UsageError("unknown detector '" + token + "'");
    }
    return det;
}

std::string usage_text() {
    return "bspsim - MIMO soft-detection Monte Carlo sweeps\n"
           "\n"
           "usage: bspsim [--config FILE] --nr N --nt N --mod MOD (--ebn0 RANGE | --sigma2 LIST)\n"
           "              --detectors LIST [options]\n"
           "\n"
           "  --nr INT             receive antennas\n"
           "  --nt INT             transmit antennas\n"
           "  --mod STR            qpsk | 4qam | 16qam | 64qam | 256qam\n"
           "  --ebn0 RANGE         Eb/N0 grid in dB: start:step:stop or comma list\n"
           "  --sigma2 LIST        noise variances per real dimension (bypasses the Eb/N0 mapping)\n"
           "  --detectors LIST     comma list: map, mmse, obp[:lmmse], bsp:<dm>:<df>[:uniform], ebrdf:<df>\n"
           "  --iters INT          BP iterations Q_L (default 10)\n"
           "  --max-vectors INT    channel uses per point (default 100000)\n"
           "  --target-errors INT  early stop once every detector has this many bit errors (default 400)\n"
           "  --seed UINT          master seed (default 1)\n"
           "  --workers INT        worker threads (default: MIMOBSP_WORKERS or all cores)\n"
           "  --csv PATH           write results CSV (default: stdout)\n"
           "  --json PATH          write manifest + records JSON\n"
           "  --config FILE        JSON file with the same keys; flags take precedence\n";
}

CliOptions parse_config(const std::vector<std::string>& args) {
    CLI::App app{"bspsim"};
    app.allow_extras(false);

    std::string config_path, mod, ebn0, sigma2, detectors, csv_path, json_path;
    int nr = 0, nt = 0, iters = 0, workers = -1;
    uint64_t seed = 0, max_vectors = 0, target_errors = 0;

    auto* o_nr = app.add_option("--nr", nr);
    auto* o_nt = app.add_option("--nt", nt);
    auto* o_mod = app.add_option("--mod", mod);
    auto* o_ebn0 = app.add_option("--ebn0", ebn0);
    auto* o_sigma2 = app.add_option("--sigma2", sigma2);
    auto* o_det = app.add_option("--detectors", detectors);
    auto* o_iters = app.add_option("--iters", iters);
    auto* o_maxv = app.add_option("--max-vectors", max_vectors);
    auto* o_target = app.add_option("--target-errors", target_errors);
    auto* o_seed = app.add_option("--seed", seed);
    auto* o_workers = app.add_option("--workers", workers);
    app.add_option("--csv", csv_path);
    app.add_option("--json", json_path);
    app.add_option("--config", config_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    // defaults < config file < flags
    nlohmann::json file;
    std::vector<SweepPoint> manifest_points;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw UsageError("cannot open config file " + config_path);
        try {
            f >> file;
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("config file: ") + e.what());
        }
    }
    if (file.contains("manifest")) {
        // a result manifest doubles as a config file; points are restored
        // verbatim so a re-run reproduces the sweep bit-exactly
        nlohmann::json flat = file["manifest"].value("config", nlohmann::json::object());
        if (flat.contains("bits_per_symbol")) {
            static const char* mods[] = {"", "", "qpsk", "", "16qam", "", "64qam", "", "256qam"};
            const int b = flat["bits_per_symbol"];
            if (b >= 2 && b <= 8 && b % 2 == 0) flat["mod"] = mods[b];
        }
        if (flat.contains("iterations")) flat["iters"] = flat["iterations"];
        if (flat.contains("target_bit_errors")) flat["target_errors"] = flat["target_bit_errors"];
        if (flat.contains("points")) {
            for (const auto& p : flat["points"]) {
                const double ebn0 = p["ebn0_db"].is_null()
                                        ? std::numeric_limits<double>::infinity()
                                        : p["ebn0_db"].get<double>();
                manifest_points.push_back({ebn0, p["sigma2"].get<double>()});
            }
        }
        file = flat;
    }
    auto file_str = [&](const char* key, std::string& dst, bool flag_present) {
        if (flag_present || !file.contains(key)) return;
        const nlohmann::json& v = file[key];
        if (v.is_string()) {
            dst = v.get<std::string>();
        } else if (v.is_array()) {
            std::string joined;
            for (const auto& item : v) {
                if (!joined.empty()) joined += ',';
                joined += item.is_string() ? item.get<std::string>()
                                           : nlohmann::json(item).dump();
            }
            dst = joined;
        } else {
            dst = v.dump();
        }
    };
    auto file_int = [&](const char* key, auto& dst, bool flag_present) {
        if (!flag_present && file.contains(key)) dst = file[key];
    };

    file_int("nr", nr, o_nr->count() > 0);
    file_int("nt", nt, o_nt->count() > 0);
    file_str("mod", mod, o_mod->count() > 0);
    file_str("ebn0", ebn0, o_ebn0->count() > 0);
    file_str("sigma2", sigma2, o_sigma2->count() > 0);
    file_str("detectors", detectors, o_det->count() > 0);
    file_int("iters", iters, o_iters->count() > 0);
    file_int("max_vectors", max_vectors, o_maxv->count() > 0);
    file_int("target_errors", target_errors, o_target->count() > 0);
    file_int("seed", seed, o_seed->count() > 0);
    file_int("workers", workers, o_workers->count() > 0);
    if (csv_path.empty() && file.contains("csv")) csv_path = file["csv"];
    if (json_path.empty() && file.contains("json")) json_path = file["json"];

    if (iters == 0) iters = 10;
    if (max_vectors == 0) max_vectors = 100000;
    if (target_errors == 0) target_errors = 400;
    if (seed == 0 && o_seed->count() == 0 && !file.contains("seed")) seed = 1;
    if (workers < 0) {
        const char* env = std::getenv("MIMOBSP_WORKERS");
        workers = env != nullptr ? std::atoi(env) : 0;
    }

    std::vector<std::string> violations;
    CliOptions opts;
    SimulationConfig& cfg = opts.config;

    if (nr < 1) violations.push_back("--nr: must be >= 1");
    if (nt < 1) violations.push_back("--nt: must be >= 1");
    if (mod.empty()) {
        violations.push_back("--mod: required");
    } else {
        cfg.bits_per_symbol = bits_from_modulation(mod, violations);
    }
    if (iters < 1) violations.push_back("--iters: must be >= 1");

    if (ebn0.empty() && sigma2.empty() && manifest_points.empty()) {
        violations.push_back("one of --ebn0 or --sigma2 is required");
    } else if (!ebn0.empty() && !sigma2.empty()) {
        violations.push_back("--ebn0 and --sigma2 are mutually exclusive");
    }

    if (detectors.empty()) {
        violations.push_back("--detectors: required");
    } else {
        for (const std::string& token : split(detectors, ',')) {
            try {
                cfg.detectors.push_back(parse_detector_token(token));
            } catch (const UsageError& e) {
                violations.push_back(e.what());
            }
        }
    }

    cfg.n_rx = nr;
    cfg.n_tx = nt;
    cfg.iterations = iters;
    cfg.max_vectors = max_vectors;
    cfg.target_bit_errors = target_errors;
    cfg.master_seed = seed;
    cfg.workers = workers;

    if (violations.empty() && cfg.bits_per_symbol > 0) {
        try {
            if (ebn0.empty() && sigma2.empty()) {
                cfg.points = manifest_points;
            } else if (!ebn0.empty()) {
                for (const double x : parse_value_list(ebn0)) {
                    cfg.points.push_back(
                        {x, noise_variance_from_ebn0(x, cfg.bits_per_symbol, nt, nr)});
                }
            } else {
                for (const double s2 : parse_value_list(sigma2)) {
                    if (!(s2 >= 0.0)) {
                        violations.push_back("--sigma2: values must be >= 0");
                        break;
                    }
                    // Column value backfilled through the module convention.
                    const double ebn0_db =
                        s2 > 0.0 ? 10.0 * std::log10(static_cast<double>(nr) /
                                                     (2.0 * cfg.bits_per_symbol * s2))
                                 : std::numeric_limits<double>::infinity();
                    cfg.points.push_back({ebn0_db, s2});
                }
            }
        } catch (const UsageError& e) {
            violations.push_back(e.what());
        }
    }

    opts.csv_path = csv_path;
    opts.json_path = json_path;

    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const std::string& v : violations) msg += "\n  - " + v;
        throw UsageError(msg);
    }
    return opts;
}

} // namespace mimobsp
