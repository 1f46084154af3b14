#include "mimobsp/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mimobsp {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<BerRecord> sorted_records(std::span<const BerRecord> records) {
    std::vector<BerRecord> rows(records.begin(), records.end());
    std::stable_sort(rows.begin(), rows.end(), [](const BerRecord& a, const BerRecord& b) {
        if (a.detector != b.detector) return a.detector < b.detector;
        return a.ebn0_db < b.ebn0_db;
    });
    return rows;
}

nlohmann::json record_json(const BerRecord& r) {
    return nlohmann::json{
        {"detector", r.detector},
        {"ebn0_db", r.ebn0_db},
        {"sigma2", r.sigma2},
        {"vectors", r.vectors},
        {"bit_errors", r.bit_errors},
        {"bits_total", r.bits_total},
        {"ber", r.ber},
        {"ci_low", r.ci_low},
        {"ci_high", r.ci_high},
        {"symbol_errors", r.symbol_errors},
        {"mults_per_use", r.mults_per_use},
    };
}

nlohmann::json detector_json(const DetectorSpec& d) { return d.id(); }

} // namespace

RunManifest make_manifest(const SimulationConfig& cfg, std::string csv_path,
                          std::string json_path) {
    RunManifest m;
    m.config = cfg;
    m.csv_path = std::move(csv_path);
    m.json_path = std::move(json_path);

    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    m.created_utc = buf;
    return m;
}

std::string render_csv(std::span<const BerRecord> records) {
    std::string out =
        "detector,ebn0_db,sigma2,vectors,bit_errors,bits_total,ber,ci_low,ci_high,"
        "symbol_errors,mults_per_use\n";
    for (const BerRecord& r : sorted_records(records)) {
        out += r.detector;
        out += ',';
        out += fmt_double(r.ebn0_db);
        out += ',';
        out += fmt_double(r.sigma2);
        out += ',';
        out += std::to_string(r.vectors);
        out += ',';
        out += std::to_string(r.bit_errors);
        out += ',';
        out += std::to_string(r.bits_total);
        out += ',';
        out += fmt_double(r.ber);
        out += ',';
        out += fmt_double(r.ci_low);
        out += ',';
        out += fmt_double(r.ci_high);
        out += ',';
        out += std::to_string(r.symbol_errors);
        out += ',';
        out += std::to_string(r.mults_per_use);
        out += '\n';
    }
    return out;
}

void emit_csv(std::span<const BerRecord> records, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << render_csv(records);
    f.flush();
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::string render_json(const RunManifest& manifest, std::span<const BerRecord> records) {
    nlohmann::json points = nlohmann::json::array();
    for (const SweepPoint& p : manifest.config.points) {
        points.push_back({{"ebn0_db", p.ebn0_db}, {"sigma2", p.sigma2}});
    }
    nlohmann::json detectors = nlohmann::json::array();
    for (const DetectorSpec& d : manifest.config.detectors) detectors.push_back(detector_json(d));

    nlohmann::json j;
    j["manifest"] = {
        {"version", manifest.version},
        {"created_utc", manifest.created_utc},
        {"config",
         {
             {"nr", manifest.config.n_rx},
             {"nt", manifest.config.n_tx},
             {"bits_per_symbol", manifest.config.bits_per_symbol},
             {"iterations", manifest.config.iterations},
             {"points", points},
             {"max_vectors", manifest.config.max_vectors},
             {"target_bit_errors", manifest.config.target_bit_errors},
             {"detectors", detectors},
             {"seed", manifest.config.master_seed},
             {"workers", manifest.config.workers},
         }},
        {"outputs", {{"csv", manifest.csv_path}, {"json", manifest.json_path}}},
    };
    nlohmann::json recs = nlohmann::json::array();
    for (const BerRecord& r : sorted_records(records)) recs.push_back(record_json(r));
    j["records"] = recs;
    return j.dump(2) + "\n";
}

void emit_json(const RunManifest& manifest, std::span<const BerRecord> records,
               const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("emit_json: cannot open " + path);
    f << render_json(manifest, records);
    f.flush();
    if (!f) throw std::runtime_error("emit_json: write failed for " + path);
}

} // namespace mimobsp
