#pragma once

#include <span>
#include <string>

#include "mimobsp/sim.hpp"

namespace mimobsp {

inline constexpr const char* kVersion = "0.1.0";

/// Everything needed to reproduce a run bit-exactly, serialized next to the
/// results.
struct RunManifest {
    std::string version = kVersion;
    std::string created_utc;
    SimulationConfig config;
    std::string csv_path;
    std::string json_path;
};

RunManifest make_manifest(const SimulationConfig& cfg, std::string csv_path,
                          std::string json_path);

/// CSV with the fixed column set
///   detector,ebn0_db,sigma2,vectors,bit_errors,bits_total,ber,ci_low,
///   ci_high,symbol_errors,mults_per_use
/// rows sorted by (detector, ebn0_db), doubles with 17 significant digits.
std::string render_csv(std::span<const BerRecord> records);

/// Writes render_csv output; throws std::runtime_error when the path is not
/// writable.
void emit_csv(std::span<const BerRecord> records, const std::string& path);

/// {"manifest": ..., "records": [...]} with the CSV field names.
std::string render_json(const RunManifest& manifest, std::span<const BerRecord> records);
void emit_json(const RunManifest& manifest, std::span<const BerRecord> records,
               const std::string& path);

} // namespace mimobsp
