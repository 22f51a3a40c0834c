#pragma once

#include "nullrec/estimators.hpp"
#include "nullrec/harness.hpp"
#include "nullrec/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace nullrec {

using Json = nlohmann::ordered_json;

Json to_json(const SufficientStats& stats);
SufficientStats stats_from_json(const Json& j);

Json to_json(const EstimateResult& est);
Json to_json(const AsymptoticConstants& c);
Json to_json(const Interval& w);
Interval interval_from_json(const Json& j);

/// Config as written by emit and accepted by experiment_config_from_json;
/// unknown keys are rejected.
Json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

/// Report including the wall clock.
Json to_json(const ExperimentReport& report);

/// Flat table: horizon,coord,stat_name,value,reference,tolerance,pass.
std::string report_csv(const ExperimentReport& report);
/// Path as t,x rows.
std::string path_csv(const DiffusionPath& path);

/// Writes <stem>.json and <stem>.csv. Throws Error on I/O failure.
void emit_report(const ExperimentReport& report, const std::filesystem::path& stem);

/// Reads a whole file; throws ConfigError when it cannot be opened or parsed.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace nullrec
