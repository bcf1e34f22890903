#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/serialization.hpp"

namespace rwre {

/// Version stamped into manifests; reproduce() reports a mismatch.
std::string artifact_version();

/// Experiment kinds: simulate, kalikow, density1d, pov-cesaro, zk,
/// gibbs-check, singular-ne, reproduce.
const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
  std::string kind;
  /// Environment model (see model_from_json); null for gibbs-check,
  /// singular-ne and reproduce.
  Json model;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::string output_dir;
  /// Pass/fail thresholds for checks. Not part of the hash: they never
  /// change result records.
  Json tolerances = Json::object();
  unsigned workers = 1;
};

ExperimentConfig config_from_json(const Json& value);
Json config_to_json(const ExperimentConfig& config);

/// SHA-256 of the canonical {kind, model, params, seed}.
std::string config_hash(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  Json manifest;
  std::vector<Json> records;
  Json summary;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Runs the pipeline named by config.kind. When output_dir is set, writes
/// records.jsonl (one record per line), summary.json, summary.txt and
/// manifest.json there. Summaries are computed from the records alone.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Seed of the module stream used by every pipeline: derive(seed, kind).
std::uint64_t module_seed(const ExperimentConfig& config);

struct FileVerdict {
  std::string file;
  bool passed = false;
  std::string expected_digest;
  std::string actual_digest;
  /// Records only: index of the first differing line, when the original file
  /// is available.
  std::optional<std::size_t> first_divergent_record;
  std::string expected_line;
  std::string actual_line;
};

struct ReproduceReport {
  std::string recorded_version;
  std::string current_version;
  bool version_match = true;
  std::vector<FileVerdict> files;
  bool passed() const;
};

/// Re-runs the manifest's config into scratch_dir (optionally with another
/// worker count) and compares file digests. original_dir, when given, holds
/// the original records for locating the first divergent record.
ReproduceReport reproduce(const Json& manifest, const std::string& scratch_dir,
                          std::optional<unsigned> workers = std::nullopt,
                          const std::string& original_dir = "");

/// Reads <dir>/manifest.json and reproduces it against that directory.
ReproduceReport reproduce_directory(const std::string& dir, const std::string& scratch_dir,
                                    std::optional<unsigned> workers = std::nullopt);

/// Aligned two-column text rendering of a flat summary object.
std::string summary_table(const Json& summary);

}  // namespace rwre
