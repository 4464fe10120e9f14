#pragma once

// Experiment orchestration: owns the case/record file formats, expands an
// ExperimentConfig into (case x model x trial) cells, and executes them with
// bounded concurrency. A serial cell loop is kept alongside the OpenMP one
// as the reference implementation; both produce the same record set.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symgauntlet/extract.hpp"
#include "symgauntlet/genprops.hpp"
#include "symgauntlet/modelio.hpp"

namespace symgauntlet::runner {

/// One generated probe in the on-disk case format. `family` is an open
/// string here so scenario cases travel through the same file.
struct Case {
  std::string id;
  std::string family;
  std::string variant;
  std::size_t length = 0;
  std::vector<std::string> prompts;
  std::optional<std::string> final_template;
  std::int64_t expected = 0;
  std::uint64_t gen_seed = 0;
};

Case from_test_case(const genprops::TestCase& tc);

nlohmann::ordered_json case_to_json(const Case& c);
Case case_from_json(const nlohmann::json& j);
void write_cases(const std::filesystem::path& path,
                 const std::vector<Case>& cases);
std::vector<Case> read_cases(const std::filesystem::path& path);

struct StageRecord {
  std::string prompt;
  std::string response;
  std::optional<std::int64_t> extracted;
  extract::Method method = extract::Method::None;
  std::int64_t t_start_us = 0;
  std::int64_t t_end_us = 0;
};

struct TrialRecord {
  std::string case_id;
  int trial = 0;
  std::string model;
  std::vector<StageRecord> stages;
  std::optional<std::int64_t> final_value;
  std::int64_t expected = 0;
  bool correct = false;
  std::optional<std::string> error;
};

nlohmann::ordered_json record_to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

/// Reads a record file, tolerating a torn trailing line (an interrupted
/// writer); the torn line is dropped with a warning on stderr.
std::vector<TrialRecord> read_records(const std::filesystem::path& path);

/// read_records plus repair: truncates a torn trailing line in place so
/// subsequent appends start on a fresh line. Used by resume.
std::vector<TrialRecord> repair_record_file(const std::filesystem::path& path);

struct LengthRange {
  std::size_t lo = 5;
  std::size_t hi = 150;
  std::size_t step = 5;

  static LengthRange parse(const std::string& spec);  // "A:B:STEP"
  std::vector<std::size_t> expand() const;
  std::string str() const;
  bool operator==(const LengthRange&) const = default;
};

struct ExperimentConfig {
  std::vector<std::string> families = {"closure", "identity", "inverse",
                                       "associativity"};
  LengthRange lengths;
  std::vector<genprops::Fraction> ratios = {{1, 4}, {1, 2}, {3, 4}, {1, 1}};
  std::vector<algebra::SymmetryKind> variants = {
      algebra::SymmetryKind::AppendAtEnd, algebra::SymmetryKind::Reversal,
      algebra::SymmetryKind::TranslationToMiddle,
      algebra::SymmetryKind::RandomSwap};
  std::vector<genprops::Split> splits = {genprops::Split::Test1,
                                         genprops::Split::Test2};
  std::vector<std::string> word_items = genprops::default_word_items();
  std::vector<genprops::CountRange> word_ranges = genprops::default_word_ranges();

  // Scenario family inputs; empty paths fall back to the built-ins.
  std::string scenario_file;
  std::string corpus_file;
  std::string inject = "none";  // none | preamble | interleave
  std::size_t permutations = 5;

  // Pre-generated cases override family generation when set.
  std::string cases_file;

  int trials = 10;
  std::vector<std::string> models;
  int concurrency = 4;
  std::uint64_t master_seed = 1;
  std::string output;
  bool cot = false;

  std::string cache_dir;       // empty disables response caching
  std::size_t cell_limit = 0;  // stop after N cells (0 = run everything)
  bool use_openmp = true;      // false forces the serial reference loop
  modelio::ModelParams params;
};

/// The fields that determine results (not concurrency, output, or cache
/// placement); the manifest stores its hash and resume refuses on mismatch.
nlohmann::ordered_json semantic_config_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

std::filesystem::path manifest_path_for(const std::filesystem::path& output);
void write_manifest(const ExperimentConfig& config);

/// Expands the configured families (or reads cases_file) into the
/// deterministic, id-sorted case list a run executes.
std::vector<Case> build_cases(const ExperimentConfig& config);

/// Deterministic per-cell seed; distinct across cells by construction.
std::uint64_t derive_cell_seed(std::uint64_t master_seed,
                               const std::string& case_id, int trial);

struct StageOutcome {
  std::vector<StageRecord> stages;
  extract::Extraction final_extraction;
  std::optional<std::string> error;
};

/// Executes a two-segment stage plan: queries each segment, substitutes the
/// extracted intermediate answers (even wrong ones) into the final template,
/// and queries once more. A failed intermediate extraction aborts the cell
/// before the final query.
StageOutcome run_stage_plan(const genprops::StagePlan& plan,
                            modelio::ModelAdapter& adapter,
                            modelio::ResponseCache* cache,
                            const modelio::ModelParams& params,
                            std::uint64_t trial_nonce, bool cot);

/// Runs one (case, trial) cell against one adapter. Never throws; transport
/// failures become error records.
TrialRecord run_cell(const Case& c, modelio::ModelAdapter& adapter,
                     modelio::ResponseCache* cache,
                     const modelio::ModelParams& params, int trial, bool cot);

enum class ExecMode { Serial, Parallel };

/// In-memory execution over every (case x adapter x trial) cell, sorted by
/// (case id, model, trial). Used directly by tests and the benchmark; the
/// file-backed run_experiment drives the same loop.
std::vector<TrialRecord> run_cells(
    const std::vector<Case>& cases,
    const std::vector<modelio::ModelAdapter*>& adapters,
    const modelio::ModelParams& params, int trials, bool cot, int concurrency,
    ExecMode mode, modelio::ResponseCache* cache = nullptr);

struct RunSummary {
  std::size_t cells_total = 0;
  std::size_t cells_prior = 0;     // already present (resume)
  std::size_t cells_executed = 0;
  std::size_t cell_errors = 0;
};

/// Full file-backed run: writes the manifest, executes pending cells, and
/// appends one JSONL record per cell. With resume=true the existing record
/// file is honored and only missing cells run; the stored config hash must
/// match (a field-by-field diff is reported otherwise).
RunSummary run_experiment(const ExperimentConfig& config, bool resume = false);

/// Normalized comparison key used to deduplicate/resume cells.
std::string cell_key(const std::string& case_id, const std::string& model,
                     int trial);

}  // namespace symgauntlet::runner
