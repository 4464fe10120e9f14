// Command-line front end: generate case files, run and resume experiments
// against simulated or remote models, and aggregate record files into
// reports.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symgauntlet/analysis.hpp"
#include "symgauntlet/errors.hpp"
#include "symgauntlet/runner.hpp"

namespace {

using namespace symgauntlet;

struct CliOptions {
  runner::ExperimentConfig config;
  std::string lengths = "5:150:5";
  std::vector<std::string> ratios;
  std::vector<std::string> variants;
  std::vector<std::string> splits;
  std::vector<std::string> ranges;
  bool serial = false;
};

void add_generation_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--families", opts.config.families,
                  "Test families: closure, identity, inverse, associativity, "
                  "wordcount, scenario")
      ->delimiter(',');
  cmd->add_option("--lengths", opts.lengths,
                  "Length sweep as A:B:STEP (default 5:150:5)");
  cmd->add_option("--ratios", opts.ratios,
                  "Identity zero ratios in (0,1] (default 0.25,0.5,0.75,1)")
      ->delimiter(',');
  cmd->add_option("--variants", opts.variants,
                  "Symmetry variants: append, reversal, translate, swap")
      ->delimiter(',');
  cmd->add_option("--splits", opts.splits,
                  "Associativity splits: test1, test2")
      ->delimiter(',');
  cmd->add_option("--items", opts.config.word_items,
                  "Word-count items (default apples,oranges,bananas)")
      ->delimiter(',');
  cmd->add_option("--ranges", opts.ranges,
                  "Word-count ranges as LO:HI (default 40:60,90:110)")
      ->delimiter(',');
  cmd->add_option("--scenario-file", opts.config.scenario_file,
                  "Scenario definitions (JSON); built-ins when omitted");
  cmd->add_option("--corpus-file", opts.config.corpus_file,
                  "Irrelevant-text corpus (JSON); built-ins when omitted");
  cmd->add_option("--inject", opts.config.inject,
                  "Irrelevant-text mode for scenarios: none, preamble, "
                  "interleave")
      ->check(CLI::IsMember({"none", "preamble", "interleave"}));
  cmd->add_option("--permutations", opts.config.permutations,
                  "Middle-sentence permutations per scenario (default 5)");
  cmd->add_option("--seed", opts.config.master_seed,
                  "Master seed (default 1)");
}

void add_run_flags(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--cases", opts.config.cases_file,
                  "Run a pre-generated case file instead of the family flags");
  cmd->add_option("--model", opts.config.models,
                  "Model under test (repeatable): sim:perfect, sim:snap, "
                  "sim:truncate:<L>, remote:<name>")
      ->required();
  cmd->add_option("--endpoint", opts.config.params.endpoint,
                  "Chat-completions base URL for remote models");
  cmd->add_option("--trials", opts.config.trials, "Trials per case (default 10)");
  cmd->add_option("--concurrency", opts.config.concurrency,
                  "Cells in flight (default 4)");
  cmd->add_flag("--cot", opts.config.cot,
                "Append the step-by-step instruction to every prompt");
  cmd->add_option("--cache-dir", opts.config.cache_dir,
                  "Response cache directory (caching off when omitted)");
  cmd->add_option("--limit", opts.config.cell_limit,
                  "Stop after this many cells (0 = no limit)");
  cmd->add_flag("--serial", opts.serial,
                "Use the serial reference executor instead of OpenMP");
  cmd->add_option("--temperature", opts.config.params.temperature,
                  "Sampling temperature (default 0)");
  cmd->add_option("--max-tokens", opts.config.params.max_tokens,
                  "Completion token cap (default 256)");
}

void finalize(CliOptions& opts) {
  opts.config.lengths = runner::LengthRange::parse(opts.lengths);
  if (!opts.ratios.empty()) {
    opts.config.ratios.clear();
    for (const auto& r : opts.ratios) {
      opts.config.ratios.push_back(genprops::Fraction::parse(r));
    }
  }
  if (!opts.variants.empty()) {
    opts.config.variants.clear();
    for (const auto& v : opts.variants) {
      opts.config.variants.push_back(algebra::symmetry_from_string(v));
    }
  }
  if (!opts.splits.empty()) {
    opts.config.splits.clear();
    for (const auto& s : opts.splits) {
      opts.config.splits.push_back(genprops::split_from_string(s));
    }
  }
  if (!opts.ranges.empty()) {
    opts.config.word_ranges.clear();
    for (const auto& r : opts.ranges) {
      const auto colon = r.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("bad range '" + r + "' (expected LO:HI)");
      }
      opts.config.word_ranges.emplace_back(std::stoll(r.substr(0, colon)),
                                           std::stoll(r.substr(colon + 1)));
    }
  }
  if (opts.serial) opts.config.use_openmp = false;
}

int run_generate(CliOptions& opts) {
  finalize(opts);
  const auto cases = runner::build_cases(opts.config);
  runner::write_cases(opts.config.output, cases);
  std::printf("wrote %zu cases to %s\n", cases.size(),
              opts.config.output.c_str());
  return 0;
}

int run_run(CliOptions& opts, bool resume) {
  finalize(opts);
  const auto summary = runner::run_experiment(opts.config, resume);
  std::printf("cells: %zu total, %zu prior, %zu executed, %zu errors\n",
              summary.cells_total, summary.cells_prior,
              summary.cells_executed, summary.cell_errors);
  std::printf("records: %s\n", opts.config.output.c_str());
  return summary.cell_errors == 0 ? 0 : 3;
}

int run_analyze(const std::string& records_path,
                const std::vector<std::int64_t>& targets,
                const std::string& threshold, const std::string& report_dir) {
  const auto records = runner::read_records(records_path);
  const auto matrix = analysis::accuracy_matrix(records);
  const auto bias = analysis::bias_counts(records, targets);
  const auto scatter = analysis::prediction_scatter(records);
  const auto onsets =
      analysis::failure_onset(matrix, genprops::Fraction::parse(threshold));

  std::printf("%zu records\n", records.size());
  for (const auto& [key, row] : matrix.cells()) {
    std::int64_t correct = 0, total = 0;
    for (const auto& [_, cell] : row) {
      correct += cell.correct;
      total += cell.total;
    }
    std::printf("  %s %s %s: mean %s over %lld records\n", key.model.c_str(),
                key.family.c_str(), key.variant.c_str(),
                analysis::format_mean(correct, total).c_str(),
                static_cast<long long>(total));
  }
  for (const auto& onset : onsets) {
    if (onset.first_drop || onset.permanent_zero) {
      std::printf("  onset %s %s %s: first drop %s, zero from %s\n",
                  onset.key.model.c_str(), onset.key.family.c_str(),
                  onset.key.variant.c_str(),
                  onset.first_drop ? std::to_string(*onset.first_drop).c_str()
                                   : "none",
                  onset.permanent_zero
                      ? std::to_string(*onset.permanent_zero).c_str()
                      : "none");
    }
  }
  if (!report_dir.empty()) {
    analysis::emit_report(matrix, bias, scatter, onsets, report_dir);
    std::printf("report written to %s\n", report_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-property evaluation harness for language models"};
  app.require_subcommand(1);

  CliOptions gen_opts;
  auto* generate = app.add_subcommand(
      "generate", "Generate a case file from the family parameters");
  add_generation_flags(generate, gen_opts);
  generate->add_option("-o,--output", gen_opts.config.output, "Case file (JSONL)")
      ->required();

  CliOptions run_opts;
  auto* run = app.add_subcommand("run", "Execute every (case, model, trial) cell");
  add_generation_flags(run, run_opts);
  add_run_flags(run, run_opts);
  run->add_option("-o,--output", run_opts.config.output, "Record file (JSONL)")
      ->required();

  CliOptions resume_opts;
  auto* resume = app.add_subcommand(
      "resume", "Continue an interrupted run (same flags, same output)");
  add_generation_flags(resume, resume_opts);
  add_run_flags(resume, resume_opts);
  resume->add_option("-o,--output", resume_opts.config.output,
                     "Record file of the interrupted run")
      ->required();

  std::string records_path, threshold = "1.0", report_dir;
  std::vector<std::int64_t> targets = {50, 100};
  auto* analyze = app.add_subcommand("analyze", "Aggregate a record file");
  analyze->add_option("--records", records_path, "Record file (JSONL)")
      ->required();
  analyze->add_option("--targets", targets, "Bias targets (default 50,100)")
      ->delimiter(',');
  analyze->add_option("--threshold", threshold,
                      "Accuracy threshold for onset detection (default 1.0)");
  analyze->add_option("--report", report_dir, "Write CSV/SVG report bundle here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(gen_opts);
    if (run->parsed()) return run_run(run_opts, false);
    if (resume->parsed()) return run_run(resume_opts, true);
    if (analyze->parsed()) {
      return run_analyze(records_path, targets, threshold, report_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
