#pragma once

// Aggregation of trial records into the reported artifacts: accuracy
// matrices, bias-count series, failure onsets, prediction scatters, and the
// CSV/SVG/JSON report bundle. Means are exact rationals (correct/total)
// rendered at fixed precision, so outputs are byte-identical everywhere.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symgauntlet/genprops.hpp"
#include "symgauntlet/runner.hpp"

namespace symgauntlet::analysis {

/// The (family, variant, length) encoded in a case id.
struct CaseKeyParts {
  std::string family;
  std::string variant;
  std::size_t length = 0;
};

std::optional<CaseKeyParts> parse_case_id(const std::string& id);

struct RowKey {
  std::string model;
  std::string family;
  std::string variant;
  auto operator<=>(const RowKey&) const = default;
};

struct Cell {
  std::int64_t correct = 0;
  std::int64_t total = 0;
};

class AccuracyMatrix {
 public:
  void add(const RowKey& key, std::size_t length, bool correct);

  std::vector<RowKey> rows() const;
  std::vector<std::size_t> lengths() const;  // ascending
  std::optional<Cell> cell(const RowKey& key, std::size_t length) const;
  const std::map<RowKey, std::map<std::size_t, Cell>>& cells() const {
    return cells_;
  }
  bool empty() const { return cells_.empty(); }

 private:
  std::map<RowKey, std::map<std::size_t, Cell>> cells_;
};

/// Rows keyed by (model, family, variant), columns by length; cells are
/// exact correct/total counts. Absent cells stay absent.
AccuracyMatrix accuracy_matrix(const std::vector<runner::TrialRecord>& records);

struct BiasSeries {
  std::int64_t target = 0;
  // truth -> (# records answering `target`, # records at that truth)
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> by_truth;
};

std::vector<BiasSeries> bias_counts(const std::vector<runner::TrialRecord>& records,
                                    const std::vector<std::int64_t>& targets);

struct OnsetRow {
  RowKey key;
  /// Smallest length whose accuracy falls below the threshold.
  std::optional<std::size_t> first_drop;
  /// Smallest length from which accuracy is zero through the end of the row.
  std::optional<std::size_t> permanent_zero;
};

std::vector<OnsetRow> failure_onset(const AccuracyMatrix& matrix,
                                    const genprops::Fraction& threshold);

struct ScatterPoint {
  std::int64_t truth = 0;
  std::int64_t predicted = 0;
  bool correct = false;
};

struct Scatter {
  std::vector<ScatterPoint> points;
  std::size_t extraction_failures = 0;  // records with no final value
};

Scatter prediction_scatter(const std::vector<runner::TrialRecord>& records);

/// "correct/total" rendered to 4 decimal places, rounding half away from
/// zero in integer arithmetic.
std::string format_mean(std::int64_t correct, std::int64_t total);

/// Writes accuracy.csv, bias.csv, scatter.csv, onset.csv, summary.json,
/// heatmap.svg and bias.svg into out_dir. Files are written to a temp name
/// and renamed, and are byte-deterministic for identical inputs.
void emit_report(const AccuracyMatrix& matrix,
                 const std::vector<BiasSeries>& bias, const Scatter& scatter,
                 const std::vector<OnsetRow>& onsets,
                 const std::filesystem::path& out_dir);

}  // namespace symgauntlet::analysis
