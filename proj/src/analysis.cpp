#include "symgauntlet/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "symgauntlet/errors.hpp"

namespace symgauntlet::analysis {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

/// Atomic file write: temp name in the target directory, then rename.
void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  const auto tmp = dir / (name + ".tmp");
  const auto final_path = dir / name;
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) throw IoError("cannot finalize " + final_path.string());
}

int lerp_channel(int from, int to, std::int64_t num, std::int64_t den) {
  const std::int64_t delta = to - from;
  const std::int64_t scaled = delta * num;
  const std::int64_t rounded = scaled >= 0 ? (scaled + den / 2) / den
                                           : -((-scaled + den / 2) / den);
  return from + static_cast<int>(rounded);
}

/// Accuracy color scale: 0.0 -> #c0392b (red), 1.0 -> #27ae60 (green).
std::string accuracy_color(std::int64_t correct, std::int64_t total) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                lerp_channel(0xc0, 0x27, correct, total),
                lerp_channel(0x39, 0xae, correct, total),
                lerp_channel(0x2b, 0x60, correct, total));
  return buf;
}

const char* kBiasPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};

std::string row_label(const RowKey& key) {
  return key.model + " " + key.family + " " + key.variant;
}

}  // namespace

std::optional<CaseKeyParts> parse_case_id(const std::string& id) {
  const auto parts = split(id, ':');
  // Descriptor-style ids ("family:variant:L<n>:s<seed>"); the variant of a
  // sim model never contains a colon, but scenario tags might look odd --
  // anything that does not fit lands in the fallback bucket upstream.
  if (parts.size() != 4) return std::nullopt;
  if (parts[2].size() < 2 || parts[2][0] != 'L') return std::nullopt;
  CaseKeyParts out;
  out.family = parts[0];
  out.variant = parts[1];
  try {
    out.length = std::stoull(parts[2].substr(1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return out;
}

void AccuracyMatrix::add(const RowKey& key, std::size_t length, bool correct) {
  Cell& cell = cells_[key][length];
  cell.total += 1;
  if (correct) cell.correct += 1;
}

std::vector<RowKey> AccuracyMatrix::rows() const {
  std::vector<RowKey> out;
  out.reserve(cells_.size());
  for (const auto& [key, _] : cells_) out.push_back(key);
  return out;
}

std::vector<std::size_t> AccuracyMatrix::lengths() const {
  std::set<std::size_t> seen;
  for (const auto& [_, row] : cells_) {
    for (const auto& [len, cell] : row) seen.insert(len);
  }
  return {seen.begin(), seen.end()};
}

std::optional<Cell> AccuracyMatrix::cell(const RowKey& key,
                                         std::size_t length) const {
  const auto row = cells_.find(key);
  if (row == cells_.end()) return std::nullopt;
  const auto cell = row->second.find(length);
  if (cell == row->second.end()) return std::nullopt;
  return cell->second;
}

AccuracyMatrix accuracy_matrix(const std::vector<runner::TrialRecord>& records) {
  AccuracyMatrix matrix;
  for (const auto& rec : records) {
    const auto parts = parse_case_id(rec.case_id);
    RowKey key;
    key.model = rec.model;
    std::size_t length = 0;
    if (parts) {
      key.family = parts->family;
      key.variant = parts->variant;
      length = parts->length;
    } else {
      key.family = "?";
      key.variant = rec.case_id;
    }
    matrix.add(key, length, rec.correct);
  }
  return matrix;
}

std::vector<BiasSeries> bias_counts(
    const std::vector<runner::TrialRecord>& records,
    const std::vector<std::int64_t>& targets) {
  if (targets.empty()) throw std::invalid_argument("no bias targets given");
  std::vector<std::int64_t> sorted_targets = targets;
  std::sort(sorted_targets.begin(), sorted_targets.end());
  sorted_targets.erase(
      std::unique(sorted_targets.begin(), sorted_targets.end()),
      sorted_targets.end());

  std::vector<BiasSeries> out;
  for (std::int64_t target : sorted_targets) {
    BiasSeries series;
    series.target = target;
    for (const auto& rec : records) {
      auto& [hits, total] = series.by_truth[rec.expected];
      total += 1;
      if (rec.final_value && *rec.final_value == target) hits += 1;
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<OnsetRow> failure_onset(const AccuracyMatrix& matrix,
                                    const genprops::Fraction& threshold) {
  std::vector<OnsetRow> out;
  for (const auto& [key, row] : matrix.cells()) {
    OnsetRow onset;
    onset.key = key;
    for (const auto& [length, cell] : row) {
      // exact rational compare: correct/total < num/den
      if (cell.correct * threshold.den < threshold.num * cell.total) {
        onset.first_drop = length;
        break;
      }
    }
    for (auto it = row.rbegin(); it != row.rend(); ++it) {
      if (it->second.correct == 0) {
        onset.permanent_zero = it->first;
      } else {
        break;
      }
    }
    out.push_back(std::move(onset));
  }
  return out;
}

Scatter prediction_scatter(const std::vector<runner::TrialRecord>& records) {
  Scatter scatter;
  for (const auto& rec : records) {
    if (rec.final_value) {
      scatter.points.push_back(
          ScatterPoint{rec.expected, *rec.final_value, rec.correct});
    } else {
      scatter.extraction_failures += 1;
    }
  }
  std::sort(scatter.points.begin(), scatter.points.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) {
              return std::tie(a.truth, a.predicted, a.correct) <
                     std::tie(b.truth, b.predicted, b.correct);
            });
  return scatter;
}

std::string format_mean(std::int64_t correct, std::int64_t total) {
  if (total <= 0) throw std::invalid_argument("mean over zero records");
  const std::int64_t scaled = (correct * 10000 + total / 2) / total;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%04lld",
                static_cast<long long>(scaled / 10000),
                static_cast<long long>(scaled % 10000));
  return buf;
}

namespace {

std::string accuracy_csv(const AccuracyMatrix& matrix) {
  std::string out = "model,family,variant";
  const auto lengths = matrix.lengths();
  for (std::size_t len : lengths) out += ",L" + std::to_string(len);
  out += "\n";
  for (const auto& [key, row] : matrix.cells()) {
    out += key.model + "," + key.family + "," + key.variant;
    for (std::size_t len : lengths) {
      out += ",";
      const auto it = row.find(len);
      if (it != row.end()) {
        out += format_mean(it->second.correct, it->second.total);
      }
    }
    out += "\n";
  }
  return out;
}

std::string bias_csv(const std::vector<BiasSeries>& bias) {
  std::string out = "target,truth,count,total\n";
  for (const auto& series : bias) {
    for (const auto& [truth, counts] : series.by_truth) {
      out += std::to_string(series.target) + "," + std::to_string(truth) +
             "," + std::to_string(counts.first) + "," +
             std::to_string(counts.second) + "\n";
    }
  }
  return out;
}

std::string scatter_csv(const Scatter& scatter) {
  std::string out = "truth,predicted,correct\n";
  for (const auto& p : scatter.points) {
    out += std::to_string(p.truth) + "," + std::to_string(p.predicted) + "," +
           (p.correct ? "1" : "0") + "\n";
  }
  return out;
}

std::string onset_csv(const std::vector<OnsetRow>& onsets) {
  std::string out = "model,family,variant,first_drop,permanent_zero\n";
  for (const auto& row : onsets) {
    out += row.key.model + "," + row.key.family + "," + row.key.variant + ",";
    out += row.first_drop ? std::to_string(*row.first_drop) : "none";
    out += ",";
    out += row.permanent_zero ? std::to_string(*row.permanent_zero) : "none";
    out += "\n";
  }
  return out;
}

std::string summary_json(const AccuracyMatrix& matrix,
                         const std::vector<BiasSeries>& bias,
                         const Scatter& scatter,
                         const std::vector<OnsetRow>& onsets) {
  nlohmann::ordered_json j;
  std::int64_t records = 0;
  for (const auto& [_, row] : matrix.cells()) {
    for (const auto& [length, cell] : row) {
      (void)length;
      records += cell.total;
    }
  }
  j["record_count"] = records;
  j["extraction_failures"] = scatter.extraction_failures;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& [key, row] : matrix.cells()) {
    std::int64_t correct = 0, total = 0;
    for (const auto& [_, cell] : row) {
      correct += cell.correct;
      total += cell.total;
    }
    rows.push_back({{"model", key.model},
                    {"family", key.family},
                    {"variant", key.variant},
                    {"correct", correct},
                    {"total", total},
                    {"mean", format_mean(correct, total)}});
  }
  j["rows"] = std::move(rows);
  auto onset_rows = nlohmann::ordered_json::array();
  for (const auto& row : onsets) {
    nlohmann::ordered_json oj;
    oj["model"] = row.key.model;
    oj["family"] = row.key.family;
    oj["variant"] = row.key.variant;
    oj["first_drop"] = row.first_drop
                           ? nlohmann::ordered_json(*row.first_drop)
                           : nlohmann::ordered_json(nullptr);
    oj["permanent_zero"] = row.permanent_zero
                               ? nlohmann::ordered_json(*row.permanent_zero)
                               : nlohmann::ordered_json(nullptr);
    onset_rows.push_back(std::move(oj));
  }
  j["onset"] = std::move(onset_rows);
  auto bias_rows = nlohmann::ordered_json::array();
  for (const auto& series : bias) {
    std::int64_t off_truth = 0, on_truth = 0;
    for (const auto& [truth, counts] : series.by_truth) {
      (truth == series.target ? on_truth : off_truth) += counts.first;
    }
    bias_rows.push_back({{"target", series.target},
                         {"off_truth_hits", off_truth},
                         {"on_truth_hits", on_truth}});
  }
  j["bias"] = std::move(bias_rows);
  return j.dump(2) + "\n";
}

std::string heatmap_svg(const AccuracyMatrix& matrix) {
  const auto lengths = matrix.lengths();
  const auto rows = matrix.rows();
  const int cell_w = 22, cell_h = 18;
  const int left = 260, top = 46, bottom = 8;
  const int width =
      left + cell_w * std::max<int>(1, static_cast<int>(lengths.size())) + 16;
  const int height =
      top + cell_h * std::max<int>(1, static_cast<int>(rows.size())) + bottom;

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" font-family=\"monospace\" font-size=\"11\">\n",
                width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg +=
      "<text x=\"8\" y=\"16\">mean accuracy per length (#c0392b = 0.0, "
      "#27ae60 = 1.0, #e0e0e0 = no data)</text>\n";

  for (std::size_t col = 0; col < lengths.size(); ++col) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-size=\"9\" "
                  "text-anchor=\"middle\">%zu</text>\n",
                  left + static_cast<int>(col) * cell_w + cell_w / 2, top - 6,
                  lengths[col]);
    svg += buf;
  }

  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const int y = top + static_cast<int>(ri) * cell_h;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"4\" y=\"%d\" font-size=\"10\">%s</text>\n",
                  y + cell_h - 5, row_label(rows[ri]).c_str());
    svg += buf;
    for (std::size_t col = 0; col < lengths.size(); ++col) {
      const auto cell = matrix.cell(rows[ri], lengths[col]);
      const std::string fill =
          cell ? accuracy_color(cell->correct, cell->total) : "#e0e0e0";
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"%s\" stroke=\"#ffffff\"/>\n",
                    left + static_cast<int>(col) * cell_w, y, cell_w, cell_h,
                    fill.c_str());
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string bias_svg(const std::vector<BiasSeries>& bias) {
  std::set<std::int64_t> truth_set;
  std::int64_t max_count = 1;
  for (const auto& series : bias) {
    for (const auto& [truth, counts] : series.by_truth) {
      truth_set.insert(truth);
      max_count = std::max(max_count, counts.first);
    }
  }
  const std::vector<std::int64_t> truths(truth_set.begin(), truth_set.end());

  const int group_w = std::max<int>(10, 6 * static_cast<int>(bias.size()) + 4);
  const int left = 44, top = 40, plot_h = 160, bottom = 30;
  const int width =
      left + group_w * std::max<int>(1, static_cast<int>(truths.size())) + 16;
  const int height = top + plot_h + bottom;

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" font-family=\"monospace\" font-size=\"11\">\n",
                width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"8\" y=\"16\">answers equal to target, by ground truth</text>\n";

  for (std::size_t si = 0; si < bias.size(); ++si) {
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"22\" width=\"10\" height=\"10\" "
                  "fill=\"%s\"/><text x=\"%d\" y=\"31\" font-size=\"10\">"
                  "target %lld</text>\n",
                  8 + static_cast<int>(si) * 110,
                  kBiasPalette[si % std::size(kBiasPalette)],
                  22 + static_cast<int>(si) * 110,
                  static_cast<long long>(bias[si].target));
    svg += buf;
  }

  const int base_y = top + plot_h;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"#333333\"/>\n",
                left, base_y, width - 8, base_y);
  svg += buf;

  const std::size_t label_stride = truths.size() > 30 ? truths.size() / 30 + 1 : 1;
  for (std::size_t gi = 0; gi < truths.size(); ++gi) {
    const int gx = left + static_cast<int>(gi) * group_w;
    for (std::size_t si = 0; si < bias.size(); ++si) {
      const auto it = bias[si].by_truth.find(truths[gi]);
      const std::int64_t count = it == bias[si].by_truth.end() ? 0 : it->second.first;
      const int h = static_cast<int>((plot_h * count) / max_count);
      if (h > 0) {
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"5\" height=\"%d\" "
                      "fill=\"%s\"/>\n",
                      gx + 2 + static_cast<int>(si) * 6, base_y - h, h,
                      kBiasPalette[si % std::size(kBiasPalette)]);
        svg += buf;
      }
    }
    if (gi % label_stride == 0) {
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%d\" y=\"%d\" font-size=\"9\" "
                    "text-anchor=\"middle\">%lld</text>\n",
                    gx + group_w / 2, base_y + 14,
                    static_cast<long long>(truths[gi]));
      svg += buf;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"6\" y=\"%d\" font-size=\"9\">%lld</text>\n", top + 8,
                static_cast<long long>(max_count));
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace

void emit_report(const AccuracyMatrix& matrix,
                 const std::vector<BiasSeries>& bias, const Scatter& scatter,
                 const std::vector<OnsetRow>& onsets,
                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create report directory " + out_dir.string());

  write_file(out_dir, "accuracy.csv", accuracy_csv(matrix));
  write_file(out_dir, "bias.csv", bias_csv(bias));
  write_file(out_dir, "scatter.csv", scatter_csv(scatter));
  write_file(out_dir, "onset.csv", onset_csv(onsets));
  write_file(out_dir, "summary.json", summary_json(matrix, bias, scatter, onsets));
  write_file(out_dir, "heatmap.svg", heatmap_svg(matrix));
  write_file(out_dir, "bias.svg", bias_svg(bias));
}

}  // namespace symgauntlet::analysis
