#include "symgauntlet/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "symgauntlet/digest.hpp"
#include "symgauntlet/errors.hpp"
#include "symgauntlet/nlgen.hpp"
#include "symgauntlet/rng.hpp"

namespace symgauntlet::runner {

namespace {

constexpr const char* kVersion = "0.1.0";

std::int64_t now_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string maybe_cot(const std::string& prompt, bool cot) {
  return cot ? nlgen::cot_wrap(prompt) : prompt;
}

StageRecord do_stage(const std::string& prompt, modelio::ModelAdapter& adapter,
                     modelio::ResponseCache* cache,
                     const modelio::ModelParams& params,
                     std::uint64_t trial_nonce,
                     extract::Extraction* extraction_out) {
  StageRecord stage;
  stage.prompt = prompt;
  stage.t_start_us = now_us();
  stage.response = cache != nullptr
                       ? cache->complete(adapter, prompt, params, trial_nonce)
                       : adapter.complete(prompt, params, trial_nonce);
  stage.t_end_us = now_us();
  const auto extraction = extract::extract_integer(stage.response);
  stage.extracted = extraction.value;
  stage.method = extraction.method;
  if (extraction_out != nullptr) *extraction_out = extraction;
  return stage;
}

}  // namespace

Case from_test_case(const genprops::TestCase& tc) {
  Case c;
  c.id = tc.id;
  c.family = genprops::to_string(tc.family);
  c.variant = tc.variant;
  c.length = tc.length;
  c.prompts = tc.prompts;
  c.final_template = tc.final_template;
  c.expected = tc.expected;
  c.gen_seed = tc.gen_seed;
  return c;
}

nlohmann::ordered_json case_to_json(const Case& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["family"] = c.family;
  j["variant"] = c.variant;
  j["length"] = c.length;
  j["prompts"] = c.prompts;
  j["final_template"] =
      c.final_template ? nlohmann::ordered_json(*c.final_template)
                       : nlohmann::ordered_json(nullptr);
  j["expected"] = c.expected;
  j["gen_seed"] = c.gen_seed;
  return j;
}

Case case_from_json(const nlohmann::json& j) {
  Case c;
  c.id = j.at("id").get<std::string>();
  c.family = j.at("family").get<std::string>();
  c.variant = j.at("variant").get<std::string>();
  c.length = j.at("length").get<std::size_t>();
  c.prompts = j.at("prompts").get<std::vector<std::string>>();
  if (j.contains("final_template") && !j.at("final_template").is_null()) {
    c.final_template = j.at("final_template").get<std::string>();
  }
  c.expected = j.at("expected").get<std::int64_t>();
  c.gen_seed = j.at("gen_seed").get<std::uint64_t>();
  return c;
}

void write_cases(const std::filesystem::path& path,
                 const std::vector<Case>& cases) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write case file: " + path.string());
  for (const Case& c : cases) out << case_to_json(c).dump() << "\n";
}

std::vector<Case> read_cases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open case file: " + path.string());
  std::vector<Case> cases;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      cases.push_back(case_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad case at " + path.string() + ":" +
                    std::to_string(line_no) + ": " + e.what());
    }
  }
  return cases;
}

nlohmann::ordered_json record_to_json(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["case_id"] = r.case_id;
  j["trial"] = r.trial;
  j["model"] = r.model;
  auto stages = nlohmann::ordered_json::array();
  for (const StageRecord& s : r.stages) {
    nlohmann::ordered_json sj;
    sj["prompt"] = s.prompt;
    sj["response"] = s.response;
    sj["extracted"] = s.extracted ? nlohmann::ordered_json(*s.extracted)
                                  : nlohmann::ordered_json(nullptr);
    sj["method"] = extract::to_string(s.method);
    sj["t_start"] = s.t_start_us;
    sj["t_end"] = s.t_end_us;
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  j["final"] = r.final_value ? nlohmann::ordered_json(*r.final_value)
                             : nlohmann::ordered_json(nullptr);
  j["expected"] = r.expected;
  j["correct"] = r.correct;
  j["error"] = r.error ? nlohmann::ordered_json(*r.error)
                       : nlohmann::ordered_json(nullptr);
  return j;
}

TrialRecord record_from_json(const nlohmann::json& j) {
  TrialRecord r;
  r.case_id = j.at("case_id").get<std::string>();
  r.trial = j.at("trial").get<int>();
  r.model = j.at("model").get<std::string>();
  for (const auto& sj : j.at("stages")) {
    StageRecord s;
    s.prompt = sj.at("prompt").get<std::string>();
    s.response = sj.at("response").get<std::string>();
    if (!sj.at("extracted").is_null()) {
      s.extracted = sj.at("extracted").get<std::int64_t>();
    }
    s.method = extract::method_from_string(sj.at("method").get<std::string>());
    s.t_start_us = sj.at("t_start").get<std::int64_t>();
    s.t_end_us = sj.at("t_end").get<std::int64_t>();
    r.stages.push_back(std::move(s));
  }
  if (!j.at("final").is_null()) {
    r.final_value = j.at("final").get<std::int64_t>();
  }
  r.expected = j.at("expected").get<std::int64_t>();
  r.correct = j.at("correct").get<bool>();
  if (!j.at("error").is_null()) {
    r.error = j.at("error").get<std::string>();
  }
  return r;
}

namespace {

struct RecordScan {
  std::vector<TrialRecord> records;
  // Byte length of the well-formed prefix; anything past it is a torn tail.
  std::uintmax_t valid_bytes = 0;
  bool torn_tail = false;
};

RecordScan scan_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record file: " + path.string());
  RecordScan scan;
  std::string line;
  std::uintmax_t consumed = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool has_newline = !in.eof();
    if (!has_newline) {
      // No trailing newline: an interrupted write, even if the JSON happens
      // to be complete. Appends must not glue onto it; the cell re-runs.
      scan.torn_tail = !line.empty();
      break;
    }
    if (line.empty()) {
      consumed += 1;
      scan.valid_bytes = consumed;
      continue;
    }
    TrialRecord record;
    try {
      record = record_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      if (in.peek() == std::char_traits<char>::eof()) {
        scan.torn_tail = true;  // newline-terminated garbage at the tail
        break;
      }
      throw IoError("bad record at " + path.string() + ":" +
                    std::to_string(line_no) + ": " + e.what());
    }
    scan.records.push_back(std::move(record));
    consumed += line.size() + 1;
    scan.valid_bytes = consumed;
  }
  return scan;
}

}  // namespace

std::vector<TrialRecord> read_records(const std::filesystem::path& path) {
  auto scan = scan_records(path);
  if (scan.torn_tail) {
    std::cerr << "dropping torn trailing data in " << path.string()
              << " (interrupted write)\n";
  }
  return std::move(scan.records);
}

std::vector<TrialRecord> repair_record_file(const std::filesystem::path& path) {
  auto scan = scan_records(path);
  if (scan.torn_tail) {
    std::cerr << "truncating torn trailing data in " << path.string()
              << " (interrupted write)\n";
    std::error_code ec;
    std::filesystem::resize_file(path, scan.valid_bytes, ec);
    if (ec) throw IoError("cannot repair record file: " + path.string());
  }
  return std::move(scan.records);
}

LengthRange LengthRange::parse(const std::string& spec) {
  LengthRange r;
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(spec);
  while (std::getline(in, part, ':')) parts.push_back(part);
  auto to_count = [&spec](const std::string& text) -> std::size_t {
    if (text.empty() ||
        text.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("bad length range '" + spec + "' (expected A:B:STEP)");
    }
    return std::stoull(text);
  };
  if (parts.size() == 1) {
    r.lo = r.hi = to_count(parts[0]);
    r.step = 1;
  } else if (parts.size() == 3) {
    r.lo = to_count(parts[0]);
    r.hi = to_count(parts[1]);
    r.step = to_count(parts[2]);
  } else {
    throw ConfigError("bad length range '" + spec + "' (expected A:B:STEP)");
  }
  if (r.step == 0 || r.lo > r.hi) {
    throw ConfigError("bad length range '" + spec + "' (expected A:B:STEP)");
  }
  return r;
}

std::vector<std::size_t> LengthRange::expand() const {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

std::string LengthRange::str() const {
  return std::to_string(lo) + ":" + std::to_string(hi) + ":" +
         std::to_string(step);
}

nlohmann::ordered_json semantic_config_json(const ExperimentConfig& config) {
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  nlohmann::ordered_json j;
  j["families"] = sorted(config.families);
  j["lengths"] = config.lengths.str();
  {
    std::vector<std::string> ratios;
    for (const auto& r : config.ratios) ratios.push_back(r.label());
    j["ratios"] = sorted(std::move(ratios));
  }
  {
    std::vector<std::string> variants;
    for (auto v : config.variants) variants.emplace_back(algebra::to_string(v));
    j["variants"] = sorted(std::move(variants));
  }
  {
    std::vector<std::string> splits;
    for (auto s : config.splits) splits.emplace_back(genprops::to_string(s));
    j["splits"] = sorted(std::move(splits));
  }
  j["word_items"] = sorted(config.word_items);
  {
    std::vector<std::string> ranges;
    for (const auto& [lo, hi] : config.word_ranges) {
      ranges.push_back(std::to_string(lo) + ":" + std::to_string(hi));
    }
    j["word_ranges"] = sorted(std::move(ranges));
  }
  j["scenario_file"] =
      config.scenario_file.empty() ? "builtin" : file_sha256(config.scenario_file);
  j["corpus_file"] =
      config.corpus_file.empty() ? "builtin" : file_sha256(config.corpus_file);
  j["inject"] = config.inject;
  j["permutations"] = config.permutations;
  j["cases_file"] =
      config.cases_file.empty() ? "" : file_sha256(config.cases_file);
  j["trials"] = config.trials;
  j["models"] = sorted(config.models);
  j["master_seed"] = config.master_seed;
  j["cot"] = config.cot;
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.6f", config.params.temperature);
  j["temperature"] = temp;
  j["max_tokens"] = config.params.max_tokens;
  j["endpoint"] = config.params.endpoint;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  return sha256_hex(semantic_config_json(config).dump());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

void write_manifest(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash(config);
  j["config"] = semantic_config_json(config);
  j["version"] = kVersion;
  j["format_version"] = 1;
  j["created_at_us"] = now_us();
  const auto path = manifest_path_for(config.output);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

namespace {

std::vector<Case> scenario_cases(const ExperimentConfig& config) {
  auto scenarios = config.scenario_file.empty()
                       ? nlgen::builtin_scenarios()
                       : nlgen::load_scenarios_file(config.scenario_file);
  nlgen::IrrelevantCorpus corpus;
  if (config.inject != "none") {
    corpus = config.corpus_file.empty()
                 ? nlgen::builtin_corpus()
                 : nlgen::load_corpus_file(config.corpus_file);
  }

  std::vector<Case> cases;
  for (const auto& base : scenarios) {
    nlgen::Scenario staged = base;
    std::string tag = base.name;
    if (config.inject == "preamble") {
      staged = nlgen::inject_irrelevant(
          base, corpus, nlgen::InjectMode::Preamble,
          mix_seed(config.master_seed, fnv1a64(base.name + "|preamble")));
      tag += "-preamble";
    } else if (config.inject == "interleave") {
      staged = nlgen::inject_irrelevant(
          base, corpus, nlgen::InjectMode::Interleave,
          mix_seed(config.master_seed, fnv1a64(base.name + "|interleave")));
      tag += "-interleave";
    } else if (config.inject != "none") {
      throw ConfigError("unknown inject mode: " + config.inject);
    }

    const std::uint64_t perm_seed =
        mix_seed(config.master_seed, fnv1a64(base.name + "|perm"));
    const auto perms =
        nlgen::permute_middle(staged, perm_seed, config.permutations);
    for (std::size_t k = 0; k < perms.size(); ++k) {
      Case c;
      c.family = "scenario";
      c.variant = tag + "-p" + std::to_string(k);
      c.length = staged.events.size();
      c.prompts = {nlgen::build_question(staged, perms[k])};
      c.expected = nlgen::expected_answer(staged);
      c.gen_seed = perm_seed;
      c.id = c.family + ":" + c.variant + ":L" + std::to_string(c.length) +
             ":s" + std::to_string(c.gen_seed);
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

}  // namespace

std::vector<Case> build_cases(const ExperimentConfig& config) {
  std::vector<Case> cases;
  if (!config.cases_file.empty()) {
    cases = read_cases(config.cases_file);
  } else {
    const auto lengths = config.lengths.expand();
    for (const std::string& family : config.families) {
      if (family == "closure") {
        for (const auto& tc : genprops::gen_closure(lengths)) {
          cases.push_back(from_test_case(tc));
        }
      } else if (family == "identity") {
        for (const auto& tc : genprops::gen_identity(
                 lengths, config.ratios, config.variants, config.master_seed)) {
          cases.push_back(from_test_case(tc));
        }
      } else if (family == "inverse") {
        for (const auto& tc : genprops::gen_inverse(lengths, config.variants,
                                                    config.master_seed)) {
          cases.push_back(from_test_case(tc));
        }
      } else if (family == "associativity") {
        for (const auto& tc : genprops::gen_associativity(lengths, config.splits)) {
          cases.push_back(from_test_case(tc));
        }
      } else if (family == "wordcount") {
        for (const auto& tc : genprops::gen_word_count(
                 config.word_items, config.word_ranges, config.master_seed)) {
          cases.push_back(from_test_case(tc));
        }
      } else if (family == "scenario") {
        for (auto& c : scenario_cases(config)) cases.push_back(std::move(c));
      } else {
        throw ConfigError("unknown family: " + family);
      }
    }
  }

  std::sort(cases.begin(), cases.end(),
            [](const Case& a, const Case& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < cases.size(); ++i) {
    if (cases[i].id == cases[i - 1].id) {
      throw ConfigError("duplicate case id: " + cases[i].id);
    }
  }
  return cases;
}

std::uint64_t derive_cell_seed(std::uint64_t master_seed,
                               const std::string& case_id, int trial) {
  return mix_seed(mix_seed(master_seed, fnv1a64(case_id)),
                  static_cast<std::uint64_t>(trial));
}

StageOutcome run_stage_plan(const genprops::StagePlan& plan,
                            modelio::ModelAdapter& adapter,
                            modelio::ResponseCache* cache,
                            const modelio::ModelParams& params,
                            std::uint64_t trial_nonce, bool cot) {
  if (plan.stage_prompts.size() != 2) {
    throw ConfigError("stage plan must have exactly two segments, got " +
                      std::to_string(plan.stage_prompts.size()));
  }
  StageOutcome outcome;
  std::vector<std::int64_t> intermediates;
  for (std::size_t i = 0; i < plan.stage_prompts.size(); ++i) {
    extract::Extraction extraction;
    outcome.stages.push_back(do_stage(maybe_cot(plan.stage_prompts[i], cot),
                                      adapter, cache, params, trial_nonce,
                                      &extraction));
    if (!extraction.value) {
      outcome.error = "intermediate extraction failed at stage " +
                      std::to_string(i + 1);
      return outcome;
    }
    intermediates.push_back(*extraction.value);
  }
  const std::string final_prompt = genprops::instantiate_final(
      plan.final_template, std::to_string(intermediates[0]),
      std::to_string(intermediates[1]));
  outcome.stages.push_back(do_stage(maybe_cot(final_prompt, cot), adapter,
                                    cache, params, trial_nonce,
                                    &outcome.final_extraction));
  return outcome;
}

TrialRecord run_cell(const Case& c, modelio::ModelAdapter& adapter,
                     modelio::ResponseCache* cache,
                     const modelio::ModelParams& params, int trial, bool cot) {
  TrialRecord rec;
  rec.case_id = c.id;
  rec.trial = trial;
  rec.model = adapter.descriptor();
  rec.expected = c.expected;
  try {
    if (c.final_template) {
      genprops::StagePlan plan{c.prompts, *c.final_template};
      auto outcome = run_stage_plan(plan, adapter, cache, params,
                                    static_cast<std::uint64_t>(trial), cot);
      rec.stages = std::move(outcome.stages);
      rec.error = outcome.error;
      rec.final_value = outcome.final_extraction.value;
      rec.correct = extract::score(outcome.final_extraction, c.expected);
    } else {
      if (c.prompts.size() != 1) {
        throw ConfigError("case " + c.id + " has " +
                          std::to_string(c.prompts.size()) +
                          " prompts but no final template");
      }
      extract::Extraction extraction;
      rec.stages.push_back(do_stage(maybe_cot(c.prompts[0], cot), adapter,
                                    cache, params,
                                    static_cast<std::uint64_t>(trial),
                                    &extraction));
      rec.final_value = extraction.value;
      rec.correct = extract::score(extraction, c.expected);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.correct = false;
  }
  return rec;
}

std::string cell_key(const std::string& case_id, const std::string& model,
                     int trial) {
  return case_id + "\x1f" + model + "\x1f" + std::to_string(trial);
}

namespace {

struct CellRef {
  const Case* c;
  modelio::ModelAdapter* adapter;
  int trial;
};

std::vector<CellRef> make_cells(
    const std::vector<Case>& cases,
    const std::vector<modelio::ModelAdapter*>& adapters, int trials) {
  std::vector<CellRef> cells;
  cells.reserve(cases.size() * adapters.size() *
                static_cast<std::size_t>(trials));
  for (const Case& c : cases) {
    for (modelio::ModelAdapter* adapter : adapters) {
      for (int t = 0; t < trials; ++t) {
        cells.push_back(CellRef{&c, adapter, t});
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const CellRef& a, const CellRef& b) {
    if (a.c->id != b.c->id) return a.c->id < b.c->id;
    const auto da = a.adapter->descriptor();
    const auto db = b.adapter->descriptor();
    if (da != db) return da < db;
    return a.trial < b.trial;
  });
  return cells;
}

template <typename Sink>
void execute_cells(const std::vector<CellRef>& cells,
                   const modelio::ModelParams& params,
                   modelio::ResponseCache* cache, bool cot, int concurrency,
                   ExecMode mode, Sink&& sink) {
  const auto count = static_cast<std::int64_t>(cells.size());
  if (mode == ExecMode::Serial || concurrency <= 1) {
    // Reference path: same cells, same records, one at a time.
    for (std::int64_t i = 0; i < count; ++i) {
      const CellRef& cell = cells[static_cast<std::size_t>(i)];
      sink(run_cell(*cell.c, *cell.adapter, cache, params, cell.trial, cot));
    }
    return;
  }
#pragma omp parallel for schedule(dynamic) num_threads(concurrency)
  for (std::int64_t i = 0; i < count; ++i) {
    const CellRef& cell = cells[static_cast<std::size_t>(i)];
    sink(run_cell(*cell.c, *cell.adapter, cache, params, cell.trial, cot));
  }
}

}  // namespace

std::vector<TrialRecord> run_cells(
    const std::vector<Case>& cases,
    const std::vector<modelio::ModelAdapter*>& adapters,
    const modelio::ModelParams& params, int trials, bool cot, int concurrency,
    ExecMode mode, modelio::ResponseCache* cache) {
  const auto cells = make_cells(cases, adapters, trials);
  std::vector<TrialRecord> records;
  records.reserve(cells.size());
  std::mutex mu;
  execute_cells(cells, params, cache, cot, concurrency, mode,
                [&](TrialRecord rec) {
                  std::lock_guard<std::mutex> lock(mu);
                  records.push_back(std::move(rec));
                });
  std::sort(records.begin(), records.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              return std::tie(a.case_id, a.model, a.trial) <
                     std::tie(b.case_id, b.model, b.trial);
            });
  return records;
}

RunSummary run_experiment(const ExperimentConfig& config, bool resume) {
  if (config.output.empty()) throw ConfigError("no output path configured");
  if (config.models.empty()) throw ConfigError("no models configured");
  if (config.trials < 1) throw ConfigError("trials must be >= 1");
  if (config.concurrency < 1) throw ConfigError("concurrency must be >= 1");

  // Adapters are constructed before anything else so a bad descriptor or a
  // missing credential aborts before any cell runs.
  std::vector<std::unique_ptr<modelio::ModelAdapter>> owned;
  std::vector<modelio::ModelAdapter*> adapters;
  for (const std::string& desc : config.models) {
    owned.push_back(modelio::make_adapter(desc, config.params));
    adapters.push_back(owned.back().get());
  }

  const auto cases = build_cases(config);
  auto cells = make_cells(cases, adapters, config.trials);

  RunSummary summary;
  summary.cells_total = cells.size();

  std::set<std::string> done;
  if (resume) {
    const auto mpath = manifest_path_for(config.output);
    std::ifstream min(mpath);
    if (!min) {
      throw ConfigError("cannot resume: missing manifest " + mpath.string());
    }
    nlohmann::json manifest;
    try {
      min >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("cannot resume: corrupt manifest: " +
                        std::string(e.what()));
    }
    const std::string stored_hash = manifest.value("config_hash", "");
    if (stored_hash != config_hash(config)) {
      std::string diff;
      const auto current = semantic_config_json(config);
      const auto& stored = manifest["config"];
      for (const auto& [key, value] : current.items()) {
        const nlohmann::json stored_value =
            stored.contains(key) ? stored[key] : nlohmann::json(nullptr);
        if (stored_value != nlohmann::json(value)) {
          diff += "\n  " + key + ": " + stored_value.dump() + " -> " +
                  value.dump();
        }
      }
      throw ConfigError("cannot resume: config differs from manifest" + diff);
    }
    if (std::filesystem::exists(config.output)) {
      for (const auto& rec : repair_record_file(config.output)) {
        done.insert(cell_key(rec.case_id, rec.model, rec.trial));
      }
    }
  } else {
    std::ofstream trunc(config.output, std::ios::trunc);
    if (!trunc) throw IoError("cannot write output: " + config.output);
    write_manifest(config);
  }

  std::vector<CellRef> pending;
  pending.reserve(cells.size());
  for (const CellRef& cell : cells) {
    if (done.count(cell_key(cell.c->id, cell.adapter->descriptor(),
                            cell.trial)) == 0) {
      pending.push_back(cell);
    }
  }
  summary.cells_prior = done.size();
  if (config.cell_limit > 0 && pending.size() > config.cell_limit) {
    pending.resize(config.cell_limit);
  }

  std::unique_ptr<modelio::ResponseCache> cache;
  if (!config.cache_dir.empty()) {
    cache = std::make_unique<modelio::ResponseCache>(config.cache_dir);
  }

  std::ofstream out(config.output, std::ios::app);
  if (!out) throw IoError("cannot append to output: " + config.output);
  std::mutex sink_mu;
  std::atomic<std::size_t> executed{0};
  std::atomic<std::size_t> errors{0};

  execute_cells(pending, config.params, cache.get(), config.cot,
                config.concurrency,
                config.use_openmp ? ExecMode::Parallel : ExecMode::Serial,
                [&](const TrialRecord& rec) {
                  executed.fetch_add(1);
                  if (rec.error) errors.fetch_add(1);
                  std::lock_guard<std::mutex> lock(sink_mu);
                  out << record_to_json(rec).dump() << "\n";
                  out.flush();
                });
  if (!out.good()) {
    throw IoError("record write failed: " + config.output);
  }

  summary.cells_executed = executed.load();
  summary.cell_errors = errors.load();
  return summary;
}

}  // namespace symgauntlet::runner
