#include "symgauntlet/modelio.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "symgauntlet/algebra.hpp"
#include "symgauntlet/digest.hpp"
#include "symgauntlet/errors.hpp"
#include "symgauntlet/rng.hpp"

namespace symgauntlet::modelio {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

/// Occurrences of `needle` bounded by non-alphanumeric characters.
std::size_t count_standalone(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = text.find(needle);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !is_alnum(text[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right_ok = end >= text.size() || !is_alnum(text[end]);
    if (left_ok && right_ok) ++count;
    pos = text.find(needle, pos + 1);
  }
  return count;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      if (!current.empty()) {
        sentences.push_back(current);
        current.clear();
      }
      continue;
    }
    if (current.empty() && c == ' ') continue;
    current += c;
    if ((c == '.' || c == '?' || c == '!') &&
        (i + 1 >= text.size() || text[i + 1] == ' ' || text[i + 1] == '\n')) {
      sentences.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(current);
  return sentences;
}

const std::vector<std::string>& number_words() {
  static const std::vector<std::string> words = {
      "zero",      "one",      "two",      "three",   "four",
      "five",      "six",      "seven",    "eight",   "nine",
      "ten",       "eleven",   "twelve",   "thirteen", "fourteen",
      "fifteen",   "sixteen",  "seventeen", "eighteen", "nineteen",
      "twenty",
  };
  return words;
}

/// First digit-run or spelled-out small number in the sentence, if any.
std::optional<std::int64_t> first_number(const std::string& sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(sentence[i]))) {
      std::size_t j = i;
      while (j < sentence.size() &&
             std::isdigit(static_cast<unsigned char>(sentence[j]))) {
        ++j;
      }
      return std::stoll(sentence.substr(i, j - i));
    }
  }
  const std::string lower = lowercase(sentence);
  std::optional<std::int64_t> best;
  std::size_t best_pos = std::string::npos;
  const auto& words = number_words();
  for (std::size_t v = 0; v < words.size(); ++v) {
    std::size_t pos = lower.find(words[v]);
    while (pos != std::string::npos) {
      const bool left_ok = pos == 0 || !is_alnum(lower[pos - 1]);
      const std::size_t end = pos + words[v].size();
      const bool right_ok = end >= lower.size() || !is_alnum(lower[end]);
      if (left_ok && right_ok && pos < best_pos) {
        best_pos = pos;
        best = static_cast<std::int64_t>(v);
      }
      pos = lower.find(words[v], pos + 1);
    }
  }
  return best;
}

ParsedPrompt parse_word_count(const std::string& prompt) {
  ParsedPrompt out;
  const std::string marker = "the word \"";
  const std::string lower = lowercase(prompt);
  const auto mpos = lower.find(marker);
  if (mpos == std::string::npos) return out;
  const auto qstart = mpos + marker.size();
  const auto qend = prompt.find('"', qstart);
  if (qend == std::string::npos) return out;
  const std::string item = prompt.substr(qstart, qend - qstart);
  if (item.empty()) return out;
  const std::size_t occurrences = count_standalone(prompt, item);
  if (occurrences < 2) return out;  // only the quoted mention itself
  out.kind = PromptKind::WordCount;
  // One occurrence sits inside the instruction quotes.
  out.item_count = static_cast<std::int64_t>(occurrences) - 1;
  return out;
}

ParsedPrompt parse_story(const std::string& prompt) {
  ParsedPrompt out;
  const auto sentences = split_sentences(prompt);
  if (sentences.size() < 2) return out;

  // The question is the last "How many ...?" sentence.
  std::size_t question_idx = sentences.size();
  for (std::size_t i = sentences.size(); i-- > 0;) {
    const std::string lower = lowercase(sentences[i]);
    if (!sentences[i].empty() && sentences[i].back() == '?' &&
        lower.find("how many") != std::string::npos) {
      question_idx = i;
      break;
    }
  }
  if (question_idx == sentences.size()) return out;

  const std::string qlower = lowercase(sentences[question_idx]);
  const auto how_pos = qlower.find("how many ");
  const auto does_pos = qlower.find(" does", how_pos);
  if (how_pos == std::string::npos || does_pos == std::string::npos) return out;
  const auto item_begin = how_pos + 9;
  std::string plural = sentences[question_idx].substr(item_begin, does_pos - item_begin);
  if (plural.empty()) return out;
  std::string singular = plural;
  if (singular.size() > 1 && singular.back() == 's') singular.pop_back();

  // Opening: the first sentence before the question that states a number.
  std::size_t opening_idx = sentences.size();
  for (std::size_t i = 0; i < question_idx; ++i) {
    if (auto n = first_number(sentences[i])) {
      opening_idx = i;
      out.story_start = *n;
      break;
    }
  }
  if (opening_idx == sentences.size()) return out;

  const std::string singular_lower = lowercase(singular);
  for (std::size_t i = opening_idx + 1; i < question_idx; ++i) {
    const std::string lower = lowercase(sentences[i]);
    // Granting sentences mention the item in the singular; the plural form
    // (trailing 's') marks talk *about* the collection, not a grant.
    std::size_t pos = lower.find(singular_lower);
    bool grants = false;
    while (pos != std::string::npos) {
      const std::size_t end = pos + singular_lower.size();
      if (end >= lower.size() || !is_alnum(lower[end])) {
        grants = true;
        break;
      }
      pos = lower.find(singular_lower, pos + 1);
    }
    if (grants) out.story_events.push_back(sentences[i]);
  }
  out.kind = PromptKind::Story;
  return out;
}

ParsedPrompt parse_arithmetic(const std::string& prompt) {
  ParsedPrompt out;
  // Longest run of expression characters that contains a digit.
  std::size_t best_begin = 0, best_len = 0;
  std::size_t i = 0;
  while (i < prompt.size()) {
    const char c = prompt[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
      std::size_t j = i;
      bool has_digit = false;
      while (j < prompt.size() &&
             (std::isdigit(static_cast<unsigned char>(prompt[j])) ||
              prompt[j] == '+' || prompt[j] == '-')) {
        has_digit = has_digit || std::isdigit(static_cast<unsigned char>(prompt[j]));
        ++j;
      }
      if (has_digit && j - i > best_len) {
        best_begin = i;
        best_len = j - i;
      }
      i = j;
    } else {
      ++i;
    }
  }
  if (best_len == 0) return out;
  std::string run = prompt.substr(best_begin, best_len);
  while (!run.empty() && run.front() == '+') run.erase(run.begin());
  while (!run.empty() && (run.back() == '+' || run.back() == '-')) run.pop_back();
  try {
    out.terms = algebra::parse_terms(run).terms();
  } catch (const std::invalid_argument&) {
    return out;
  }
  out.kind = PromptKind::Arithmetic;
  return out;
}

std::string exact_answer_text(std::int64_t value) {
  return "The answer is " + std::to_string(value) + ".";
}

/// Shared recap-style story answer: honors the first `window` events.
std::string answer_story(const ParsedPrompt& story, std::size_t window) {
  const std::size_t honored = std::min(window, story.story_events.size());
  std::string recap;
  for (std::size_t i = 0; i < honored; ++i) {
    recap += story.story_events[i];
    recap += ' ';
  }
  const std::int64_t total =
      story.story_start + static_cast<std::int64_t>(honored);
  return recap + exact_answer_text(total);
}

void default_log(const std::string& line) { std::cerr << line << "\n"; }

}  // namespace

std::string canonical(const ModelParams& params) {
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.6f", params.temperature);
  return "model=" + params.model_name + ";endpoint=" + params.endpoint +
         ";temperature=" + temp +
         ";max_tokens=" + std::to_string(params.max_tokens);
}

ParsedPrompt parse_prompt(const std::string& prompt) {
  if (auto wc = parse_word_count(prompt); wc.kind == PromptKind::WordCount) {
    return wc;
  }
  if (auto story = parse_story(prompt); story.kind == PromptKind::Story) {
    return story;
  }
  if (auto arith = parse_arithmetic(prompt); arith.kind == PromptKind::Arithmetic) {
    return arith;
  }
  return ParsedPrompt{};
}

std::string PerfectAdder::complete(const std::string& prompt,
                                   const ModelParams&, std::uint64_t) {
  const auto parsed = parse_prompt(prompt);
  switch (parsed.kind) {
    case PromptKind::Arithmetic: {
      std::int64_t sum = 0;
      for (std::int64_t t : parsed.terms) sum += t;
      return exact_answer_text(sum);
    }
    case PromptKind::WordCount:
      return exact_answer_text(parsed.item_count);
    case PromptKind::Story:
      return answer_story(parsed, parsed.story_events.size());
    case PromptKind::Unknown:
      break;
  }
  return kCannotParse;
}

BiasedSnap::BiasedSnap(SnapConfig config) : config_(std::move(config)) {
  if (config_.snap_radius < 0) throw ConfigError("snap radius must be >= 0");
  if (config_.fail_threshold < 1) throw ConfigError("fail threshold must be >= 1");
  std::sort(config_.snap_targets.begin(), config_.snap_targets.end());
}

std::string BiasedSnap::complete(const std::string& prompt, const ModelParams&,
                                 std::uint64_t) {
  const auto parsed = parse_prompt(prompt);
  std::int64_t truth = 0;
  std::int64_t count = 0;
  switch (parsed.kind) {
    case PromptKind::Arithmetic: {
      for (std::int64_t t : parsed.terms) truth += t;
      count = static_cast<std::int64_t>(parsed.terms.size());
      break;
    }
    case PromptKind::WordCount:
      truth = parsed.item_count;
      count = parsed.item_count;
      break;
    case PromptKind::Story:
      truth = parsed.story_start +
              static_cast<std::int64_t>(parsed.story_events.size());
      count = static_cast<std::int64_t>(parsed.story_events.size());
      break;
    case PromptKind::Unknown:
      return kCannotParse;
  }

  if (count <= config_.fail_threshold) return std::to_string(truth);

  const std::int64_t* best = nullptr;
  for (const std::int64_t& target : config_.snap_targets) {
    if (std::llabs(truth - target) <= config_.snap_radius &&
        (best == nullptr ||
         std::llabs(truth - target) < std::llabs(truth - *best))) {
      best = &target;
    }
  }
  if (best != nullptr) return std::to_string(*best);

  // Seeded wrong answer. Magnitude stays at most 5, below half the default
  // radius, so an offset answer can never land on a snap target.
  const std::uint64_t h = mix_seed(config_.offset_seed, fnv1a64(prompt));
  const std::int64_t magnitude = 1 + static_cast<std::int64_t>(h % 5);
  const std::int64_t offset = (h >> 32) & 1 ? magnitude : -magnitude;
  return std::to_string(truth + offset);
}

Truncator::Truncator(std::size_t window) : window_(window) {
  if (window_ < 1) throw ConfigError("truncation window must be >= 1");
}

std::string Truncator::descriptor() const {
  return "sim:truncate:" + std::to_string(window_);
}

std::string Truncator::complete(const std::string& prompt, const ModelParams&,
                                std::uint64_t) {
  const auto parsed = parse_prompt(prompt);
  switch (parsed.kind) {
    case PromptKind::Arithmetic: {
      std::int64_t sum = 0;
      const std::size_t n = std::min(window_, parsed.terms.size());
      for (std::size_t i = 0; i < n; ++i) sum += parsed.terms[i];
      return exact_answer_text(sum);
    }
    case PromptKind::WordCount:
      return exact_answer_text(std::min<std::int64_t>(
          parsed.item_count, static_cast<std::int64_t>(window_)));
    case PromptKind::Story:
      return answer_story(parsed, window_);
    case PromptKind::Unknown:
      break;
  }
  return kCannotParse;
}

RemoteChatAdapter::RemoteChatAdapter(std::string model_name,
                                     std::string endpoint, RetryPolicy retry,
                                     LogFn log)
    : model_name_(std::move(model_name)),
      endpoint_(std::move(endpoint)),
      retry_(retry),
      log_(log ? std::move(log) : default_log) {
  if (endpoint_.empty()) {
    throw ConfigError("remote adapter needs an endpoint (--endpoint)");
  }
  const char* key = std::getenv(kApiKeyEnvVar);
  if (key == nullptr || *key == '\0') {
    throw ConfigError(std::string("missing credential: set ") + kApiKeyEnvVar);
  }
  api_key_ = key;
}

std::string RemoteChatAdapter::complete(const std::string& prompt,
                                        const ModelParams& params,
                                        std::uint64_t) {
  nlohmann::json body = {
      {"model", params.model_name.empty() ? model_name_ : params.model_name},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };
  const std::string payload = body.dump();

  int last_status = 0;
  std::string last_detail;
  int backoff_ms = retry_.initial_backoff_ms;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post("/v1/chat/completions", headers, payload,
                           "application/json");
    if (res) {
      last_status = res->status;
      if (res->status == 200) {
        if (attempt > 1) {
          log_("attempt " + std::to_string(attempt) + "/" +
               std::to_string(retry_.max_attempts) + " against " + endpoint_ +
               " succeeded after backoff");
        }
        try {
          const auto j = nlohmann::json::parse(res->body);
          return j.at("choices").at(0).at("message").at("content")
              .get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw TransportError(
              "malformed completion response: " + std::string(e.what()), 200);
        }
      }
      const bool transient = res->status == 429 || res->status >= 500;
      last_detail = "HTTP " + std::to_string(res->status);
      if (!transient) {
        throw TransportError("chat completion failed: " + last_detail +
                                 " from " + endpoint_,
                             res->status);
      }
    } else {
      last_status = 0;
      last_detail = "connection error (" + httplib::to_string(res.error()) + ")";
    }
    log_("attempt " + std::to_string(attempt) + "/" +
         std::to_string(retry_.max_attempts) + " against " + endpoint_ +
         " failed: " + last_detail +
         (attempt < retry_.max_attempts
              ? ", retrying in " + std::to_string(backoff_ms) + "ms"
              : ", giving up"));
    if (attempt < retry_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms = std::min(
          retry_.max_backoff_ms,
          static_cast<int>(backoff_ms * retry_.backoff_factor));
    }
  }
  throw TransportError("retries exhausted: " + last_detail + " from " +
                           endpoint_,
                       last_status);
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string());
}

std::string ResponseCache::cache_key(const std::string& descriptor,
                                     const std::string& prompt,
                                     const ModelParams& params,
                                     std::uint64_t trial_index) {
  std::string material;
  material += descriptor;
  material += '\x1e';
  material += prompt;
  material += '\x1e';
  material += canonical(params);
  material += '\x1e';
  material += std::to_string(trial_index);
  return sha256_hex(material);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::string ResponseCache::complete(ModelAdapter& adapter,
                                    const std::string& prompt,
                                    const ModelParams& params,
                                    std::uint64_t trial_index) {
  const std::string key =
      cache_key(adapter.descriptor(), prompt, params, trial_index);
  const auto path = path_for(key);

  {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ifstream in(path);
    if (in) {
      try {
        nlohmann::json j;
        in >> j;
        const std::string response = j.at("response").get<std::string>();
        hits_.fetch_add(1);
        return response;
      } catch (const nlohmann::json::exception&) {
        warnings_.fetch_add(1);
        std::cerr << "cache entry corrupt, refetching: " << path << "\n";
      }
    }
  }

  misses_.fetch_add(1);
  const std::string response = adapter.complete(prompt, params, trial_index);

  {
    std::lock_guard<std::mutex> lock(mutex_);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    nlohmann::json payload = {
        {"descriptor", adapter.descriptor()},
        {"params", canonical(params)},
        {"trial", trial_index},
        {"prompt", prompt},
        {"response", response},
    };
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw IoError("cannot write cache entry " + tmp);
      out << payload.dump() << "\n";
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot finalize cache entry " + path.string());
  }
  return response;
}

std::unique_ptr<ModelAdapter> make_adapter(const std::string& descriptor,
                                           const ModelParams& base_params) {
  if (descriptor == "sim:perfect") return std::make_unique<PerfectAdder>();
  if (descriptor == "sim:snap") return std::make_unique<BiasedSnap>();
  if (descriptor.rfind("sim:truncate:", 0) == 0) {
    const std::string arg = descriptor.substr(13);
    try {
      return std::make_unique<Truncator>(std::stoull(arg));
    } catch (const std::exception&) {
      throw ConfigError("bad truncation window in descriptor: " + descriptor);
    }
  }
  if (descriptor.rfind("remote:", 0) == 0) {
    return std::make_unique<RemoteChatAdapter>(descriptor.substr(7),
                                               base_params.endpoint);
  }
  throw ConfigError("unknown model descriptor: " + descriptor +
                    " (expected sim:perfect, sim:snap, sim:truncate:<L>, "
                    "or remote:<name>)");
}

}  // namespace symgauntlet::modelio
