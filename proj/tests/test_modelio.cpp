#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <unistd.h>

#include "symgauntlet/errors.hpp"
#include "symgauntlet/extract.hpp"
#include "symgauntlet/genprops.hpp"
#include "symgauntlet/modelio.hpp"
#include "symgauntlet/nlgen.hpp"

using namespace symgauntlet;
using namespace symgauntlet::modelio;

namespace {

const ModelParams kParams{};

std::string samantha_prompt() {
  const auto s = nlgen::canonical_samantha();
  std::vector<std::size_t> order(nlgen::middle_size(s));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return nlgen::build_question(s, order);
}

std::string ones(std::size_t n) {
  std::string out = "1";
  for (std::size_t i = 1; i < n; ++i) out += "+1";
  return out;
}

struct CountingAdapter final : ModelAdapter {
  std::atomic<int> calls{0};
  std::string complete(const std::string&, const ModelParams&,
                       std::uint64_t) override {
    calls.fetch_add(1);
    return "The answer is 7.";
  }
  std::string descriptor() const override { return "test:counting"; }
};

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("symgauntlet-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

/// In-process chat-completions endpoint for exercising the remote adapter.
class MockServer {
 public:
  explicit MockServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::string chat_body(const std::string& content) {
  nlohmann::json j = {
      {"choices",
       nlohmann::json::array(
           {{{"message", {{"role", "assistant"}, {"content", content}}}}})}};
  return j.dump();
}

}  // namespace

TEST_CASE("prompt parsing recognizes the three prompt shapes") {
  const auto arith = parse_prompt("1+1-1");
  REQUIRE(arith.kind == PromptKind::Arithmetic);
  CHECK(arith.terms == std::vector<std::int64_t>{1, 1, -1});

  const auto wrapped = parse_prompt("What is 2+3+4? Reply with a number.");
  REQUIRE(wrapped.kind == PromptKind::Arithmetic);
  CHECK(wrapped.terms == std::vector<std::int64_t>{2, 3, 4});

  const auto wc = parse_prompt(genprops::word_count_prompt("apples", 50));
  REQUIRE(wc.kind == PromptKind::WordCount);
  CHECK(wc.item_count == 50);

  const auto story = parse_prompt(samantha_prompt());
  REQUIRE(story.kind == PromptKind::Story);
  CHECK(story.story_start == 2);
  CHECK(story.story_events.size() == 10);

  CHECK(parse_prompt("nothing to see").kind == PromptKind::Unknown);
}

TEST_CASE("story parsing survives the chain-of-thought suffix") {
  const auto story = parse_prompt(nlgen::cot_wrap(samantha_prompt()));
  REQUIRE(story.kind == PromptKind::Story);
  CHECK(story.story_start == 2);
  CHECK(story.story_events.size() == 10);
}

TEST_CASE("story parsing handles spelled-out starts and preambles") {
  const auto emily = nlgen::canonical_emily();
  std::vector<std::size_t> order(nlgen::middle_size(emily));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto parsed = parse_prompt(nlgen::build_question(emily, order));
  REQUIRE(parsed.kind == PromptKind::Story);
  CHECK(parsed.story_start == 2);  // "two" in the opening
  CHECK(parsed.story_events.size() == 10);

  const auto injected = nlgen::inject_irrelevant(
      nlgen::canonical_samantha(), nlgen::builtin_corpus(),
      nlgen::InjectMode::Preamble, 3);
  std::vector<std::size_t> order2(nlgen::middle_size(injected));
  for (std::size_t i = 0; i < order2.size(); ++i) order2[i] = i;
  const auto parsed2 = parse_prompt(nlgen::build_question(injected, order2));
  REQUIRE(parsed2.kind == PromptKind::Story);
  CHECK(parsed2.story_start == 2);
  CHECK(parsed2.story_events.size() == 10);
}

TEST_CASE("perfect adder answers every prompt shape exactly") {
  PerfectAdder model;
  CHECK(model.complete("1+1+1+1+1", kParams, 0) == "The answer is 5.");
  CHECK(model.complete("1+1-1", kParams, 0) == "The answer is 1.");
  CHECK(model.complete(ones(150), kParams, 0) == "The answer is 150.");
  CHECK(model.complete(genprops::word_count_prompt("oranges", 40), kParams, 0) ==
        "The answer is 40.");
  const auto story_answer = model.complete(samantha_prompt(), kParams, 0);
  CHECK(story_answer.find("The answer is 12.") != std::string::npos);
  CHECK(model.complete("gibberish", kParams, 0) == kCannotParse);
}

TEST_CASE("simulated adapters are pure functions of their inputs") {
  PerfectAdder perfect;
  BiasedSnap snap;
  Truncator truncate(9);
  for (const auto prompt : {ones(95), ones(20), samantha_prompt()}) {
    CHECK(perfect.complete(prompt, kParams, 3) ==
          perfect.complete(prompt, kParams, 3));
    CHECK(snap.complete(prompt, kParams, 3) == snap.complete(prompt, kParams, 3));
    CHECK(truncate.complete(prompt, kParams, 3) ==
          truncate.complete(prompt, kParams, 3));
  }
}

TEST_CASE("snap bias follows its rule table") {
  BiasedSnap snap;
  CHECK(snap.complete(ones(95), kParams, 0) == "100");
  CHECK(snap.complete(ones(30), kParams, 0) == "30");
  CHECK(snap.complete(ones(35), kParams, 0) == "35");
  CHECK(snap.complete(ones(50), kParams, 0) == "50");
  CHECK(snap.complete(ones(100), kParams, 0) == "100");
  CHECK(snap.complete(ones(40), kParams, 0) == "50");   // snapped, wrong
  CHECK(snap.complete(ones(110), kParams, 0) == "100");  // snapped, wrong
  // Offset branch: wrong, near the truth, and never on a snap target.
  const auto off = std::stoll(snap.complete(ones(75), kParams, 0));
  CHECK(off != 75);
  CHECK(std::abs(off - 75) <= 5);
  CHECK(snap.complete("words only", kParams, 0) == kCannotParse);
}

TEST_CASE("snap with an unreachable threshold matches the perfect adder") {
  SnapConfig config;
  config.fail_threshold = std::numeric_limits<std::int64_t>::max();
  config.snap_radius = 0;
  BiasedSnap relaxed(config);
  PerfectAdder perfect;
  for (std::size_t n : {1, 5, 35, 50, 99, 150}) {
    const auto a = relaxed.complete(ones(n), kParams, 0);
    const auto b = perfect.complete(ones(n), kParams, 0);
    CHECK(extract::extract_integer(a).value == extract::extract_integer(b).value);
  }
}

TEST_CASE("truncator honors only its window") {
  Truncator t5(5);
  CHECK(t5.complete(ones(20), kParams, 0) == "The answer is 5.");
  Truncator t20(20);
  CHECK(t20.complete(ones(20), kParams, 0) == "The answer is 20.");
  Truncator t9(9);
  const auto response = t9.complete(samantha_prompt(), kParams, 0);
  CHECK(extract::extract_integer(response).value == 11);
  // The dropped final event is exactly what the omission scan reports.
  const auto omitted =
      nlgen::detect_omissions(response, nlgen::canonical_samantha());
  CHECK(omitted == std::set<std::size_t>{9});
  // Word lists are windowed the same way.
  CHECK(t5.complete(genprops::word_count_prompt("apples", 50), kParams, 0) ==
        "The answer is 5.");
}

TEST_CASE("descriptor factory builds and validates") {
  CHECK(make_adapter("sim:perfect", kParams)->descriptor() == "sim:perfect");
  CHECK(make_adapter("sim:snap", kParams)->descriptor() == "sim:snap");
  CHECK(make_adapter("sim:truncate:9", kParams)->descriptor() ==
        "sim:truncate:9");
  CHECK_THROWS_AS(make_adapter("sim:unknown", kParams), ConfigError);
  CHECK_THROWS_AS(make_adapter("sim:truncate:x", kParams), ConfigError);
}

TEST_CASE("response cache hits skip the adapter") {
  TempDir dir("cache-hit");
  ResponseCache cache(dir.path);
  CountingAdapter adapter;
  const auto first = cache.complete(adapter, "1+1", kParams, 0);
  const auto second = cache.complete(adapter, "1+1", kParams, 0);
  CHECK(first == second);
  CHECK(adapter.calls.load() == 1);
  CHECK(cache.hits() == 1);
  CHECK(cache.misses() == 1);
}

TEST_CASE("distinct trials are distinct cache keys") {
  TempDir dir("cache-trials");
  ResponseCache cache(dir.path);
  CountingAdapter adapter;
  cache.complete(adapter, "1+1", kParams, 0);
  cache.complete(adapter, "1+1", kParams, 1);
  CHECK(adapter.calls.load() == 2);
  CHECK(ResponseCache::cache_key("d", "p", kParams, 0) !=
        ResponseCache::cache_key("d", "p", kParams, 1));
}

TEST_CASE("clearing the cache forces re-invocation") {
  TempDir dir("cache-clear");
  CountingAdapter adapter;
  {
    ResponseCache cache(dir.path);
    cache.complete(adapter, "1+1", kParams, 0);
  }
  std::filesystem::remove_all(dir.path);
  ResponseCache cache(dir.path);
  cache.complete(adapter, "1+1", kParams, 0);
  CHECK(adapter.calls.load() == 2);
}

TEST_CASE("corrupt cache entries degrade to misses with a warning") {
  TempDir dir("cache-corrupt");
  ResponseCache cache(dir.path);
  CountingAdapter adapter;
  cache.complete(adapter, "1+1", kParams, 0);
  // Scribble over the stored entry.
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir.path)) {
    if (entry.is_regular_file()) {
      std::ofstream out(entry.path(), std::ios::trunc);
      out << "not json";
    }
  }
  const auto again = cache.complete(adapter, "1+1", kParams, 0);
  CHECK(again == "The answer is 7.");
  CHECK(adapter.calls.load() == 2);
  CHECK(cache.warnings() == 1);
}

TEST_CASE("remote adapter round-trips a completion") {
  setenv(kApiKeyEnvVar, "test-key", 1);
  std::atomic<int> hits{0};
  std::string seen_auth;
  nlohmann::json seen_body;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    hits.fetch_add(1);
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(chat_body("42"), "application/json");
  });
  RemoteChatAdapter adapter("test-model", server.endpoint(),
                            RetryPolicy{3, 1, 2.0, 10}, [](const std::string&) {});
  ModelParams params;
  params.max_tokens = 16;
  params.temperature = 0.5;
  CHECK(adapter.complete("any prompt", params, 0) == "42");
  CHECK(hits.load() == 1);
  CHECK(seen_auth == "Bearer test-key");
  CHECK(seen_body.at("model") == "test-model");
  REQUIRE(seen_body.at("messages").size() == 1);
  CHECK(seen_body.at("messages")[0].at("role") == "user");
  CHECK(seen_body.at("messages")[0].at("content") == "any prompt");
  CHECK(seen_body.at("temperature").get<double>() == 0.5);
  CHECK(seen_body.at("max_tokens").get<int>() == 16);
}

TEST_CASE("transient failures are retried with backoff") {
  setenv(kApiKeyEnvVar, "test-key", 1);
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    const int n = hits.fetch_add(1);
    if (n < 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
    } else {
      res.set_content(chat_body("ok after backoff"), "application/json");
    }
  });
  std::vector<std::string> log_lines;
  RemoteChatAdapter adapter(
      "m", server.endpoint(), RetryPolicy{5, 1, 2.0, 4},
      [&](const std::string& line) { log_lines.push_back(line); });
  CHECK(adapter.complete("p", kParams, 0) == "ok after backoff");
  CHECK(hits.load() == 3);
  // Two failure lines plus the post-backoff success line.
  REQUIRE(log_lines.size() == 3);
  CHECK(log_lines[0].find("429") != std::string::npos);
  CHECK(log_lines[2].find("succeeded") != std::string::npos);
}

TEST_CASE("retry budget exhaustion carries the last status") {
  setenv(kApiKeyEnvVar, "test-key", 1);
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 500;
  });
  RemoteChatAdapter adapter("m", server.endpoint(), RetryPolicy{3, 1, 2.0, 4},
                            [](const std::string&) {});
  try {
    adapter.complete("p", kParams, 0);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.last_status() == 500);
  }
  CHECK(hits.load() == 3);
}

TEST_CASE("non-transient statuses fail immediately") {
  setenv(kApiKeyEnvVar, "test-key", 1);
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.status = 400;
  });
  RemoteChatAdapter adapter("m", server.endpoint(), RetryPolicy{5, 1, 2.0, 4},
                            [](const std::string&) {});
  CHECK_THROWS_AS(adapter.complete("p", kParams, 0), TransportError);
  CHECK(hits.load() == 1);
}

TEST_CASE("missing credential fails construction before any request") {
  unsetenv(kApiKeyEnvVar);
  CHECK_THROWS_AS(RemoteChatAdapter("m", "http://127.0.0.1:1", RetryPolicy{},
                                    [](const std::string&) {}),
                  ConfigError);
  setenv(kApiKeyEnvVar, "test-key", 1);
  CHECK_THROWS_AS(RemoteChatAdapter("m", "", RetryPolicy{},
                                    [](const std::string&) {}),
                  ConfigError);
}
