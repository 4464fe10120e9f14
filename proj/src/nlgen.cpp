#include "symgauntlet/nlgen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "symgauntlet/errors.hpp"

namespace symgauntlet::nlgen {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

bool contains_word(const std::string& haystack_lower, const std::string& word) {
  std::size_t pos = haystack_lower.find(word);
  while (pos != std::string::npos) {
    const bool left_ok =
        pos == 0 || !std::isalpha(static_cast<unsigned char>(haystack_lower[pos - 1]));
    const std::size_t end = pos + word.size();
    const bool right_ok =
        end >= haystack_lower.size() ||
        !std::isalpha(static_cast<unsigned char>(haystack_lower[end]));
    if (left_ok && right_ok) return true;
    pos = haystack_lower.find(word, pos + 1);
  }
  return false;
}

const std::vector<std::string>& small_number_words() {
  static const std::vector<std::string> words = {
      "zero",     "one",     "two",      "three",    "four",   "five",
      "six",      "seven",   "eight",    "nine",     "ten",    "eleven",
      "twelve",   "thirteen", "fourteen", "fifteen", "sixteen",
      "seventeen", "eighteen", "nineteen", "twenty",
  };
  return words;
}

/// m! capped so comparisons against small counts never overflow.
std::uint64_t capped_factorial(std::size_t m, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= m; ++i) {
    if (f > cap / i) return cap;
    f *= i;
  }
  return f;
}

}  // namespace

std::int64_t expected_answer(const Scenario& s) {
  return s.start_count + static_cast<std::int64_t>(s.events.size());
}

std::size_t middle_size(const Scenario& s) {
  return s.events.size() + s.distractors.size();
}

std::string build_question(const Scenario& s,
                           const std::vector<std::size_t>& order) {
  const std::size_t m = middle_size(s);
  if (order.size() != m) {
    throw std::invalid_argument("permutation size " +
                                std::to_string(order.size()) +
                                " does not match middle size " +
                                std::to_string(m));
  }
  std::vector<bool> seen(m, false);
  for (std::size_t idx : order) {
    if (idx >= m || seen[idx]) {
      throw std::invalid_argument("order is not a permutation of the middle");
    }
    seen[idx] = true;
  }

  std::string text;
  if (!s.preamble.empty()) {
    text += s.preamble;
    text += ' ';
  }
  text += s.opening;
  for (std::size_t idx : order) {
    text += ' ';
    text += idx < s.events.size() ? s.events[idx].text
                                  : s.distractors[idx - s.events.size()];
  }
  text += ' ';
  text += s.question;
  return text;
}

std::vector<std::vector<std::size_t>> permute_middle(const Scenario& s,
                                                     std::uint64_t seed,
                                                     std::size_t count) {
  if (count < 1) throw std::invalid_argument("permutation count must be >= 1");
  const std::size_t m = middle_size(s);
  const std::uint64_t space = capped_factorial(m, 1ULL << 62);
  Rng rng(seed);

  std::vector<std::vector<std::size_t>> out;
  out.reserve(count);
  if (space < count) {
    // Fewer orderings exist than requested; emit seeded shuffles as-is.
    for (std::size_t i = 0; i < count; ++i) out.push_back(rng.permutation(m));
    return out;
  }
  std::set<std::vector<std::size_t>> seen;
  while (out.size() < count) {
    auto perm = rng.permutation(m);
    if (seen.insert(perm).second) out.push_back(std::move(perm));
  }
  return out;
}

void validate_corpus(const IrrelevantCorpus& corpus) {
  auto check = [](const std::string& entry) {
    for (char c : entry) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        throw ConfigError("irrelevant corpus entry contains a digit: " + entry);
      }
    }
    const std::string lower = lowercase(entry);
    for (const auto& word : small_number_words()) {
      if (contains_word(lower, word)) {
        throw ConfigError("irrelevant corpus entry spells out a number (" +
                          word + "): " + entry);
      }
    }
  };
  for (const auto& p : corpus.preambles) check(p);
  for (const auto& s : corpus.sentences) check(s);
}

Scenario inject_irrelevant(const Scenario& s, const IrrelevantCorpus& corpus,
                           InjectMode mode, std::uint64_t seed) {
  validate_corpus(corpus);
  Rng rng(seed);
  Scenario out = s;
  if (mode == InjectMode::Preamble) {
    if (corpus.preambles.empty()) {
      throw std::invalid_argument("corpus has no preambles");
    }
    const auto pick = corpus.preambles[rng.below(corpus.preambles.size())];
    out.preamble = out.preamble.empty() ? pick : out.preamble + " " + pick;
  } else {
    // Zero distractor sentences interleave to the identical scenario.
    out.distractors.insert(out.distractors.end(), corpus.sentences.begin(),
                           corpus.sentences.end());
  }
  return out;
}

std::string cot_wrap(const std::string& prompt) {
  return prompt + "\n" + kCotSuffix;
}

std::set<std::size_t> detect_omissions(const std::string& response,
                                       const Scenario& s) {
  const std::string lower = lowercase(response);
  std::set<std::size_t> missing;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (lower.find(lowercase(s.events[i].keyword)) == std::string::npos) {
      missing.insert(i);
    }
  }
  return missing;
}

Scenario canonical_samantha() {
  Scenario s;
  s.name = "samantha";
  s.protagonist = "Samantha";
  s.item = "stuffed animals";
  s.start_count = 2;
  s.opening = "Samantha has 2 stuffed animals.";
  s.events = {
      {"Then, she received one more stuffed animal from her friend.", "friend"},
      {"Next, her aunt gave her one more stuffed animal.", "aunt"},
      {"Then, she won a stuffed animal at a school event.", "won"},
      {"She bought a stuffed animal from her favorite store.", "bought"},
      {"Later, she found one more stuffed animal in her toy box.", "found"},
      {"She also bought one stuffed animal from the mall.", "bought"},
      {"Her brother gave her another stuffed animal.", "brother"},
      {"After that, her dad bought her another stuffed animal.", "dad"},
      {"Then she borrowed another stuffed animal from her sister.", "sister"},
      {"Finally, she got one more stuffed animal as a gift from her neighbor.",
       "neighbor"},
  };
  s.question = "How many stuffed animals does Samantha have now?";
  return s;
}

Scenario canonical_emily() {
  Scenario s;
  s.name = "emily";
  s.protagonist = "Emily";
  s.item = "puzzles";
  s.start_count = 2;
  s.opening = "Emily has two puzzles.";
  s.events = {
      {"Then, she received one more puzzle from her friend.", "friend"},
      {"Next, her aunt gave her one more puzzle.", "aunt"},
      {"Then, she won a puzzle at a school event.", "won"},
      {"She bought a puzzle from her favorite store.", "bought"},
      {"Then she borrowed another puzzle from her sister.", "sister"},
      {"Later, she found one more puzzle in her toy box.", "found"},
      {"She also bought one puzzle from the mall.", "mall"},
      {"Her brother gave her another puzzle.", "brother"},
      {"After that, her mom bought her another puzzle.", "mom"},
      {"Finally, she got one more puzzle as a gift from her neighbor.",
       "neighbor"},
  };
  s.question = "How many puzzles does Emily have now?";
  return s;
}

const IrrelevantCorpus& builtin_corpus() {
  static const IrrelevantCorpus corpus = [] {
    IrrelevantCorpus c;
    c.preambles = {
        "Samantha is a young girl with a passion for collecting stuffed "
        "animals. She grew up in a loving family with her parents, brother, "
        "and sister, who all supported her hobby. Samantha is known for her "
        "kind and caring nature, often sharing her stuffed animals with her "
        "friends and family. She enjoys visiting different stores and events "
        "to find unique and special stuffed animals to add to her collection. "
        "Samantha's love for stuffed animals has also inspired her to "
        "volunteer at a local children's hospital, where she brings joy to "
        "the patients by sharing her collection with them.",
    };
    c.sentences = {
        "The weather outside was bright and sunny.",
        "Her favorite color has always been purple.",
        "The family cat napped quietly on the windowsill.",
        "Music played softly from the kitchen radio.",
        "The street stayed calm and peaceful all day.",
    };
    validate_corpus(c);
    return c;
  }();
  return corpus;
}

std::vector<Scenario> builtin_scenarios() {
  return {canonical_samantha(), canonical_emily()};
}

namespace {

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.protagonist = j.at("protagonist").get<std::string>();
  s.item = j.at("item").get<std::string>();
  s.start_count = j.at("start").get<std::int64_t>();
  if (s.start_count < 0) {
    throw ConfigError("scenario start count must be non-negative: " + s.name);
  }
  s.question = j.at("question").get<std::string>();
  const auto& events = j.at("events");
  const auto& keywords = j.at("keywords");
  if (events.size() != keywords.size()) {
    throw ConfigError("scenario " + s.name +
                      ": events[] and keywords[] differ in length");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    s.events.push_back(Event{events[i].get<std::string>(),
                             keywords[i].get<std::string>()});
  }
  if (j.contains("opening")) {
    s.opening = j.at("opening").get<std::string>();
  } else {
    s.opening = s.protagonist + " has " + std::to_string(s.start_count) + " " +
                s.item + ".";
  }
  return s;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

std::vector<Scenario> load_scenarios_file(const std::string& path) {
  const auto j = load_json_file(path);
  std::vector<Scenario> out;
  for (const auto& item : j.at("scenarios")) {
    out.push_back(scenario_from_json(item));
  }
  if (out.empty()) throw ConfigError("no scenarios in " + path);
  return out;
}

IrrelevantCorpus load_corpus_file(const std::string& path) {
  const auto j = load_json_file(path);
  IrrelevantCorpus corpus;
  for (const auto& p : j.value("preambles", nlohmann::json::array())) {
    corpus.preambles.push_back(p.get<std::string>());
  }
  for (const auto& s : j.value("sentences", nlohmann::json::array())) {
    corpus.sentences.push_back(s.get<std::string>());
  }
  validate_corpus(corpus);
  return corpus;
}

namespace {

struct Persona {
  const char* name;
  const char* subj;  // she / he / they
  const char* poss;  // her / his / their
  const char* obj;   // her / him / them
};

constexpr Persona kPersonas[] = {
    {"Ava", "she", "her", "her"},   {"Liam", "he", "his", "him"},
    {"Maya", "she", "her", "her"},  {"Noah", "he", "his", "him"},
    {"Zoe", "she", "her", "her"},   {"Omar", "he", "his", "him"},
    {"Priya", "she", "her", "her"}, {"Finn", "he", "his", "him"},
};

struct ItemNoun {
  const char* plural;
  const char* singular;
};

constexpr ItemNoun kItems[] = {
    {"marbles", "marble"},         {"seashells", "seashell"},
    {"comic books", "comic book"}, {"keychains", "keychain"},
    {"postcards", "postcard"},     {"crayons", "crayon"},
};

struct EventTemplate {
  const char* pattern;  // placeholders: {subj} {Subj} {poss} {obj} {item}
  const char* keyword;
};

constexpr EventTemplate kEventTemplates[] = {
    {"Then, {subj} received one more {item} from {poss} friend.", "friend"},
    {"Next, {poss} aunt gave {obj} one more {item}.", "aunt"},
    {"{Subj} won a {item} at a school raffle.", "won"},
    {"{Subj} bought a {item} from the corner shop.", "shop"},
    {"Later, {subj} found one more {item} under the bed.", "found"},
    {"{Poss} cousin gave {obj} another {item}.", "cousin"},
    {"After that, {poss} grandma bought {obj} another {item}.", "grandma"},
    {"{Subj} traded a sticker for another {item}.", "traded"},
    {"A classmate handed {obj} one more {item}.", "classmate"},
    {"Finally, {subj} got one more {item} as a prize from {poss} coach.",
     "coach"},
};

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string capitalized(std::string word) {
  if (!word.empty()) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  }
  return word;
}

}  // namespace

Scenario make_random_scenario(std::uint64_t seed) {
  Rng rng(seed);
  const Persona& who = kPersonas[rng.below(std::size(kPersonas))];
  const ItemNoun& item = kItems[rng.below(std::size(kItems))];

  Scenario s;
  s.name = "generated-" + std::to_string(seed);
  s.protagonist = who.name;
  s.item = item.plural;
  s.start_count = static_cast<std::int64_t>(rng.below(6));
  s.opening = std::string(who.name) + " has " + std::to_string(s.start_count) +
              " " + item.plural + ".";
  s.question = std::string("How many ") + item.plural + " does " + who.name +
               " have now?";

  const std::size_t event_count = 3 + rng.below(std::size(kEventTemplates) - 2);
  auto order = rng.permutation(std::size(kEventTemplates));
  for (std::size_t i = 0; i < event_count; ++i) {
    const EventTemplate& tmpl = kEventTemplates[order[i]];
    std::string text = tmpl.pattern;
    text = replace_all(text, "{Subj}", capitalized(who.subj));
    text = replace_all(text, "{subj}", who.subj);
    text = replace_all(text, "{Poss}", capitalized(who.poss));
    text = replace_all(text, "{poss}", who.poss);
    text = replace_all(text, "{obj}", who.obj);
    text = replace_all(text, "{item}", item.singular);
    s.events.push_back(Event{std::move(text), tmpl.keyword});
  }
  return s;
}

}  // namespace symgauntlet::nlgen
