#include "treeduce/miner.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "treeduce/reducer.h"

#include "json.hpp"

namespace treeduce {

namespace {

using json = nlohmann::ordered_json;

constexpr int kStoreVersion = 1;

long long to_hundredths(double pct) {
  return std::llround(pct * 100.0);
}

// threshold test on the exact ratio 100*count/total, inclusive
bool clears(long long count, long long total, long long threshold_hundredths) {
  return 10000 * count >= threshold_hundredths * total;
}

double confidence_pct(long long count, long long total) {
  return static_cast<double>(std::llround(10000.0 * count / total)) / 100.0;
}

struct DominantChoice {
  std::string head_key;
  std::string label_key;
  long long head_count = 0;
  long long label_count = 0;
};

DominantChoice pick_dominant(const KeyStats& stats) {
  DominantChoice choice;
  for (const auto& [pattern, count] : stats.pattern_counts) {
    if (count > choice.head_count) {  // map order breaks ties lexicographically
      choice.head_count = count;
      choice.head_key = pattern;
    }
  }
  for (const auto& [key, count] : stats.labeled_counts) {
    if (key.first != choice.head_key) continue;
    if (count > choice.label_count) {
      choice.label_count = count;
      choice.label_key = key.second;
    }
  }
  return choice;
}

const char* to_string(TagField f) { return f == TagField::Upos ? "upos" : "xpos"; }
const char* to_string(MiningMode m) {
  return m == MiningMode::BagOfRules ? "bag-of-rules" : "iterative";
}
const char* to_string(IterativePriority p) {
  return p == IterativePriority::ConfidenceFirst ? "confidence-first"
                                                 : "noun-proximity";
}

TagField tag_field_from(const std::string& s) {
  if (s == "upos") return TagField::Upos;
  if (s == "xpos") return TagField::Xpos;
  throw MinerError("unknown tag field '" + s + "'");
}
MiningMode mode_from(const std::string& s) {
  if (s == "bag-of-rules") return MiningMode::BagOfRules;
  if (s == "iterative") return MiningMode::Iterative;
  throw MinerError("unknown mining mode '" + s + "'");
}
IterativePriority priority_from(const std::string& s) {
  if (s == "confidence-first") return IterativePriority::ConfidenceFirst;
  if (s == "noun-proximity") return IterativePriority::NounProximity;
  throw MinerError("unknown priority '" + s + "'");
}

bool is_noun(const std::string& tag) { return tag == "NOUN" || tag == "PROPN"; }

// Average gold distance from each dependent tag to its noun head, over the
// original training treebank.
std::map<std::string, double> noun_distances(const Treebank& tb, TagField field) {
  std::map<std::string, std::pair<long long, long long>> acc;  // tag -> (sum, n)
  for (const Sentence& sent : tb.sentences) {
    if (sent.unsupported) continue;
    for (const Token& t : sent.tokens) {
      if (t.head <= 0 || t.head > static_cast<int>(sent.tokens.size())) continue;
      const Token& head = sent.tokens[t.head - 1];
      if (!is_noun(tag_of(head, field))) continue;
      auto& slot = acc[tag_of(t, field)];
      slot.first += std::abs(t.id - t.head);
      slot.second += 1;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [tag, sums] : acc)
    out[tag] = static_cast<double>(sums.first) / static_cast<double>(sums.second);
  return out;
}

// confidence desc, frequency desc, then key/pattern for determinism
bool confidence_before(const Template& a, const Template& b) {
  const long long ca = to_hundredths(a.head_confidence);
  const long long cb = to_hundredths(b.head_confidence);
  if (ca != cb) return ca > cb;
  if (a.frequency != b.frequency) return a.frequency > b.frequency;
  if (a.tags != b.tags) return a.tags < b.tags;
  return serialize(a.head_pattern) < serialize(b.head_pattern);
}

}  // namespace

void MiningConfig::validate() const {
  if (!use_bigrams && !use_trigrams)
    throw MinerError("at least one of bigrams/trigrams must be enabled");
  auto check_pct = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 100.0))
      throw MinerError(std::string(name) + " must be in (0,100]");
  };
  check_pct(head_threshold, "head threshold");
  check_pct(label_threshold, "label threshold");
  if (min_count < 1) throw MinerError("min count must be >= 1");
  if (max_iterations < 1) throw MinerError("max iterations must be >= 1");
  if (batch_size < 1) throw MinerError("batch size must be >= 1");
}

int Template::head_index() const {
  for (size_t i = 0; i < head_pattern.heads.size(); ++i)
    if (head_pattern.heads[i] == kOutside) return static_cast<int>(i);
  return -1;
}

const std::string& tag_of(const Token& t, TagField field) {
  return field == TagField::Upos ? t.upos : t.xpos;
}

std::vector<std::string> sentence_tags(const Sentence& sent, TagField field) {
  std::vector<std::string> tags;
  tags.reserve(sent.tokens.size());
  for (const Token& t : sent.tokens) tags.push_back(tag_of(t, field));
  return tags;
}

PatternCounts count_patterns(const Treebank& treebank, const MiningConfig& config) {
  config.validate();
  PatternCounts counts;
  std::vector<size_t> sizes;
  if (config.use_bigrams) sizes.push_back(2);
  if (config.use_trigrams) sizes.push_back(3);

  for (const Sentence& sent : treebank.sentences) {
    if (sent.unsupported) continue;
    const std::vector<std::string> tags = sentence_tags(sent, config.tag_field);
    for (size_t n : sizes) {
      if (tags.size() < n) continue;
      for (size_t start = 0; start + n <= tags.size(); ++start) {
        auto [hp, lp] = extract_pattern(sent, start, n);
        std::vector<std::string> key(tags.begin() + start, tags.begin() + start + n);
        KeyStats& stats = counts[key];
        stats.total += 1;
        stats.pattern_counts[serialize(hp)] += 1;
        stats.labeled_counts[{serialize(hp), serialize(lp)}] += 1;
      }
    }
  }
  return counts;
}

TemplateStore mine(const Treebank& treebank, const MiningConfig& config) {
  config.validate();
  if (config.mode == MiningMode::Iterative) return mine_iterative(treebank, config);

  const long long head_thr = to_hundredths(config.head_threshold);
  const long long label_thr = to_hundredths(config.label_threshold);

  TemplateStore store;
  store.config = config;
  store.provenance.sentences = static_cast<long long>(treebank.sentences.size());
  store.provenance.words = static_cast<long long>(treebank.word_count());

  const PatternCounts counts = count_patterns(treebank, config);
  for (const auto& [key, stats] : counts) {
    if (stats.total < config.min_count) continue;
    const DominantChoice dom = pick_dominant(stats);
    const HeadPattern head = parse_head_pattern(dom.head_key);
    if (classify(head) != Eligibility::Eligible) continue;
    if (!clears(dom.head_count, stats.total, head_thr)) continue;
    if (!clears(dom.label_count, stats.total, label_thr)) continue;

    Template t;
    t.tags = key;
    t.head_pattern = head;
    t.label_pattern = parse_label_pattern(dom.label_key);
    t.head_confidence = confidence_pct(dom.head_count, stats.total);
    t.label_confidence = confidence_pct(dom.label_count, stats.total);
    t.frequency = stats.total;
    store.templates.push_back(std::move(t));
  }
  return store;
}

TemplateStore mine_iterative(const Treebank& treebank, const MiningConfig& config) {
  config.validate();

  TemplateStore store;
  store.config = config;
  store.config.mode = MiningMode::Iterative;
  store.provenance.sentences = static_cast<long long>(treebank.sentences.size());
  store.provenance.words = static_cast<long long>(treebank.word_count());

  const std::map<std::string, double> dists =
      config.priority == IterativePriority::NounProximity
          ? noun_distances(treebank, config.tag_field)
          : std::map<std::string, double>{};

  auto proximity_score = [&](const Template& t) -> double {
    double sum = 0.0;
    int n = 0;
    for (size_t i = 0; i < t.tags.size(); ++i) {
      if (static_cast<int>(i) == t.head_index()) continue;
      auto it = dists.find(t.tags[i]);
      sum += it == dists.end() ? 1e18 : it->second;
      ++n;
    }
    return n == 0 ? 1e18 : sum / n;
  };

  auto priority_before = [&](const Template& a, const Template& b) {
    if (config.priority == IterativePriority::NounProximity) {
      const bool na = is_noun(a.tags[a.head_index()]);
      const bool nb = is_noun(b.tags[b.head_index()]);
      if (na != nb) return na;
      if (na && nb) {
        const double sa = proximity_score(a);
        const double sb = proximity_score(b);
        if (sa != sb) return sa < sb;
      }
    }
    return confidence_before(a, b);
  };

  MiningConfig bag_config = config;
  bag_config.mode = MiningMode::BagOfRules;

  Treebank working = treebank;
  int next_rank = 0;
  for (int iter = 0; iter < config.max_iterations; ++iter) {
    TemplateStore candidates = mine(working, bag_config);
    if (candidates.empty()) break;
    std::sort(candidates.templates.begin(), candidates.templates.end(),
              priority_before);
    if (static_cast<int>(candidates.templates.size()) > config.batch_size)
      candidates.templates.resize(config.batch_size);

    TemplateStore batch;
    batch.config = config;
    batch.config.mode = MiningMode::Iterative;
    for (Template& t : candidates.templates) {
      t.rank = next_rank++;
      batch.templates.push_back(t);
      store.templates.push_back(std::move(t));
    }

    ReducedTreebank reduced = reduce_gold(working, batch);
    if (reduced.removed_words == 0) break;  // no progress possible
    working = std::move(reduced.treebank);
  }
  return store;
}

namespace {

json config_to_json(const MiningConfig& c) {
  return json{{"head_threshold", c.head_threshold},
              {"label_threshold", c.label_threshold},
              {"bigrams", c.use_bigrams},
              {"trigrams", c.use_trigrams},
              {"min_count", c.min_count},
              {"tag_field", to_string(c.tag_field)},
              {"mode", to_string(c.mode)},
              {"priority", to_string(c.priority)},
              {"max_iterations", c.max_iterations},
              {"batch_size", c.batch_size}};
}

MiningConfig config_from_json(const json& j) {
  MiningConfig c;
  c.head_threshold = j.at("head_threshold").get<double>();
  c.label_threshold = j.at("label_threshold").get<double>();
  c.use_bigrams = j.at("bigrams").get<bool>();
  c.use_trigrams = j.at("trigrams").get<bool>();
  c.min_count = j.at("min_count").get<long long>();
  c.tag_field = tag_field_from(j.at("tag_field").get<std::string>());
  c.mode = mode_from(j.at("mode").get<std::string>());
  c.priority = priority_from(j.at("priority").get<std::string>());
  c.max_iterations = j.at("max_iterations").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  return c;
}

}  // namespace

void save_store(const TemplateStore& store, std::ostream& out) {
  json doc;
  doc["version"] = kStoreVersion;
  doc["config"] = config_to_json(store.config);
  doc["provenance"] = json{{"source", store.provenance.source},
                           {"sentences", store.provenance.sentences},
                           {"words", store.provenance.words}};
  doc["templates"] = json::array();
  for (const Template& t : store.templates) {
    json jt{{"tags", t.tags},
            {"head_pattern", serialize(t.head_pattern)},
            {"label_pattern", serialize(t.label_pattern)},
            {"head_confidence", t.head_confidence},
            {"label_confidence", t.label_confidence},
            {"frequency", t.frequency}};
    if (t.rank >= 0) jt["rank"] = t.rank;
    doc["templates"].push_back(std::move(jt));
  }
  out << doc.dump(2) << '\n';
  if (!out) throw MinerError("template store write failure");
}

void save_store_file(const TemplateStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MinerError("cannot open " + path + " for writing");
  save_store(store, out);
}

TemplateStore load_store(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw MinerError(std::string("malformed template store: ") + e.what());
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kStoreVersion) {
    throw MinerError("unsupported template store version (expected " +
                     std::to_string(kStoreVersion) + ")");
  }
  TemplateStore store;
  try {
    store.config = config_from_json(doc.at("config"));
    const json& prov = doc.at("provenance");
    store.provenance.source = prov.at("source").get<std::string>();
    store.provenance.sentences = prov.at("sentences").get<long long>();
    store.provenance.words = prov.at("words").get<long long>();
    for (const json& jt : doc.at("templates")) {
      Template t;
      t.tags = jt.at("tags").get<std::vector<std::string>>();
      t.head_pattern = parse_head_pattern(jt.at("head_pattern").get<std::string>());
      t.label_pattern = parse_label_pattern(jt.at("label_pattern").get<std::string>());
      t.head_confidence = jt.at("head_confidence").get<double>();
      t.label_confidence = jt.at("label_confidence").get<double>();
      t.frequency = jt.at("frequency").get<long long>();
      if (jt.contains("rank")) t.rank = jt.at("rank").get<int>();
      if (t.tags.size() != t.head_pattern.size() ||
          t.tags.size() != t.label_pattern.labels.size())
        throw MinerError("template arity mismatch for key '" +
                         (t.tags.empty() ? std::string() : t.tags[0]) + " ...'");
      if (classify(t.head_pattern) != Eligibility::Eligible)
        throw MinerError("template '" + serialize(t.head_pattern) +
                         "' is not an eligible head pattern");
      store.templates.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw MinerError(std::string("malformed template store: ") + e.what());
  }
  return store;
}

TemplateStore load_store_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MinerError("cannot open " + path);
  try {
    return load_store(in);
  } catch (const MinerError& e) {
    throw MinerError(path + ": " + e.what());
  }
}

}  // namespace treeduce
