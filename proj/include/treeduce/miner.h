#ifndef TREEDUCE_MINER_H
#define TREEDUCE_MINER_H

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "treeduce/conllu.h"
#include "treeduce/pattern.h"

namespace treeduce {

class MinerError : public std::runtime_error {
 public:
  explicit MinerError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class TagField { Upos, Xpos };
enum class MiningMode { BagOfRules, Iterative };
enum class IterativePriority { ConfidenceFirst, NounProximity };

struct MiningConfig {
  double head_threshold = 83.0;   // percent, inclusive
  double label_threshold = 83.0;  // percent, inclusive
  bool use_bigrams = true;
  bool use_trigrams = true;
  long long min_count = 1;
  TagField tag_field = TagField::Upos;
  MiningMode mode = MiningMode::BagOfRules;
  IterativePriority priority = IterativePriority::ConfidenceFirst;
  int max_iterations = 1000;
  int batch_size = 1;  // templates appended per iteration (iterative mode)

  void validate() const;
  bool operator==(const MiningConfig&) const = default;
};

struct Template {
  std::vector<std::string> tags;
  HeadPattern head_pattern;
  LabelPattern label_pattern;
  double head_confidence = 0.0;   // percent, rounded to 2 decimals
  double label_confidence = 0.0;  // percent, rounded to 2 decimals
  long long frequency = 0;        // key occurrences in the training data
  int rank = -1;                  // ordinal in iterative mode, -1 otherwise

  size_t size() const { return tags.size(); }
  // Fragment-internal index of the word the parser keeps.
  int head_index() const;
  bool operator==(const Template&) const = default;
};

struct StoreProvenance {
  std::string source;
  long long sentences = 0;
  long long words = 0;
  bool operator==(const StoreProvenance&) const = default;
};

struct TemplateStore {
  std::vector<Template> templates;
  MiningConfig config;
  StoreProvenance provenance;

  bool empty() const { return templates.empty(); }
  bool operator==(const TemplateStore&) const = default;
};

// Raw per-key observation counts.
struct KeyStats {
  long long total = 0;
  // serialized head pattern -> count
  std::map<std::string, long long> pattern_counts;
  // (serialized head pattern, serialized label pattern) -> count
  std::map<std::pair<std::string, std::string>, long long> labeled_counts;
};

using PatternCounts = std::map<std::vector<std::string>, KeyStats>;

const std::string& tag_of(const Token& t, TagField field);
std::vector<std::string> sentence_tags(const Sentence& sent, TagField field);

// One observation per adjacent n-gram of every supported sentence.
PatternCounts count_patterns(const Treebank& treebank, const MiningConfig& config);

// Bag-of-rules mining; dispatches to mine_iterative when config.mode says so.
TemplateStore mine(const Treebank& treebank, const MiningConfig& config);

// Ordered mining: repeatedly mine the working treebank, keep the best
// candidate batch, apply it, and continue on the reduced result.
TemplateStore mine_iterative(const Treebank& treebank, const MiningConfig& config);

void save_store(const TemplateStore& store, std::ostream& out);
void save_store_file(const TemplateStore& store, const std::string& path);
TemplateStore load_store(std::istream& in);
TemplateStore load_store_file(const std::string& path);

}  // namespace treeduce

#endif  // TREEDUCE_MINER_H
