#ifndef TREEDUCE_REDUCER_H
#define TREEDUCE_REDUCER_H

#include <iosfwd>
#include <string>
#include <vector>

#include "treeduce/conllu.h"
#include "treeduce/miner.h"

namespace treeduce {

class ReducerError : public std::runtime_error {
 public:
  explicit ReducerError(const std::string& msg) : std::runtime_error(msg) {}
};

// One accepted fragment occurrence. Positions are 1-based ids in the
// *original* sentence. In bag-of-rules mode the span is contiguous; in
// iterative mode it is contiguous in the working sequence only.
struct Match {
  int template_index = -1;
  std::vector<std::string> tags;
  HeadPattern head_pattern;
  LabelPattern label_pattern;
  std::vector<int> span;     // ascending original positions, |span| = n
  int head_pos = 0;          // original position of the fragment head
  std::vector<int> removed;  // span minus head_pos, ascending

  bool operator==(const Match&) const = default;
};

// Everything needed to splice a sentence's fragments back after parsing.
struct SentenceReduction {
  size_t original_len = 0;
  bool unsupported = false;
  std::vector<Match> matches;
  std::vector<int> red_to_orig;        // reduced position (1-based) -> original
  std::vector<Token> removed_tokens;   // original columns, ascending by id
  std::vector<MwtRange> dropped_mwt;   // ranges that covered removed words

  // 0 when the original position was removed.
  int orig_to_red(int orig_pos) const;
  bool operator==(const SentenceReduction&) const = default;
};

struct ReducedTreebank {
  Treebank treebank;
  std::vector<SentenceReduction> records;
  long long original_words = 0;
  long long removed_words = 0;

  double reduction_pct() const {
    return original_words == 0
               ? 0.0
               : 100.0 * static_cast<double>(removed_words) /
                     static_cast<double>(original_words);
  }
};

// Accepted matches for one sentence's tag sequence. Bag-of-rules stores
// resolve overlaps by (head confidence, n-gram length, leftmost span);
// iterative stores apply templates in rank order over the shrinking
// working sequence, rescanning after each pass.
std::vector<Match> find_matches(const std::vector<std::string>& tags,
                                const TemplateStore& store);

// Blind reduction: matches are accepted on tags alone. Present head fields
// are remapped; heads that pointed at a removed word are repaired by
// promotion to the fragment head (climbing the original head chain when
// a fragment swallowed its own context).
ReducedTreebank reduce_input(const Treebank& treebank, const TemplateStore& store);

// Training-set reduction: requires gold trees and guarantees every reduced
// sentence is again a single-rooted tree. With strict = true, matches that
// disagree with the gold analysis are skipped instead of repaired.
ReducedTreebank reduce_gold(const Treebank& treebank, const TemplateStore& store,
                            bool strict = false);

// Sidecar persistence, keyed by sentence ordinal.
void save_records(const std::vector<SentenceReduction>& records, std::ostream& out);
void save_records_file(const std::vector<SentenceReduction>& records,
                       const std::string& path);
std::vector<SentenceReduction> load_records(std::istream& in);
std::vector<SentenceReduction> load_records_file(const std::string& path);

}  // namespace treeduce

#endif  // TREEDUCE_REDUCER_H
