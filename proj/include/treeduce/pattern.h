#ifndef TREEDUCE_PATTERN_H
#define TREEDUCE_PATTERN_H

#include <string>
#include <vector>

#include "treeduce/conllu.h"

namespace treeduce {

// Fragment-internal index of an out-of-scope head ("-" in pattern notation).
constexpr int kOutside = -1;

// Per-word head assignment of a PoS n-gram fragment. heads[i] is the
// fragment-internal index of word i's head, or kOutside when the head lies
// outside the fragment. `external` is true iff the fragment is a
// single-head connected tree and one of its internal dependents has a
// dependent outside the fragment. Non-connected fragments always carry
// external = false: the flag only exists to disqualify otherwise-reusable
// fragments, and folding it keeps extracted patterns inside the
// enumerated space.
struct HeadPattern {
  std::vector<int> heads;
  bool external = false;

  size_t size() const { return heads.size(); }
  bool operator==(const HeadPattern&) const = default;
  auto operator<=>(const HeadPattern&) const = default;
};

// Dependency labels aligned with a head pattern: labels[i] = "-" exactly
// where heads[i] = kOutside.
struct LabelPattern {
  std::vector<std::string> labels;
  bool external = false;

  bool operator==(const LabelPattern&) const = default;
  auto operator<=>(const LabelPattern&) const = default;
};

enum class Eligibility {
  Eligible,
  ExternalDependent,
  NotFullyConnected,
  NonProjective,
};

const char* to_string(Eligibility e);

// "1 - false", "2 2 - false", ...
std::string serialize(const HeadPattern& p);
// "det - false", "mark nsubj - false", ...
std::string serialize(const LabelPattern& p);
HeadPattern parse_head_pattern(const std::string& text);
LabelPattern parse_label_pattern(const std::string& text);

// Reads the gold analysis of the n adjacent tokens starting at 0-based
// `start`. Throws std::out_of_range on a bad span.
std::pair<HeadPattern, LabelPattern> extract_pattern(const Sentence& sent,
                                                     size_t start, size_t n);

Eligibility classify(const HeadPattern& pattern);

struct PatternEnumeration {
  std::vector<HeadPattern> connected_internal;  // single head, external = false
  std::vector<HeadPattern> connected_external;  // single head, external = true
  std::vector<HeadPattern> not_connected;

  size_t total() const {
    return connected_internal.size() + connected_external.size() +
           not_connected.size();
  }
};

// All head patterns realizable as a span of a projective gold tree,
// partitioned by class. n must be 2 or 3.
PatternEnumeration enumerate_patterns(int n);

// True iff exactly one head is kOutside and every other word reaches it
// through fragment-internal arcs.
bool is_connected_single_head(const std::vector<int>& heads);

// Projectivity of the fragment-internal arcs alone: no internal arc may
// span a word whose own head lies outside that arc's interval.
bool internal_arcs_projective(const std::vector<int>& heads);

// Whole-sentence projectivity for a single-rooted tree (1-based heads,
// 0 = root): every subtree must cover a contiguous interval.
bool is_projective_tree(const std::vector<int>& heads);

}  // namespace treeduce

#endif  // TREEDUCE_PATTERN_H
