#ifndef TREEDUCE_CONLLU_H
#define TREEDUCE_CONLLU_H

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace treeduce {

// Head value of an unannotated token ("_" in the HEAD column).
constexpr int kNoHead = -1;

class ConlluError : public std::runtime_error {
 public:
  explicit ConlluError(const std::string& msg) : std::runtime_error(msg) {}
};

// One syntactic word. FEATS, DEPS and MISC are kept as opaque strings so
// untouched files round-trip byte-identically.
struct Token {
  int id = 0;                 // 1-based position among syntactic words
  std::string form = "_";
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::string feats = "_";
  int head = kNoHead;         // 0 = root, kNoHead = unannotated
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  bool has_head() const { return head >= 0; }
  bool operator==(const Token&) const = default;
};

// Multiword-token range line ("3-4<TAB>du<TAB>_..."). `rest` holds columns
// 2..10 verbatim; only the id range is ever rewritten.
struct MwtRange {
  int start_id = 0;
  int end_id = 0;
  std::string rest;

  bool operator==(const MwtRange&) const = default;
};

struct Sentence {
  std::vector<std::string> comments;  // "#"-lines, verbatim, in order
  std::vector<Token> tokens;
  std::vector<MwtRange> mwt_ranges;
  // Sentences containing empty nodes ("1.1" ids) are not modeled; they are
  // carried through every stage verbatim via raw_lines and never reduced.
  bool unsupported = false;
  std::vector<std::string> raw_lines;

  size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::vector<Sentence> sentences;

  size_t word_count() const;
  bool operator==(const Treebank&) const = default;
};

struct ReadOptions {
  // Reject sentences whose annotations are not a single-rooted tree.
  // Parser outputs may legitimately be non-trees, so this is opt-in.
  bool require_gold_trees = false;
};

Treebank read_conllu(std::istream& in, const ReadOptions& opts = {});
Treebank read_conllu_file(const std::string& path, const ReadOptions& opts = {});

void write_conllu(const Treebank& tb, std::ostream& out);
void write_conllu_file(const Treebank& tb, const std::string& path);

// Checks id sequence, head range, single root and acyclicity on every
// annotated sentence; throws ConlluError naming the first bad sentence.
void validate_gold_trees(const Treebank& tb);

// True iff every token has a head, exactly one head is 0, and head links
// are acyclic. Unsupported sentences are skipped by callers, not here.
bool is_single_rooted_tree(const Sentence& sent);

}  // namespace treeduce

#endif  // TREEDUCE_CONLLU_H
