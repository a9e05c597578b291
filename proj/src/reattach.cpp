#include "treeduce/reattach.h"

#include <algorithm>

namespace treeduce {

namespace {

Sentence reattach_sentence(const Sentence& parsed, const SentenceReduction& rec,
                           size_t ordinal) {
  auto fail = [&](const std::string& what) {
    throw ReattachError("sentence " + std::to_string(ordinal) + ": " + what);
  };

  if (rec.unsupported) return parsed;  // passed through untouched end to end

  const size_t m = rec.red_to_orig.size();
  if (parsed.tokens.size() != m)
    fail("parse has " + std::to_string(parsed.tokens.size()) +
         " tokens, reduction record expects " + std::to_string(m));

  const size_t n = rec.original_len;
  std::vector<Token> slots(n);
  std::vector<bool> filled(n, false);

  // Surviving tokens: restore original positions, remap predicted heads.
  for (size_t j = 0; j < m; ++j) {
    Token t = parsed.tokens[j];
    const int orig = rec.red_to_orig[j];
    if (orig < 1 || orig > static_cast<int>(n)) fail("corrupt position map");
    t.id = orig;
    if (t.head > 0) {
      if (t.head > static_cast<int>(m))
        fail("predicted head " + std::to_string(t.head) + " of reduced token " +
             std::to_string(j + 1) + " is out of range");
      t.head = rec.red_to_orig[t.head - 1];
    }
    slots[orig - 1] = std::move(t);
    filled[orig - 1] = true;
  }

  // Removed tokens: original columns, template-prescribed arcs.
  for (const Match& match : rec.matches) {
    for (size_t i = 0; i < match.span.size(); ++i) {
      const int pos = match.span[i];
      if (pos == match.head_pos) continue;
      if (pos < 1 || pos > static_cast<int>(n)) fail("corrupt match span");
      auto it = std::lower_bound(
          rec.removed_tokens.begin(), rec.removed_tokens.end(), pos,
          [](const Token& t, int p) { return t.id < p; });
      if (it == rec.removed_tokens.end() || it->id != pos)
        fail("no stored token for removed position " + std::to_string(pos));
      Token t = *it;
      const int head_idx = match.head_pattern.heads[i];
      if (head_idx < 0 || head_idx >= static_cast<int>(match.span.size()))
        fail("corrupt head pattern");
      t.head = match.span[head_idx];
      t.deprel = match.label_pattern.labels[i];
      slots[pos - 1] = std::move(t);
      filled[pos - 1] = true;
    }
  }

  for (size_t i = 0; i < n; ++i)
    if (!filled[i])
      fail("position " + std::to_string(i + 1) +
           " is neither surviving nor recorded as removed");

  Sentence out;
  out.comments = parsed.comments;
  out.tokens = std::move(slots);
  for (const MwtRange& r : parsed.mwt_ranges) {
    if (r.start_id < 1 || r.end_id > static_cast<int>(m) || r.start_id > r.end_id)
      fail("corrupt multiword-token range in parse");
    MwtRange mapped = r;
    mapped.start_id = rec.red_to_orig[r.start_id - 1];
    mapped.end_id = rec.red_to_orig[r.end_id - 1];
    out.mwt_ranges.push_back(std::move(mapped));
  }
  for (const MwtRange& r : rec.dropped_mwt) out.mwt_ranges.push_back(r);
  std::sort(out.mwt_ranges.begin(), out.mwt_ranges.end(),
            [](const MwtRange& a, const MwtRange& b) {
              return a.start_id != b.start_id ? a.start_id < b.start_id
                                              : a.end_id < b.end_id;
            });
  return out;
}

}  // namespace

Treebank reattach(const Treebank& parsed_reduced,
                  const std::vector<SentenceReduction>& records) {
  if (parsed_reduced.sentences.size() != records.size())
    throw ReattachError("parse has " +
                        std::to_string(parsed_reduced.sentences.size()) +
                        " sentences, reduction record has " +
                        std::to_string(records.size()));
  Treebank out;
  out.sentences.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i)
    out.sentences.push_back(
        reattach_sentence(parsed_reduced.sentences[i], records[i], i + 1));
  return out;
}

}  // namespace treeduce
