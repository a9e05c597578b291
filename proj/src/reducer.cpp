#include "treeduce/reducer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace treeduce {

namespace {

using json = nlohmann::ordered_json;

constexpr int kRecordVersion = 1;

using AcceptFn = std::function<bool(const Match&)>;

Match make_match(const TemplateStore& store, int template_index,
                 std::vector<int> span) {
  const Template& t = store.templates[template_index];
  Match m;
  m.template_index = template_index;
  m.tags = t.tags;
  m.head_pattern = t.head_pattern;
  m.label_pattern = t.label_pattern;
  m.span = std::move(span);
  m.head_pos = m.span[t.head_index()];
  for (int pos : m.span)
    if (pos != m.head_pos) m.removed.push_back(pos);
  return m;
}

// Bag-of-rules: all candidate spans, then greedy selection ordered by
// (head confidence, n-gram length, leftmost, template index).
std::vector<Match> match_bag(const std::vector<std::string>& tags,
                             const TemplateStore& store, const AcceptFn& accept) {
  struct Candidate {
    long long conf = 0;  // hundredths of a percent
    size_t n = 0;
    size_t start = 0;
    int template_index = -1;
  };
  std::vector<Candidate> candidates;
  for (size_t ti = 0; ti < store.templates.size(); ++ti) {
    const Template& t = store.templates[ti];
    const size_t n = t.size();
    if (tags.size() < n) continue;
    for (size_t s = 0; s + n <= tags.size(); ++s) {
      if (std::equal(t.tags.begin(), t.tags.end(), tags.begin() + s))
        candidates.push_back({std::llround(t.head_confidence * 100.0), n, s,
                              static_cast<int>(ti)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.conf != b.conf) return a.conf > b.conf;
              if (a.n != b.n) return a.n > b.n;
              if (a.start != b.start) return a.start < b.start;
              return a.template_index < b.template_index;
            });

  std::vector<bool> taken(tags.size(), false);
  std::vector<Match> out;
  for (const Candidate& c : candidates) {
    bool free = true;
    for (size_t i = c.start; i < c.start + c.n; ++i)
      if (taken[i]) {
        free = false;
        break;
      }
    if (!free) continue;
    std::vector<int> span;
    for (size_t i = c.start; i < c.start + c.n; ++i)
      span.push_back(static_cast<int>(i) + 1);
    Match m = make_match(store, c.template_index, std::move(span));
    if (!accept(m)) continue;
    for (size_t i = c.start; i < c.start + c.n; ++i) taken[i] = true;
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(),
            [](const Match& a, const Match& b) { return a.span[0] < b.span[0]; });
  return out;
}

// Iterative: rank order over the shrinking working sequence; each template
// is rescanned until it stops firing before the next one runs.
std::vector<Match> match_iterative(const std::vector<std::string>& tags,
                                   const TemplateStore& store,
                                   const AcceptFn& accept) {
  std::vector<int> order(store.templates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return store.templates[a].rank < store.templates[b].rank;
  });

  std::vector<int> work(tags.size());  // original positions, 1-based
  for (size_t i = 0; i < work.size(); ++i) work[i] = static_cast<int>(i) + 1;

  std::vector<Match> out;
  for (int ti : order) {
    const Template& t = store.templates[ti];
    const size_t n = t.size();
    bool fired = true;
    while (fired) {
      fired = false;
      std::vector<bool> drop(work.size(), false);
      size_t i = 0;
      while (i + n <= work.size()) {
        bool hit = true;
        for (size_t k = 0; k < n; ++k)
          if (tags[work[i + k] - 1] != t.tags[k]) {
            hit = false;
            break;
          }
        if (!hit) {
          ++i;
          continue;
        }
        std::vector<int> span(work.begin() + i, work.begin() + i + n);
        Match m = make_match(store, ti, std::move(span));
        if (!accept(m)) {
          ++i;
          continue;
        }
        const int head_pos = m.head_pos;
        out.push_back(std::move(m));
        fired = true;
        for (size_t k = 0; k < n; ++k)
          if (work[i + k] != head_pos) drop[i + k] = true;
        i += n;
      }
      if (fired) {
        std::vector<int> next;
        next.reserve(work.size());
        for (size_t k = 0; k < work.size(); ++k)
          if (!drop[k]) next.push_back(work[k]);
        work = std::move(next);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Match& a, const Match& b) { return a.span[0] < b.span[0]; });
  return out;
}

std::vector<Match> find_matches_impl(const std::vector<std::string>& tags,
                                     const TemplateStore& store,
                                     const AcceptFn& accept) {
  if (store.empty() || tags.size() < 2) return {};
  if (store.config.mode == MiningMode::Iterative)
    return match_iterative(tags, store, accept);
  return match_bag(tags, store, accept);
}

// A match agrees with gold iff every non-head word has exactly the head and
// label the template prescribes and no removed word has a dependent outside
// the span.
bool match_agrees_with_gold(const Sentence& sent, const Match& m) {
  const size_t n = m.span.size();
  for (size_t i = 0; i < n; ++i) {
    const int pos = m.span[i];
    const Token& tok = sent.tokens[pos - 1];
    if (m.head_pattern.heads[i] == kOutside) continue;  // the fragment head
    if (tok.head != m.span[m.head_pattern.heads[i]]) return false;
    if (tok.deprel != m.label_pattern.labels[i]) return false;
  }
  for (int pos : m.removed) {
    for (const Token& u : sent.tokens) {
      if (u.head != pos) continue;
      if (std::find(m.span.begin(), m.span.end(), u.id) == m.span.end())
        return false;
    }
  }
  return true;
}

// Reassigns heads of surviving tokens so that the reduced sentence is again
// a single-rooted tree. Removed tokens are represented by their fragment
// head; when that collapses an arc onto itself the original head chain is
// climbed, and any cycle among repaired heads is broken by climbing past
// the offending targets. Requires the input to be a single-rooted tree.
//
// Returns new_head[pos] for every original position (0 = root); removed
// positions carry 0 and are ignored by the caller.
std::vector<int> repair_heads(const Sentence& sent,
                              const std::vector<bool>& removed,
                              const std::vector<int>& fragment_head_of) {
  const int n = static_cast<int>(sent.tokens.size());
  auto gold_head = [&](int pos) { return sent.tokens[pos - 1].head; };
  auto surv = [&](int pos) { return removed[pos] ? fragment_head_of[pos] : pos; };

  std::vector<int> new_head(n + 1, 0);
  std::vector<int> anchor(n + 1, 0);  // original token that produced new_head

  for (int s = 1; s <= n; ++s) {
    if (removed[s]) continue;
    int h = gold_head(s);
    while (true) {
      if (h == 0) {
        new_head[s] = 0;
        anchor[s] = 0;
        break;
      }
      const int t = surv(h);
      if (t != s) {
        new_head[s] = t;
        anchor[s] = h;
        break;
      }
      h = gold_head(h);
    }
  }

  // Cycle detection over the repaired head function (survivors only).
  auto find_cycle = [&]() -> std::vector<int> {
    std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on path, 2 done
    for (int s = 1; s <= n; ++s) {
      if (removed[s] || state[s] != 0) continue;
      std::vector<int> path;
      int cur = s;
      while (cur != 0 && state[cur] == 0) {
        state[cur] = 1;
        path.push_back(cur);
        cur = new_head[cur];
      }
      if (cur != 0 && state[cur] == 1) {
        std::vector<int> cycle;
        size_t at = 0;
        while (path[at] != cur) ++at;
        cycle.assign(path.begin() + at, path.end());
        return cycle;
      }
      for (int p : path) state[p] = 2;
    }
    return {};
  };

  while (true) {
    std::vector<int> cycle = find_cycle();
    if (cycle.empty()) break;

    // Prefer breaking an edge that was already a repair (anchor removed);
    // the smallest such position keeps the choice deterministic.
    std::sort(cycle.begin(), cycle.end());
    int star = cycle[0];
    for (int c : cycle) {
      if (anchor[c] != 0 && removed[anchor[c]]) {
        star = c;
        break;
      }
    }
    std::vector<bool> in_cycle(n + 1, false);
    for (int c : cycle) in_cycle[c] = true;

    int h = gold_head(star);
    while (true) {
      if (h == 0) {
        new_head[star] = 0;
        anchor[star] = 0;
        break;
      }
      const int t = surv(h);
      if (t != star && !in_cycle[t]) {
        new_head[star] = t;
        anchor[star] = h;
        break;
      }
      h = gold_head(h);
    }
  }
  return new_head;
}

struct SentenceOutcome {
  Sentence reduced;
  SentenceReduction record;
};

SentenceOutcome reduce_sentence(const Sentence& sent, const TemplateStore& store,
                                bool strict, size_t ordinal) {
  SentenceOutcome out;
  out.record.original_len = sent.tokens.size();
  out.record.unsupported = sent.unsupported;

  const int n = static_cast<int>(sent.tokens.size());
  auto identity = [&]() {
    out.reduced = sent;
    out.record.red_to_orig.resize(sent.tokens.size());
    for (int i = 0; i < n; ++i) out.record.red_to_orig[i] = i + 1;
    return std::move(out);
  };

  if (sent.unsupported || n < 2 || store.empty()) return identity();

  const bool fully_annotated =
      std::all_of(sent.tokens.begin(), sent.tokens.end(),
                  [](const Token& t) { return t.has_head(); });
  const bool tree_input = fully_annotated && is_single_rooted_tree(sent);

  AcceptFn accept = [](const Match&) { return true; };
  if (strict) {
    if (!tree_input)
      throw ReducerError("sentence " + std::to_string(ordinal) +
                         ": strict reduction needs gold trees");
    accept = [&sent](const Match& m) { return match_agrees_with_gold(sent, m); };
  }

  const std::vector<std::string> tags = sentence_tags(sent, store.config.tag_field);
  std::vector<Match> matches = find_matches_impl(tags, store, accept);
  if (matches.empty()) return identity();

  std::vector<bool> removed(n + 1, false);
  std::vector<int> fragment_head_of(n + 1, 0);
  for (const Match& m : matches) {
    for (int pos : m.removed) {
      removed[pos] = true;
      fragment_head_of[pos] = m.head_pos;
    }
  }

  std::vector<int> orig_to_red(n + 1, 0);
  for (int pos = 1; pos <= n; ++pos) {
    if (removed[pos]) continue;
    out.record.red_to_orig.push_back(pos);
    orig_to_red[pos] = static_cast<int>(out.record.red_to_orig.size());
  }

  std::vector<int> new_head;
  if (tree_input) new_head = repair_heads(sent, removed, fragment_head_of);

  out.reduced.comments = sent.comments;
  for (int pos = 1; pos <= n; ++pos) {
    const Token& orig = sent.tokens[pos - 1];
    if (removed[pos]) {
      Token gone = orig;
      gone.head = kNoHead;  // the template supplies the arc at reattachment
      gone.deprel = "_";
      out.record.removed_tokens.push_back(std::move(gone));
      continue;
    }
    Token kept = orig;
    kept.id = orig_to_red[pos];
    if (tree_input) {
      kept.head = new_head[pos] == 0 ? 0 : orig_to_red[new_head[pos]];
      if (kept.head == 0 && orig.head != 0) kept.deprel = "root";
    } else if (orig.head > 0) {
      // Cannot promote without a tree; drop the dangling arc.
      kept.head = removed[orig.head] ? kNoHead : orig_to_red[orig.head];
      if (kept.head == kNoHead) kept.deprel = "_";
    }
    out.reduced.tokens.push_back(std::move(kept));
  }

  for (const MwtRange& r : sent.mwt_ranges) {
    bool intact = true;
    for (int pos = r.start_id; pos <= r.end_id; ++pos)
      if (pos < 1 || pos > n || removed[pos]) {
        intact = false;
        break;
      }
    if (intact) {
      MwtRange mapped = r;
      mapped.start_id = orig_to_red[r.start_id];
      mapped.end_id = orig_to_red[r.end_id];
      out.reduced.mwt_ranges.push_back(std::move(mapped));
    } else {
      out.record.dropped_mwt.push_back(r);
    }
  }

  out.record.matches = std::move(matches);
  return out;
}

ReducedTreebank reduce_impl(const Treebank& treebank, const TemplateStore& store,
                            bool strict) {
  ReducedTreebank out;
  out.records.reserve(treebank.sentences.size());
  for (size_t i = 0; i < treebank.sentences.size(); ++i) {
    SentenceOutcome one = reduce_sentence(treebank.sentences[i], store, strict, i + 1);
    out.original_words += static_cast<long long>(one.record.original_len);
    out.removed_words += static_cast<long long>(one.record.removed_tokens.size());
    out.treebank.sentences.push_back(std::move(one.reduced));
    out.records.push_back(std::move(one.record));
  }
  return out;
}

}  // namespace

int SentenceReduction::orig_to_red(int orig_pos) const {
  auto it = std::lower_bound(red_to_orig.begin(), red_to_orig.end(), orig_pos);
  if (it == red_to_orig.end() || *it != orig_pos) return 0;
  return static_cast<int>(it - red_to_orig.begin()) + 1;
}

std::vector<Match> find_matches(const std::vector<std::string>& tags,
                                const TemplateStore& store) {
  return find_matches_impl(tags, store, [](const Match&) { return true; });
}

ReducedTreebank reduce_input(const Treebank& treebank, const TemplateStore& store) {
  return reduce_impl(treebank, store, false);
}

ReducedTreebank reduce_gold(const Treebank& treebank, const TemplateStore& store,
                            bool strict) {
  validate_gold_trees(treebank);
  ReducedTreebank out = reduce_impl(treebank, store, strict);
  for (size_t i = 0; i < out.treebank.sentences.size(); ++i) {
    const Sentence& sent = out.treebank.sentences[i];
    if (sent.unsupported || sent.tokens.empty()) continue;
    if (!is_single_rooted_tree(sent))
      throw ReducerError("internal: reduced sentence " + std::to_string(i + 1) +
                         " is not a tree");
  }
  return out;
}

namespace {

json token_to_json(const Token& t) {
  return json{{"id", t.id},       {"form", t.form},   {"lemma", t.lemma},
              {"upos", t.upos},   {"xpos", t.xpos},   {"feats", t.feats},
              {"deps", t.deps},   {"misc", t.misc}};
}

Token token_from_json(const json& j) {
  Token t;
  t.id = j.at("id").get<int>();
  t.form = j.at("form").get<std::string>();
  t.lemma = j.at("lemma").get<std::string>();
  t.upos = j.at("upos").get<std::string>();
  t.xpos = j.at("xpos").get<std::string>();
  t.feats = j.at("feats").get<std::string>();
  t.deps = j.at("deps").get<std::string>();
  t.misc = j.at("misc").get<std::string>();
  t.head = kNoHead;
  t.deprel = "_";
  return t;
}

}  // namespace

void save_records(const std::vector<SentenceReduction>& records, std::ostream& out) {
  json doc;
  doc["version"] = kRecordVersion;
  doc["sentences"] = json::array();
  for (const SentenceReduction& r : records) {
    json js;
    js["original_len"] = r.original_len;
    js["unsupported"] = r.unsupported;
    js["red_to_orig"] = r.red_to_orig;
    js["matches"] = json::array();
    for (const Match& m : r.matches) {
      js["matches"].push_back(json{{"template", m.template_index},
                                   {"tags", m.tags},
                                   {"head_pattern", serialize(m.head_pattern)},
                                   {"label_pattern", serialize(m.label_pattern)},
                                   {"span", m.span},
                                   {"head", m.head_pos},
                                   {"removed", m.removed}});
    }
    js["removed_tokens"] = json::array();
    for (const Token& t : r.removed_tokens)
      js["removed_tokens"].push_back(token_to_json(t));
    js["dropped_mwt"] = json::array();
    for (const MwtRange& w : r.dropped_mwt)
      js["dropped_mwt"].push_back(
          json{{"start", w.start_id}, {"end", w.end_id}, {"rest", w.rest}});
    doc["sentences"].push_back(std::move(js));
  }
  out << doc.dump() << '\n';
  if (!out) throw ReducerError("sidecar write failure");
}

void save_records_file(const std::vector<SentenceReduction>& records,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReducerError("cannot open " + path + " for writing");
  save_records(records, out);
}

std::vector<SentenceReduction> load_records(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ReducerError(std::string("malformed sidecar: ") + e.what());
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kRecordVersion)
    throw ReducerError("unsupported sidecar version (expected " +
                       std::to_string(kRecordVersion) + ")");
  std::vector<SentenceReduction> records;
  try {
    for (const json& js : doc.at("sentences")) {
      SentenceReduction r;
      r.original_len = js.at("original_len").get<size_t>();
      r.unsupported = js.at("unsupported").get<bool>();
      r.red_to_orig = js.at("red_to_orig").get<std::vector<int>>();
      for (const json& jm : js.at("matches")) {
        Match m;
        m.template_index = jm.at("template").get<int>();
        m.tags = jm.at("tags").get<std::vector<std::string>>();
        m.head_pattern = parse_head_pattern(jm.at("head_pattern").get<std::string>());
        m.label_pattern = parse_label_pattern(jm.at("label_pattern").get<std::string>());
        m.span = jm.at("span").get<std::vector<int>>();
        m.head_pos = jm.at("head").get<int>();
        m.removed = jm.at("removed").get<std::vector<int>>();
        r.matches.push_back(std::move(m));
      }
      for (const json& jt : js.at("removed_tokens"))
        r.removed_tokens.push_back(token_from_json(jt));
      for (const json& jw : js.at("dropped_mwt")) {
        MwtRange w;
        w.start_id = jw.at("start").get<int>();
        w.end_id = jw.at("end").get<int>();
        w.rest = jw.at("rest").get<std::string>();
        r.dropped_mwt.push_back(std::move(w));
      }
      records.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ReducerError(std::string("malformed sidecar: ") + e.what());
  }
  return records;
}

std::vector<SentenceReduction> load_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReducerError("cannot open " + path);
  try {
    return load_records(in);
  } catch (const ReducerError& e) {
    throw ReducerError(path + ": " + e.what());
  }
}

}  // namespace treeduce
