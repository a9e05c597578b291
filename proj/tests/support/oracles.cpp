#include "support/oracles.h"

#include <algorithm>

namespace treeduce::testing {

namespace {

// heads entries: -1 = outside, else fragment index.
std::string serialize_raw(const std::vector<int>& heads, bool external) {
  std::string out;
  for (int h : heads) {
    if (h < 0)
      out += "- ";
    else
      out += std::to_string(h) + ' ';
  }
  out += external ? "true" : "false";
  return out;
}

bool forest_acyclic(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int start = 0; start < n; ++start) {
    int cur = start;
    int steps = 0;
    while (cur >= 0) {
      cur = heads[cur];
      if (++steps > n) return false;
    }
  }
  return true;
}

bool single_head_connected(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int dashes = 0, root = -1;
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0) {
      ++dashes;
      root = i;
    }
  }
  if (dashes != 1) return false;
  for (int i = 0; i < n; ++i) {
    int cur = i, steps = 0;
    while (cur != root) {
      if (cur < 0 || ++steps > n) return false;
      cur = heads[cur];
    }
  }
  return true;
}

// A span pattern can come from a projective tree only if no internal arc
// jumps over a word whose head lies beyond that arc.
bool span_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int d = 0; d < n; ++d) {
    const int h = heads[d];
    if (h < 0) continue;
    const int lo = std::min(d, h), hi = std::max(d, h);
    for (int k = lo + 1; k < hi; ++k)
      if (heads[k] < lo || heads[k] > hi) return false;  // incl. outside (-1)
  }
  return true;
}

}  // namespace

std::map<std::string, int> oracle_pattern_space(int n) {
  std::map<std::string, int> space;
  std::vector<int> pick(n, 0);  // 0 = outside, 1..n-1 = other indices
  while (true) {
    std::vector<int> heads(n);
    for (int i = 0; i < n; ++i) {
      if (pick[i] == 0) {
        heads[i] = -1;
      } else {
        const int other = pick[i] - 1;
        heads[i] = other >= i ? other + 1 : other;
      }
    }
    if (forest_acyclic(heads) && span_projective(heads)) {
      if (single_head_connected(heads)) {
        space[serialize_raw(heads, false)] = 0;
        space[serialize_raw(heads, true)] = 1;
      } else {
        space[serialize_raw(heads, false)] = 2;
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == n - 1) pick[i--] = 0;
    if (i < 0) break;
    ++pick[i];
  }
  return space;
}

std::string oracle_extract(const Sentence& sent, size_t start, size_t n) {
  const int lo = static_cast<int>(start) + 1;
  const int hi = lo + static_cast<int>(n) - 1;
  std::vector<int> heads(n);
  for (size_t i = 0; i < n; ++i) {
    const int h = sent.tokens[start + i].head;
    heads[i] = (h >= lo && h <= hi) ? h - lo : -1;
  }
  bool external = false;
  if (single_head_connected(heads)) {
    for (const Token& u : sent.tokens) {
      if (u.id >= lo && u.id <= hi) continue;
      if (u.head < lo || u.head > hi) continue;
      if (heads[u.head - lo] >= 0) {
        external = true;
        break;
      }
    }
  }
  return serialize_raw(heads, external);
}

bool oracle_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int d1 = 1; d1 <= n; ++d1) {
    const int a1 = std::min(d1, heads[d1 - 1]);
    const int b1 = std::max(d1, heads[d1 - 1]);
    for (int d2 = 1; d2 <= n; ++d2) {
      const int a2 = std::min(d2, heads[d2 - 1]);
      const int b2 = std::max(d2, heads[d2 - 1]);
      if (a1 < a2 && a2 < b1 && b1 < b2) return false;
    }
  }
  return true;
}

std::vector<std::vector<int>> all_trees(int n) {
  std::vector<std::vector<int>> trees;
  std::vector<int> heads(n, 0);
  while (true) {
    int roots = 0;
    bool self = false;
    for (int i = 0; i < n; ++i) {
      if (heads[i] == 0) ++roots;
      if (heads[i] == i + 1) self = true;
    }
    if (!self && roots == 1) {
      bool acyclic = true;
      for (int i = 1; i <= n && acyclic; ++i) {
        int cur = i, steps = 0;
        while (cur != 0) {
          cur = heads[cur - 1];
          if (++steps > n) {
            acyclic = false;
            break;
          }
        }
      }
      if (acyclic) trees.push_back(heads);
    }
    int i = n - 1;
    while (i >= 0 && heads[i] == n) heads[i--] = 0;
    if (i < 0) break;
    ++heads[i];
  }
  return trees;
}

std::set<std::string> oracle_patterns_from_hosts(int n, int host_len) {
  std::set<std::string> seen;
  for (int len = n; len <= host_len; ++len) {
    for (const auto& heads : all_trees(len)) {
      if (!oracle_projective(heads)) continue;
      Sentence sent;
      for (int i = 0; i < len; ++i) {
        Token t;
        t.id = i + 1;
        t.upos = "T";
        t.head = heads[i];
        t.deprel = heads[i] == 0 ? "root" : "dep";
        sent.tokens.push_back(std::move(t));
      }
      for (int start = 0; start + n <= len; ++start)
        seen.insert(oracle_extract(sent, start, n));
    }
  }
  return seen;
}

std::map<std::string, OracleKeyCounts> oracle_count(const Treebank& tb,
                                                    bool bigrams, bool trigrams,
                                                    bool use_xpos) {
  std::map<std::string, OracleKeyCounts> out;
  std::vector<size_t> sizes;
  if (bigrams) sizes.push_back(2);
  if (trigrams) sizes.push_back(3);
  for (const Sentence& sent : tb.sentences) {
    if (sent.unsupported) continue;
    for (size_t n : sizes) {
      if (sent.tokens.size() < n) continue;
      for (size_t start = 0; start + n <= sent.tokens.size(); ++start) {
        std::string key;
        for (size_t i = 0; i < n; ++i) {
          const Token& t = sent.tokens[start + i];
          key += (use_xpos ? t.xpos : t.upos);
          if (i + 1 < n) key += ' ';
        }
        const std::string pattern = oracle_extract(sent, start, n);
        std::string labels;
        const int lo = static_cast<int>(start) + 1;
        const int hi = lo + static_cast<int>(n) - 1;
        for (size_t i = 0; i < n; ++i) {
          const Token& t = sent.tokens[start + i];
          labels += (t.head >= lo && t.head <= hi) ? t.deprel : "-";
          labels += ' ';
        }
        OracleKeyCounts& counts = out[key];
        counts.total += 1;
        counts.patterns[pattern] += 1;
        counts.labeled[pattern + "|" + labels] += 1;
      }
    }
  }
  return out;
}

}  // namespace treeduce::testing
